//! Learning leaves, split evaluation and split execution.

use super::split::{attribute_split, hoeffding_bound, AttributeSplit, SplitTest};
use super::stats::{ClassDistribution, NodeStatistics};
use super::{CounterMode, InfoGainMode, StrategyConfig};
use crate::streams::{Instance, Schema};

/// A leaf that accumulates statistics and decides when to split.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningLeaf {
    pub stats: NodeStatistics,
    pub class_dist: ClassDistribution,
    /// Instances (not weight) seen since creation.
    pub node_time: u64,
    /// Value of the evaluation counter (weight or node time) at the last
    /// split evaluation, or at creation.
    pub counter_at_last_eval: f64,
    /// Nominal attributes split on along the path from the root.
    pub used_attributes: Vec<bool>,
    /// Weight absorbed since creation, excluding inherited class mass.
    pub observed_weight: f64,
    gain_sums: Vec<f64>,
    evaluations: u64,
    buffer: Option<Vec<Instance>>,
}

impl LearningLeaf {
    pub fn new(schema: &Schema, used_attributes: Vec<bool>, class_dist: ClassDistribution, eidetic: bool, cadence: CounterMode) -> Self {
        let mut leaf = Self {
            stats: NodeStatistics::new(schema),
            gain_sums: vec![0.0; schema.attribute_count()],
            evaluations: 0,
            buffer: eidetic.then(Vec::new),
            class_dist,
            node_time: 0,
            counter_at_last_eval: 0.0,
            used_attributes,
            observed_weight: 0.0,
        };
        leaf.counter_at_last_eval = leaf.counter(cadence);
        leaf
    }

    /// Fresh root leaf.
    pub fn root(schema: &Schema, eidetic: bool, cadence: CounterMode) -> Self {
        let used = vec![false; schema.attribute_count()];
        Self::new(schema, used, ClassDistribution::zeros(schema.class_count()), eidetic, cadence)
    }

    /// Trains on one instance with the given weight.
    pub fn learn(&mut self, instance: &Instance, weight: f64) {
        self.node_time += 1;
        self.absorb(instance, weight);
    }

    fn absorb(&mut self, instance: &Instance, weight: f64) {
        self.stats.observe(instance, weight);
        self.observed_weight += weight;
        self.class_dist.add(instance.class_label, weight);
        if let Some(buf) = self.buffer.as_mut() {
            let mut stored = instance.clone();
            stored.weight = weight;
            buf.push(stored);
        }
    }

    pub fn counter(&self, mode: CounterMode) -> f64 {
        match mode {
            CounterMode::WeightSeen => self.class_dist.total(),
            CounterMode::NodeTime => self.node_time as f64,
        }
    }

    /// True when the evaluation counter advanced by a grace period since the
    /// last evaluation and the leaf has seen more than one class.
    pub fn wants_evaluation(&self, cadence: CounterMode, grace_period: u64) -> bool {
        self.counter(cadence) - self.counter_at_last_eval >= grace_period as f64 && !self.class_dist.is_pure()
    }

    /// Stored instances in eidetic mode.
    pub fn buffer(&self) -> Option<&[Instance]> {
        self.buffer.as_deref()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn is_eidetic(&self) -> bool {
        self.buffer.is_some()
    }

    /// Clears statistics, class distribution, counters and stored instances.
    pub fn eviscerate(&mut self) {
        self.stats.clear();
        self.class_dist.clear();
        self.node_time = 0;
        self.observed_weight = 0.0;
        self.counter_at_last_eval = 0.0;
        self.gain_sums.iter_mut().for_each(|g| *g = 0.0);
        self.evaluations = 0;
        if let Some(buf) = self.buffer.as_mut() {
            buf.clear();
        }
    }
}

/// A split candidate: an attribute or the null split (keep the leaf).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    Attribute(usize),
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitAction {
    NoSplit,
    Split,
    Resplit,
    Eviscerate,
}

/// Merit of one candidate as seen by the decision rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateMerit {
    pub candidate: Candidate,
    pub merit: f64,
    /// Nominal attribute already used on the path to the leaf.
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitDecision {
    pub best: Candidate,
    pub second: Candidate,
    pub best_merit: f64,
    pub second_merit: f64,
    pub epsilon: f64,
    pub action: SplitAction,
    /// Test and branch distributions of the best attribute, when it has one.
    pub split: Option<AttributeSplit>,
}

fn rank_key(c: &CandidateMerit) -> (usize, usize) {
    match c.candidate {
        Candidate::Attribute(i) => (0, i),
        Candidate::Null => (1, 0),
    }
}

/// Ranks candidates and applies the split rule. Ties in merit go to the
/// lowest attribute index; the null split ranks after attributes of equal
/// merit. A null split is always among the candidates; when it is the only
/// one it also stands in as the runner-up.
pub fn decide(merits: &[CandidateMerit], epsilon: f64, tau: f64, config: &StrategyConfig) -> (CandidateMerit, CandidateMerit, SplitAction) {
    let null = CandidateMerit { candidate: Candidate::Null, merit: 0.0, used: false };
    let mut ranked: Vec<CandidateMerit> = merits.iter().copied().filter(|m| m.candidate != Candidate::Null).collect();
    ranked.push(null);
    ranked.sort_by(|a, b| b.merit.total_cmp(&a.merit).then(rank_key(a).cmp(&rank_key(b))));
    let best = ranked[0];
    let second = ranked.get(1).copied().unwrap_or(null);
    let action = if best.candidate == Candidate::Null || !(best.merit - second.merit > epsilon || epsilon < tau) {
        SplitAction::NoSplit
    } else if best.used {
        if config.allow_resplit {
            SplitAction::Resplit
        } else if config.eviscerate_on_used_best {
            SplitAction::Eviscerate
        } else {
            SplitAction::NoSplit
        }
    } else {
        SplitAction::Split
    };
    (best, second, action)
}

/// Runs one split evaluation at `leaf`. `config.counter_mode` picks the
/// Hoeffding sample size for instantaneous merits; `cadence` is the counter
/// the grace period is measured on.
pub fn evaluate_split_with(leaf: &mut LearningLeaf, config: &StrategyConfig, cadence: CounterMode) -> SplitDecision {
    let attrs = leaf.used_attributes.len();
    let may_reuse = config.allow_resplit || config.eviscerate_on_used_best;
    leaf.evaluations += 1;
    let mut splits: Vec<Option<AttributeSplit>> = vec![None; attrs];
    let mut merits = Vec::with_capacity(attrs + 1);
    for i in 0..attrs {
        let used = leaf.used_attributes[i];
        if used && !may_reuse {
            continue;
        }
        let split = attribute_split(&leaf.stats, &leaf.class_dist, i);
        let gain = split.as_ref().map_or(0.0, |s| s.gain);
        leaf.gain_sums[i] += gain;
        let merit = match config.infogain_mode {
            InfoGainMode::InstantaneousOverExamples => gain,
            InfoGainMode::AveragedOverEvaluations => leaf.gain_sums[i] / leaf.evaluations as f64,
        };
        if split.is_some() {
            merits.push(CandidateMerit { candidate: Candidate::Attribute(i), merit, used });
        }
        splits[i] = split;
    }
    let n = match config.infogain_mode {
        InfoGainMode::InstantaneousOverExamples => leaf.counter(config.counter_mode),
        InfoGainMode::AveragedOverEvaluations => leaf.evaluations as f64,
    };
    let range = (leaf.stats.class_count() as f64).log2();
    let epsilon = hoeffding_bound(range, config.delta, n).unwrap_or(f64::INFINITY);
    let (best, second, action) = decide(&merits, epsilon, config.tau, config);
    leaf.counter_at_last_eval = leaf.counter(cadence);
    let split = match best.candidate {
        Candidate::Attribute(i) => splits[i].take(),
        Candidate::Null => None,
    };
    SplitDecision {
        best: best.candidate,
        second: second.candidate,
        best_merit: best.merit,
        second_merit: second.merit,
        epsilon,
        action,
        split,
    }
}

/// [`evaluate_split_with`] with the grace period measured on `config.counter_mode`.
pub fn evaluate_split(leaf: &mut LearningLeaf, config: &StrategyConfig) -> SplitDecision {
    evaluate_split_with(leaf, config, config.counter_mode)
}

/// Result of applying a decision to a leaf.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitOutcome {
    Unchanged(LearningLeaf),
    Split { test: SplitTest, children: Vec<LearningLeaf> },
    Eviscerated(LearningLeaf),
}

/// Applies `decision` to `leaf`.
///
/// Splits (and resplits) create one fresh leaf per branch. An amnesiac child
/// starts with zero counts and inherits the branch's class distribution; an
/// eidetic child is rebuilt by replaying the parent's stored instances.
pub fn perform_split(
    mut leaf: LearningLeaf,
    decision: &SplitDecision,
    schema: &Schema,
    cadence: CounterMode,
) -> SplitOutcome {
    match decision.action {
        SplitAction::NoSplit => SplitOutcome::Unchanged(leaf),
        SplitAction::Eviscerate => {
            leaf.eviscerate();
            leaf.counter_at_last_eval = leaf.counter(cadence);
            SplitOutcome::Eviscerated(leaf)
        }
        SplitAction::Split | SplitAction::Resplit => {
            let Some(split) = decision.split.as_ref() else {
                return SplitOutcome::Unchanged(leaf);
            };
            let test = split.test.clone();
            let mut used = leaf.used_attributes.clone();
            if test.is_nominal() {
                used[test.attribute()] = true;
            }
            let children = match leaf.buffer.take() {
                Some(buffer) => {
                    let mut children: Vec<LearningLeaf> = (0..test.arity())
                        .map(|_| {
                            let cd = ClassDistribution::zeros(schema.class_count());
                            LearningLeaf::new(schema, used.clone(), cd, true, cadence)
                        })
                        .collect();
                    for inst in &buffer {
                        children[test.branch(inst)].absorb(inst, inst.weight);
                    }
                    for child in &mut children {
                        child.counter_at_last_eval = child.counter(cadence);
                    }
                    children
                }
                None => split
                    .branch_dists
                    .iter()
                    .map(|d| LearningLeaf::new(schema, used.clone(), ClassDistribution::from_mass(d.clone()), false, cadence))
                    .collect(),
            };
            SplitOutcome::Split { test, children }
        }
    }
}
