//! Hoeffding Adaptive Tree: per-node drift detectors and alternate subtrees.

use crate::change::{Adwin, ChangeDetector, NeverFire, DEFAULT_ADWIN_DELTA};
use crate::streams::{seeded_rng, Instance, Schema, StreamRng};
use crate::tree::{
    dump_leaf, dump_test, evaluate_split_with, perform_split, ClassDistribution, ConfigError, CounterMode,
    InfoGainMode, LearningLeaf, SplitAction, SplitOutcome, SplitTest, StrategyConfig, TreeError,
};
use rand_distr::{Distribution, Poisson};
use std::fmt::Write as _;

/// RNG stream tag for Poisson leaf weights.
const POISSON_TAG: u64 = 7;

/// Which alternates contribute to predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VotingMode {
    /// Mainline leaf only; alternates cannot sprout alternates.
    None,
    /// Alternates on the mainline path vote; alternates cannot sprout alternates.
    SingleAlternate,
    /// Alternates may sprout alternates and every alternate on the path votes.
    MultipleAlternates,
    /// As `MultipleAlternates`, but alternates that are still a single leaf do not vote.
    MultipleExcludingSingleLeaves,
}

impl VotingMode {
    pub fn allows_nested_alternates(self) -> bool {
        matches!(self, VotingMode::MultipleAlternates | VotingMode::MultipleExcludingSingleLeaves)
    }
}

/// Drift detector attached to each node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectorKind {
    Adwin { delta: f64 },
    NeverFire,
}

impl DetectorKind {
    fn build(self) -> Box<dyn ChangeDetector> {
        match self {
            DetectorKind::Adwin { delta } => Box::new(Adwin::new(delta)),
            DetectorKind::NeverFire => Box::new(NeverFire::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatConfig {
    pub base: StrategyConfig,
    pub voting: VotingMode,
    pub poisson_weighting: bool,
    /// Counter on which the grace period between split evaluations is measured.
    pub eval_timer: CounterMode,
    pub replace_root_on_alternate_split: bool,
    pub replace_subtree_on_alternate_split: bool,
    pub replacement_check_interval: u64,
    /// Confidence parameter of the replacement bounds.
    pub replacement_delta: f64,
    /// Maximum nesting of alternates inside alternates.
    pub max_alternate_depth: usize,
    pub detector: DetectorKind,
    /// Delta of the per-node error estimators used for replacement.
    pub estimator_delta: f64,
    pub seed: u64,
}

impl Default for HatConfig {
    /// Baseline HAT: instantaneous gains, node-time cadence, no voting, no
    /// weighting and no premature replacement.
    fn default() -> Self {
        Self {
            base: StrategyConfig { infogain_mode: InfoGainMode::InstantaneousOverExamples, ..StrategyConfig::default() },
            voting: VotingMode::None,
            poisson_weighting: false,
            eval_timer: CounterMode::NodeTime,
            replace_root_on_alternate_split: false,
            replace_subtree_on_alternate_split: false,
            replacement_check_interval: 300,
            replacement_delta: 0.05,
            max_alternate_depth: 10,
            detector: DetectorKind::Adwin { delta: DEFAULT_ADWIN_DELTA },
            estimator_delta: DEFAULT_ADWIN_DELTA,
            seed: 1,
        }
    }
}

impl HatConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.base.validate()?;
        if self.replacement_check_interval == 0 {
            return Err(ConfigError::Other("replacement_check_interval must be positive".into()));
        }
        if !(self.replacement_delta > 0.0 && self.replacement_delta < 1.0) {
            return Err(ConfigError::Other(format!("replacement_delta must lie in (0, 1), got {}", self.replacement_delta)));
        }
        if !(self.estimator_delta > 0.0 && self.estimator_delta < 1.0) {
            return Err(ConfigError::Other(format!("estimator_delta must lie in (0, 1), got {}", self.estimator_delta)));
        }
        if let DetectorKind::Adwin { delta } = self.detector {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(ConfigError::Other(format!("detector delta must lie in (0, 1), got {delta}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum HatKind {
    Leaf(LearningLeaf),
    Split { test: SplitTest, children: Vec<HatNode> },
}

/// A mainline or alternate node with its detector and error estimator.
#[derive(Debug, Clone)]
pub struct HatNode {
    kind: HatKind,
    alternate: Option<Box<HatNode>>,
    detector: Box<dyn ChangeDetector>,
    /// Prequential error of the subtree rooted here.
    error: Adwin,
    since_check: u64,
}

impl HatNode {
    fn new(kind: HatKind, cfg: &HatConfig) -> Self {
        Self { kind, alternate: None, detector: cfg.detector.build(), error: Adwin::new(cfg.estimator_delta), since_check: 0 }
    }

    fn fresh_leaf(schema: &Schema, used: Vec<bool>, cfg: &HatConfig) -> Self {
        let cd = ClassDistribution::zeros(schema.class_count());
        Self::new(HatKind::Leaf(LearningLeaf::new(schema, used, cd, cfg.base.eidetic, cfg.eval_timer)), cfg)
    }

    pub fn kind(&self) -> &HatKind {
        &self.kind
    }

    pub fn alternate(&self) -> Option<&HatNode> {
        self.alternate.as_deref()
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, HatKind::Leaf(_))
    }

    pub fn detector(&self) -> &dyn ChangeDetector {
        self.detector.as_ref()
    }

    pub fn error_estimator(&self) -> &Adwin {
        &self.error
    }

    /// Mainline leaf reached by `instance` from this node.
    pub fn leaf_for(&self, instance: &Instance) -> &LearningLeaf {
        let mut node = self;
        loop {
            match &node.kind {
                HatKind::Leaf(leaf) => return leaf,
                HatKind::Split { test, children } => node = &children[test.branch(instance)],
            }
        }
    }

    /// Mainline nodes below and including this one.
    pub fn node_count(&self) -> usize {
        match &self.kind {
            HatKind::Leaf(_) => 1,
            HatKind::Split { children, .. } => 1 + children.iter().map(HatNode::node_count).sum::<usize>(),
        }
    }

    /// Alternates anywhere below this node, including nested ones.
    pub fn alternate_count(&self) -> usize {
        let own = self.alternate.as_ref().map_or(0, |a| 1 + a.alternate_count());
        let below = match &self.kind {
            HatKind::Leaf(_) => 0,
            HatKind::Split { children, .. } => children.iter().map(HatNode::alternate_count).sum(),
        };
        own + below
    }

    /// Text dump of the subtree rooted here, alternates included.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut next_id = 0;
        dump_hat(self, 0, "", &mut next_id, &mut out);
        out
    }
}

fn dump_hat(node: &HatNode, depth: usize, marker: &str, next_id: &mut usize, out: &mut String) {
    let id = *next_id;
    *next_id += 1;
    let indent = "  ".repeat(depth);
    let body = match &node.kind {
        HatKind::Leaf(leaf) => dump_leaf(leaf),
        HatKind::Split { test, .. } => dump_test(test),
    };
    let est = |d: &dyn ChangeDetector| d.estimate().map_or("-".to_string(), |e| format!("{e}"));
    let _ = writeln!(
        out,
        "{indent}#{id} {marker}{body} detector_width={} detector_est={} error_width={} error_est={}",
        node.detector.width(),
        est(node.detector.as_ref()),
        node.error.width(),
        est(&node.error),
    );
    if let Some(alt) = &node.alternate {
        dump_hat(alt, depth + 1, "ALT-root ", next_id, out);
    }
    if let HatKind::Split { children, .. } = &node.kind {
        for child in children {
            dump_hat(child, depth + 1, "", next_id, out);
        }
    }
}

/// Lifetime event counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HatCounts {
    pub splits: u64,
    pub resplits: u64,
    pub eviscerations: u64,
    pub alternates_sprouted: u64,
    pub promotions: u64,
    pub premature_promotions: u64,
    pub alternates_pruned: u64,
    pub leaf_updates: u64,
    pub zero_weight_updates: u64,
}

struct Ctx<'a> {
    cfg: &'a HatConfig,
    schema: &'a Schema,
    rng: &'a mut StreamRng,
    poisson: Poisson<f64>,
    counts: &'a mut HatCounts,
}

/// Position of a node during a training descent.
#[derive(Clone, Copy)]
struct Place<'a> {
    used: &'a [bool],
    is_root: bool,
    alt_depth: usize,
}

#[derive(Debug, Clone)]
pub struct HoeffdingAdaptiveTree {
    schema: Schema,
    config: HatConfig,
    root: HatNode,
    rng: StreamRng,
    counts: HatCounts,
}

impl HoeffdingAdaptiveTree {
    pub fn new(schema: Schema, config: HatConfig) -> Result<Self, TreeError> {
        config.validate()?;
        let root = HatNode::fresh_leaf(&schema, vec![false; schema.attribute_count()], &config);
        let rng = seeded_rng(config.seed, POISSON_TAG);
        Ok(Self { schema, config, root, rng, counts: HatCounts::default() })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn config(&self) -> &HatConfig {
        &self.config
    }

    pub fn root(&self) -> &HatNode {
        &self.root
    }

    pub fn counts(&self) -> HatCounts {
        self.counts
    }

    pub fn train(&mut self, instance: &Instance) -> Result<(), TreeError> {
        self.schema.check(instance)?;
        let mut ctx = Ctx {
            cfg: &self.config,
            schema: &self.schema,
            rng: &mut self.rng,
            poisson: Poisson::new(1.0).expect("positive rate"),
            counts: &mut self.counts,
        };
        let used = vec![false; self.schema.attribute_count()];
        train_node(&mut self.root, instance, Place { used: &used, is_root: true, alt_depth: 0 }, &mut ctx);
        Ok(())
    }

    /// Vote of the mainline leaf plus whichever alternates the voting mode
    /// admits. Each contribution is normalized to unit mass first.
    pub fn vote(&self, instance: &Instance) -> ClassDistribution {
        if self.config.voting == VotingMode::None {
            return self.root.leaf_for(instance).class_dist.clone();
        }
        let mut sum = vec![0.0; self.schema.class_count()];
        collect_votes(&self.root, instance, self.config.voting, &mut sum);
        ClassDistribution::from_mass(sum)
    }

    pub fn predict(&self, instance: &Instance) -> ClassDistribution {
        self.vote(instance)
    }

    /// Argmax of [`vote`](Self::vote), lowest index on ties.
    pub fn predict_label(&self, instance: &Instance) -> usize {
        self.vote(instance).argmax()
    }

    pub fn dump(&self) -> String {
        self.root.dump()
    }

    /// Mainline node at `path` (child indices from the root).
    pub fn node_at(&self, path: &[usize]) -> Option<&HatNode> {
        let mut node = &self.root;
        for &i in path {
            match &node.kind {
                HatKind::Split { children, .. } => node = children.get(i)?,
                HatKind::Leaf(_) => return None,
            }
        }
        Some(node)
    }

    fn node_at_mut(&mut self, path: &[usize]) -> Option<(&mut HatNode, Vec<bool>)> {
        let mut used = vec![false; self.schema.attribute_count()];
        let mut node = &mut self.root;
        for &i in path {
            match &mut node.kind {
                HatKind::Split { test, children } => {
                    if test.is_nominal() {
                        used[test.attribute()] = true;
                    }
                    node = children.get_mut(i)?;
                }
                HatKind::Leaf(_) => return None,
            }
        }
        Some((node, used))
    }

    /// Acts as if the detector at the mainline node `path` had flagged an
    /// error increase. True when a new alternate was sprouted.
    pub fn signal_drift(&mut self, path: &[usize]) -> bool {
        let cfg = self.config;
        let schema = self.schema.clone();
        let Some((node, used)) = self.node_at_mut(path) else { return false };
        let sprouted = try_sprout(node, &used, 0, &cfg, &schema);
        if sprouted {
            self.counts.alternates_sprouted += 1;
        }
        sprouted
    }

    /// Installs the alternate at mainline node `path` in place of the
    /// mainline subtree, bypassing the error comparison. True when an
    /// alternate existed.
    pub fn promote_alternate(&mut self, path: &[usize]) -> bool {
        let Some((node, _)) = self.node_at_mut(path) else { return false };
        if node.alternate.is_none() {
            return false;
        }
        promote(node);
        self.counts.promotions += 1;
        true
    }
}

fn collect_votes(node: &HatNode, instance: &Instance, mode: VotingMode, sum: &mut [f64]) {
    let mut cur = node;
    loop {
        if let Some(alt) = &cur.alternate {
            let skip = mode == VotingMode::MultipleExcludingSingleLeaves && alt.is_leaf();
            if !skip {
                if mode.allows_nested_alternates() {
                    collect_votes(alt, instance, mode, sum);
                } else {
                    add_normalized(sum, alt.leaf_for(instance).class_dist.mass());
                }
            }
        }
        match &cur.kind {
            HatKind::Leaf(leaf) => {
                add_normalized(sum, leaf.class_dist.mass());
                return;
            }
            HatKind::Split { test, children } => cur = &children[test.branch(instance)],
        }
    }
}

fn add_normalized(sum: &mut [f64], mass: &[f64]) {
    let total: f64 = mass.iter().sum();
    if total > 0.0 {
        for (s, m) in sum.iter_mut().zip(mass) {
            *s += m / total;
        }
    }
}

fn try_sprout(node: &mut HatNode, used: &[bool], alt_depth: usize, cfg: &HatConfig, schema: &Schema) -> bool {
    let allowed = alt_depth == 0 || (cfg.voting.allows_nested_alternates() && alt_depth < cfg.max_alternate_depth);
    if node.alternate.is_some() || node.is_leaf() || !allowed {
        return false;
    }
    node.alternate = Some(Box::new(HatNode::fresh_leaf(schema, used.to_vec(), cfg)));
    node.since_check = 0;
    true
}

/// Replaces `node` by its alternate. The promoted subtree keeps its own
/// detectors, estimators and nested alternates.
fn promote(node: &mut HatNode) {
    let alt = node.alternate.take().expect("alternate to promote");
    *node = *alt;
}

fn replacement_bound(delta: f64, width: u64) -> f64 {
    ((1.0 / delta).ln() / (2.0 * width as f64)).sqrt()
}

/// Outcome of comparing a node's mainline and alternate error estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplacementVerdict {
    Promote,
    Prune,
    Keep,
}

/// Promote when the alternate's upper bound lies below the mainline's
/// lower bound; prune when the alternate's lower bound lies above the
/// mainline's upper bound.
pub fn replacement_verdict(mainline: f64, mainline_bound: f64, alternate: f64, alternate_bound: f64) -> ReplacementVerdict {
    if alternate + alternate_bound < mainline - mainline_bound {
        ReplacementVerdict::Promote
    } else if alternate - alternate_bound > mainline + mainline_bound {
        ReplacementVerdict::Prune
    } else {
        ReplacementVerdict::Keep
    }
}

fn check_replacement(node: &mut HatNode, delta: f64) -> ReplacementVerdict {
    let alt = node.alternate.as_ref().expect("alternate present");
    let (wm, wa) = (node.error.width(), alt.error.width());
    if wm == 0 || wa == 0 {
        return ReplacementVerdict::Keep;
    }
    let em = node.error.estimate().expect("non-empty window");
    let ea = alt.error.estimate().expect("non-empty window");
    replacement_verdict(em, replacement_bound(delta, wm), ea, replacement_bound(delta, wa))
}

/// Trains the subtree at `node`. Returns true when this node was a leaf
/// and split on this instance.
fn train_node(node: &mut HatNode, instance: &Instance, place: Place<'_>, ctx: &mut Ctx<'_>) -> bool {
    let wrong = node.leaf_for(instance).class_dist.argmax() != instance.class_label;
    let bit = if wrong { 1.0 } else { 0.0 };
    node.error.add_element(bit).expect("error bit in range");
    if !node.is_leaf() {
        let before = node.detector.estimate().ok();
        let fired = node.detector.add_element(bit).expect("error bit in range");
        let after = node.detector.estimate().ok();
        let increased = matches!((before, after), (Some(b), Some(a)) if a > b);
        if fired && increased && try_sprout(node, place.used, place.alt_depth, ctx.cfg, ctx.schema) {
            ctx.counts.alternates_sprouted += 1;
        }
    }

    if let Some(alt) = node.alternate.as_mut() {
        let was_leaf = alt.is_leaf();
        let alt_place = Place { used: place.used, is_root: false, alt_depth: place.alt_depth + 1 };
        let alt_split = train_node(alt, instance, alt_place, ctx) && was_leaf;
        let premature = if place.is_root {
            ctx.cfg.replace_root_on_alternate_split
        } else {
            ctx.cfg.replace_subtree_on_alternate_split
        };
        if alt_split && premature {
            promote(node);
            ctx.counts.promotions += 1;
            ctx.counts.premature_promotions += 1;
            return false;
        }
        node.since_check += 1;
        if node.since_check >= ctx.cfg.replacement_check_interval {
            node.since_check = 0;
            match check_replacement(node, ctx.cfg.replacement_delta) {
                ReplacementVerdict::Promote => {
                    promote(node);
                    ctx.counts.promotions += 1;
                    return false;
                }
                ReplacementVerdict::Prune => {
                    node.alternate = None;
                    ctx.counts.alternates_pruned += 1;
                }
                ReplacementVerdict::Keep => {}
            }
        }
    }

    if node.is_leaf() {
        return train_leaf(node, instance, ctx);
    }
    match &mut node.kind {
        HatKind::Split { test, children } => {
            let b = test.branch(instance);
            if test.is_nominal() && !place.used[test.attribute()] {
                let mut used = place.used.to_vec();
                used[test.attribute()] = true;
                train_node(&mut children[b], instance, Place { used: &used, is_root: false, ..place }, ctx);
            } else {
                train_node(&mut children[b], instance, Place { is_root: false, ..place }, ctx);
            }
            false
        }
        HatKind::Leaf(_) => unreachable!(),
    }
}

fn train_leaf(node: &mut HatNode, instance: &Instance, ctx: &mut Ctx<'_>) -> bool {
    let HatKind::Leaf(leaf) = &mut node.kind else { unreachable!() };
    let weight = if ctx.cfg.poisson_weighting { ctx.poisson.sample(ctx.rng) * instance.weight } else { instance.weight };
    ctx.counts.leaf_updates += 1;
    if weight == 0.0 {
        ctx.counts.zero_weight_updates += 1;
    }
    leaf.learn(instance, weight);
    if !leaf.wants_evaluation(ctx.cfg.eval_timer, ctx.cfg.base.grace_period) {
        return false;
    }
    let decision = evaluate_split_with(leaf, &ctx.cfg.base, ctx.cfg.eval_timer);
    if decision.action == SplitAction::NoSplit {
        return false;
    }
    let placeholder = HatKind::Split { test: SplitTest::Numeric { attribute: 0, threshold: 0.0 }, children: Vec::new() };
    let HatKind::Leaf(leaf) = std::mem::replace(&mut node.kind, placeholder) else { unreachable!() };
    let (kind, split) = match perform_split(leaf, &decision, ctx.schema, ctx.cfg.eval_timer) {
        SplitOutcome::Unchanged(leaf) => (HatKind::Leaf(leaf), false),
        SplitOutcome::Eviscerated(leaf) => {
            ctx.counts.eviscerations += 1;
            (HatKind::Leaf(leaf), false)
        }
        SplitOutcome::Split { test, children } => {
            if decision.action == SplitAction::Resplit {
                ctx.counts.resplits += 1;
            } else {
                ctx.counts.splits += 1;
            }
            let children = children.into_iter().map(|l| HatNode::new(HatKind::Leaf(l), ctx.cfg)).collect();
            (HatKind::Split { test, children }, true)
        }
    };
    node.kind = kind;
    split
}
