//! Hoeffding tree with switchable split bookkeeping.

mod leaf;
mod split;
mod stats;

pub use leaf::{
    decide, evaluate_split, evaluate_split_with, perform_split, Candidate, CandidateMerit, LearningLeaf, SplitAction,
    SplitDecision, SplitOutcome,
};
pub use split::{attribute_split, entropy, hoeffding_bound, info_gain, AttributeSplit, BoundError, SplitTest, NUMERIC_THRESHOLDS};
pub use stats::{AttributeObserver, ClassDistribution, GaussianEstimator, NodeStatistics, NumericClassSummary};

use crate::streams::{Instance, Schema, SchemaError};
use std::fmt::Write as _;
use thiserror::Error;

/// How split merits are formed at each evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfoGainMode {
    /// Latest gain; Hoeffding sample size from the counter mode.
    InstantaneousOverExamples,
    /// Mean gain over all evaluations at the leaf; sample size is the
    /// number of evaluations.
    AveragedOverEvaluations,
}

/// Which counter drives the Hoeffding sample size (and, in VFDT, the grace
/// period).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterMode {
    /// Class-distribution mass, including mass inherited from the parent.
    WeightSeen,
    /// Instances seen since the leaf was created.
    NodeTime,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("allow_resplit and eviscerate_on_used_best are mutually exclusive")]
    ResplitAndEviscerate,
    #[error("grace_period must be positive")]
    GracePeriod,
    #[error("delta must lie in (0, 1), got {0}")]
    Delta(f64),
    #[error("tau must be non-negative, got {0}")]
    Tau(f64),
    #[error("{0}")]
    Other(String),
}

/// Every tree-level design choice as an independent setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    /// Store instances and rebuild child statistics exactly on split.
    pub eidetic: bool,
    /// Let a nominal attribute already used on the path win again.
    pub allow_resplit: bool,
    /// Clear the leaf when a used nominal attribute wins.
    pub eviscerate_on_used_best: bool,
    pub infogain_mode: InfoGainMode,
    pub counter_mode: CounterMode,
    pub grace_period: u64,
    pub delta: f64,
    pub tau: f64,
}

impl Default for StrategyConfig {
    /// Baseline VFDT: amnesiac, no reuse of attributes, averaged gains,
    /// node-time counters.
    fn default() -> Self {
        Self {
            eidetic: false,
            allow_resplit: false,
            eviscerate_on_used_best: false,
            infogain_mode: InfoGainMode::AveragedOverEvaluations,
            counter_mode: CounterMode::NodeTime,
            grace_period: 200,
            delta: 1e-7,
            tau: 0.05,
        }
    }
}

impl StrategyConfig {
    /// Resplitting, instantaneous gains and weight-seen counters together.
    pub fn combined() -> Self {
        Self {
            allow_resplit: true,
            infogain_mode: InfoGainMode::InstantaneousOverExamples,
            counter_mode: CounterMode::WeightSeen,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.allow_resplit && self.eviscerate_on_used_best {
            return Err(ConfigError::ResplitAndEviscerate);
        }
        if self.grace_period == 0 {
            return Err(ConfigError::GracePeriod);
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(ConfigError::Delta(self.delta));
        }
        if !(self.tau >= 0.0) {
            return Err(ConfigError::Tau(self.tau));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf(LearningLeaf),
    Split { test: SplitTest, children: Vec<Node> },
}

impl Node {
    /// Leaf reached by `instance`.
    pub fn leaf_for(&self, instance: &Instance) -> &LearningLeaf {
        let mut node = self;
        loop {
            match node {
                Node::Leaf(leaf) => return leaf,
                Node::Split { test, children } => node = &children[test.branch(instance)],
            }
        }
    }

    /// Leaves in depth-first order.
    pub fn leaves(&self) -> Vec<&LearningLeaf> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            match n {
                Node::Leaf(l) => out.push(l),
                Node::Split { children, .. } => stack.extend(children.iter().rev()),
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Split { children, .. } => 1 + children.iter().map(Node::node_count).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Split { children, .. } => 1 + children.iter().map(Node::depth).max().unwrap_or(0),
        }
    }
}

/// Counts of split actions taken over a tree's lifetime.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SplitCounts {
    pub splits: u64,
    pub resplits: u64,
    pub eviscerations: u64,
}

/// Incremental decision tree.
#[derive(Debug, Clone)]
pub struct HoeffdingTree {
    schema: Schema,
    config: StrategyConfig,
    root: Node,
    counts: SplitCounts,
}

impl HoeffdingTree {
    pub fn new(schema: Schema, config: StrategyConfig) -> Result<Self, TreeError> {
        config.validate()?;
        let root = Node::Leaf(LearningLeaf::root(&schema, config.eidetic, config.counter_mode));
        Ok(Self { schema, config, root, counts: SplitCounts::default() })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn config(&self) -> &StrategyConfig {
        &self.config
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn split_counts(&self) -> SplitCounts {
        self.counts
    }

    /// Routes `instance` to a leaf, updates it and attempts a split when the
    /// grace period has elapsed.
    pub fn train(&mut self, instance: &Instance) -> Result<(), TreeError> {
        self.schema.check(instance)?;
        let config = self.config;
        let mut node = &mut self.root;
        while let Node::Split { test, children } = node {
            node = &mut children[test.branch(instance)];
        }
        let Node::Leaf(leaf) = node else { unreachable!() };
        leaf.learn(instance, instance.weight);
        if !leaf.wants_evaluation(config.counter_mode, config.grace_period) {
            return Ok(());
        }
        let decision = evaluate_split(leaf, &config);
        if decision.action == SplitAction::NoSplit {
            return Ok(());
        }
        let placeholder = Node::Split { test: SplitTest::Numeric { attribute: 0, threshold: 0.0 }, children: Vec::new() };
        let Node::Leaf(leaf) = std::mem::replace(node, placeholder) else { unreachable!() };
        *node = match perform_split(leaf, &decision, &self.schema, config.counter_mode) {
            SplitOutcome::Unchanged(leaf) => Node::Leaf(leaf),
            SplitOutcome::Eviscerated(leaf) => {
                self.counts.eviscerations += 1;
                Node::Leaf(leaf)
            }
            SplitOutcome::Split { test, children } => {
                if decision.action == SplitAction::Resplit {
                    self.counts.resplits += 1;
                } else {
                    self.counts.splits += 1;
                }
                Node::Split { test, children: children.into_iter().map(Node::Leaf).collect() }
            }
        };
        Ok(())
    }

    /// Class distribution of the leaf `instance` reaches.
    pub fn predict(&self, instance: &Instance) -> ClassDistribution {
        self.root.leaf_for(instance).class_dist.clone()
    }

    /// Predicted label: argmax mass, lowest index on ties, 0 when empty.
    pub fn predict_label(&self, instance: &Instance) -> usize {
        self.root.leaf_for(instance).class_dist.argmax()
    }

    /// Text dump, one node per line in pre-order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut next_id = 0;
        dump_node(&self.root, 0, &mut next_id, &mut out);
        out
    }
}

pub(crate) fn fmt_mass(mass: &[f64]) -> String {
    let parts: Vec<String> = mass.iter().map(|m| format!("{m}")).collect();
    format!("[{}]", parts.join(", "))
}

pub(crate) fn dump_leaf(leaf: &LearningLeaf) -> String {
    let used: Vec<String> =
        leaf.used_attributes.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i.to_string()).collect();
    format!(
        "leaf class_dist={} node_time={} last_eval={} evaluations={} used={{{}}}",
        fmt_mass(leaf.class_dist.mass()),
        leaf.node_time,
        leaf.counter_at_last_eval,
        leaf.evaluations(),
        used.join(",")
    )
}

pub(crate) fn dump_test(test: &SplitTest) -> String {
    match test {
        SplitTest::Nominal { attribute, values } => format!("split attr={attribute} nominal values={values}"),
        SplitTest::Numeric { attribute, threshold } => format!("split attr={attribute} numeric threshold={threshold}"),
    }
}

fn dump_node(node: &Node, depth: usize, next_id: &mut usize, out: &mut String) {
    let id = *next_id;
    *next_id += 1;
    let indent = "  ".repeat(depth);
    match node {
        Node::Leaf(leaf) => {
            let _ = writeln!(out, "{indent}#{id} {}", dump_leaf(leaf));
        }
        Node::Split { test, children } => {
            let _ = writeln!(out, "{indent}#{id} {}", dump_test(test));
            for child in children {
                dump_node(child, depth + 1, next_id, out);
            }
        }
    }
}
