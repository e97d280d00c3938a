//! Split merit: entropy, information gain and the Hoeffding bound.

use super::stats::{AttributeObserver, ClassDistribution, NodeStatistics};
use crate::streams::{Instance, Value};
use thiserror::Error;

/// Candidate thresholds tried per numeric attribute.
pub const NUMERIC_THRESHOLDS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("Hoeffding bound needs at least one observation")]
    NoObservations,
    #[error("invalid Hoeffding bound argument: {0}")]
    InvalidArgument(&'static str),
}

/// Base-2 entropy of the normalized mass; 0 for an all-zero vector.
pub fn entropy(mass: &[f64]) -> f64 {
    let total: f64 = mass.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let h = mass
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| {
            let p = m / total;
            -p * p.log2()
        })
        .sum::<f64>();
    h.max(0.0)
}

/// `sqrt(R^2 ln(1/delta) / (2n))`.
pub fn hoeffding_bound(range: f64, delta: f64, n: f64) -> Result<f64, BoundError> {
    if !(n > 0.0) {
        return Err(BoundError::NoObservations);
    }
    if !(range >= 0.0) {
        return Err(BoundError::InvalidArgument("range must be non-negative"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BoundError::InvalidArgument("delta must lie in (0, 1)"));
    }
    Ok((range * range * (1.0 / delta).ln() / (2.0 * n)).sqrt())
}

/// Routing test of a split node.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitTest {
    /// One branch per value.
    Nominal { attribute: usize, values: usize },
    /// Branch 0 for `x <= threshold`, branch 1 otherwise.
    Numeric { attribute: usize, threshold: f64 },
}

impl SplitTest {
    pub fn attribute(&self) -> usize {
        match *self {
            SplitTest::Nominal { attribute, .. } | SplitTest::Numeric { attribute, .. } => attribute,
        }
    }

    pub fn arity(&self) -> usize {
        match *self {
            SplitTest::Nominal { values, .. } => values,
            SplitTest::Numeric { .. } => 2,
        }
    }

    pub fn branch(&self, instance: &Instance) -> usize {
        match (self, instance.values[self.attribute()]) {
            (SplitTest::Nominal { .. }, Value::Nominal(j)) => j,
            (SplitTest::Numeric { threshold, .. }, Value::Numeric(x)) => usize::from(x > *threshold),
            _ => unreachable!("schema-checked instance"),
        }
    }

    pub fn is_nominal(&self) -> bool {
        matches!(self, SplitTest::Nominal { .. })
    }
}

/// Gain of a partition measured against `parent`. A partition that puts all
/// observed weight in one branch is exactly 0, whatever the parent holds.
pub(crate) fn partition_gain(parent: &[f64], branches: &[Vec<f64>]) -> f64 {
    let weights: Vec<f64> = branches.iter().map(|b| b.iter().sum()).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 || weights.iter().filter(|&&w| w > 0.0).count() < 2 {
        return 0.0;
    }
    let children: f64 = branches.iter().zip(&weights).map(|(b, w)| w / total * entropy(b)).sum();
    entropy(parent) - children
}

/// Best split available on one attribute: its gain, test and the class
/// distribution each branch would inherit.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSplit {
    pub attribute: usize,
    pub gain: f64,
    pub test: SplitTest,
    pub branch_dists: Vec<Vec<f64>>,
}

/// Evaluates `attribute` at a leaf. Numeric attributes without two distinct
/// observed values have no test and give `None`.
pub fn attribute_split(stats: &NodeStatistics, class_dist: &ClassDistribution, attribute: usize) -> Option<AttributeSplit> {
    let classes = stats.class_count();
    match &stats.observers()[attribute] {
        AttributeObserver::Nominal { values, counts } => {
            let branch_dists: Vec<Vec<f64>> = counts.chunks(classes).map(<[f64]>::to_vec).collect();
            let gain = partition_gain(class_dist.mass(), &branch_dists);
            Some(AttributeSplit { attribute, gain, test: SplitTest::Nominal { attribute, values: *values }, branch_dists })
        }
        AttributeObserver::Numeric { per_class } => {
            let lo = per_class.iter().map(|s| s.min).fold(f64::INFINITY, f64::min);
            let hi = per_class.iter().map(|s| s.max).fold(f64::NEG_INFINITY, f64::max);
            if !(lo < hi) {
                return None;
            }
            let mut best: Option<AttributeSplit> = None;
            for i in 1..=NUMERIC_THRESHOLDS {
                let threshold = lo + (hi - lo) * i as f64 / (NUMERIC_THRESHOLDS + 1) as f64;
                let mut left = vec![0.0; classes];
                let mut right = vec![0.0; classes];
                for (k, s) in per_class.iter().enumerate() {
                    let w = s.gaussian.weight();
                    if w <= 0.0 {
                        continue;
                    }
                    if threshold < s.min {
                        right[k] = w;
                    } else if threshold >= s.max {
                        left[k] = w;
                    } else {
                        let below = s.gaussian.weight_at_or_below(threshold);
                        left[k] = below;
                        right[k] = w - below;
                    }
                }
                let branch_dists = vec![left, right];
                let gain = partition_gain(class_dist.mass(), &branch_dists);
                if best.as_ref().map_or(true, |b| gain > b.gain) {
                    best = Some(AttributeSplit { attribute, gain, test: SplitTest::Numeric { attribute, threshold }, branch_dists });
                }
            }
            best
        }
    }
}

/// Information gain of splitting on `attribute`: `H(class_dist)` minus the
/// weighted entropy of the branches read off the node statistics (for
/// numeric attributes, the best of the candidate thresholds).
pub fn info_gain(stats: &NodeStatistics, class_dist: &ClassDistribution, attribute: usize) -> f64 {
    attribute_split(stats, class_dist, attribute).map_or(0.0, |s| s.gain)
}
