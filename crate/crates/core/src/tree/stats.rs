//! Sufficient statistics kept at learning leaves.

use crate::streams::{AttributeKind, Instance, Schema, Value};
use statrs::function::erf::erf;

/// Per-class mass, including any mass inherited from a parent at creation.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDistribution {
    mass: Vec<f64>,
}

impl ClassDistribution {
    pub fn zeros(classes: usize) -> Self {
        Self { mass: vec![0.0; classes] }
    }

    pub fn from_mass(mass: Vec<f64>) -> Self {
        Self { mass }
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn add(&mut self, class: usize, weight: f64) {
        self.mass[class] += weight;
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Class with the largest mass; ties go to the lowest index and an
    /// all-zero distribution predicts class 0.
    pub fn argmax(&self) -> usize {
        argmax(&self.mass)
    }

    /// True when at most one class has positive mass.
    pub fn is_pure(&self) -> bool {
        self.mass.iter().filter(|&&m| m > 0.0).count() <= 1
    }

    pub fn clear(&mut self) {
        self.mass.iter_mut().for_each(|m| *m = 0.0);
    }
}

pub(crate) fn argmax(mass: &[f64]) -> usize {
    let mut best = 0;
    for (k, &m) in mass.iter().enumerate() {
        if m > mass[best] {
            best = k;
        }
    }
    best
}

/// Weighted running mean and variance (West's update).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaussianEstimator {
    weight: f64,
    mean: f64,
    m2: f64,
}

impl GaussianEstimator {
    pub fn add(&mut self, x: f64, w: f64) {
        if w <= 0.0 {
            return;
        }
        let total = self.weight + w;
        let delta = x - self.mean;
        self.mean += delta * w / total;
        self.m2 += w * delta * (x - self.mean);
        self.weight = total;
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.weight > 1.0 {
            (self.m2 / (self.weight - 1.0)).max(0.0)
        } else {
            0.0
        }
    }

    /// Estimated weight at or below `x`.
    pub fn weight_at_or_below(&self, x: f64) -> f64 {
        let sd = self.variance().sqrt();
        if sd > 0.0 {
            let p = 0.5 * (1.0 + erf((x - self.mean) / (sd * std::f64::consts::SQRT_2)));
            self.weight * p.clamp(0.0, 1.0)
        } else if x >= self.mean {
            self.weight
        } else {
            0.0
        }
    }
}

/// Gaussian summary and observed range of one class on one numeric attribute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericClassSummary {
    pub gaussian: GaussianEstimator,
    pub min: f64,
    pub max: f64,
}

impl Default for NumericClassSummary {
    fn default() -> Self {
        Self { gaussian: GaussianEstimator::default(), min: f64::INFINITY, max: f64::NEG_INFINITY }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeObserver {
    /// `counts[j * classes + k]` is n_ijk for this attribute i.
    Nominal { values: usize, counts: Vec<f64> },
    Numeric { per_class: Vec<NumericClassSummary> },
}

/// The n_ijk counts of a leaf plus Gaussian summaries for numeric attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeStatistics {
    classes: usize,
    observers: Vec<AttributeObserver>,
}

impl NodeStatistics {
    pub fn new(schema: &Schema) -> Self {
        let classes = schema.class_count();
        let observers = schema
            .attributes()
            .iter()
            .map(|a| match a.kind {
                AttributeKind::Nominal { values } => AttributeObserver::Nominal { values, counts: vec![0.0; values * classes] },
                AttributeKind::Numeric { .. } => {
                    AttributeObserver::Numeric { per_class: vec![NumericClassSummary::default(); classes] }
                }
            })
            .collect();
        Self { classes, observers }
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn observers(&self) -> &[AttributeObserver] {
        &self.observers
    }

    pub fn observe(&mut self, instance: &Instance, weight: f64) {
        if weight <= 0.0 {
            return;
        }
        let k = instance.class_label;
        let classes = self.classes;
        for (obs, v) in self.observers.iter_mut().zip(&instance.values) {
            match (obs, v) {
                (AttributeObserver::Nominal { counts, .. }, Value::Nominal(j)) => counts[j * classes + k] += weight,
                (AttributeObserver::Numeric { per_class }, Value::Numeric(x)) => {
                    let s = &mut per_class[k];
                    s.gaussian.add(*x, weight);
                    s.min = s.min.min(*x);
                    s.max = s.max.max(*x);
                }
                _ => unreachable!("schema-checked instance"),
            }
        }
    }

    /// n_ijk; zero for numeric attributes.
    pub fn count(&self, attribute: usize, value: usize, class: usize) -> f64 {
        match &self.observers[attribute] {
            AttributeObserver::Nominal { counts, .. } => counts[value * self.classes + class],
            AttributeObserver::Numeric { .. } => 0.0,
        }
    }

    /// Class distribution of instances with `attribute = value`.
    pub fn value_class_counts(&self, attribute: usize, value: usize) -> Vec<f64> {
        match &self.observers[attribute] {
            AttributeObserver::Nominal { counts, .. } => counts[value * self.classes..(value + 1) * self.classes].to_vec(),
            AttributeObserver::Numeric { .. } => vec![0.0; self.classes],
        }
    }

    /// Total weight observed on `attribute`.
    pub fn attribute_weight(&self, attribute: usize) -> f64 {
        match &self.observers[attribute] {
            AttributeObserver::Nominal { counts, .. } => counts.iter().sum(),
            AttributeObserver::Numeric { per_class } => per_class.iter().map(|s| s.gaussian.weight()).sum(),
        }
    }

    pub fn clear(&mut self) {
        for obs in &mut self.observers {
            match obs {
                AttributeObserver::Nominal { counts, .. } => counts.iter_mut().for_each(|c| *c = 0.0),
                AttributeObserver::Numeric { per_class } => per_class.iter_mut().for_each(|s| *s = NumericClassSummary::default()),
            }
        }
    }
}
