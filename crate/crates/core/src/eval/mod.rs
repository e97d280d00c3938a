//! Prequential evaluation and learner comparison.

mod compare;
mod prequential;
mod stats;

pub use compare::{compare, fmt_error, outcome, rounded, CompareError, ComparisonReport, ComparisonRow, Outcome, TIE_DECIMALS};
pub use prequential::{average_series, averaged_series, prequential_run, EvalError, Learner, PrequentialResult, SeriesPoint};
pub use stats::{binomial_test, ci_lower, StatsError};

use crate::hat::HoeffdingAdaptiveTree;
use crate::tree::HoeffdingTree;
use crate::streams::Instance;

impl Learner for HoeffdingTree {
    fn predict(&self, instance: &Instance) -> usize {
        self.predict_label(instance)
    }

    fn train(&mut self, instance: &Instance) {
        HoeffdingTree::train(self, instance).expect("instance from the tree's own stream");
    }
}

impl Learner for HoeffdingAdaptiveTree {
    fn predict(&self, instance: &Instance) -> usize {
        self.predict_label(instance)
    }

    fn train(&mut self, instance: &Instance) {
        HoeffdingAdaptiveTree::train(self, instance).expect("instance from the tree's own stream");
    }
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn predict(&self, instance: &Instance) -> usize {
        (**self).predict(instance)
    }

    fn train(&mut self, instance: &Instance) {
        (**self).train(instance)
    }
}
