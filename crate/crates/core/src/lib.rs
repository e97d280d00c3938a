//! Streaming decision trees with switchable design choices.
//!
//! The crate bundles a Hoeffding tree ([`tree::HoeffdingTree`]), an adaptive
//! Hoeffding tree with alternate subtrees ([`hat::HoeffdingAdaptiveTree`]),
//! the ADWIN change detector ([`change::Adwin`]), synthetic drift streams
//! with a MOA-style option-string parser ([`streams`]) and a prequential
//! testbench with the sign-test statistics used to compare learners
//! ([`eval`]).

pub mod change;
pub mod eval;
pub mod hat;
pub mod streams;
pub mod testbench;
pub mod tree;

pub use change::{Adwin, ChangeDetector, NeverFire};
pub use eval::{prequential_run, Learner, PrequentialResult};
pub use hat::{HatConfig, HoeffdingAdaptiveTree, VotingMode};
pub use streams::{build_generator, parse_stream_spec, Generator, Instance, Schema, StreamSpec, Value};
pub use tree::{CounterMode, HoeffdingTree, InfoGainMode, StrategyConfig};
