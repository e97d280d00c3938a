//! Interleaved test-then-train evaluation.

use crate::streams::{Generator, Instance};
use std::time::Instant;
use thiserror::Error;

/// Anything that predicts a label and then learns from the instance.
pub trait Learner {
    fn predict(&self, instance: &Instance) -> usize;
    fn train(&mut self, instance: &Instance);
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("n_instances must be at least 1")]
    NoInstances,
    #[error("stream ended after {0} instances")]
    StreamExhausted(u64),
    #[error("no series to average")]
    NoSeries,
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("series instance indices differ at point {0}")]
    IndexMismatch(usize),
}

/// One point of an error series: instance index and windowed error.
pub type SeriesPoint = (u64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct PrequentialResult {
    pub final_error: f64,
    pub mistakes: u64,
    /// Mean error of each disjoint window of `snapshot_every` instances,
    /// keyed by the number of instances processed at the window's end.
    pub error_series: Vec<SeriesPoint>,
    pub instances_processed: u64,
    pub wall_time: f64,
}

/// Predicts each instance, scores it, then trains on it.
/// `snapshot_every = 0` disables the error series.
pub fn prequential_run<L: Learner + ?Sized>(
    learner: &mut L,
    stream: &mut dyn Generator,
    n_instances: u64,
    snapshot_every: u64,
) -> Result<PrequentialResult, EvalError> {
    if n_instances == 0 {
        return Err(EvalError::NoInstances);
    }
    let start = Instant::now();
    let mut mistakes = 0u64;
    let mut window_mistakes = 0u64;
    let mut series = Vec::new();
    for t in 1..=n_instances {
        let instance = stream.next_instance().ok_or(EvalError::StreamExhausted(t - 1))?;
        if learner.predict(&instance) != instance.class_label {
            mistakes += 1;
            window_mistakes += 1;
        }
        learner.train(&instance);
        if snapshot_every > 0 && t % snapshot_every == 0 {
            series.push((t, window_mistakes as f64 / snapshot_every as f64));
            window_mistakes = 0;
        }
    }
    Ok(PrequentialResult {
        final_error: mistakes as f64 / n_instances as f64,
        mistakes,
        error_series: series,
        instances_processed: n_instances,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Pointwise mean of equally shaped series.
pub fn average_series(series: &[Vec<SeriesPoint>]) -> Result<Vec<SeriesPoint>, EvalError> {
    let first = series.first().ok_or(EvalError::NoSeries)?;
    for s in series {
        if s.len() != first.len() {
            return Err(EvalError::LengthMismatch(first.len(), s.len()));
        }
    }
    (0..first.len())
        .map(|i| {
            let idx = first[i].0;
            let mut sum = 0.0;
            for s in series {
                if s[i].0 != idx {
                    return Err(EvalError::IndexMismatch(i));
                }
                sum += s[i].1;
            }
            Ok((idx, sum / series.len() as f64))
        })
        .collect()
}

/// Runs one prequential pass per stream, each with a fresh learner from
/// `make_learner`, and averages their error series.
pub fn averaged_series<L, F>(
    streams: Vec<Box<dyn Generator>>,
    mut make_learner: F,
    n_instances: u64,
    snapshot_every: u64,
) -> Result<Vec<SeriesPoint>, EvalError>
where
    L: Learner,
    F: FnMut(&dyn Generator) -> L,
{
    if streams.is_empty() {
        return Err(EvalError::NoSeries);
    }
    let mut all = Vec::with_capacity(streams.len());
    for mut stream in streams {
        let mut learner = make_learner(stream.as_ref());
        all.push(prequential_run(&mut learner, stream.as_mut(), n_instances, snapshot_every)?.error_series);
    }
    average_series(&all)
}
