//! Categorical stream with an abrupt change of class assignment.
//!
//! Every combination of nominal attribute values (a cell) carries a class.
//! Attribute values are drawn independently from per-attribute categorical
//! distributions; at the drift point a chosen fraction of cells switch class.

use super::{seeded_rng, Attribute, BuildError, Generator, Instance, Schema, StreamRng, StreamSpec, Value};
use rand::seq::index::sample;
use rand::Rng;

/// Upper limit on the cell table size.
const MAX_CELLS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct CellTable {
    /// Per attribute, a probability for each value.
    pub attribute_value_probs: Vec<Vec<f64>>,
    /// Class of each cell, indexed by [`CellTable::cell_index`].
    pub class_assignment: Vec<usize>,
    class_count: usize,
}

impl CellTable {
    /// Draws value probabilities from normalized Gamma(1,1) variates and a
    /// uniformly random class for every cell.
    pub fn random(value_counts: &[usize], class_count: usize, rng: &mut StreamRng) -> Result<Self, BuildError> {
        let cells = value_counts
            .iter()
            .try_fold(1usize, |acc, &v| acc.checked_mul(v))
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| BuildError::param("AbruptDriftGenerator", "z", "too many cells"))?;
        let attribute_value_probs = value_counts
            .iter()
            .map(|&v| {
                // Gamma(1,1) is Exp(1); 1 - U lies in (0, 1] so the log is finite
                let draws: Vec<f64> = (0..v).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
                let total: f64 = draws.iter().sum();
                if total > 0.0 {
                    draws.iter().map(|d| d / total).collect()
                } else {
                    vec![1.0 / v as f64; v]
                }
            })
            .collect::<Vec<Vec<f64>>>();
        // a zero draw (U = 1 exactly) would leave a value unreachable
        let attribute_value_probs = attribute_value_probs
            .into_iter()
            .map(|p| if p.iter().all(|&x| x > 0.0) { p } else { vec![1.0 / p.len() as f64; p.len()] })
            .collect();
        let class_assignment = (0..cells).map(|_| rng.gen_range(0..class_count)).collect();
        Ok(Self { attribute_value_probs, class_assignment, class_count })
    }

    pub fn value_counts(&self) -> Vec<usize> {
        self.attribute_value_probs.iter().map(Vec::len).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.class_assignment.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Mixed-radix index of a value combination, attribute 0 most significant.
    pub fn cell_index(&self, values: &[usize]) -> usize {
        values
            .iter()
            .zip(&self.attribute_value_probs)
            .fold(0, |acc, (&j, p)| acc * p.len() + j)
    }

    pub fn class_of(&self, values: &[usize]) -> usize {
        self.class_assignment[self.cell_index(values)]
    }
}

/// Number of cells a drift of `magnitude` changes (round half up).
pub fn changed_cell_count(magnitude: f64, cells: usize) -> usize {
    ((magnitude * cells as f64) + 0.5).floor() as usize
}

/// Returns a copy of `table` in which `round(magnitude * cells)` cells,
/// chosen without replacement, take a new class different from the old one.
pub fn apply_drift(table: &CellTable, magnitude: f64, rng: &mut StreamRng) -> Result<CellTable, BuildError> {
    if !(0.0..=1.0).contains(&magnitude) {
        return Err(BuildError::param("AbruptDriftGenerator", "o", format!("magnitude {magnitude} outside [0, 1]")));
    }
    let mut out = table.clone();
    let cells = table.cell_count();
    let k = changed_cell_count(magnitude, cells).min(cells);
    let c = table.class_count;
    for cell in sample(rng, cells, k).iter() {
        let old = out.class_assignment[cell];
        let r = rng.gen_range(0..c - 1);
        out.class_assignment[cell] = if r >= old { r + 1 } else { r };
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftMode {
    Single,
    Recurrent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSchedule {
    pub magnitude: f64,
    pub drift_point: u64,
    pub mode: DriftMode,
    pub period: u64,
}

impl DriftSchedule {
    /// True when instance `t` (0-based) is labelled by the post-drift table.
    pub fn drifted_at(&self, t: u64) -> bool {
        if t < self.drift_point {
            return false;
        }
        match self.mode {
            DriftMode::Single => true,
            DriftMode::Recurrent => ((t - self.drift_point) / self.period) % 2 == 0,
        }
    }
}

/// Resolved parameters of an `AbruptDriftGenerator` option string.
#[derive(Debug, Clone, PartialEq)]
pub struct AbruptDriftParams {
    pub attributes: usize,
    pub values: usize,
    pub classes: usize,
    pub schedule: DriftSchedule,
    /// `-c`: the class assignment drifts. Without it the concept is fixed.
    pub conditional_drift: bool,
    pub seed: u64,
}

impl AbruptDriftParams {
    pub fn from_spec(spec: &StreamSpec) -> Result<Self, BuildError> {
        const G: &str = "AbruptDriftGenerator";
        let positive = |flag: &str, default: i64, min: i64| -> Result<usize, BuildError> {
            let v = spec.int(flag).unwrap_or(default);
            if v < min {
                return Err(BuildError::param(G, flag, format!("must be at least {min}")));
            }
            Ok(v as usize)
        };
        let attributes = positive("n", 5, 1)?;
        let values = positive("z", 5, 2)?;
        let classes = positive("v", 5, 2)?;
        let drift_point = positive("b", 150_000, 1)? as u64;
        let period = positive("p", drift_point as i64, 1)? as u64;
        let magnitude = spec.float("o").unwrap_or(1.0);
        if !(0.0..=1.0).contains(&magnitude) {
            return Err(BuildError::param(G, "o", "magnitude must lie in [0, 1]"));
        }
        let mode = match spec.token("d") {
            None | Some("Single") => DriftMode::Single,
            Some("Recurrent") => DriftMode::Recurrent,
            Some(other) => return Err(BuildError::param(G, "d", format!("unknown drift mode {other}"))),
        };
        let seed = spec.int("r").unwrap_or(1) as u64;
        Ok(Self {
            attributes,
            values,
            classes,
            schedule: DriftSchedule { magnitude, drift_point, mode, period },
            conditional_drift: spec.switch("c"),
            seed,
        })
    }
}

pub struct AbruptDriftGenerator {
    schema: Schema,
    params: AbruptDriftParams,
    pre: CellTable,
    post: CellTable,
    cumulative: Vec<Vec<f64>>,
    rng: StreamRng,
    scratch: Vec<usize>,
    t: u64,
}

impl AbruptDriftGenerator {
    pub fn new(params: AbruptDriftParams) -> Result<Self, BuildError> {
        let attrs = (0..params.attributes).map(|i| Attribute::nominal(format!("a{i}"), params.values)).collect();
        let schema = Schema::new(attrs, params.classes)?;
        let mut table_rng = seeded_rng(params.seed, 1);
        let pre = CellTable::random(&vec![params.values; params.attributes], params.classes, &mut table_rng)?;
        let post = if params.conditional_drift {
            apply_drift(&pre, params.schedule.magnitude, &mut table_rng)?
        } else {
            pre.clone()
        };
        let cumulative = pre
            .attribute_value_probs
            .iter()
            .map(|p| {
                let mut acc = 0.0;
                p.iter()
                    .map(|x| {
                        acc += x;
                        acc
                    })
                    .collect()
            })
            .collect();
        let rng = seeded_rng(params.seed, 2);
        Ok(Self { schema, scratch: vec![0; params.attributes], params, pre, post, cumulative, rng, t: 0 })
    }

    pub fn pre_drift_table(&self) -> &CellTable {
        &self.pre
    }

    pub fn post_drift_table(&self) -> &CellTable {
        &self.post
    }

    pub fn params(&self) -> &AbruptDriftParams {
        &self.params
    }

    /// Table labelling instance `t`.
    pub fn table_at(&self, t: u64) -> &CellTable {
        if self.params.schedule.drifted_at(t) {
            &self.post
        } else {
            &self.pre
        }
    }
}

impl Generator for AbruptDriftGenerator {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn next_instance(&mut self) -> Option<Instance> {
        for (slot, cum) in self.scratch.iter_mut().zip(&self.cumulative) {
            let u: f64 = self.rng.gen();
            *slot = cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1);
        }
        let label = self.table_at(self.t).class_of(&self.scratch);
        self.t += 1;
        Some(Instance::new(self.scratch.iter().map(|&j| Value::Nominal(j)).collect(), label))
    }
}
