//! SEA concepts: class 0 when `x0 + x1 <= theta`, with a third irrelevant
//! attribute. Attributes are uniform on [0, 1], so the classic thresholds
//! 8, 9, 7 and 9.5 are scaled by 1/10.

use super::{seeded_rng, Attribute, BuildError, Generator, Instance, Schema, StreamRng, StreamSpec, Value};
use rand::Rng;

pub const SEA_THRESHOLDS: [f64; 4] = [0.8, 0.9, 0.7, 0.95];

pub struct SeaGenerator {
    schema: Schema,
    threshold: f64,
    noise: f64,
    balance: bool,
    next_class: usize,
    rng: StreamRng,
}

impl SeaGenerator {
    /// `function` in 1..=4; `noise_percent` flips that share of labels.
    pub fn new(function: u8, seed: u64, noise_percent: u32, balance: bool) -> Result<Self, BuildError> {
        if !(1..=4).contains(&function) {
            return Err(BuildError::param("SEAGenerator", "f", "function must be in 1..=4"));
        }
        if noise_percent > 100 {
            return Err(BuildError::param("SEAGenerator", "n", "noise percentage above 100"));
        }
        let schema = Schema::new((0..3).map(|i| Attribute::numeric(format!("x{i}"), 0.0, 1.0)).collect(), 2)?;
        Ok(Self {
            schema,
            threshold: SEA_THRESHOLDS[function as usize - 1],
            noise: noise_percent as f64 / 100.0,
            balance,
            next_class: 0,
            rng: seeded_rng(seed, 4),
        })
    }

    pub fn from_spec(spec: &StreamSpec) -> Result<Self, BuildError> {
        let function = u8::try_from(spec.int("f").unwrap_or(1)).unwrap_or(0);
        let noise = u32::try_from(spec.int("n").unwrap_or(0))
            .map_err(|_| BuildError::param("SEAGenerator", "n", "noise percentage must be non-negative"))?;
        Self::new(function, spec.int("i").unwrap_or(1) as u64, noise, spec.switch("b"))
    }
}

impl Generator for SeaGenerator {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn next_instance(&mut self) -> Option<Instance> {
        loop {
            let x: [f64; 3] = [self.rng.gen(), self.rng.gen(), self.rng.gen()];
            let mut label = usize::from(x[0] + x[1] > self.threshold);
            if self.balance && label != self.next_class {
                continue;
            }
            self.next_class = 1 - self.next_class;
            if self.noise > 0.0 && self.rng.gen::<f64>() < self.noise {
                label = 1 - label;
            }
            return Some(Instance::new(x.iter().map(|&v| Value::Numeric(v)).collect(), label));
        }
    }
}
