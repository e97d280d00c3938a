//! Rotating hyperplane: class 1 when `sum(w_i x_i) >= sum(w_i) / 2`, with the
//! first `k` weights drifting by `t` per instance and each drift direction
//! reversing with probability `s`%.

use super::{seeded_rng, Attribute, BuildError, Generator, Instance, Schema, StreamRng, StreamSpec, Value};
use rand::Rng;

pub struct HyperplaneGenerator {
    schema: Schema,
    weights: Vec<f64>,
    directions: Vec<f64>,
    drifting: usize,
    magnitude: f64,
    noise: f64,
    reverse_prob: f64,
    rng: StreamRng,
}

impl HyperplaneGenerator {
    pub fn new(
        attributes: usize,
        drifting: usize,
        magnitude: f64,
        noise_percent: u32,
        sigma_percent: u32,
        seed: u64,
    ) -> Result<Self, BuildError> {
        const G: &str = "HyperplaneGenerator";
        if attributes == 0 {
            return Err(BuildError::param(G, "a", "needs at least one attribute"));
        }
        if drifting > attributes {
            return Err(BuildError::param(G, "k", "more drifting attributes than attributes"));
        }
        if noise_percent > 100 || sigma_percent > 100 {
            return Err(BuildError::param(G, "n", "percentages must not exceed 100"));
        }
        if !(magnitude >= 0.0) {
            return Err(BuildError::param(G, "t", "magnitude must be non-negative"));
        }
        let schema = Schema::new((0..attributes).map(|i| Attribute::numeric(format!("x{i}"), 0.0, 1.0)).collect(), 2)?;
        let mut rng = seeded_rng(seed, 5);
        let weights = (0..attributes).map(|_| rng.gen::<f64>()).collect();
        let directions = (0..attributes).map(|i| if i < drifting { 1.0 } else { 0.0 }).collect();
        Ok(Self {
            schema,
            weights,
            directions,
            drifting,
            magnitude,
            noise: noise_percent as f64 / 100.0,
            reverse_prob: sigma_percent as f64 / 100.0,
            rng,
        })
    }

    pub fn from_spec(spec: &StreamSpec) -> Result<Self, BuildError> {
        const G: &str = "HyperplaneGenerator";
        let nonneg = |flag: &str, default: i64| -> Result<u64, BuildError> {
            u64::try_from(spec.int(flag).unwrap_or(default)).map_err(|_| BuildError::param(G, flag, "must be non-negative"))
        };
        if spec.int("c").unwrap_or(2) != 2 {
            return Err(BuildError::param(G, "c", "only two classes are supported"));
        }
        Self::new(
            nonneg("a", 10)? as usize,
            nonneg("k", 2)? as usize,
            spec.float("t").unwrap_or(0.0),
            nonneg("n", 0)? as u32,
            nonneg("s", 10)? as u32,
            nonneg("i", 1)?,
        )
    }
}

impl Generator for HyperplaneGenerator {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn next_instance(&mut self) -> Option<Instance> {
        let mut dot = 0.0;
        let mut total = 0.0;
        let mut values = Vec::with_capacity(self.weights.len());
        for w in &self.weights {
            let x: f64 = self.rng.gen();
            dot += w * x;
            total += w;
            values.push(Value::Numeric(x));
        }
        let mut label = usize::from(dot >= 0.5 * total);
        if self.noise > 0.0 && self.rng.gen::<f64>() < self.noise {
            label = 1 - label;
        }
        for i in 0..self.drifting {
            self.weights[i] += self.directions[i] * self.magnitude;
            if self.rng.gen::<f64>() < self.reverse_prob {
                self.directions[i] = -self.directions[i];
            }
        }
        Some(Instance::new(values, label))
    }
}
