//! Wrapper alternating between two streams with sigmoid transitions centred
//! at `x`, `x + y`, `x + 2y`, ...

use super::{build_generator, seeded_rng, BuildError, Generator, Instance, Schema, StreamRng, StreamSpec};
use rand::Rng;

pub struct RecurrentDriftStream {
    first: Box<dyn Generator>,
    second: Box<dyn Generator>,
    first_drift: u64,
    period: u64,
    width: f64,
    rng: StreamRng,
    t: u64,
}

impl RecurrentDriftStream {
    pub fn new(
        first: Box<dyn Generator>,
        second: Box<dyn Generator>,
        first_drift: u64,
        period: u64,
        width: f64,
        seed: u64,
    ) -> Result<Self, BuildError> {
        const G: &str = "RecurrentConceptDriftStream";
        if first.schema() != second.schema() {
            return Err(BuildError::SchemaMismatch);
        }
        if period == 0 {
            return Err(BuildError::param(G, "y", "period must be positive"));
        }
        if !(width > 0.0) {
            return Err(BuildError::param(G, "z", "width must be positive"));
        }
        Ok(Self { first, second, first_drift, period, width, rng: seeded_rng(seed, 6), t: 0 })
    }

    pub fn from_spec(spec: &StreamSpec) -> Result<Self, BuildError> {
        const G: &str = "RecurrentConceptDriftStream";
        let sub = |flag: &str| -> Result<Box<dyn Generator>, BuildError> {
            let s = spec.nested(flag).ok_or_else(|| BuildError::param(G, flag, "sub-stream required"))?;
            build_generator(s)
        };
        let nonneg = |flag: &str, default: i64| -> Result<u64, BuildError> {
            u64::try_from(spec.int(flag).unwrap_or(default)).map_err(|_| BuildError::param(G, flag, "must be non-negative"))
        };
        Self::new(
            sub("s")?,
            sub("d")?,
            nonneg("x", 200_000)?,
            nonneg("y", 200_000)?,
            spec.float("z").unwrap_or(1.0),
            nonneg("r", 1)?,
        )
    }

    /// Probability that instance `t` comes from the second stream.
    pub fn second_stream_probability(&self, t: u64) -> f64 {
        let (x, y) = (self.first_drift as f64, self.period as f64);
        let t = t as f64;
        let k = ((t - x) / y).round().max(0.0);
        let centre = x + k * y;
        let toward_next = 1.0 / (1.0 + (-4.0 * (t - centre) / self.width).exp());
        // transitions with even k go first -> second, odd k go back
        if (k as u64) % 2 == 0 {
            toward_next
        } else {
            1.0 - toward_next
        }
    }
}

impl Generator for RecurrentDriftStream {
    fn schema(&self) -> &Schema {
        self.first.schema()
    }

    fn next_instance(&mut self) -> Option<Instance> {
        let p = self.second_stream_probability(self.t);
        self.t += 1;
        if self.rng.gen::<f64>() < p {
            self.second.next_instance()
        } else {
            self.first.next_instance()
        }
    }
}
