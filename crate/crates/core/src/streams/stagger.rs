//! STAGGER concepts over size, color and shape.

use super::{seeded_rng, Attribute, BuildError, Generator, Instance, Schema, StreamRng, StreamSpec, Value};
use rand::Rng;

pub const SIZES: [&str; 3] = ["small", "medium", "large"];
pub const COLORS: [&str; 3] = ["red", "green", "blue"];
pub const SHAPES: [&str; 3] = ["circle", "square", "triangle"];

/// Class (1 = concept holds) of `(size, color, shape)` under concept
/// `function` (1..=3):
/// 1. size = small and color = red
/// 2. color = green or shape = circle
/// 3. size = medium or size = large
pub fn stagger_concept(function: u8, size: usize, color: usize, shape: usize) -> usize {
    let holds = match function {
        1 => size == 0 && color == 0,
        2 => color == 1 || shape == 0,
        3 => size == 1 || size == 2,
        _ => panic!("STAGGER function must be 1, 2 or 3"),
    };
    holds as usize
}

pub struct StaggerGenerator {
    schema: Schema,
    function: u8,
    balance: bool,
    next_class: usize,
    rng: StreamRng,
}

impl StaggerGenerator {
    pub fn new(function: u8, seed: u64, balance: bool) -> Result<Self, BuildError> {
        if !(1..=3).contains(&function) {
            return Err(BuildError::param("STAGGERGenerator", "f", "function must be 1, 2 or 3"));
        }
        let schema = Schema::new(
            vec![Attribute::nominal("size", 3), Attribute::nominal("color", 3), Attribute::nominal("shape", 3)],
            2,
        )?;
        Ok(Self { schema, function, balance, next_class: 0, rng: seeded_rng(seed, 3) })
    }

    pub fn from_spec(spec: &StreamSpec) -> Result<Self, BuildError> {
        let function = spec.int("f").unwrap_or(1);
        let function = u8::try_from(function).unwrap_or(0);
        Self::new(function, spec.int("i").unwrap_or(1) as u64, spec.switch("b"))
    }
}

impl Generator for StaggerGenerator {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn next_instance(&mut self) -> Option<Instance> {
        loop {
            let (size, color, shape) = (self.rng.gen_range(0..3), self.rng.gen_range(0..3), self.rng.gen_range(0..3));
            let label = stagger_concept(self.function, size, color, shape);
            if self.balance && label != self.next_class {
                continue;
            }
            self.next_class = 1 - self.next_class;
            return Some(Instance::new(vec![Value::Nominal(size), Value::Nominal(color), Value::Nominal(shape)], label));
        }
    }
}
