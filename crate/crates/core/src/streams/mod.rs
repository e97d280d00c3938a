//! Synthetic data streams and the option-string language that describes them.

mod abrupt;
mod hyperplane;
mod recurrent;
mod sea;
mod spec;
mod stagger;

pub use abrupt::{apply_drift, changed_cell_count, AbruptDriftGenerator, AbruptDriftParams, CellTable, DriftMode, DriftSchedule};
pub use hyperplane::HyperplaneGenerator;
pub use recurrent::RecurrentDriftStream;
pub use sea::{SeaGenerator, SEA_THRESHOLDS};
pub use spec::{parse_stream_spec, ParamValue, ParseError, ParseErrorKind, StreamSpec};
pub use stagger::{stagger_concept, StaggerGenerator, COLORS, SHAPES, SIZES};

use rand::SeedableRng;
use rand_pcg::Pcg64;
use thiserror::Error;

/// Random generator used by every stream and by Poisson weighting.
pub type StreamRng = Pcg64;

/// Seeds a [`StreamRng`] for one purpose (`tag`) of a seeded object.
pub fn seeded_rng(seed: u64, tag: u64) -> StreamRng {
    // splitmix64 finalizer so nearby seeds and tags give unrelated states
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    Pcg64::seed_from_u64(z ^ (z >> 31))
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeKind {
    Nominal { values: usize },
    Numeric { min: f64, max: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn nominal(name: impl Into<String>, values: usize) -> Self {
        Self { name: name.into(), kind: AttributeKind::Nominal { values } }
    }

    pub fn numeric(name: impl Into<String>, min: f64, max: f64) -> Self {
        Self { name: name.into(), kind: AttributeKind::Numeric { min, max } }
    }

    /// Value count for nominal attributes, `None` for numeric ones.
    pub fn value_count(&self) -> Option<usize> {
        match self.kind {
            AttributeKind::Nominal { values } => Some(values),
            AttributeKind::Numeric { .. } => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemaError {
    #[error("schema needs at least one attribute")]
    NoAttributes,
    #[error("schema needs at least two classes, got {0}")]
    TooFewClasses(usize),
    #[error("nominal attribute {0} needs at least two values")]
    TooFewValues(usize),
    #[error("instance has {got} values, schema has {expected} attributes")]
    Arity { expected: usize, got: usize },
    #[error("attribute {attribute}: value does not fit the schema")]
    BadValue { attribute: usize },
    #[error("class label {label} out of range for {classes} classes")]
    BadLabel { label: usize, classes: usize },
    #[error("instance weight {0} is negative or not finite")]
    BadWeight(f64),
}

/// Attribute layout and class count shared by a stream and its learners.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    attributes: Vec<Attribute>,
    class_count: usize,
}

impl Schema {
    pub fn new(attributes: Vec<Attribute>, class_count: usize) -> Result<Self, SchemaError> {
        if attributes.is_empty() {
            return Err(SchemaError::NoAttributes);
        }
        if class_count < 2 {
            return Err(SchemaError::TooFewClasses(class_count));
        }
        for (i, a) in attributes.iter().enumerate() {
            if matches!(a.kind, AttributeKind::Nominal { values } if values < 2) {
                return Err(SchemaError::TooFewValues(i));
            }
        }
        Ok(Self { attributes, class_count })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Checks that `instance` fits this schema.
    pub fn check(&self, instance: &Instance) -> Result<(), SchemaError> {
        if instance.values.len() != self.attributes.len() {
            return Err(SchemaError::Arity { expected: self.attributes.len(), got: instance.values.len() });
        }
        for (i, (a, v)) in self.attributes.iter().zip(&instance.values).enumerate() {
            let ok = match (&a.kind, v) {
                (AttributeKind::Nominal { values }, Value::Nominal(j)) => j < values,
                (AttributeKind::Numeric { .. }, Value::Numeric(x)) => x.is_finite(),
                _ => false,
            };
            if !ok {
                return Err(SchemaError::BadValue { attribute: i });
            }
        }
        if instance.class_label >= self.class_count {
            return Err(SchemaError::BadLabel { label: instance.class_label, classes: self.class_count });
        }
        if !(instance.weight >= 0.0 && instance.weight.is_finite()) {
            return Err(SchemaError::BadWeight(instance.weight));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Nominal(usize),
    Numeric(f64),
}

impl Value {
    /// Nominal index; panics on a numeric value (schema-checked callers only).
    pub fn index(self) -> usize {
        match self {
            Value::Nominal(j) => j,
            Value::Numeric(_) => panic!("numeric value used as nominal index"),
        }
    }

    pub fn real(self) -> f64 {
        match self {
            Value::Numeric(x) => x,
            Value::Nominal(j) => j as f64,
        }
    }
}

/// One labeled example.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub values: Vec<Value>,
    pub class_label: usize,
    pub weight: f64,
}

impl Instance {
    pub fn new(values: Vec<Value>, class_label: usize) -> Self {
        Self { values, class_label, weight: 1.0 }
    }

    pub fn nominal(values: &[usize], class_label: usize) -> Self {
        Self::new(values.iter().map(|&j| Value::Nominal(j)).collect(), class_label)
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

/// A stateful, seeded source of instances.
pub trait Generator: Send {
    fn schema(&self) -> &Schema;

    /// Next instance, or `None` once a finite source is exhausted.
    /// Every generator in this crate is infinite.
    fn next_instance(&mut self) -> Option<Instance>;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("generator {0} is out of scope")]
    OutOfScope(String),
    #[error("{generator}: parameter -{flag}: {reason}")]
    InvalidParameter { generator: String, flag: String, reason: String },
    #[error("recurrent stream: sub-streams have different schemas")]
    SchemaMismatch,
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

impl BuildError {
    pub(crate) fn param(generator: &str, flag: &str, reason: impl Into<String>) -> Self {
        BuildError::InvalidParameter { generator: generator.into(), flag: flag.into(), reason: reason.into() }
    }
}

/// Builds the generator a parsed spec describes.
pub fn build_generator(spec: &StreamSpec) -> Result<Box<dyn Generator>, BuildError> {
    match spec.generator_name() {
        "AbruptDriftGenerator" => {
            let params = AbruptDriftParams::from_spec(spec)?;
            Ok(Box::new(AbruptDriftGenerator::new(params)?))
        }
        "STAGGERGenerator" => Ok(Box::new(StaggerGenerator::from_spec(spec)?)),
        "SEAGenerator" => Ok(Box::new(SeaGenerator::from_spec(spec)?)),
        "HyperplaneGenerator" => Ok(Box::new(HyperplaneGenerator::from_spec(spec)?)),
        "RecurrentConceptDriftStream" => Ok(Box::new(RecurrentDriftStream::from_spec(spec)?)),
        other => Err(BuildError::OutOfScope(other.to_string())),
    }
}

/// Parses `text` and builds its generator in one step.
pub fn generator_from_str(text: &str) -> Result<Box<dyn Generator>, StreamError> {
    let spec = parse_stream_spec(text)?;
    Ok(build_generator(&spec)?)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StreamError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Build(#[from] BuildError),
}
