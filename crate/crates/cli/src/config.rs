//! Line-oriented experiment files.
//!
//! ```text
//! # comment
//! instances=400000
//! seeds=10
//! snapshot_every=1000
//! learner=baseline vfdt
//! learner=resplit vfdt allow_resplit=true
//! stream=HyperplaneGenerator -k 10 -t 0.0001 -i 2
//! ```

use crate::CliError;
use std::fmt::Write as _;
use std::path::PathBuf;
use streamtree::hat::{DetectorKind, HatConfig, VotingMode};
use streamtree::streams::{build_generator, parse_stream_spec, BuildError, ParseErrorKind};
use streamtree::testbench::TESTBENCH_INSTANCES;
use streamtree::tree::{CounterMode, InfoGainMode, StrategyConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearnerKind {
    Vfdt(StrategyConfig),
    Hat(HatConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerSpec {
    pub name: String,
    pub kind: LearnerKind,
    /// The overrides as written, kept for round-tripping.
    pub overrides: Vec<(String, String)>,
}

impl LearnerSpec {
    /// Parses `name vfdt|hat key=value ...`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut words = text.split_whitespace();
        let name = words.next().ok_or_else(|| CliError::config("learner", "missing learner name"))?;
        if !name.chars().all(|c| c.is_ascii_alphanumeric() || "_-.+".contains(c)) {
            return Err(CliError::config("learner", format!("name {name:?} may only use letters, digits and _-.+")));
        }
        let algorithm = words.next().ok_or_else(|| CliError::config("learner", format!("{name}: missing algorithm")))?;
        let overrides = words
            .map(|w| {
                w.split_once('=')
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .ok_or_else(|| CliError::config("learner", format!("{name}: expected key=value, got {w:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::build(name, algorithm, overrides)
    }

    pub fn build(name: &str, algorithm: &str, overrides: Vec<(String, String)>) -> Result<Self, CliError> {
        let mut kind = match algorithm {
            "vfdt" => LearnerKind::Vfdt(StrategyConfig::default()),
            "hat" => LearnerKind::Hat(HatConfig::default()),
            other => return Err(CliError::config("learner", format!("{name}: unknown algorithm {other:?} (vfdt, hat)"))),
        };
        for (key, value) in &overrides {
            apply(&mut kind, key, value).map_err(|m| CliError::config("learner", format!("{name}: {key}: {m}")))?;
        }
        let checked = match &kind {
            LearnerKind::Vfdt(c) => c.validate(),
            LearnerKind::Hat(c) => c.validate(),
        };
        checked.map_err(|e| CliError::config("learner", format!("{name}: {e}")))?;
        Ok(Self { name: name.to_string(), kind, overrides })
    }

    pub fn algorithm(&self) -> &'static str {
        match self.kind {
            LearnerKind::Vfdt(_) => "vfdt",
            LearnerKind::Hat(_) => "hat",
        }
    }

    pub fn to_line(&self) -> String {
        let mut out = format!("{} {}", self.name, self.algorithm());
        for (k, v) in &self.overrides {
            let _ = write!(out, " {k}={v}");
        }
        out
    }
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got {v:?}")),
    }
}

fn parse_num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("not a number: {v:?}"))
}

fn parse_counter(v: &str) -> Result<CounterMode, String> {
    match v {
        "node_time" => Ok(CounterMode::NodeTime),
        "weight_seen" => Ok(CounterMode::WeightSeen),
        _ => Err(format!("expected node_time or weight_seen, got {v:?}")),
    }
}

fn apply_base(base: &mut StrategyConfig, key: &str, v: &str) -> Result<bool, String> {
    match key {
        // replaces every tree flag at once, so list it first
        "base" => {
            *base = match v {
                "default" => StrategyConfig::default(),
                "combined" => StrategyConfig::combined(),
                _ => return Err(format!("expected default or combined, got {v:?}")),
            }
        }
        "eidetic" => base.eidetic = parse_bool(v)?,
        "allow_resplit" => base.allow_resplit = parse_bool(v)?,
        "eviscerate" => base.eviscerate_on_used_best = parse_bool(v)?,
        "infogain" => {
            base.infogain_mode = match v {
                "averaged" => InfoGainMode::AveragedOverEvaluations,
                "instantaneous" => InfoGainMode::InstantaneousOverExamples,
                _ => return Err(format!("expected averaged or instantaneous, got {v:?}")),
            }
        }
        "counter" => base.counter_mode = parse_counter(v)?,
        "grace_period" => base.grace_period = parse_num(v)?,
        "delta" => base.delta = parse_num(v)?,
        "tau" => base.tau = parse_num(v)?,
        _ => return Ok(false),
    }
    Ok(true)
}

fn apply(kind: &mut LearnerKind, key: &str, v: &str) -> Result<(), String> {
    match kind {
        LearnerKind::Vfdt(base) => {
            if apply_base(base, key, v)? {
                return Ok(());
            }
        }
        LearnerKind::Hat(hat) => {
            if key == "base" {
                // HAT keeps its own default gain mode unless asked for the VFDT default
                let keep = hat.base.infogain_mode;
                apply_base(&mut hat.base, key, v)?;
                if v == "default" {
                    hat.base.infogain_mode = keep;
                }
                return Ok(());
            }
            if apply_base(&mut hat.base, key, v)? {
                return Ok(());
            }
            match key {
                "voting" => {
                    hat.voting = match v {
                        "none" => VotingMode::None,
                        "single" => VotingMode::SingleAlternate,
                        "multiple" => VotingMode::MultipleAlternates,
                        "multiple_excluding_single_leaves" => VotingMode::MultipleExcludingSingleLeaves,
                        _ => return Err(format!("expected none, single, multiple or multiple_excluding_single_leaves, got {v:?}")),
                    }
                }
                "poisson" => hat.poisson_weighting = parse_bool(v)?,
                "eval_timer" => hat.eval_timer = parse_counter(v)?,
                "replace_root" => hat.replace_root_on_alternate_split = parse_bool(v)?,
                "replace_subtree" => hat.replace_subtree_on_alternate_split = parse_bool(v)?,
                "replacement_check_interval" => hat.replacement_check_interval = parse_num(v)?,
                "replacement_delta" => hat.replacement_delta = parse_num(v)?,
                "max_alternate_depth" => hat.max_alternate_depth = parse_num(v)?,
                "estimator_delta" => hat.estimator_delta = parse_num(v)?,
                "detector" => {
                    hat.detector = match v {
                        "never" => DetectorKind::NeverFire,
                        "adwin" => DetectorKind::Adwin { delta: streamtree::change::DEFAULT_ADWIN_DELTA },
                        _ => match v.strip_prefix("adwin:") {
                            Some(d) => DetectorKind::Adwin { delta: parse_num(d)? },
                            None => return Err(format!("expected adwin, adwin:DELTA or never, got {v:?}")),
                        },
                    }
                }
                _ => return Err("unknown key".into()),
            }
            return Ok(());
        }
    }
    Err("unknown key".into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub learners: Vec<LearnerSpec>,
    pub streams: Vec<String>,
    pub n_instances: u64,
    /// 0 disables error series.
    pub snapshot_every: u64,
    pub seeds: u64,
    pub output_dir: Option<PathBuf>,
    pub parallelism: usize,
    /// Write measured wall time; off keeps results.csv reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            learners: Vec::new(),
            streams: Vec::new(),
            n_instances: TESTBENCH_INSTANCES,
            snapshot_every: 0,
            seeds: 1,
            output_dir: None,
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
            record_timing: false,
        }
    }
}

fn positive(field: &str, v: &str) -> Result<u64, CliError> {
    match v.parse::<u64>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(CliError::config(field, format!("expected a positive integer, got {v:?}"))),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config("line", format!("{}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "learner" => cfg.learners.push(LearnerSpec::parse(value)?),
                "stream" => cfg.streams.push(value.to_string()),
                "instances" => cfg.n_instances = positive(key, value)?,
                "snapshot_every" => {
                    cfg.snapshot_every =
                        value.parse().map_err(|_| CliError::config(key, format!("expected an integer, got {value:?}")))?
                }
                "seeds" => cfg.seeds = positive(key, value)?,
                "jobs" => cfg.parallelism = positive(key, value)? as usize,
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                "record_timing" => cfg.record_timing = parse_bool(value).map_err(|m| CliError::config(key, m))?,
                other => return Err(CliError::config(other, format!("line {}: unknown key", lineno + 1))),
            }
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "instances={}", self.n_instances);
        let _ = writeln!(out, "snapshot_every={}", self.snapshot_every);
        let _ = writeln!(out, "seeds={}", self.seeds);
        let _ = writeln!(out, "jobs={}", self.parallelism);
        if let Some(dir) = &self.output_dir {
            let _ = writeln!(out, "output_dir={}", dir.display());
        }
        let _ = writeln!(out, "record_timing={}", self.record_timing);
        for l in &self.learners {
            let _ = writeln!(out, "learner={}", l.to_line());
        }
        for s in &self.streams {
            let _ = writeln!(out, "stream={s}");
        }
        out
    }

    /// Checks the grid shape and that every stream parses and builds.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.learners.is_empty() {
            return Err(CliError::config("learner", "at least one learner is required"));
        }
        if self.streams.is_empty() {
            return Err(CliError::config("stream", "at least one stream is required"));
        }
        if self.seeds == 0 {
            return Err(CliError::config("seeds", "must be at least 1"));
        }
        if self.n_instances == 0 {
            return Err(CliError::config("instances", "must be at least 1"));
        }
        if self.parallelism == 0 {
            return Err(CliError::config("jobs", "must be at least 1"));
        }
        if self.output_dir.is_none() {
            return Err(CliError::config("output_dir", "no output directory given"));
        }
        for (i, a) in self.learners.iter().enumerate() {
            if self.learners[..i].iter().any(|b| b.name == a.name) {
                return Err(CliError::config("learner", format!("duplicate learner name {:?}", a.name)));
            }
        }
        for s in &self.streams {
            let spec = parse_stream_spec(s).map_err(|e| match e.kind {
                ParseErrorKind::UnknownGenerator(name) => CliError::OutOfScope(name),
                _ => CliError::config("stream", format!("{s:?}: {e}")),
            })?;
            match build_generator(&spec) {
                Ok(_) => {}
                Err(BuildError::OutOfScope(name)) => return Err(CliError::OutOfScope(name)),
                Err(e) => return Err(CliError::config("stream", format!("{s:?}: {e}"))),
            }
        }
        Ok(())
    }
}
