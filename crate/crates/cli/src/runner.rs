//! Grid execution and output files.

use crate::config::{ExperimentConfig, LearnerKind, LearnerSpec};
use crate::CliError;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use streamtree::eval::{average_series, compare, prequential_run, ComparisonReport, SeriesPoint};
use streamtree::hat::HoeffdingAdaptiveTree;
use streamtree::streams::{build_generator, parse_stream_spec};
use streamtree::tree::HoeffdingTree;

/// One prequential pass of one learner over one seeded stream.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub learner: usize,
    pub stream: usize,
    pub seed: u64,
    pub final_error: f64,
    pub wall_seconds: f64,
    pub series: Vec<SeriesPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    /// In (learner, stream, seed) order.
    pub records: Vec<RunRecord>,
    /// `mean_errors[learner][stream]`: final error averaged over seeds.
    pub mean_errors: Vec<Vec<f64>>,
    /// `mean_series[learner][stream]`; empty without snapshots.
    pub mean_series: Vec<Vec<Vec<SeriesPoint>>>,
    /// One report per learner pair (i < j), A = i.
    pub comparisons: Vec<(usize, usize, ComparisonReport)>,
}

fn run_one(learner: &LearnerSpec, stream: &str, seed: u64, cfg: &ExperimentConfig) -> Result<RunRecord, CliError> {
    let spec = parse_stream_spec(stream).map_err(|e| CliError::config("stream", e.to_string()))?;
    let mut generator = build_generator(&spec.with_seed_offset(seed as i64)).map_err(|e| CliError::config("stream", e.to_string()))?;
    let schema = generator.schema().clone();
    let result = match learner.kind {
        LearnerKind::Vfdt(c) => {
            let mut tree = HoeffdingTree::new(schema, c).map_err(|e| CliError::config("learner", e.to_string()))?;
            prequential_run(&mut tree, generator.as_mut(), cfg.n_instances, cfg.snapshot_every)
        }
        LearnerKind::Hat(mut c) => {
            c.seed = c.seed.wrapping_add(seed);
            let mut tree = HoeffdingAdaptiveTree::new(schema, c).map_err(|e| CliError::config("learner", e.to_string()))?;
            prequential_run(&mut tree, generator.as_mut(), cfg.n_instances, cfg.snapshot_every)
        }
    }
    .map_err(CliError::Eval)?;
    Ok(RunRecord {
        learner: 0,
        stream: 0,
        seed,
        final_error: result.final_error,
        wall_seconds: result.wall_time,
        series: result.error_series,
    })
}

/// Runs every (learner, stream, seed) triple without touching the filesystem.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, CliError> {
    let mut jobs = Vec::new();
    for l in 0..cfg.learners.len() {
        for s in 0..cfg.streams.len() {
            for seed in 0..cfg.seeds {
                jobs.push((l, s, seed));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| CliError::config("jobs", e.to_string()))?;
    let records: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(l, s, seed)| {
                let mut r = run_one(&cfg.learners[l], &cfg.streams[s], seed, cfg)?;
                r.learner = l;
                r.stream = s;
                Ok(r)
            })
            .collect::<Result<_, CliError>>()
    })?;

    let per_cell = cfg.seeds as usize;
    let cell = |l: usize, s: usize| &records[(l * cfg.streams.len() + s) * per_cell..][..per_cell];
    let mut mean_errors = Vec::new();
    let mut mean_series = Vec::new();
    for l in 0..cfg.learners.len() {
        let mut errs = Vec::new();
        let mut series = Vec::new();
        for s in 0..cfg.streams.len() {
            let runs = cell(l, s);
            errs.push(runs.iter().map(|r| r.final_error).sum::<f64>() / per_cell as f64);
            if cfg.snapshot_every > 0 {
                let all: Vec<Vec<SeriesPoint>> = runs.iter().map(|r| r.series.clone()).collect();
                series.push(average_series(&all).map_err(CliError::Eval)?);
            }
        }
        mean_errors.push(errs);
        mean_series.push(series);
    }

    let mut comparisons = Vec::new();
    for i in 0..cfg.learners.len() {
        for j in i + 1..cfg.learners.len() {
            let report = compare(&mean_errors[i], &mean_errors[j], &cfg.streams, &cfg.learners[i].name, &cfg.learners[j].name)
                .expect("one mean error per stream");
            comparisons.push((i, j, report));
        }
    }
    Ok(ExperimentOutcome { records, mean_errors, mean_series, comparisons })
}

/// Directory-safe label for a stream: its index plus a shortened form of the option string.
pub fn stream_slug(index: usize, stream: &str) -> String {
    let mut slug = String::new();
    for c in stream.chars() {
        if c.is_ascii_alphanumeric() || c == '.' {
            slug.push(c);
        } else if !slug.ends_with('-') && !slug.is_empty() {
            slug.push('-');
        }
    }
    let slug = slug.trim_end_matches('-');
    let cut = slug.char_indices().nth(80).map_or(slug.len(), |(i, _)| i);
    format!("{index:02}-{}", slug[..cut].trim_end_matches('-'))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn results_csv(cfg: &ExperimentConfig, outcome: &ExperimentOutcome) -> String {
    let mut out = String::from("stream,learner,seed,instances,final_error,wall_seconds\n");
    for r in &outcome.records {
        let wall = if cfg.record_timing { format!("{:.3}", r.wall_seconds) } else { "NA".to_string() };
        let _ = writeln!(
            out,
            "{},{},{},{},{:.5},{}",
            csv_field(&cfg.streams[r.stream]),
            csv_field(&cfg.learners[r.learner].name),
            r.seed,
            cfg.n_instances,
            r.final_error,
            wall
        );
    }
    out
}

/// Writes results.csv, the comparison tables and any series files.
pub fn write_outputs(cfg: &ExperimentConfig, outcome: &ExperimentOutcome, dir: &Path) -> Result<(), CliError> {
    write(&dir.join("results.csv"), &results_csv(cfg, outcome))?;
    let single = outcome.comparisons.len() == 1;
    for (i, j, report) in &outcome.comparisons {
        let stem = if single {
            "comparison".to_string()
        } else {
            format!("comparison-{}-vs-{}", cfg.learners[*i].name, cfg.learners[*j].name)
        };
        write(&dir.join(format!("{stem}.csv")), &report.to_csv())?;
        let mut md = report.to_markdown();
        let _ = write!(md, "\nInstances per stream: {}; seeds: {}.\n", cfg.n_instances, cfg.seeds);
        write(&dir.join(format!("{stem}.md")), &md)?;
    }
    if cfg.snapshot_every > 0 {
        for (s, stream) in cfg.streams.iter().enumerate() {
            let sub = dir.join("series").join(stream_slug(s, stream));
            fs::create_dir_all(&sub).map_err(|e| CliError::io(&sub, e))?;
            for (l, learner) in cfg.learners.iter().enumerate() {
                let mut csv = String::from("instance_index,mean_error\n");
                for (t, e) in &outcome.mean_series[l][s] {
                    let _ = writeln!(csv, "{t},{e:.6}");
                }
                write(&sub.join(format!("{}.csv", learner.name)), &csv)?;
            }
        }
    }
    Ok(())
}

/// Validates, prepares the output directory, runs the grid and writes every file.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, CliError> {
    cfg.validate()?;
    let dir: PathBuf = cfg.output_dir.clone().expect("validated");
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    // fail on an unwritable directory before hours of training
    let probe = dir.join("results.csv");
    fs::write(&probe, "").map_err(|e| CliError::io(&probe, e))?;
    let outcome = run_grid(cfg)?;
    write_outputs(cfg, &outcome, &dir)?;
    Ok(outcome)
}
