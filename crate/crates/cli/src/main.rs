use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use streamtree_cli::{preset, run_experiment, CliError, ExperimentConfig, PRESET_NAMES};

/// Run a learner comparison grid over drift streams.
#[derive(Parser, Debug)]
#[command(name = "streamtree", version)]
struct Args {
    /// Experiment file (key=value lines)
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in comparison; see --list-presets
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    list_presets: bool,
    /// Output directory, created if missing
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    instances: Option<u64>,
    #[arg(long)]
    snapshot_every: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Print the resolved config and exit
    #[arg(long)]
    dry_run: bool,
}

fn load(args: &Args) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
            ExperimentConfig::parse(&text)?
        }
        (None, Some(name)) => preset(name)?,
        (None, None) => return Err(CliError::config("config", "pass --config PATH or --preset NAME")),
    };
    if let Some(out) = &args.out {
        cfg.output_dir = Some(out.clone());
    }
    if let Some(n) = args.seeds {
        cfg.seeds = n;
    }
    if let Some(n) = args.instances {
        cfg.n_instances = n;
    }
    if let Some(n) = args.snapshot_every {
        cfg.snapshot_every = n;
    }
    if let Some(n) = args.jobs {
        cfg.parallelism = n;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_presets {
        for name in PRESET_NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let result = load(&args).and_then(|cfg| {
        if args.dry_run {
            cfg.validate()?;
            print!("{}", cfg.to_text());
            return Ok(());
        }
        let outcome = run_experiment(&cfg)?;
        for (_, _, report) in &outcome.comparisons {
            println!(
                "{} vs {}: {}/{}/{} (A/B/tie), p={:.5}",
                report.label_a, report.label_b, report.wins_a, report.wins_b, report.ties, report.p_value
            );
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("streamtree: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
