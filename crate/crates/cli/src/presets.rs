//! Named comparisons over the drift testbench.

use crate::config::{ExperimentConfig, LearnerSpec};
use crate::CliError;
use std::path::PathBuf;
use streamtree::testbench::in_scope_rows;

/// Drift at 150k on a 5-attribute, 5-value, 5-class table.
pub const AMNESIA_STREAM: &str = "AbruptDriftGenerator -c -o 1.0 -z 5 -n 5 -v 5 -b 150000";
pub const AMNESIA_INSTANCES: u64 = 300_000;

pub const PRESET_NAMES: [&str; 16] = [
    "resplit-vfdt",
    "infogain-vfdt",
    "counters-vfdt",
    "combined-vfdt",
    "eviscerate-vfdt",
    "resplit-hat",
    "altvote-hat",
    "multialt-hat",
    "singleleaf-hat",
    "poisson-hat",
    "avg-infogain-hat",
    "root-replace-hat",
    "subtree-replace-hat",
    "both-replace-hat",
    "vfdt-flags-in-hat",
    "amnesia-figure",
];

fn learner(line: &str) -> LearnerSpec {
    LearnerSpec::parse(line).expect("preset learner lines are valid")
}

/// (learner A, learner B) for each table preset. B is the strategy under test.
fn pair(name: &str) -> Option<(&'static str, &'static str)> {
    Some(match name {
        "resplit-vfdt" => ("vfdt vfdt", "vfdt-resplit vfdt allow_resplit=true"),
        "infogain-vfdt" => ("vfdt vfdt", "vfdt-instantaneous vfdt infogain=instantaneous"),
        "counters-vfdt" => ("vfdt vfdt", "vfdt-weight-seen vfdt counter=weight_seen"),
        "combined-vfdt" => ("vfdt vfdt", "vfdt-combined vfdt base=combined"),
        "eviscerate-vfdt" => ("vfdt vfdt", "vfdt-eviscerate vfdt eviscerate=true"),
        "resplit-hat" => ("hat hat", "hat-resplit hat allow_resplit=true"),
        "altvote-hat" => ("hat hat", "hat-single-vote hat voting=single"),
        "multialt-hat" => ("hat hat", "hat-multi-vote hat voting=multiple"),
        "singleleaf-hat" => (
            "hat-multi-vote hat voting=multiple",
            "hat-multi-no-single-leaves hat voting=multiple_excluding_single_leaves",
        ),
        "poisson-hat" => (
            "hat-multi-no-single-leaves hat voting=multiple_excluding_single_leaves",
            "hat-poisson hat voting=multiple_excluding_single_leaves poisson=true",
        ),
        "avg-infogain-hat" => ("hat hat", "hat-averaged hat infogain=averaged"),
        "root-replace-hat" => ("hat-vfdt-flags hat base=combined", "hat-root-replace hat base=combined replace_root=true"),
        "subtree-replace-hat" => {
            ("hat-vfdt-flags hat base=combined", "hat-subtree-replace hat base=combined replace_subtree=true")
        }
        "both-replace-hat" => (
            "hat-vfdt-flags hat base=combined",
            "hat-both-replace hat base=combined replace_root=true replace_subtree=true",
        ),
        "vfdt-flags-in-hat" => ("hat hat", "hat-vfdt-flags hat base=combined"),
        "amnesia-figure" => ("vfdt-combined vfdt base=combined", "vfdt-eidetic vfdt base=combined eidetic=true"),
        _ => return None,
    })
}

pub fn preset(name: &str) -> Result<ExperimentConfig, CliError> {
    let (a, b) = pair(name).ok_or_else(|| CliError::UnknownPreset(name.to_string()))?;
    let mut cfg = ExperimentConfig {
        learners: vec![learner(a), learner(b)],
        output_dir: Some(PathBuf::from("results").join(name)),
        ..ExperimentConfig::default()
    };
    if name == "amnesia-figure" {
        cfg.streams = vec![AMNESIA_STREAM.to_string()];
        cfg.n_instances = AMNESIA_INSTANCES;
        cfg.seeds = 10;
        cfg.snapshot_every = 1000;
    } else {
        cfg.streams = in_scope_rows().into_iter().map(String::from).collect();
    }
    Ok(cfg)
}
