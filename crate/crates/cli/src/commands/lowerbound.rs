//! Uniform-target lower-bound experiment on the hard indicator class,
//! plus the in-class contrast run that must beat the lower-bound rate.

use std::path::Path;

use anyhow::{bail, Result};
use serde_json::json;

use dissim::instances::{
    make_hard_indicator, run_hard_lower_bound, run_tilde_easy, HardLearnerKind,
};

#[allow(clippy::too_many_arguments)]
pub fn run(
    n_special: usize,
    eps: f64,
    t_steps: usize,
    learner: &str,
    trials: usize,
    seed: u64,
    resolution: usize,
    out: &Path,
) -> Result<()> {
    if trials == 0 {
        bail!(dissim::Error::invalid("trials must be at least 1"));
    }
    let kind = match learner {
        "ls" | "alg1" => HardLearnerKind::LsOnTilde,
        "scan" | "scan_baseline" => HardLearnerKind::ScanBaseline,
        "uniform" | "uniform_random" => HardLearnerKind::UniformRandom,
        other => bail!(dissim::Error::config(format!(
            "unknown lowerbound learner {other:?} (expected ls | scan | uniform)"
        ))),
    };
    std::fs::create_dir_all(out)?;
    let pair = make_hard_indicator(n_special, eps, resolution, seed)?;
    let report = run_hard_lower_bound(&pair, kind, t_steps, trials, seed)?;
    let easy = run_tilde_easy(&pair, t_steps, trials.min(100), seed)?;
    let rendered = json!({
        "experiment": report,
        "meets_lower_bound": {
            "mean_regret_vs_0.8x_comparator":
                report.mean_regret >= 0.8 * report.regret_comparator,
            "p_t_opt_vs_comparator_minus_0.06":
                report.p_t_opt_at_threshold >= 1.0 / (2.0 * std::f64::consts::E) - 0.06,
        },
        "in_class_contrast": easy,
    });
    std::fs::write(
        out.join("lowerbound.json"),
        serde_json::to_string_pretty(&rendered)?,
    )?;
    println!(
        "lowerbound: {} mean regret {:.4} (comparator {:.4}), P(T_opt >= {}) = {:.4}; \
         in-class mean regret {:.4} beats rate: {} -> {}",
        learner,
        report.mean_regret,
        report.regret_comparator,
        report.threshold,
        report.p_t_opt_at_threshold,
        easy.mean_regret_alpha_one,
        easy.beats_lower_bound_rate,
        out.display()
    );
    Ok(())
}
