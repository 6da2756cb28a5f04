//! Estimation runs: the base learner runs for T steps, the wrapper
//! resamples and re-queries, and the report compares the per-trial success
//! indicator rho(zhat|z*) >= alpha - eps against the 1 - delta target.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Result};
use serde_json::json;

use dissim::bounds;
use dissim::dims;
use dissim::learners::{pac_estimate, PacConfig};
use dissim::protocol::{evaluate, InstanceRef, NoiseMode};

use crate::commands::simulate::{build_learner, max_estimation_error};
use crate::config::{BoundsMode, ExperimentConfig};

/// Run lengths above this are refused in constant-faithful mode; the
/// formula constants put them far beyond desk scale.
const MAX_RUN_LENGTH: u64 = 200_000;

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let Some(eps) = cfg.epsilon else {
        bail!(dissim::Error::config("pac requires epsilon"));
    };
    let delta = cfg.delta;
    let instance: InstanceRef = Arc::new(cfg.generator.build(cfg.noise)?);
    let alpha = cfg.resolve_alpha(instance.alpha_star());

    let dimension = match cfg.dimension_hint {
        Some(d) => d,
        None => {
            if instance.len() > cfg.auto_dim_cap {
                bail!(dissim::Error::config(format!(
                    "|Z| = {} exceeds auto_dim_cap = {}; supply dimension_hint",
                    instance.len(),
                    cfg.auto_dim_cap
                )));
            }
            let grid = dims::default_epsilon_grid(eps, alpha);
            let (d, _, _) = dims::monotone_dissimilarity_dim(&instance, alpha, eps, &grid)?;
            d.max(1) as u64
        }
    };

    let deterministic = instance.noise_mode() == NoiseMode::Deterministic;
    let (t_steps, n1, n2, c_used) = if deterministic {
        (
            bounds::pac_params_deterministic(dimension, eps)? as usize,
            1,
            1,
            0.0,
        )
    } else {
        let c = match cfg.bounds_mode {
            BoundsMode::ConstantFaithful => {
                // C depends on T only through a log; two fixed-point passes
                // stabilize it.
                let mut t_guess = 1000u64;
                let mut c = 0.0;
                for _ in 0..2 {
                    c = bounds::c_finite(t_guess, instance.len() as u64, delta / 2.0)?;
                    t_guess = bounds::pac_params(dimension, c, eps, delta)?.t_min;
                }
                c
            }
            BoundsMode::Empirical => {
                let mut calibration = build_learner(cfg, &instance, alpha)?;
                let calibration_t = cfg.t.max(500);
                let tr = dissim::protocol::run_protocol(
                    &instance,
                    calibration.as_mut(),
                    calibration_t,
                    alpha,
                    0xCA11,
                )?;
                1.1 * max_estimation_error(&instance, &tr)
            }
        };
        let mut params = bounds::pac_params(dimension, c, eps, delta)?;
        if let Some(n1) = cfg.n1 {
            params.n1 = n1 as u64;
        }
        if let Some(n2) = cfg.n2 {
            params.n2 = n2 as u64;
        }
        if params.t_min > MAX_RUN_LENGTH {
            bail!(dissim::Error::config(format!(
                "derived T = {} exceeds the run cap {MAX_RUN_LENGTH}; use bounds_mode = \
                 \"empirical\" or a smaller instance",
                params.t_min
            )));
        }
        (
            params.t_min as usize,
            params.n1 as usize,
            params.n2 as usize,
            c,
        )
    };

    let trial_seeds: Vec<u64> = match cfg.trials {
        Some(n) => (0..n as u64)
            .map(|i| cfg.seeds[0].wrapping_add(i))
            .collect(),
        None => cfg.seeds.clone(),
    };
    let pac_cfg = PacConfig {
        t_steps,
        n1,
        n2,
        alpha,
        epsilon: eps,
        delta,
    };
    let mut successes = 0usize;
    let mut trials = Vec::new();
    for &seed in &trial_seeds {
        let mut base = build_learner(cfg, &instance, alpha)?;
        let outcome = pac_estimate(&instance, base.as_mut(), &pac_cfg, seed)?;
        let achieved = evaluate(&instance, outcome.chosen, instance.target())?;
        let success = achieved >= alpha - eps;
        if success {
            successes += 1;
        }
        trials.push(json!({
            "seed": seed,
            "chosen": outcome.chosen,
            "achieved": achieved,
            "success": success,
        }));
    }
    let rate = successes as f64 / trial_seeds.len() as f64;
    let report = json!({
        "config": cfg,
        "alpha": alpha,
        "epsilon": eps,
        "delta": delta,
        "dimension_used": dimension,
        "deterministic": deterministic,
        "t": t_steps,
        "n1": n1,
        "n2": n2,
        "c_used": c_used,
        "trials": trials,
        "success_rate": rate,
        "target_rate": 1.0 - delta,
        "meets_target": rate >= 1.0 - delta,
    });
    std::fs::write(out.join("pac.json"), serde_json::to_string_pretty(&report)?)?;
    println!(
        "pac: {} trials, success rate {rate:.3} (target {:.3}) -> {}",
        trial_seeds.len(),
        1.0 - delta,
        out.display()
    );
    Ok(())
}
