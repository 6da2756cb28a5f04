//! Batch protocol runs: seeds fan out over a worker pool, each writes its
//! own transcript CSV; one summary JSON and one plot-data CSV follow.

use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use dissim::bounds;
use dissim::dims;
use dissim::learners::{
    KarmedLearner, LsLearner, OptimisticLearner, OptimisticOracleLearner, OracleLsLearner,
    ScanLearner,
};
use dissim::oracle::RegressionOracle;
use dissim::protocol::{
    regret, run_protocol, AlternativeId, Instance, InstanceRef, Learner, NoiseMode, Transcript,
};

use crate::config::{AlphaName, AlphaSpec, BoundsMode, ExperimentConfig, LearnerKind};

pub fn build_learner(
    cfg: &ExperimentConfig,
    instance: &InstanceRef,
    alpha: f64,
) -> Result<Box<dyn Learner>> {
    let radius = || -> Result<f64> {
        match cfg.radius {
            Some(r) => Ok(r),
            None => Ok(bounds::optimistic_radius(
                cfg.t as u64,
                instance.len() as u64,
                cfg.delta,
            )?),
        }
    };
    Ok(match cfg.learner {
        LearnerKind::Ls => Box::new(LsLearner::new(Arc::clone(instance), alpha)?),
        LearnerKind::Optimistic => {
            Box::new(OptimisticLearner::new(Arc::clone(instance), radius()?))
        }
        LearnerKind::OracleLs => {
            let oracle = RegressionOracle::new(cfg.oracle_kind, instance.len(), cfg.eta)?;
            Box::new(OracleLsLearner::new(Arc::clone(instance), alpha, oracle)?)
        }
        LearnerKind::OptimisticOracle => {
            let oracle = RegressionOracle::new(cfg.oracle_kind, instance.len(), cfg.eta)?;
            let r = match cfg.radius {
                Some(r) => r,
                None => bounds::oracle_radius(
                    8.0 * (instance.len() as f64).ln(),
                    2.0,
                    4.0,
                    cfg.t as u64,
                    cfg.delta,
                )?,
            };
            Box::new(OptimisticOracleLearner::new(
                Arc::clone(instance),
                r,
                oracle,
            ))
        }
        LearnerKind::KarmedClosedForm => Box::new(KarmedLearner::new(Arc::clone(instance), alpha)?),
        LearnerKind::ScanBaseline => Box::new(ScanLearner::new(
            (0..instance.len()).map(AlternativeId).collect(),
        )),
    })
}

/// Worst all-prefix estimation error of a transcript:
/// max_t sum_{i<t} (rho(z_i|z_t) - rho(z_i|z*))^2.
pub fn max_estimation_error(instance: &Instance, transcript: &Transcript) -> f64 {
    let target = instance.target();
    let queries: Vec<AlternativeId> = transcript.steps.iter().map(|s| s.query).collect();
    let mut worst = 0.0f64;
    for t in 0..queries.len() {
        let zt = queries[t];
        let mut sum = 0.0;
        for &zi in &queries[..t] {
            let d = dissim::protocol::evaluate(instance, zi, zt).unwrap()
                - dissim::protocol::evaluate(instance, zi, target).unwrap();
            sum += d * d;
        }
        worst = worst.max(sum);
    }
    worst
}

#[derive(Debug, Serialize)]
struct SeedSummary {
    seed: u64,
    regret: f64,
    max_estimation_error: f64,
    bad_queries: Vec<(f64, usize)>,
}

pub fn run(cfg: &ExperimentConfig, out: &Path, threads: usize) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let instance: InstanceRef = Arc::new(cfg.generator.build(cfg.noise)?);
    let alpha = cfg.resolve_alpha(instance.alpha_star());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building worker pool")?;
    let runs: Vec<Result<Transcript>> = pool.install(|| {
        cfg.seeds
            .par_iter()
            .map(|&seed| {
                let mut learner = build_learner(cfg, &instance, alpha)?;
                Ok(run_protocol(
                    &instance,
                    learner.as_mut(),
                    cfg.t,
                    alpha,
                    seed,
                )?)
            })
            .collect()
    });
    let mut transcripts = Vec::with_capacity(runs.len());
    for r in runs {
        transcripts.push(r?);
    }

    for tr in &transcripts {
        let path = out.join(format!("transcript_{}.csv", tr.seed));
        std::fs::write(&path, tr.to_csv())?;
    }

    let per_seed: Vec<SeedSummary> = transcripts
        .iter()
        .map(|tr| SeedSummary {
            seed: tr.seed,
            regret: regret(tr),
            max_estimation_error: max_estimation_error(&instance, tr),
            bad_queries: cfg
                .eps_grid
                .iter()
                .map(|&eps| {
                    (
                        eps,
                        tr.steps.iter().filter(|s| s.mean < alpha - eps).count(),
                    )
                })
                .collect(),
        })
        .collect();

    let mean_regret = per_seed.iter().map(|s| s.regret).sum::<f64>() / per_seed.len() as f64;
    let max_regret = per_seed
        .iter()
        .map(|s| s.regret)
        .fold(f64::NEG_INFINITY, f64::max);
    let worst_estimation = per_seed
        .iter()
        .map(|s| s.max_estimation_error)
        .fold(0.0f64, f64::max);

    let deterministic = cfg.noise == NoiseMode::Deterministic;
    let c_value = match cfg.bounds_mode {
        BoundsMode::ConstantFaithful => {
            if deterministic {
                0.0
            } else {
                bounds::c_finite(cfg.t as u64, instance.len() as u64, cfg.delta)?
            }
        }
        BoundsMode::Empirical => 1.1 * worst_estimation,
    };

    let dimension = match cfg.dimension_hint {
        Some(d) => Some(d),
        None if instance.len() <= cfg.auto_dim_cap => {
            let gap = (1.0 / cfg.t as f64).max(1e-3);
            let grid = dims::default_epsilon_grid(gap, alpha);
            let (d, _, _) = dims::monotone_dissimilarity_dim(&instance, alpha, gap, &grid)?;
            Some(d as u64)
        }
        None => None,
    };
    let comparator = match dimension {
        Some(d) if d >= 1 => Some(bounds::regret_bound(
            d,
            c_value,
            cfg.t as u64,
            deterministic,
        )?),
        _ => None,
    };

    // plot data: t, mean cumulative regret, comparator curve at that t
    let mut plot = String::from("t,mean_cumulative_regret,comparator\n");
    let mut cums = vec![0.0; transcripts.len()];
    for t in 0..cfg.t {
        for (k, tr) in transcripts.iter().enumerate() {
            cums[k] += tr.steps[t].raw_gap;
        }
        let mean = cums.iter().sum::<f64>() / cums.len() as f64;
        let comp = match dimension {
            Some(d) if d >= 1 => {
                let r = bounds::regret_bound(d, c_value, (t + 1) as u64, deterministic)?;
                format!("{}", r.value)
            }
            _ => String::new(),
        };
        plot.push_str(&format!("{},{},{}\n", t + 1, mean, comp));
    }
    std::fs::write(out.join("plot.csv"), plot)?;

    let summary = json!({
        "config": cfg,
        "alpha_used": alpha,
        "alpha_was_unknown": cfg.alpha == AlphaSpec::Named(AlphaName::Unknown),
        "card_z": instance.len(),
        "instance_metadata": instance.metadata,
        "per_seed": per_seed,
        "mean_regret": mean_regret,
        "max_regret": max_regret,
        "max_estimation_error": worst_estimation,
        "bounds_mode": cfg.bounds_mode,
        "c_value": c_value,
        "dimension_used": dimension,
        "comparator_regret_bound": comparator,
    });
    std::fs::write(
        out.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    if transcripts.iter().any(|t| !t.warnings.is_empty()) {
        eprintln!("warning: some runs carried protocol warnings; see transcripts");
    }
    println!(
        "simulate: {} seeds, T = {}, mean regret {mean_regret:.4} -> {}",
        cfg.seeds.len(),
        cfg.t,
        out.display()
    );
    Ok(())
}
