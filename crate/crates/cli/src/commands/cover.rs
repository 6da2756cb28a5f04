//! Covering-number reports under the rho-row pseudometric.

use std::path::Path;

use anyhow::{bail, Result};
use serde_json::json;

use dissim::dims::{covering_number, CoverMode};

use crate::config::ExperimentConfig;

pub fn run(cfg: &ExperimentConfig, mode: &str, out: &Path) -> Result<()> {
    let Some(eps) = cfg.epsilon else {
        bail!(dissim::Error::config("cover requires epsilon"));
    };
    let mode = match mode {
        "greedy" => CoverMode::Greedy,
        "exact" => CoverMode::Exact,
        other => bail!(dissim::Error::config(format!(
            "unknown cover mode {other:?} (expected greedy | exact)"
        ))),
    };
    std::fs::create_dir_all(out)?;
    let instance = cfg.generator.build(cfg.noise)?;
    let report = covering_number(&instance, eps, mode)?;
    let rendered = json!({
        "generator": cfg.generator,
        "card_z": instance.len(),
        "report": report,
    });
    std::fs::write(
        out.join("cover.json"),
        serde_json::to_string_pretty(&rendered)?,
    )?;
    println!(
        "cover: size {} (exact: {}) at eps {} -> {}",
        report.size,
        report.exact,
        eps,
        out.display()
    );
    Ok(())
}
