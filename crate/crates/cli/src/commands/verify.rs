//! Randomized property suite with the configured seed.

use kedem_core::checks::{self, CheckOptions};
use kedem_core::geometry::MIN_CELLS;
use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::OutDir;

const SHOWN_WARNINGS: usize = 5;

#[derive(Debug, Serialize)]
struct Row {
    check: &'static str,
    passed: bool,
    worst: f64,
    warnings: usize,
    detail: String,
}

pub fn run(cfg: &RunConfig, out: &OutDir, coarse: bool) -> Result<bool, Failure> {
    let mut spec = cfg.domain;
    if coarse {
        spec.n1 = MIN_CELLS;
        spec.n2 = MIN_CELLS;
    }
    let ctx = cfg.context_for(spec)?;
    let refined = cfg.context_for(spec.refined(2))?;
    let opts = CheckOptions { draws: cfg.verify.draws, ..CheckOptions::default() };
    let mut results = checks::run_all(&ctx, cfg.seed, &opts);
    results.push(checks::bound_resolution(&ctx, &refined, cfg.seed, &opts)?);
    println!("seed {}, mesh n1 = {}, n2 = {}", cfg.seed, spec.n1, spec.n2);
    for r in &results {
        println!("{:<24} {} {}", r.name, if r.passed { "PASS" } else { "FAIL" }, r.detail);
        for w in r.warnings.iter().take(SHOWN_WARNINGS) {
            println!("  warning: {w}");
        }
        if r.warnings.len() > SHOWN_WARNINGS {
            println!("  ({} more warnings)", r.warnings.len() - SHOWN_WARNINGS);
        }
    }
    let rows: Vec<Row> = results
        .iter()
        .map(|r| Row { check: r.name, passed: r.passed, worst: r.worst, warnings: r.warnings.len(), detail: r.detail.clone() })
        .collect();
    out.csv("verify.csv", &rows)?;
    Ok(results.iter().all(|r| r.passed))
}
