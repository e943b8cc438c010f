//! Existence map of the logistic problem over a parameter grid.

use kedem_core::checks::sample_box;
use kedem_core::logistic::{LogisticOptions, LogisticProblem};
use kedem_core::spectral::SpectralContext;
use kedem_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::{self, OutDir};

#[derive(Debug, Serialize)]
struct Cell {
    lambda1: f64,
    lambda2: f64,
    f: f64,
    exists: &'static str,
    sup_u: String,
    iterations: String,
}

fn options(cfg: &RunConfig) -> LogisticOptions {
    LogisticOptions {
        tol_margin: 10.0 * cfg.tolerances.curve,
        max_iter: cfg.logistic.max_iter,
        mode: cfg.logistic.mode,
        ..LogisticOptions::default()
    }
}

fn solve_cell(cfg: &RunConfig, ctx: &SpectralContext, l1: f64, l2: f64) -> Result<Cell, Error> {
    let opts = options(cfg);
    let prob = LogisticProblem::new(ctx, l1, l2, cfg.logistic.p1, cfg.logistic.p2)?;
    let f = ctx.eval_f(l1, l2)?;
    let mut cell = Cell { lambda1: l1, lambda2: l2, f, exists: "no", sup_u: String::new(), iterations: String::new() };
    match prob.existence_check(&opts) {
        Ok(true) => {
            let s = prob.solve(&opts)?;
            cell.exists = "yes";
            cell.sup_u = output::num(s.sup());
            cell.iterations = s.iterations.to_string();
        }
        Ok(false) => cell.sup_u = "0".into(),
        Err(Error::Indeterminate { .. }) => cell.exists = "indeterminate",
        Err(e) => return Err(e),
    }
    Ok(cell)
}

fn axis(r: [f64; 2], n: usize) -> Vec<f64> {
    (0..n).map(|i| r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64).collect()
}

pub fn run(cfg: &RunConfig, out: &OutDir) -> Result<bool, Failure> {
    let ctx = cfg.context()?;
    let b = sample_box(&ctx);
    let xs = axis(cfg.logistic.lambda1.unwrap_or([b[0].0, b[0].1]), cfg.logistic.grid[0]);
    let ys = axis(cfg.logistic.lambda2.unwrap_or([b[1].0, b[1].1]), cfg.logistic.grid[1]);
    let pairs: Vec<(f64, f64)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    let cells: Vec<Cell> = pairs.par_iter().map(|&(x, y)| solve_cell(cfg, &ctx, x, y)).collect::<Result<_, Error>>()?;
    out.csv("existence.csv", &cells)?;
    let count = |s: &str| cells.iter().filter(|c| c.exists == s).count();
    println!(
        "grid {}x{}: {} exist, {} no positive solution, {} indeterminate",
        xs.len(),
        ys.len(),
        count("yes"),
        count("no"),
        count("indeterminate")
    );
    let opts = options(cfg);
    for (k, [l1, l2]) in cfg.logistic.profiles.iter().enumerate() {
        let prob = LogisticProblem::new(&ctx, *l1, *l2, cfg.logistic.p1, cfg.logistic.p2)?;
        match prob.solve(&opts) {
            Ok(s) => {
                let name = format!("profile_{k}.csv");
                out.csv(&name, &output::profile(&ctx.mesh, &s.u))?;
                println!("({l1}, {l2}): sup u = {}, residual {:.2e}, gap {:.2e} -> {name}", s.sup(), s.residual, s.gap);
            }
            Err(e @ (Error::NotSubcritical { .. } | Error::Indeterminate { .. })) => println!("({l1}, {l2}): no profile, {e}"),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(true)
}
