//! Case tag and predicted landmark signs, cross-checked against a trace.

use kedem_core::curve::{classify, Sign};
use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::{opt, OutDir};

/// Landmarks within this distance of zero count as zero.
const ZERO_TOL: f64 = 1e-4;

#[derive(Debug, Serialize)]
struct Row {
    quantity: &'static str,
    predicted: String,
    measured: String,
    agree: bool,
}

fn symbol(s: Sign) -> &'static str {
    match s {
        Sign::Neg => "< 0",
        Sign::Zero => "= 0",
        Sign::Pos => "> 0",
        Sign::NonNeg => ">= 0",
        Sign::NonPos => "<= 0",
    }
}

pub fn run(cfg: &RunConfig, out: &OutDir) -> Result<bool, Failure> {
    let ctx = cfg.context()?;
    let c = classify(&ctx)?;
    let t = super::curve::trace(cfg, &ctx)?;
    let l = &t.landmarks;
    let mut rows = vec![Row {
        quantity: "closed",
        predicted: c.prediction.closed.to_string(),
        measured: t.closed.to_string(),
        agree: c.prediction.closed == t.closed,
    }];
    let signed = [
        ("lambda1_max", c.prediction.lambda1_max, l.lambda1_max),
        ("lambda2_bar", c.prediction.lambda2_bar, l.lambda2_bar),
        ("lambda1_min", c.prediction.lambda1_min, l.lambda1_min),
        ("lambda2_max", c.prediction.lambda2_max, l.lambda2_max),
        ("lambda1_bar", c.prediction.lambda1_bar, l.lambda1_bar),
    ];
    for (quantity, pred, meas) in signed {
        let Some(pred) = pred else { continue };
        let agree = meas.is_some_and(|v| pred.holds(v, ZERO_TOL));
        rows.push(Row { quantity, predicted: symbol(pred).to_string(), measured: opt(meas), agree });
    }
    println!("case        {}", c.tag);
    println!("int m1      {}", c.integral1);
    println!("int m2      {}", c.integral2);
    println!("prediction  {}", c.prediction.summary);
    println!("{:<12} {:>10} {:>24} {:>6}", "quantity", "predicted", "measured", "agree");
    for r in &rows {
        println!("{:<12} {:>10} {:>24} {:>6}", r.quantity, r.predicted, r.measured, if r.agree { "yes" } else { "NO" });
    }
    out.csv("classify.csv", &rows)?;
    Ok(rows.iter().all(|r| r.agree))
}
