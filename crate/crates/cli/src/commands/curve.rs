//! Trace the eigencurve, write the polyline and landmarks, draw the plane.

use kedem_core::curve::{trace_curve, EigencurveTrace};
use kedem_core::spectral::SpectralContext;
use kedem_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::OutDir;
use crate::svg::{Frame, Plot};

#[derive(Debug, Serialize)]
struct TraceRow {
    t: f64,
    lambda1: f64,
    lambda2: f64,
    abs_f: f64,
    origin: bool,
}

/// TOML spelling of a float.
fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        crate::output::num(v)
    }
}

pub fn landmark_pairs(t: &EigencurveTrace) -> Vec<(String, String)> {
    let l = &t.landmarks;
    let mut v = vec![
        ("case_tag".to_string(), format!("\"{}\"", t.case_tag)),
        ("closed".to_string(), t.closed.to_string()),
        ("points".to_string(), t.points.len().to_string()),
    ];
    let fixed = [
        ("lambda1_minus", l.lambda1_minus),
        ("lambda1_plus", l.lambda1_plus),
        ("lambda2_minus", l.lambda2_minus),
        ("lambda2_plus", l.lambda2_plus),
    ];
    v.extend(fixed.iter().map(|(k, x)| (k.to_string(), num(*x))));
    let optional = [
        ("mu_star", l.mu_star),
        ("lambda1_max", l.lambda1_max),
        ("lambda2_bar", l.lambda2_bar),
        ("lambda1_min", l.lambda1_min),
        ("lambda2_underbar", l.lambda2_underbar),
        ("lambda2_max", l.lambda2_max),
        ("lambda1_bar", l.lambda1_bar),
        ("lambda2_min", l.lambda2_min),
        ("lambda1_underbar", l.lambda1_underbar),
        ("lambda2_star", l.lambda2_star),
    ];
    v.extend(optional.iter().filter_map(|(k, x)| x.map(|x| (k.to_string(), num(x)))));
    v
}

fn window(cfg: &RunConfig, t: &EigencurveTrace) -> ([f64; 2], [f64; 2]) {
    let l = &t.landmarks;
    let axis = |cands: &[Option<f64>], open_lo: bool, open_hi: bool| {
        let vals: Vec<f64> = cands.iter().flatten().copied().filter(|v| v.is_finite()).chain([0.0]).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = (hi - lo).max(1.0);
        let lo = if open_lo { lo - span } else { lo - 0.2 * span };
        let hi = if open_hi { hi + span } else { hi + 0.2 * span };
        [lo, hi]
    };
    let x = axis(
        &[Some(l.lambda1_minus), Some(l.lambda1_plus), l.lambda1_max, l.lambda1_min, l.lambda1_bar, l.lambda1_underbar],
        !l.lambda1_minus.is_finite(),
        !l.lambda1_plus.is_finite(),
    );
    let y = axis(
        &[Some(l.lambda2_minus), Some(l.lambda2_plus), l.lambda2_max, l.lambda2_min, l.lambda2_bar, l.lambda2_underbar],
        !l.lambda2_minus.is_finite(),
        !l.lambda2_plus.is_finite(),
    );
    (cfg.svg.lambda1.unwrap_or(x), cfg.svg.lambda2.unwrap_or(y))
}

pub fn plot(cfg: &RunConfig, ctx: &SpectralContext, t: &EigencurveTrace) -> Result<String, Failure> {
    let (x, y) = window(cfg, t);
    let frame = Frame { x, y, width: cfg.svg.width as f64, height: cfg.svg.height as f64 };
    let mut p = Plot::new(frame);
    let [nx, ny] = cfg.svg.grid;
    let (dx, dy) = ((x[1] - x[0]) / nx as f64, (y[1] - y[0]) / ny as f64);
    let values: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|k| ctx.eval_f(x[0] + (k % nx) as f64 * dx + 0.5 * dx, y[0] + (k / nx) as f64 * dy + 0.5 * dy))
        .collect::<Result<_, Error>>()?;
    for (k, f) in values.iter().enumerate() {
        let (i, j) = ((k % nx) as f64, (k / nx) as f64);
        let fill = if *f > cfg.tolerances.curve {
            "#f6d5b8"
        } else if *f < -cfg.tolerances.curve {
            "#cfe0f0"
        } else {
            "#ffffff"
        };
        p.cell([x[0] + i * dx, x[0] + (i + 1.0) * dx], [y[0] + j * dy, y[0] + (j + 1.0) * dy], fill);
    }
    let l = &t.landmarks;
    for v in [l.lambda2_minus, l.lambda2_plus].into_iter().filter(|v| v.is_finite()) {
        p.polyline(&[[x[0], v], [x[1], v]], "#2a6f2a", 1.0, Some("6 4"));
    }
    for v in [l.lambda1_minus, l.lambda1_plus].into_iter().filter(|v| v.is_finite()) {
        p.polyline(&[[v, y[0]], [v, y[1]]], "#2a6f2a", 1.0, Some("6 4"));
    }
    if let Some(mu) = l.mu_star {
        let r = 4.0 * (x[1] - x[0]).abs().max((y[1] - y[0]).abs());
        let d = r / mu.hypot(1.0);
        p.polyline(&[[-d, -d * mu], [d, d * mu]], "#7a3b8f", 1.0, Some("2 3"));
    }
    let pts: Vec<[f64; 2]> = t.points.iter().map(|q| [q.l1, q.l2]).collect();
    p.polyline(&pts, "#111111", 2.0, None);
    let marks = [
        (l.lambda1_max.zip(l.lambda2_bar), "λ1max"),
        (l.lambda1_min.zip(l.lambda2_underbar), "λ1min"),
        (l.lambda1_bar.zip(l.lambda2_max), "λ2max"),
        (l.lambda1_underbar.zip(l.lambda2_min), "λ2min"),
    ];
    for (pt, name) in marks {
        if let Some((a, b)) = pt {
            p.marker([a, b], "#d62728", name);
        }
    }
    if let Some(s) = l.lambda2_star {
        p.marker([0.0, s], "#1f77b4", "λ2*");
    }
    p.label(56.0, 40.0, "start", &format!("{}   orange: F > 0   blue: F < 0   dashed: Λ±   dotted: μ* tangent", t.case_tag));
    Ok(p.finish("eigencurve F(λ1, λ2) = 0"))
}

pub fn trace(cfg: &RunConfig, ctx: &SpectralContext) -> Result<EigencurveTrace, Failure> {
    trace_curve(ctx, &cfg.trace_options()).map_err(|e| match e {
        Error::InconsistentCase(m) => Failure::Numerical(format!(
            "inconsistent case: {m}; the discretization is probably too coarse (n1 = {}, n2 = {}, rays = {})",
            cfg.domain.n1, cfg.domain.n2, cfg.curve.rays
        )),
        other => other.into(),
    })
}

pub fn run(cfg: &RunConfig, out: &OutDir, dump_matrix: bool) -> Result<bool, Failure> {
    let ctx = cfg.context()?;
    let t = trace(cfg, &ctx)?;
    let header = landmark_pairs(&t);
    let rows: Vec<TraceRow> =
        t.points.iter().map(|p| TraceRow { t: p.t, lambda1: p.l1, lambda2: p.l2, abs_f: p.residual, origin: p.origin }).collect();
    out.csv_with_header("trace.csv", &header, &rows)?;
    let body: String = header.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    out.text("landmarks.toml", &body)?;
    out.text("curve.svg", &plot(cfg, &ctx, &t)?)?;
    if dump_matrix {
        out.text("matrix.txt", &ctx.base().dump())?;
    }
    for (k, v) in &header {
        println!("{k:<18} {v}");
    }
    println!("wrote trace.csv, landmarks.toml, curve.svg to {}", out.path("").display());
    Ok(true)
}
