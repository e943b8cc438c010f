//! Randomized property checks run by `kedem verify`.
//!
//! Every check draws from a `ChaCha8Rng` seeded by the caller, so a report is
//! reproducible from the configuration alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eigen::{self, DENSE_LIMIT};
use crate::error::Result;
use crate::spectral::SpectralContext;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed margin (negative means violated) or error.
    pub worst: f64,
    pub detail: String,
    pub warnings: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, worst: f64, detail: String) -> Self {
        CheckOutcome { name, passed, worst, detail, warnings: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOptions {
    pub draws: usize,
    /// Relative margin under which a satisfied bound is reported as thin.
    pub thin_margin: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { draws: 50, thin_margin: 1e-6 }
    }
}

/// Sampling box for `(λ1, λ2)`: the finite scalar roots widened by half,
/// with `±20` standing in for infinite or missing sides.
pub fn sample_box(ctx: &SpectralContext) -> [(f64, f64); 2] {
    let side = |lo: f64, hi: f64| {
        let lo = if lo.is_finite() { 1.5 * lo.min(-1.0) } else { -20.0 };
        let hi = if hi.is_finite() { 1.5 * hi.max(1.0) } else { 20.0 };
        (lo.max(-1e3), hi.min(1e3))
    };
    let l1 = ctx.landmarks.lambda1;
    let l2 = ctx.landmarks.lambda2;
    [side(l1.minus, l1.plus), side(l2.minus, l2.plus)]
}

fn draw(rng: &mut ChaCha8Rng, b: &[(f64, f64); 2]) -> (f64, f64) {
    (rng.gen_range(b[0].0..b[0].1), rng.gen_range(b[1].0..b[1].1))
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn origin(ctx: &SpectralContext) -> Result<CheckOutcome> {
    let r = ctx.eigen_at(0.0, 0.0)?;
    let margin = r.positivity_margin / sup(&r.eigenfunction);
    let ok = r.value.abs() <= 1e-10 && margin >= 0.99;
    Ok(CheckOutcome::new("origin", ok, 1e-10 - r.value.abs(), format!("F(0,0) = {:.3e}, min φ / max φ = {margin:.6}", r.value)))
}

/// Adding a constant `s` to the potential shifts the eigenvalue by `s`.
pub fn shift_identity(ctx: &SpectralContext, seed: u64, opts: &CheckOptions) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = sample_box(ctx);
    let mut worst = f64::INFINITY;
    for _ in 0..opts.draws.min(20) {
        let (l1, l2) = draw(&mut rng, &b);
        let s = rng.gen_range(-5.0..5.0);
        let base = ctx.eval_f(l1, l2)?;
        let c: Vec<f64> = ctx.potential(l1, l2).iter().map(|v| v + s).collect();
        let shifted = eigen::principal_interface(&ctx.base().with_potential(&c))?.value;
        let tol = 1e-9 * (1.0 + base.abs());
        worst = worst.min(tol - (shifted - base - s).abs());
    }
    Ok(CheckOutcome::new("shift_identity", worst >= 0.0, worst, "Λ1(c + s) = Λ1(c) + s".into()))
}

/// Agreement with the dense Hessenberg-QR oracle.
pub fn oracle(ctx: &SpectralContext, seed: u64, opts: &CheckOptions) -> Result<CheckOutcome> {
    if ctx.mesh.dim() > DENSE_LIMIT {
        let mut out = CheckOutcome::new("oracle", true, 0.0, "skipped".into());
        out.warnings.push(format!("dimension {} exceeds the dense limit {DENSE_LIMIT}", ctx.mesh.dim()));
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0_0AC1E);
    let b = sample_box(ctx);
    let mut worst = f64::INFINITY;
    for _ in 0..opts.draws.min(20) {
        let (l1, l2) = draw(&mut rng, &b);
        let op = ctx.operator_at(l1, l2);
        let v = eigen::principal_interface(&op)?.value;
        let o = eigen::dense_oracle(&op.matrix)?.principal;
        worst = worst.min(1e-8 * (1.0 + v.abs()) - (v - o).abs());
    }
    Ok(CheckOutcome::new("oracle", worst >= 0.0, worst, "iterative vs dense eigenvalue".into()))
}

/// `F < min{σ1^{Ω1}, σ1^{Ω2}}` and the averaged bound.
pub fn bounds(ctx: &SpectralContext, seed: u64, opts: &CheckOptions) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xB0_0D5);
    let b = sample_box(ctx);
    let (mut w1, mut w2) = (f64::INFINITY, f64::INFINITY);
    let mut out = CheckOutcome::new("bounds", true, 0.0, String::new());
    for _ in 0..opts.draws {
        let (l1, l2) = draw(&mut rng, &b);
        let f = ctx.eval_f(l1, l2)?;
        let m1 = ctx.cota1(l1, l2)? - f;
        let m2 = ctx.cota2(l1, l2) - f;
        let scale = 1.0 + f.abs();
        if m1 < opts.thin_margin * scale {
            out.warnings.push(format!("thin cota1 margin {m1:.3e} at ({l1:.4}, {l2:.4})"));
        }
        w1 = w1.min(m1);
        w2 = w2.min(m2);
    }
    out.passed = w1 > 0.0 && w2 >= -1e-8;
    out.worst = w1.min(w2);
    out.detail = format!("min cota1 margin {w1:.3e}, min cota2 margin {w2:.3e}");
    Ok(out)
}

/// Midpoint concavity of `F` on random segments.
pub fn concavity(ctx: &SpectralContext, seed: u64, opts: &CheckOptions) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0_4CA);
    let b = sample_box(ctx);
    let mut worst = f64::INFINITY;
    for _ in 0..opts.draws {
        let p = draw(&mut rng, &b);
        let q = draw(&mut rng, &b);
        let fp = ctx.eval_f(p.0, p.1)?;
        let fq = ctx.eval_f(q.0, q.1)?;
        let fm = ctx.eval_f(0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1))?;
        let slack = 1e-9 * (1.0 + fp.abs().max(fq.abs()));
        worst = worst.min(fm - 0.5 * (fp + fq) + slack);
    }
    Ok(CheckOutcome::new("concavity", worst >= 0.0, worst, "F(mid) >= mean of endpoint values".into()))
}

/// A nonnegative perturbation of the potential does not lower `F`.
pub fn potential_monotonicity(ctx: &SpectralContext, seed: u64, opts: &CheckOptions) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x30_70);
    let b = sample_box(ctx);
    let mut worst = f64::INFINITY;
    for _ in 0..opts.draws.min(20) {
        let (l1, l2) = draw(&mut rng, &b);
        let f = ctx.eval_f(l1, l2)?;
        let c: Vec<f64> = ctx.potential(l1, l2).iter().map(|v| v + rng.gen_range(0.0..1.0)).collect();
        let g = eigen::principal_interface(&ctx.base().with_potential(&c))?.value;
        worst = worst.min(g - f + 1e-9 * (1.0 + f.abs()));
    }
    Ok(CheckOutcome::new("potential_monotonicity", worst >= 0.0, worst, "c <= c' implies Λ1(c) <= Λ1(c')".into()))
}

/// Central differences at the origin against the signs of the weighted
/// integrals: `g'(0) ~ -∫m2` and `f_μ'(0) ~ -(γ2∫m1 + μγ1∫m2)`.
pub fn derivative_signs(ctx: &SpectralContext, seed: u64, opts: &CheckOptions) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD516);
    let (i1, i2) = (ctx.integral1(), ctx.integral2());
    let h = 1e-4;
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut compare = |label: String, predicted: f64, measured: f64, scale: f64| {
        if predicted.abs() <= 1e-3 * scale {
            return;
        }
        checked += 1;
        if predicted.signum() != measured.signum() {
            failures.push(format!("{label}: predicted {predicted:.3e}, measured {measured:.3e}"));
        }
    };
    let dg = (ctx.eval_g(h)? - ctx.eval_g(-h)?) / (2.0 * h);
    let s2 = ctx.m2.max_abs() * ctx.mesh.measure2();
    compare("g'(0)".into(), -i2, dg, s2);
    for _ in 0..opts.draws.min(20) {
        let mu = rng.gen_range(-10.0..10.0);
        let d = (ctx.eval_f_mu(mu, h)? - ctx.eval_f_mu(mu, -h)?) / (2.0 * h);
        let pred = -(ctx.gamma2 * i1 + mu * ctx.gamma1 * i2);
        let scale = ctx.gamma2 * ctx.m1.max_abs() * ctx.mesh.measure1() + mu.abs() * ctx.gamma1 * s2;
        compare(format!("f_mu'(0), mu = {mu:.4}"), pred, d, scale);
    }
    let passed = failures.is_empty();
    let detail = if passed { format!("{checked} signs agree") } else { failures.join("; ") };
    Ok(CheckOutcome::new("derivative_signs", passed, if passed { 0.0 } else { -1.0 }, detail))
}

/// Advisory: compares bound margins with the discretization error estimate
/// `|F_h - F_{h/2}|` from a refined context. Never fails; a margin below the
/// estimate is listed as a warning because the discrete bound may not carry
/// over to the continuous problem.
pub fn bound_resolution(ctx: &SpectralContext, refined: &SpectralContext, seed: u64, opts: &CheckOptions) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4E_501);
    let b = sample_box(ctx);
    let mut out = CheckOutcome::new("bound_resolution", true, f64::INFINITY, String::new());
    let mut worst_err = 0.0_f64;
    for _ in 0..opts.draws.min(20) {
        let (l1, l2) = draw(&mut rng, &b);
        let f = ctx.eval_f(l1, l2)?;
        let err = (refined.eval_f(l1, l2)? - f).abs();
        let margin = (ctx.cota1(l1, l2)? - f).min(ctx.cota2(l1, l2) - f);
        worst_err = worst_err.max(err);
        out.worst = out.worst.min(margin - err);
        if margin < 2.0 * err {
            out.warnings.push(format!("bound margin {margin:.3e} at ({l1:.4}, {l2:.4}) is below twice the mesh error estimate {err:.3e}"));
        }
    }
    out.detail = format!("max mesh error estimate {worst_err:.3e}");
    Ok(out)
}

type Check<'a> = Box<dyn Fn() -> Result<CheckOutcome> + 'a>;

/// The full suite. Errors inside a check are reported as failures.
pub fn run_all(ctx: &SpectralContext, seed: u64, opts: &CheckOptions) -> Vec<CheckOutcome> {
    let named: [(&'static str, Check<'_>); 7] = [
        ("origin", Box::new(|| origin(ctx))),
        ("shift_identity", Box::new(|| shift_identity(ctx, seed, opts))),
        ("oracle", Box::new(|| oracle(ctx, seed, opts))),
        ("bounds", Box::new(|| bounds(ctx, seed, opts))),
        ("concavity", Box::new(|| concavity(ctx, seed, opts))),
        ("potential_monotonicity", Box::new(|| potential_monotonicity(ctx, seed, opts))),
        ("derivative_signs", Box::new(|| derivative_signs(ctx, seed, opts))),
    ];
    named.iter().map(|(name, run)| run().unwrap_or_else(|e| CheckOutcome::new(name, false, f64::NEG_INFINITY, e.to_string()))).collect()
}
