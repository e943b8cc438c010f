//! Tracing and classification of the eigencurve `C = {F(λ1, λ2) = 0}`.
//!
//! `F` is concave and `F(0, 0) = 0`, so `{F >= 0}` is a convex set with the
//! origin on its boundary. Along a ray `r ↦ F(r cos t, r sin t)` there is at
//! most one positive root, and it exists only when the slope at `r = 0` is
//! positive. Sweeping `t` therefore parameterizes the whole curve.

use std::f64::consts::{PI, TAU};

use log::{debug, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::SignClass;
use crate::roots::{self, RootTol};
use crate::spectral::{ScalarRoots, SpectralContext};

pub const TOL_CURVE: f64 = 1e-6;
pub const R_CAP: f64 = 1e3;
pub const DEFAULT_RAYS: usize = 512;
pub const MIN_RAYS: usize = 64;

const RAY_TOL: RootTol = RootTol { xtol: 1e-13, ftol: 1e-12, max_iter: 200 };
const MIN_ANGLE_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceOptions {
    pub n_rays: usize,
    pub r_cap: f64,
    pub tol_curve: f64,
    /// Target spacing of consecutive points, relative to the landmark box.
    pub arc_fraction: f64,
    /// Upper bound on the number of rays after adaptive refinement.
    pub max_rays: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { n_rays: DEFAULT_RAYS, r_cap: R_CAP, tol_curve: TOL_CURVE, arc_fraction: 0.01, max_rays: 16 * DEFAULT_RAYS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "r", rename_all = "snake_case")]
pub enum RayStatus {
    /// Positive root at this radius.
    Hit(f64),
    /// Nonpositive slope at the origin: `F < 0` along the whole ray.
    NegSlope,
    /// Slope zero at the origin: the ray is tangent to `C` there.
    Tangent,
    /// `F > 0` up to the search radius.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RaySample {
    pub t: f64,
    pub status: RayStatus,
    pub r_max: f64,
}

impl RaySample {
    pub fn point(&self) -> Option<[f64; 2]> {
        match self.status {
            RayStatus::Hit(r) => Some([r * self.t.cos(), r * self.t.sin()]),
            RayStatus::Tangent => Some([0.0, 0.0]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub l1: f64,
    pub l2: f64,
    /// Ray angle.
    pub t: f64,
    /// `|F(l1, l2)|`.
    pub residual: f64,
    /// The origin, where the ray parameterization degenerates.
    pub origin: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralSign {
    Neg,
    Zero,
    Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    BothNonneg,
    M1NonnegM2Sign(IntegralSign),
    M2NonnegM1Sign(IntegralSign),
    BothSign,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sub = |s: &IntegralSign| match s {
            IntegralSign::Neg => "neg",
            IntegralSign::Zero => "zero",
            IntegralSign::Pos => "pos",
        };
        match self {
            CaseTag::BothNonneg => write!(f, "both_nonneg"),
            CaseTag::M1NonnegM2Sign(s) => write!(f, "m1_nonneg_m2_sign({})", sub(s)),
            CaseTag::M2NonnegM1Sign(s) => write!(f, "m2_nonneg_m1_sign({})", sub(s)),
            CaseTag::BothSign => write!(f, "both_sign"),
        }
    }
}

/// Expected sign of a landmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Neg,
    Zero,
    Pos,
    NonNeg,
    NonPos,
}

impl Sign {
    pub fn holds(self, v: f64, zero_tol: f64) -> bool {
        match self {
            Sign::Neg => v < -zero_tol,
            Sign::Zero => v.abs() <= zero_tol,
            Sign::Pos => v > zero_tol,
            Sign::NonNeg => v >= -zero_tol,
            Sign::NonPos => v <= zero_tol,
        }
    }
}

/// Qualitative features predicted from the sign classes and integrals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub closed: bool,
    pub branches: usize,
    pub lambda1_max: Option<Sign>,
    pub lambda2_bar: Option<Sign>,
    pub lambda1_min: Option<Sign>,
    pub lambda2_max: Option<Sign>,
    pub lambda1_bar: Option<Sign>,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub tag: CaseTag,
    pub integral1: f64,
    pub integral2: f64,
    pub prediction: Prediction,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TraceLandmarks {
    pub lambda1_minus: f64,
    pub lambda1_plus: f64,
    pub lambda2_minus: f64,
    pub lambda2_plus: f64,
    pub mu_star: Option<f64>,
    pub lambda1_max: Option<f64>,
    /// `λ2` at `λ1^max`.
    pub lambda2_bar: Option<f64>,
    pub lambda1_min: Option<f64>,
    /// `λ2` at `λ1^min`.
    pub lambda2_underbar: Option<f64>,
    pub lambda2_max: Option<f64>,
    /// `λ1` at `λ2^max`.
    pub lambda1_bar: Option<f64>,
    pub lambda2_min: Option<f64>,
    pub lambda1_underbar: Option<f64>,
    /// Nonzero root of `g(λ2) = F(0, λ2)`.
    pub lambda2_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigencurveTrace {
    pub case_tag: CaseTag,
    pub points: Vec<CurvePoint>,
    pub landmarks: TraceLandmarks,
    pub closed: bool,
    /// Every ray evaluated, in angle order.
    #[serde(skip)]
    pub rays: Vec<RaySample>,
}

fn integral_sign(v: f64, scale: f64) -> IntegralSign {
    if v.abs() <= 1e-12 * scale {
        IntegralSign::Zero
    } else if v < 0.0 {
        IntegralSign::Neg
    } else {
        IntegralSign::Pos
    }
}

/// Case tag and predicted qualitative features.
pub fn classify(ctx: &SpectralContext) -> Result<Classification> {
    let (s1, s2) = (ctx.sign1(), ctx.sign2());
    let (i1, i2) = (ctx.integral1(), ctx.integral2());
    let sc1 = ctx.m1.max_abs() * ctx.mesh.measure1();
    let sc2 = ctx.m2.max_abs() * ctx.mesh.measure2();
    use SignClass::*;
    let tag = match (s1, s2) {
        (NonnegNontrivial, NonnegNontrivial) => CaseTag::BothNonneg,
        (NonnegNontrivial, ChangesSign) => CaseTag::M1NonnegM2Sign(integral_sign(i2, sc2)),
        (ChangesSign, NonnegNontrivial) => CaseTag::M2NonnegM1Sign(integral_sign(i1, sc1)),
        (ChangesSign, ChangesSign) => CaseTag::BothSign,
        _ => {
            return Err(Error::UnsupportedSign(format!(
                "curve classification needs nonnegative or sign-changing weights, got {s1:?} and {s2:?}"
            )))
        }
    };
    let none = Prediction {
        closed: false,
        branches: 1,
        lambda1_max: None,
        lambda2_bar: None,
        lambda1_min: None,
        lambda2_max: None,
        lambda1_bar: None,
        summary: String::new(),
    };
    let bar = |s: IntegralSign| match s {
        IntegralSign::Neg => (Sign::Pos, Sign::Pos),
        IntegralSign::Pos => (Sign::Pos, Sign::Neg),
        IntegralSign::Zero => (Sign::Zero, Sign::Zero),
    };
    let prediction = match tag {
        CaseTag::BothNonneg => Prediction {
            summary: "open curve through the origin, λ2 = H(λ1) decreasing, asymptotes λ1 → Λ1+ and λ2 → Λ2+".into(),
            ..none
        },
        CaseTag::M1NonnegM2Sign(s) => {
            let (a, b) = bar(s);
            Prediction {
                branches: 2,
                lambda1_max: Some(a),
                lambda2_bar: Some(b),
                summary: "open curve with branches H+ (decreasing) and H- (increasing) meeting at the rightmost point (λ1max, λ̄2)".into(),
                ..none
            }
        }
        CaseTag::M2NonnegM1Sign(s) => {
            let (a, b) = bar(s);
            Prediction {
                branches: 2,
                lambda2_max: Some(a),
                lambda1_bar: Some(b),
                summary: "open curve with two branches in λ1 meeting at the topmost point (λ̄1, λ2max)".into(),
                ..none
            }
        }
        CaseTag::BothSign => {
            let vertical = integral_sign(i2, sc2) == IntegralSign::Zero;
            let (mx, mn) = if vertical {
                if i1 < 0.0 {
                    (Sign::Pos, Sign::Zero)
                } else {
                    (Sign::Zero, Sign::Neg)
                }
            } else {
                (Sign::Pos, Sign::Neg)
            };
            Prediction {
                closed: true,
                branches: 2,
                lambda1_max: Some(mx),
                lambda1_min: Some(mn),
                summary: "closed curve through the origin with λ1min <= 0 <= λ1max".into(),
                ..none
            }
        }
    };
    Ok(Classification { tag, integral1: i1, integral2: i2, prediction })
}

/// Which coordinate varies along a line slice of `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    /// `λ2` varies, `λ1` fixed (vertical line).
    Lambda2,
    /// `λ1` varies, `λ2` fixed (horizontal line).
    Lambda1,
}

struct Slice<'a> {
    ctx: &'a SpectralContext,
    axis: Axis,
    fixed: f64,
}

impl Slice<'_> {
    fn point(&self, y: f64) -> (f64, f64) {
        match self.axis {
            Axis::Lambda2 => (self.fixed, y),
            Axis::Lambda1 => (y, self.fixed),
        }
    }

    /// `(F, ∂F/∂y, ∂F/∂fixed)`.
    fn eval(&self, y: f64) -> Result<(f64, f64, f64)> {
        let (a, b) = self.point(y);
        let (f, g) = self.ctx.eval_f_grad(a, b)?;
        Ok(match self.axis {
            Axis::Lambda2 => (f, g[1], g[0]),
            Axis::Lambda1 => (f, g[0], g[1]),
        })
    }

    fn class(&self) -> SignClass {
        match self.axis {
            Axis::Lambda2 => self.ctx.sign2(),
            Axis::Lambda1 => self.ctx.sign1(),
        }
    }

    fn bounds(&self) -> ScalarRoots {
        match self.axis {
            Axis::Lambda2 => self.ctx.landmarks.lambda2,
            Axis::Lambda1 => self.ctx.landmarks.lambda1,
        }
    }

    /// Maximizer of the concave slice: `(y*, F(y*), ∂F/∂fixed at y*)`.
    fn maximize(&self, guess: f64) -> Result<(f64, f64, f64)> {
        let (f0, d0, e0) = self.eval(guess)?;
        if d0 == 0.0 {
            return Ok((guess, f0, e0));
        }
        let dir = d0.signum();
        let step = dir * (1.0 + guess.abs()) * 0.25;
        let br = roots::expand(|y| Ok(self.eval(y)?.1 * dir <= 0.0), guess, step, guess + dir * 1e12)?;
        let (x, prev) = br.ok_or(Error::NoConvergence { iterations: 0, residual: d0 })?;
        let y = roots::bisect(|y| Ok(self.eval(y)?.1), prev, x, RootTol { xtol: 1e-14, ftol: 0.0, max_iter: 200 })?;
        let (f, _, e) = self.eval(y)?;
        Ok((y, f, e))
    }

    /// All roots (at most two) of the concave slice, ascending.
    fn roots(&self) -> Result<Vec<f64>> {
        let b = self.bounds();
        let newton = |lo: f64, hi: f64| roots::newton_bracketed(|y| self.eval(y).map(|r| (r.0, r.1)), lo, hi, RAY_TOL);
        match self.class() {
            SignClass::NonnegNontrivial | SignClass::NonposNontrivial => {
                // monotone in y: decreasing for a nonnegative weight
                let dec = self.class() == SignClass::NonnegNontrivial;
                let end = if dec { b.plus } else { b.minus };
                let dir = if dec { -1.0 } else { 1.0 };
                if self.eval(end)?.0 >= 0.0 {
                    return Err(Error::InconsistentCase(format!("F >= 0 at the landmark bound {end}")));
                }
                let step = dir * (1.0 + end.abs());
                match roots::expand(|y| Ok(self.eval(y)?.0 > 0.0), end, step, end + dir * 1e12)? {
                    Some((x, prev)) => Ok(vec![newton(x.min(prev), x.max(prev))?]),
                    None => Ok(vec![]),
                }
            }
            SignClass::ChangesSign => {
                let guess = 0.5 * (b.minus + b.plus);
                let (y0, f0, _) = self.maximize(if guess.is_finite() { guess } else { 0.0 })?;
                if f0.abs() <= 1e-12 {
                    return Ok(vec![y0]);
                }
                if f0 < 0.0 {
                    return Ok(vec![]);
                }
                Ok(vec![newton(b.minus, y0)?, newton(y0, b.plus)?])
            }
            SignClass::Zero => Err(Error::UnsupportedSign("zero weight".into())),
        }
    }
}

/// Intersections of `C` with the vertical line `λ1 = l1`, ascending in `λ2`.
pub fn vertical_roots(ctx: &SpectralContext, l1: f64) -> Result<Vec<f64>> {
    Slice { ctx, axis: Axis::Lambda2, fixed: l1 }.roots()
}

/// Intersections of `C` with the horizontal line `λ2 = l2`, ascending in `λ1`.
pub fn horizontal_roots(ctx: &SpectralContext, l2: f64) -> Result<Vec<f64>> {
    Slice { ctx, axis: Axis::Lambda1, fixed: l2 }.roots()
}

/// Radius bound from the landmark box: twice the exit radius of the box
/// `Λ1- < λ1 < Λ1+`, `Λ2- < λ2 < Λ2+`, capped at `r_cap`.
pub fn ray_radius(ctx: &SpectralContext, t: f64, r_cap: f64) -> f64 {
    let (c, s) = (t.cos(), t.sin());
    let l = &ctx.landmarks;
    let mut r = f64::INFINITY;
    let mut exit = |dir: f64, lo: f64, hi: f64| {
        if dir > 1e-15 && hi.is_finite() && hi > 0.0 {
            r = r.min(hi / dir);
        } else if dir < -1e-15 && lo.is_finite() && lo < 0.0 {
            r = r.min(lo / dir);
        }
    };
    exit(c, l.lambda1.minus, l.lambda1.plus);
    exit(s, l.lambda2.minus, l.lambda2.plus);
    (2.0 * r).min(r_cap)
}

/// Search the ray in direction `dir` (not necessarily unit) for the positive
/// root of `r ↦ F(r dir)`, given the slope at `r = 0`.
fn search_direction(ctx: &SpectralContext, dir: [f64; 2], slope0: f64, gnorm: f64, r_max: f64) -> Result<RayStatus> {
    let dnorm = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
    if slope0.abs() <= 1e-12 * gnorm * dnorm || gnorm == 0.0 {
        return Ok(RayStatus::Tangent);
    }
    if slope0 < 0.0 {
        return Ok(RayStatus::NegSlope);
    }
    let phi = |r: f64| -> Result<(f64, f64)> {
        let (f, g) = ctx.eval_f_grad(r * dir[0], r * dir[1])?;
        Ok((f, g[0] * dir[0] + g[1] * dir[1]))
    };
    let mut r = r_max / 16.0;
    let (lo, hi);
    if phi(r)?.0 < 0.0 {
        loop {
            let next = r / 4.0;
            if next < 1e-13 * r_max {
                return Ok(RayStatus::Tangent);
            }
            if phi(next)?.0 > 0.0 {
                lo = next;
                hi = r;
                break;
            }
            r = next;
        }
    } else {
        loop {
            if r >= r_max {
                return Ok(RayStatus::Unbounded);
            }
            let next = (2.0 * r).min(r_max);
            if phi(next)?.0 < 0.0 {
                lo = r;
                hi = next;
                break;
            }
            r = next;
        }
    }
    let root = roots::newton_bracketed(phi, lo, hi, RAY_TOL)?;
    Ok(RayStatus::Hit(root))
}

fn origin_gradient(ctx: &SpectralContext) -> Result<[f64; 2]> {
    Ok(ctx.eval_f_grad(0.0, 0.0)?.1)
}

/// Positive root of `F` along the ray at angle `t`.
pub fn root_on_ray(ctx: &SpectralContext, t: f64, opts: &TraceOptions) -> Result<RaySample> {
    let g = origin_gradient(ctx)?;
    ray_with_gradient(ctx, t, g, opts)
}

fn ray_with_gradient(ctx: &SpectralContext, t: f64, g: [f64; 2], opts: &TraceOptions) -> Result<RaySample> {
    let dir = [t.cos(), t.sin()];
    let slope0 = g[0] * dir[0] + g[1] * dir[1];
    let gnorm = g[0].hypot(g[1]);
    let r_max = ray_radius(ctx, t, opts.r_cap);
    let status = search_direction(ctx, dir, slope0, gnorm, r_max)?;
    Ok(RaySample { t, status, r_max })
}

/// Nonzero root of `f_μ(λ1) = F(λ1, μλ1)`; `Some(0)` at the tangent slope.
pub fn h1_of_mu(ctx: &SpectralContext, mu: f64) -> Result<Option<f64>> {
    let g = origin_gradient(ctx)?;
    let slope = g[0] + mu * g[1];
    let gnorm = g[0].hypot(g[1]);
    let sgn = if slope >= 0.0 { 1.0 } else { -1.0 };
    let dir = [sgn, sgn * mu];
    let t = dir[1].atan2(dir[0]);
    let r_max = ray_radius(ctx, t, R_CAP) / (1.0 + mu * mu).sqrt();
    match search_direction(ctx, dir, slope.abs(), gnorm, r_max)? {
        RayStatus::Hit(r) => Ok(Some(sgn * r)),
        RayStatus::Tangent => Ok(Some(0.0)),
        _ => Ok(None),
    }
}

/// `h2(μ) = μ h1(μ)`.
pub fn h2_of_mu(ctx: &SpectralContext, mu: f64) -> Result<Option<f64>> {
    Ok(h1_of_mu(ctx, mu)?.map(|h| mu * h))
}

fn wrap(t: f64) -> f64 {
    t.rem_euclid(TAU)
}

/// Sweep ray angles, refine adaptively, and assemble the ordered trace.
pub fn trace_curve(ctx: &SpectralContext, opts: &TraceOptions) -> Result<EigencurveTrace> {
    if opts.n_rays < MIN_RAYS {
        return Err(Error::InvalidGeometry(format!("need at least {MIN_RAYS} rays, got {}", opts.n_rays)));
    }
    let class = classify(ctx)?;
    let g = origin_gradient(ctx)?;
    let gnorm = g[0].hypot(g[1]);

    let mut angles: Vec<f64> = (0..opts.n_rays).map(|j| TAU * j as f64 / opts.n_rays as f64).collect();
    angles.extend([0.0, 0.5 * PI, PI, 1.5 * PI]);
    let ta = if gnorm > 0.0 { Some(wrap((-g[0]).atan2(g[1]))) } else { None };
    if let Some(ta) = ta {
        angles.push(ta);
        angles.push(wrap(ta + PI));
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if angles.len() > 1 && (angles[angles.len() - 1] - TAU).abs() < 1e-12 {
        angles.pop();
    }

    let eval = |ts: &[f64]| -> Result<Vec<RaySample>> { ts.par_iter().map(|&t| ray_with_gradient(ctx, t, g, opts)).collect() };
    let mut rays = eval(&angles)?;

    let l = &ctx.landmarks;
    let scale = [l.lambda1.minus, l.lambda1.plus, l.lambda2.minus, l.lambda2.plus]
        .iter()
        .filter(|v| v.is_finite())
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    let arc = opts.arc_fraction * scale;

    loop {
        let n = rays.len();
        let mut extra = Vec::new();
        for i in 0..n {
            let a = &rays[i];
            let b = &rays[(i + 1) % n];
            let tb = if i + 1 == n { b.t + TAU } else { b.t };
            if tb - a.t < MIN_ANGLE_GAP {
                continue;
            }
            let split = match (a.point(), b.point()) {
                (Some(p), Some(q)) => {
                    let d = (p[0] - q[0]).hypot(p[1] - q[1]);
                    let near = p[0].hypot(p[1]).min(q[0].hypot(q[1]));
                    d > arc * (1.0 + near / scale)
                }
                (Some(p), None) | (None, Some(p)) => {
                    let other = if a.point().is_some() { b } else { a };
                    other.status == RayStatus::Unbounded && p[0].hypot(p[1]) < 0.5 * opts.r_cap
                }
                _ => false,
            };
            if split {
                extra.push(wrap(0.5 * (a.t + tb)));
            }
        }
        if extra.is_empty() || rays.len() >= opts.max_rays {
            break;
        }
        extra.truncate(opts.max_rays.saturating_sub(rays.len()).max(1));
        rays.extend(eval(&extra)?);
        rays.sort_by(|a, b| a.t.total_cmp(&b.t));
    }
    debug!("traced {} rays", rays.len());

    let (points, closed) = order_path(ctx, &rays, ta)?;
    let mut trace = EigencurveTrace { case_tag: class.tag, points, landmarks: TraceLandmarks::default(), closed, rays };
    trace.landmarks = landmarks(ctx, &trace, g)?;

    let bad = trace.points.iter().filter(|p| p.residual > opts.tol_curve).count();
    if bad > 0 {
        warn!("{bad} curve points exceed the residual tolerance {:.1e}", opts.tol_curve);
    }
    if class.prediction.closed != trace.closed {
        return Err(Error::InconsistentCase(format!(
            "case {} predicts a {} curve but the trace is {} (mesh or search radius too coarse?)",
            class.tag,
            if class.prediction.closed { "closed" } else { "open" },
            if trace.closed { "closed" } else { "open" }
        )));
    }
    Ok(trace)
}

fn curve_point(ctx: &SpectralContext, s: &RaySample) -> Result<CurvePoint> {
    let p = s.point().expect("point of a hit ray");
    let origin = s.status == RayStatus::Tangent;
    let residual = ctx.eval_f(p[0], p[1])?.abs();
    Ok(CurvePoint { l1: p[0], l2: p[1], t: s.t, residual, origin })
}

/// Order hits by angle inside the cone of positive slope, placing the origin
/// where the cone closes.
fn order_path(ctx: &SpectralContext, rays: &[RaySample], ta: Option<f64>) -> Result<(Vec<CurvePoint>, bool)> {
    let origin_res = ctx.eval_f(0.0, 0.0)?.abs();
    let origin = |t: f64| CurvePoint { l1: 0.0, l2: 0.0, t, residual: origin_res, origin: true };
    let Some(ta) = ta else {
        return Ok((vec![origin(0.0)], false));
    };
    let offset = |t: f64| wrap(t - ta);
    let mut inside: Vec<&RaySample> = rays.iter().filter(|s| matches!(s.status, RayStatus::Hit(_) | RayStatus::Unbounded)).collect();
    inside.sort_by(|a, b| offset(a.t).total_cmp(&offset(b.t)));
    let first_unb = inside.iter().position(|s| s.status == RayStatus::Unbounded);
    let last_unb = inside.iter().rposition(|s| s.status == RayStatus::Unbounded);
    let hits = |v: &[&RaySample]| -> Result<Vec<CurvePoint>> {
        v.par_iter().filter(|s| matches!(s.status, RayStatus::Hit(_))).map(|s| curve_point(ctx, s)).collect()
    };
    match (first_unb, last_unb) {
        (None, _) | (_, None) => {
            let mut pts = vec![origin(ta)];
            pts.extend(hits(&inside)?);
            pts.push(origin(wrap(ta + PI)));
            Ok((pts, true))
        }
        (Some(u0), Some(u1)) => {
            let between = inside[u0..=u1].iter().filter(|s| matches!(s.status, RayStatus::Hit(_))).count();
            if between > 0 {
                warn!("{between} hits inside the unbounded sector dropped from the path");
            }
            let mut pts = hits(&inside[u1 + 1..])?;
            pts.push(origin(wrap(ta + PI)));
            pts.extend(hits(&inside[..u0])?);
            Ok((pts, false))
        }
    }
}

/// Largest (`side = 1`) or smallest (`side = -1`) value of the `axis`
/// coordinate on `C`, with the other coordinate there. `seed` is a curve
/// point near the extreme.
fn extreme(ctx: &SpectralContext, along: Axis, side: f64, seed: [f64; 2]) -> Result<(f64, f64)> {
    // G(x) = max_y F(x, y) is concave; the extreme is its root on `side`.
    let (x0, y0) = match along {
        Axis::Lambda1 => (seed[0], seed[1]),
        Axis::Lambda2 => (seed[1], seed[0]),
    };
    let inner = match along {
        Axis::Lambda1 => Axis::Lambda2,
        Axis::Lambda2 => Axis::Lambda1,
    };
    let guess = std::cell::Cell::new(y0);
    let g = |x: f64| -> Result<(f64, f64, f64)> {
        let (y, f, e) = Slice { ctx, axis: inner, fixed: x }.maximize(guess.get())?;
        guess.set(y);
        Ok((f, e, y))
    };
    let (f0, _, y_at0) = g(x0)?;
    if f0 <= 1e-11 {
        return Ok((x0, y_at0));
    }
    let step = side * (1.0 + x0.abs()) * 0.05;
    let (x1, prev) =
        roots::expand(|x| Ok(g(x)?.0 < 0.0), x0, step, x0 + side * 1e12)?.ok_or(Error::NoConvergence { iterations: 0, residual: f0 })?;
    let x = roots::newton_bracketed(|x| g(x).map(|r| (r.0, r.1)), prev.min(x1), prev.max(x1), RAY_TOL)?;
    Ok((x, g(x)?.2))
}

fn landmarks(ctx: &SpectralContext, trace: &EigencurveTrace, g: [f64; 2]) -> Result<TraceLandmarks> {
    let l = &ctx.landmarks;
    let mut out = TraceLandmarks {
        lambda1_minus: l.lambda1.minus,
        lambda1_plus: l.lambda1.plus,
        lambda2_minus: l.lambda2.minus,
        lambda2_plus: l.lambda2.plus,
        mu_star: l.mu_star,
        ..Default::default()
    };
    let pts = &trace.points;
    let arg = |key: &dyn Fn(&CurvePoint) -> f64| pts.iter().copied().max_by(|a, b| key(a).total_cmp(&key(b)));
    if ctx.sign2() == SignClass::ChangesSign {
        if let Some(p) = arg(&|p| p.l1) {
            let (x, y) = extreme(ctx, Axis::Lambda1, 1.0, [p.l1, p.l2])?;
            out.lambda1_max = Some(x);
            out.lambda2_bar = Some(y);
        }
        if ctx.sign1() == SignClass::ChangesSign {
            if let Some(p) = arg(&|p| -p.l1) {
                let (x, y) = extreme(ctx, Axis::Lambda1, -1.0, [p.l1, p.l2])?;
                out.lambda1_min = Some(x);
                out.lambda2_underbar = Some(y);
            }
        }
    }
    if ctx.sign1() == SignClass::ChangesSign {
        if let Some(p) = arg(&|p| p.l2) {
            let (y, x) = extreme(ctx, Axis::Lambda2, 1.0, [p.l1, p.l2])?;
            out.lambda2_max = Some(y);
            out.lambda1_bar = Some(x);
        }
        if ctx.sign2() == SignClass::ChangesSign {
            if let Some(p) = arg(&|p| -p.l2) {
                let (y, x) = extreme(ctx, Axis::Lambda2, -1.0, [p.l1, p.l2])?;
                out.lambda2_min = Some(y);
                out.lambda1_underbar = Some(x);
            }
        }
    }
    if g[1] != 0.0 {
        let dir = [0.0, g[1].signum()];
        let r_max = ray_radius(ctx, if g[1] > 0.0 { 0.5 * PI } else { 1.5 * PI }, R_CAP);
        if let RayStatus::Hit(r) = search_direction(ctx, dir, g[1].abs(), g[0].hypot(g[1]), r_max)? {
            out.lambda2_star = Some(dir[1] * r);
        }
    }
    Ok(out)
}

/// A branch of `C` written as a graph over one coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    /// Independent coordinate.
    pub axis: Axis,
    /// `(x, y)` pairs sorted by `x`, where `x` is the `axis` coordinate.
    pub points: Vec<[f64; 2]>,
    /// Strict monotonicity observed: +1 increasing, -1 decreasing, 0 neither.
    pub trend: i8,
}

impl Branch {
    fn new(axis: Axis, pts: &[CurvePoint]) -> Branch {
        let mut points: Vec<[f64; 2]> = pts
            .iter()
            .map(|p| match axis {
                Axis::Lambda1 => [p.l1, p.l2],
                Axis::Lambda2 => [p.l2, p.l1],
            })
            .collect();
        points.sort_by(|a, b| a[0].total_cmp(&b[0]));
        points.dedup_by(|a, b| (a[0] - b[0]).abs() <= 1e-12 * (1.0 + a[0].abs()) && (a[1] - b[1]).abs() <= 1e-9 * (1.0 + a[1].abs()));
        let inc = points.windows(2).all(|w| w[1][1] > w[0][1]);
        let dec = points.windows(2).all(|w| w[1][1] < w[0][1]);
        Branch {
            axis,
            points,
            trend: if inc {
                1
            } else if dec {
                -1
            } else {
                0
            },
        }
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        Some((self.points.first()?[0], self.points.last()?[0]))
    }

    /// Linear interpolation inside the sampled domain.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let (a, b) = self.domain()?;
        if x < a || x > b {
            return None;
        }
        let j = self.points.partition_point(|p| p[0] <= x).clamp(1, self.points.len().max(2) - 1);
        if self.points.len() == 1 {
            return Some(self.points[0][1]);
        }
        let (p, q) = (self.points[j - 1], self.points[j]);
        if q[0] == p[0] {
            return Some(p[1]);
        }
        Some(p[1] + (x - p[0]) / (q[0] - p[0]) * (q[1] - p[1]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum HMaps {
    Single(Branch),
    Pair { upper: Branch, lower: Branch },
}

/// Split a trace into graphs: `λ2 = H(λ1)`, or `H±` split at the extremes.
pub fn h_maps(trace: &EigencurveTrace) -> Result<HMaps> {
    let pts = &trace.points;
    if pts.is_empty() {
        return Err(Error::BranchSplitFailed("empty trace".into()));
    }
    let axis = match trace.case_tag {
        CaseTag::M2NonnegM1Sign(_) => Axis::Lambda2,
        _ => Axis::Lambda1,
    };
    let coord = |p: &CurvePoint| match axis {
        Axis::Lambda1 => p.l1,
        Axis::Lambda2 => p.l2,
    };
    let other = |p: &CurvePoint| match axis {
        Axis::Lambda1 => p.l2,
        Axis::Lambda2 => p.l1,
    };
    if trace.case_tag == CaseTag::BothNonneg {
        return Ok(HMaps::Single(Branch::new(Axis::Lambda1, pts)));
    }
    let unique_extreme = |pts: &[CurvePoint], idx: usize| -> Result<()> {
        let v = coord(&pts[idx]);
        let tol = 1e-9 * (1.0 + v.abs());
        let n = pts.len();
        for (j, p) in pts.iter().enumerate() {
            let d = if trace.closed {
                (j as isize - idx as isize).unsigned_abs().min(n - (j as isize - idx as isize).unsigned_abs())
            } else {
                (j as isize - idx as isize).unsigned_abs()
            };
            if (coord(p) - v).abs() <= tol && d > 2 && (other(p) - other(&pts[idx])).abs() > 1e-6 * (1.0 + other(p).abs()) {
                return Err(Error::BranchSplitFailed(format!("extreme {v} attained at separated points")));
            }
        }
        Ok(())
    };
    let argmax =
        |pts: &[CurvePoint], s: f64| (0..pts.len()).max_by(|&a, &b| (s * coord(&pts[a])).total_cmp(&(s * coord(&pts[b])))).unwrap();
    let mean = |v: &[CurvePoint]| v.iter().map(&other).sum::<f64>() / v.len().max(1) as f64;
    let (a, b): (Vec<CurvePoint>, Vec<CurvePoint>) = if trace.closed {
        let cyc = &pts[..pts.len() - 1];
        let hi = argmax(cyc, 1.0);
        let lo = argmax(cyc, -1.0);
        unique_extreme(cyc, hi)?;
        unique_extreme(cyc, lo)?;
        let n = cyc.len();
        let arc = |from: usize, to: usize| -> Vec<CurvePoint> {
            let mut v = Vec::new();
            let mut k = from;
            loop {
                v.push(cyc[k]);
                if k == to {
                    break;
                }
                k = (k + 1) % n;
            }
            v
        };
        (arc(lo, hi), arc(hi, lo))
    } else {
        let k = argmax(pts, 1.0);
        unique_extreme(pts, k)?;
        (pts[..=k].to_vec(), pts[k..].to_vec())
    };
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::BranchSplitFailed("a branch has fewer than two points".into()));
    }
    let (upper, lower) = if mean(&a) >= mean(&b) { (a, b) } else { (b, a) };
    Ok(HMaps::Pair { upper: Branch::new(axis, &upper), lower: Branch::new(axis, &lower) })
}

/// Point-in-polygon test (even-odd rule) against a closed trace.
pub fn inside_closed(trace: &EigencurveTrace, p: [f64; 2]) -> bool {
    let pts = &trace.points;
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if (a.l2 > p[1]) != (b.l2 > p[1]) {
            let x = a.l1 + (p[1] - a.l2) / (b.l2 - a.l2) * (b.l1 - a.l1);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}
