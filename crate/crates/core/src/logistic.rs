//! The logistic interface problem `-Δu_i = λ_i m_i u_i - u_i^{p_i}` with
//! membrane coupling, solved between the sub- and supersolution pair
//! `(εφ, K)` by two-sided monotone iteration.
//!
//! Writing the discrete problem as `A u = f(u)` with `f(u) = λ m u - u^p`
//! (concave for `u >= 0`), the upper sequence is Newton's method started at
//! `K`, which decreases monotonically for concave `f`. The lower sequence is
//! the chord map `(A - f'(ū)) u⁺ = f(u) - f'(ū) u` with the current upper
//! iterate `ū`, which is order preserving on `[0, ū]` and increases from `εφ`.

use serde::{Deserialize, Serialize};

use crate::banded::Tridiagonal;
use crate::eigen;
use crate::error::{Error, Result};
use crate::spectral::SpectralContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterationMode {
    /// Newton from above, chord from below.
    NewtonShift,
    /// Fixed-shift Picard iteration `(A + Θ) u⁺ = Θu + f(u)` on both sides.
    Picard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogisticOptions {
    /// Existence is decided only when `|F| > tol_margin`.
    pub tol_margin: f64,
    pub tol_nl: f64,
    /// Allowed distance between the upper and lower limits.
    pub tol_uniq: f64,
    pub max_iter: usize,
    pub mode: IterationMode,
    pub eps_safety: f64,
    pub k_safety: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions {
            tol_margin: 10.0 * crate::curve::TOL_CURVE,
            tol_nl: 1e-9,
            tol_uniq: 1e-8,
            max_iter: 1000,
            mode: IterationMode::NewtonShift,
            eps_safety: 0.9,
            k_safety: 1.1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LogisticProblem<'a> {
    pub ctx: &'a SpectralContext,
    pub lambda1: f64,
    pub lambda2: f64,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bracket {
    pub eps: f64,
    pub k: f64,
    /// Principal eigenfunction at `(-λ1 m1, -λ2 m2)`, max-normalized.
    pub phi: Vec<f64>,
    pub f_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticSolution {
    pub u: Vec<f64>,
    /// Limit of the increasing sequence.
    pub lower: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub gap: f64,
    pub bracket: (f64, f64),
}

impl LogisticSolution {
    pub fn sup(&self) -> f64 {
        self.u.iter().fold(0.0_f64, |m, v| m.max(*v))
    }
}

impl<'a> LogisticProblem<'a> {
    pub fn new(ctx: &'a SpectralContext, lambda1: f64, lambda2: f64, p1: f64, p2: f64) -> Result<Self> {
        if !(p1 > 1.0 && p2 > 1.0) {
            return Err(Error::FieldDefinition(format!("exponents must exceed 1, got p1 = {p1}, p2 = {p2}")));
        }
        Ok(LogisticProblem { ctx, lambda1, lambda2, p1, p2 })
    }

    fn n1(&self) -> usize {
        self.ctx.mesh.inner.len()
    }

    /// `λ_i m_i` at every node.
    fn growth(&self) -> Vec<f64> {
        self.ctx.potential(self.lambda1, self.lambda2).iter().map(|v| -v).collect()
    }

    fn exponents(&self) -> Vec<f64> {
        let n1 = self.n1();
        (0..self.ctx.mesh.dim()).map(|i| if i < n1 { self.p1 } else { self.p2 }).collect()
    }

    fn base(&self) -> &Tridiagonal {
        &self.ctx.base().matrix
    }

    /// `A u - λ m u + u^p` at every node.
    pub fn residual_vector(&self, u: &[f64]) -> Vec<f64> {
        let au = self.base().matvec(u);
        let g = self.growth();
        let p = self.exponents();
        (0..u.len()).map(|i| au[i] - g[i] * u[i] + u[i].max(0.0).powf(p[i])).collect()
    }

    pub fn residual(&self, u: &[f64]) -> f64 {
        self.residual_vector(u).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn nl_tol(&self, opts: &LogisticOptions, u: &[f64]) -> f64 {
        let sup = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        opts.tol_nl.max(64.0 * f64::EPSILON * self.base().max_abs_row_sum() * sup.max(1.0))
    }

    /// `F(λ1, λ2) < -tol_margin`, or `Indeterminate` inside the margin.
    pub fn existence_check(&self, opts: &LogisticOptions) -> Result<bool> {
        let f = self.ctx.eval_f(self.lambda1, self.lambda2)?;
        if f.abs() <= opts.tol_margin {
            return Err(Error::Indeterminate { value: f, margin: opts.tol_margin });
        }
        Ok(f < -opts.tol_margin)
    }

    /// The ordered pair `εφ <= K`.
    pub fn bracket(&self, opts: &LogisticOptions) -> Result<Bracket> {
        let r = self.ctx.eigen_at(self.lambda1, self.lambda2)?;
        let f = r.value;
        if f >= -opts.tol_margin {
            return Err(Error::NotSubcritical { value: f, margin: opts.tol_margin });
        }
        let sup = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let kk = |lam: f64, m: &[f64], p: f64| (lam.abs() * sup(m)).powf(1.0 / (p - 1.0));
        let k = kk(self.lambda1, &self.ctx.m1.values, self.p1).max(kk(self.lambda2, &self.ctx.m2.values, self.p2)) * opts.k_safety;
        let e1 = (-f).powf(1.0 / (self.p1 - 1.0));
        let e2 = (-f).powf(1.0 / (self.p2 - 1.0));
        let mut eps = e1.min(e2) * opts.eps_safety;
        let phi_max = sup(&r.eigenfunction);
        if eps * phi_max > k {
            eps = k / phi_max;
        }
        Ok(Bracket { eps, k, phi: r.eigenfunction, f_value: f })
    }

    fn jacobian_diag(&self, u: &[f64], g: &[f64], p: &[f64]) -> Vec<f64> {
        // -f'(u) = -λm + p u^{p-1}
        (0..u.len()).map(|i| -g[i] + p[i] * u[i].max(0.0).powf(p[i] - 1.0)).collect()
    }

    fn f_of(&self, u: &[f64], g: &[f64], p: &[f64]) -> Vec<f64> {
        (0..u.len()).map(|i| g[i] * u[i] - u[i].max(0.0).powf(p[i])).collect()
    }

    /// One step `(A + J) x = f(u) + J u` with the given diagonal `J`.
    fn step(&self, u: &[f64], jd: &[f64], g: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        let f = self.f_of(u, g, p);
        let rhs: Vec<f64> = (0..u.len()).map(|i| f[i] + jd[i] * u[i]).collect();
        self.base().with_added_diagonal(jd).solve(&rhs)
    }

    /// Two-sided monotone iteration between the bracket pair.
    pub fn solve(&self, opts: &LogisticOptions) -> Result<LogisticSolution> {
        let br = self.bracket(opts)?;
        let g = self.growth();
        let p = self.exponents();
        let n = g.len();
        let mut upper = vec![br.k; n];
        let mut lower: Vec<f64> = br.phi.iter().map(|v| br.eps * v).collect();
        let theta = match opts.mode {
            IterationMode::Picard => {
                let t = (0..n).map(|i| p[i] * br.k.powf(p[i] - 1.0) - g[i]).fold(0.0_f64, f64::max);
                Some(vec![t; n])
            }
            IterationMode::NewtonShift => None,
        };
        let slack = |v: f64| 1e-12 * (1.0 + v.abs()) + 64.0 * f64::EPSILON * br.k;
        let mut gap = f64::INFINITY;
        let mut best_gap = f64::INFINITY;
        let mut stalled = 0;
        for it in 1..=opts.max_iter {
            let jd_up = match &theta {
                Some(t) => t.clone(),
                None => self.jacobian_diag(&upper, &g, &p),
            };
            let next_up = self.step(&upper, &jd_up, &g, &p)?;
            let next_lo = self.step(&lower, &jd_up, &g, &p)?;
            for i in 0..n {
                if next_up[i] > upper[i] + slack(upper[i]) {
                    return Err(Error::MonotonicityViolated {
                        iteration: it,
                        detail: format!("upper iterate grew at node {i}: {} -> {}", upper[i], next_up[i]),
                    });
                }
                if next_lo[i] < lower[i] - slack(lower[i]) {
                    return Err(Error::MonotonicityViolated {
                        iteration: it,
                        detail: format!("lower iterate fell at node {i}: {} -> {}", lower[i], next_lo[i]),
                    });
                }
                if next_lo[i] > next_up[i] + slack(next_up[i]) {
                    return Err(Error::MonotonicityViolated {
                        iteration: it,
                        detail: format!("iterates crossed at node {i}: {} > {}", next_lo[i], next_up[i]),
                    });
                }
            }
            upper = next_up;
            lower = next_lo;
            gap = (0..n).map(|i| (upper[i] - lower[i]).abs()).fold(0.0, f64::max);
            let scale = upper.iter().fold(1.0_f64, |m, v| m.max(*v));
            if gap <= 1e-13 * scale {
                return self.finish(upper, lower, gap, it, &br, opts);
            }
            if gap < 0.999 * best_gap {
                best_gap = gap;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= 5 {
                    return self.finish(upper, lower, gap, it, &br, opts);
                }
            }
        }
        Err(Error::NonConvergence { iterations: opts.max_iter, gap })
    }

    fn finish(
        &self,
        upper: Vec<f64>,
        lower: Vec<f64>,
        gap: f64,
        iterations: usize,
        br: &Bracket,
        opts: &LogisticOptions,
    ) -> Result<LogisticSolution> {
        if gap > opts.tol_uniq {
            return Err(Error::UniquenessGap { gap, tol: opts.tol_uniq });
        }
        let residual = self.residual(&upper);
        let tol = self.nl_tol(opts, &upper);
        if residual > tol {
            return Err(Error::NonConvergence { iterations, gap: residual });
        }
        Ok(LogisticSolution { u: upper, lower, residual, iterations, gap, bracket: (br.eps, br.k) })
    }

    /// Sup norms of the Newton sequence from the constant `start`. For
    /// `F > 0` the only nonnegative solution is zero and the sequence decays.
    pub fn decay(&self, start: f64, iterations: usize) -> Result<Vec<f64>> {
        let g = self.growth();
        let p = self.exponents();
        let mut u = vec![start; g.len()];
        let mut out = Vec::with_capacity(iterations);
        for _ in 0..iterations {
            let jd = self.jacobian_diag(&u, &g, &p);
            u = self.step(&u, &jd, &g, &p)?;
            out.push(u.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
        }
        Ok(out)
    }

    /// `Λ1(-λ1 m1 + u1^{p1-1}, -λ2 m2 + u2^{p2-1})`, zero at a solution.
    pub fn linearized_eigenvalue(&self, u: &[f64]) -> Result<f64> {
        let g = self.growth();
        let p = self.exponents();
        let d: Vec<f64> = (0..u.len()).map(|i| -g[i] + u[i].max(0.0).powf(p[i] - 1.0)).collect();
        Ok(eigen::principal(&self.base().with_added_diagonal(&d), self.ctx.opts)?.value)
    }

    /// Residual of `v` with the sign convention `A v - f(v)`: `<= 0` at every
    /// node for a subsolution, `>= 0` for a supersolution.
    pub fn defect(&self, v: &[f64]) -> Vec<f64> {
        self.residual_vector(v)
    }
}
