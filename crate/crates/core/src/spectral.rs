//! Spectral maps: the scalar map `μ(λ) = σ1(-Δ - λc; B)` with its roots, the
//! two-parameter map `F(λ1, λ2) = Λ1(-λ1 m1, -λ2 m2)`, its restrictions to
//! rays (`f_μ`) and to the `λ2` axis (`g`), and the landmark values.

use log::warn;
use serde::Serialize;

use crate::banded::Tridiagonal;
use crate::eigen::{self, EigenOptions, EigenResult};
use crate::error::{Error, Result};
use crate::fields::{classify_values, CoefficientField, FieldDef, SignClass, ZERO_REL};
use crate::geometry::{build_mesh, DomainSpec, Mesh, Segment, Subdomain};
use crate::operator::{assemble_interface, assemble_scalar, BoundaryKind, InterfaceOperator};
use crate::roots::{self, RootTol};

/// `|μ(λ0)| <= DOUBLE_ROOT_TOL` at the maximum of `μ` counts as a double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-6;
/// Largest `|λ|` searched when bracketing roots.
pub const SEARCH_LIMIT: f64 = 1e12;

const ROOT_TOL: RootTol = RootTol { xtol: 1e-13, ftol: 1e-11, max_iter: 200 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootOutcome {
    /// Definite-sign weight: one finite root, the other side infinite.
    Unique,
    Two,
    Double,
    None,
}

/// Roots `λ⁻ <= λ⁺` of `μ(λ)`. Missing roots are `-∞` / `+∞` sentinels for
/// definite-sign weights and NaN when `μ < 0` everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarRoots {
    pub minus: f64,
    pub plus: f64,
    pub outcome: RootOutcome,
}

/// The scalar family `-Δ - λ c` on a segment with fixed end conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProblem {
    base: Tridiagonal,
    weight: Vec<f64>,
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    pub nodes: Vec<f64>,
    pub opts: EigenOptions,
}

impl ScalarProblem {
    pub fn new(seg: &Segment, c: &[f64], left: BoundaryKind, right: BoundaryKind) -> Result<Self> {
        let op = assemble_scalar(seg, &vec![0.0; seg.len()], left, right)?;
        if c.len() != seg.len() {
            return Err(Error::FieldDefinition(format!("weight has {} values, segment has {} nodes", c.len(), seg.len())));
        }
        let lo = usize::from(left == BoundaryKind::Dirichlet);
        let weight = c[lo..lo + op.dim()].to_vec();
        Ok(ScalarProblem { base: op.matrix, weight, left, right, nodes: op.nodes, opts: EigenOptions::default() })
    }

    pub fn matrix_at(&self, lambda: f64) -> Tridiagonal {
        let d: Vec<f64> = self.weight.iter().map(|c| -lambda * c).collect();
        self.base.with_added_diagonal(&d)
    }

    pub fn eigen(&self, lambda: f64) -> Result<EigenResult> {
        eigen::principal(&self.matrix_at(lambda), self.opts)
    }

    pub fn mu(&self, lambda: f64) -> Result<f64> {
        Ok(self.eigen(lambda)?.value)
    }

    /// `(μ(λ), μ'(λ))`, the derivative from the eigenvector.
    pub fn mu_with_derivative(&self, lambda: f64) -> Result<(f64, f64)> {
        let r = self.eigen(lambda)?;
        let neg: Vec<f64> = self.weight.iter().map(|c| -c).collect();
        Ok((r.value, r.potential_derivative(0, &neg)))
    }

    pub fn sign_class(&self) -> SignClass {
        let max = self.weight.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        classify_values(&self.weight, ZERO_REL * max)
    }

    fn step(&self) -> Result<f64> {
        let max = self.weight.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(self.mu(0.0)?.abs().max(1e-3) / max)
    }

    /// Root of `μ` on the side `dir` (±1) of `from`, where `μ(from) > 0` and
    /// `μ` eventually turns negative.
    fn root_towards(&self, from: f64, dir: f64) -> Result<Option<f64>> {
        let step = dir * self.step()?;
        let bracket = roots::expand(|x| Ok(self.mu(x)? < 0.0), from, step, dir * SEARCH_LIMIT)?;
        match bracket {
            Some((x, prev)) => Ok(Some(roots::newton_bracketed(|l| self.mu_with_derivative(l), prev, x, ROOT_TOL)?)),
            None => Ok(None),
        }
    }

    /// Roots of `μ`, following the three-way split of the concave map.
    pub fn roots(&self) -> Result<ScalarRoots> {
        match self.sign_class() {
            SignClass::Zero => Err(Error::UnsupportedSign("weight vanishes identically".into())),
            SignClass::NonnegNontrivial => {
                let plus = self.monotone_root(1.0)?;
                Ok(ScalarRoots { minus: f64::NEG_INFINITY, plus, outcome: RootOutcome::Unique })
            }
            SignClass::NonposNontrivial => {
                let minus = self.monotone_root(-1.0)?;
                Ok(ScalarRoots { minus, plus: f64::INFINITY, outcome: RootOutcome::Unique })
            }
            SignClass::ChangesSign => self.two_sided_roots(),
        }
    }

    fn monotone_root(&self, dir: f64) -> Result<f64> {
        let mu0 = self.mu(0.0)?;
        if mu0 <= 0.0 {
            return Ok(0.0);
        }
        self.root_towards(0.0, dir)?.ok_or(Error::NoConvergence { iterations: 0, residual: mu0 })
    }

    /// Maximizer of the concave map `μ`.
    pub fn maximizer(&self) -> Result<(f64, f64)> {
        let (mu0, d0) = self.mu_with_derivative(0.0)?;
        if d0 == 0.0 {
            return Ok((0.0, mu0));
        }
        let dir = d0.signum();
        let step = dir * self.step()?;
        let bracket = roots::expand(|x| Ok(self.mu_with_derivative(x)?.1 * dir <= 0.0), 0.0, step, dir * SEARCH_LIMIT)?;
        let (x, prev) = bracket.ok_or(Error::NoConvergence { iterations: 0, residual: d0 })?;
        let (a, b) = if x < prev { (x, prev) } else { (prev, x) };
        roots::golden_max(|l| self.mu(l), a, b, 1e-12)
    }

    fn two_sided_roots(&self) -> Result<ScalarRoots> {
        let (l0, m0) = self.maximizer()?;
        if m0.abs() <= DOUBLE_ROOT_TOL {
            return Ok(ScalarRoots { minus: l0, plus: l0, outcome: RootOutcome::Double });
        }
        if m0 < 0.0 {
            return Ok(ScalarRoots { minus: f64::NAN, plus: f64::NAN, outcome: RootOutcome::None });
        }
        let minus = self.root_towards(l0, -1.0)?.unwrap_or(f64::NEG_INFINITY);
        let plus = self.root_towards(l0, 1.0)?.unwrap_or(f64::INFINITY);
        Ok(ScalarRoots { minus, plus, outcome: RootOutcome::Two })
    }
}

/// `μ(λ) = σ1(-Δ - λc; B)` on a segment.
pub fn scalar_mu(lambda: f64, seg: &Segment, c: &[f64], left: BoundaryKind, right: BoundaryKind) -> Result<f64> {
    ScalarProblem::new(seg, c, left, right)?.mu(lambda)
}

pub fn scalar_roots(seg: &Segment, c: &[f64], left: BoundaryKind, right: BoundaryKind) -> Result<ScalarRoots> {
    ScalarProblem::new(seg, c, left, right)?.roots()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Landmarks {
    /// `Λ1^±`: roots of `σ1^{Ω1}(-Δ - λ m1; N + γ1)`.
    pub lambda1: ScalarRoots,
    /// `Λ2^±`: roots of `σ1^{Ω2}(-Δ - λ m2; N + γ2, N)`.
    pub lambda2: ScalarRoots,
    pub mu_star: Option<f64>,
    /// Dirichlet principal eigenvalue on the largest zero interval of `m2`.
    pub dirichlet_limit: Option<f64>,
}

/// Everything needed to evaluate `F` for one weight configuration.
#[derive(Debug, Clone)]
pub struct SpectralContext {
    pub mesh: Mesh,
    pub m1: CoefficientField,
    pub m2: CoefficientField,
    pub gamma1: f64,
    pub gamma2: f64,
    pub opts: EigenOptions,
    pub landmarks: Landmarks,
    base: InterfaceOperator,
    omega1: ScalarProblem,
    omega2: ScalarProblem,
}

impl SpectralContext {
    pub fn new(mesh: Mesh, m1: CoefficientField, m2: CoefficientField, gamma1: f64, gamma2: f64) -> Result<Self> {
        SpectralContext::with_options(mesh, m1, m2, gamma1, gamma2, EigenOptions::default())
    }

    pub fn with_options(
        mesh: Mesh,
        m1: CoefficientField,
        m2: CoefficientField,
        gamma1: f64,
        gamma2: f64,
        opts: EigenOptions,
    ) -> Result<Self> {
        m1.classify_sign()?;
        m2.classify_sign()?;
        let (n1, n2) = (mesh.inner.len(), mesh.outer.len());
        if m1.values.len() != n1 || m2.values.len() != n2 {
            return Err(Error::FieldDefinition("weights are not sampled on this mesh".into()));
        }
        let base = assemble_interface(&mesh, &vec![0.0; n1], &vec![0.0; n2], gamma1, gamma2)?;
        let sigma = mesh.sigma_measure();
        let mut omega1 = ScalarProblem::new(&mesh.inner, &m1.values, BoundaryKind::Neumann, BoundaryKind::Robin(gamma1))?;
        let mut omega2 = ScalarProblem::new(&mesh.outer, &m2.values, BoundaryKind::Robin(gamma2), BoundaryKind::Neumann)?;
        omega1.opts = opts;
        omega2.opts = opts;
        debug_assert!(sigma > 0.0);
        let lambda1 = omega1.roots()?;
        let lambda2 = omega2.roots()?;
        let mu_star = mu_star_of(m1.integrate(), m2.integrate(), &m2, &mesh, gamma1, gamma2);
        let dirichlet_limit = if m2.sign_class() != SignClass::NonnegNontrivial {
            None
        } else {
            match dirichlet_zero_set_eigen(&mesh, &m2) {
                Ok(v) => Some(v),
                Err(Error::EmptyZeroSet) => None,
                Err(e) => return Err(e),
            }
        };
        let landmarks = Landmarks { lambda1, lambda2, mu_star, dirichlet_limit };
        Ok(SpectralContext { mesh, m1, m2, gamma1, gamma2, opts, landmarks, base, omega1, omega2 })
    }

    pub fn from_defs(spec: DomainSpec, m1: &FieldDef, m2: &FieldDef, gamma1: f64, gamma2: f64) -> Result<Self> {
        let mesh = build_mesh(spec)?;
        let f1 = m1.sample(&mesh.inner, Subdomain::Inner)?;
        let f2 = m2.sample(&mesh.outer, Subdomain::Outer)?;
        SpectralContext::new(mesh, f1, f2, gamma1, gamma2)
    }

    pub fn base(&self) -> &InterfaceOperator {
        &self.base
    }

    pub fn integral1(&self) -> f64 {
        self.m1.integrate()
    }

    pub fn integral2(&self) -> f64 {
        self.m2.integrate()
    }

    pub fn sign1(&self) -> SignClass {
        self.m1.sign_class()
    }

    pub fn sign2(&self) -> SignClass {
        self.m2.sign_class()
    }

    /// The potential pair `(-λ1 m1, -λ2 m2)` in global ordering.
    pub fn potential(&self, l1: f64, l2: f64) -> Vec<f64> {
        self.m1.values.iter().map(|m| -l1 * m).chain(self.m2.values.iter().map(|m| -l2 * m)).collect()
    }

    pub fn operator_at(&self, l1: f64, l2: f64) -> InterfaceOperator {
        self.base.with_potential(&self.potential(l1, l2))
    }

    pub fn eigen_at(&self, l1: f64, l2: f64) -> Result<EigenResult> {
        let m = self.base.matrix.with_added_diagonal(&self.potential(l1, l2));
        eigen::principal(&m, self.opts)
    }

    /// `F(λ1, λ2)`.
    pub fn eval_f(&self, l1: f64, l2: f64) -> Result<f64> {
        Ok(self.eigen_at(l1, l2)?.value)
    }

    /// `F` with its gradient `(∂F/∂λ1, ∂F/∂λ2)`.
    pub fn eval_f_grad(&self, l1: f64, l2: f64) -> Result<(f64, [f64; 2])> {
        let r = self.eigen_at(l1, l2)?;
        let n1 = self.mesh.inner.len();
        let neg1: Vec<f64> = self.m1.values.iter().map(|m| -m).collect();
        let neg2: Vec<f64> = self.m2.values.iter().map(|m| -m).collect();
        Ok((r.value, [r.potential_derivative(0, &neg1), r.potential_derivative(n1, &neg2)]))
    }

    /// `f_μ(λ1) = F(λ1, μ λ1)`.
    pub fn eval_f_mu(&self, mu: f64, l1: f64) -> Result<f64> {
        self.eval_f(l1, mu * l1)
    }

    /// `g(λ2) = F(0, λ2)`.
    pub fn eval_g(&self, l2: f64) -> Result<f64> {
        self.eval_f(0.0, l2)
    }

    pub fn mu_star(&self) -> Option<f64> {
        self.landmarks.mu_star
    }

    /// `σ1^{Ω1}(-Δ - λ m1; N + γ1)`.
    pub fn sigma_omega1(&self, l1: f64) -> Result<f64> {
        self.omega1.mu(l1)
    }

    /// `σ1^{Ω2}(-Δ - λ m2; N + γ2, N)`.
    pub fn sigma_omega2(&self, l2: f64) -> Result<f64> {
        self.omega2.mu(l2)
    }

    pub fn omega1_problem(&self) -> &ScalarProblem {
        &self.omega1
    }

    pub fn omega2_problem(&self) -> &ScalarProblem {
        &self.omega2
    }

    /// Right-hand side of the strict bound `F < min{σ1^{Ω1}, σ1^{Ω2}}`.
    pub fn cota1(&self, l1: f64, l2: f64) -> Result<f64> {
        Ok(self.sigma_omega1(l1)?.min(self.sigma_omega2(l2)?))
    }

    /// Right-hand side of the averaged bound
    /// `F <= (-λ1∫m1 - λ2∫m2 + (γ1 + γ2)|Σ|) / (|Ω1| + |Ω2|)`.
    pub fn cota2(&self, l1: f64, l2: f64) -> f64 {
        let num = -l1 * self.integral1() - l2 * self.integral2() + (self.gamma1 + self.gamma2) * self.mesh.sigma_measure();
        num / (self.mesh.measure1() + self.mesh.measure2())
    }

    /// `min{σ1^{Ω1}(-Δ - a* m1; N + γ1), σ1^{M2⁰}(-Δ; D)}`, the limit of
    /// `F(a*, b)` as `b → -∞` for a nonnegative `m2` with a zero set.
    pub fn degenerate_limit(&self, a_star: f64) -> Result<f64> {
        let d = self.landmarks.dirichlet_limit.ok_or(Error::EmptyZeroSet)?;
        Ok(self.sigma_omega1(a_star)?.min(d))
    }
}

fn mu_star_of(int1: f64, int2: f64, m2: &CoefficientField, mesh: &Mesh, g1: f64, g2: f64) -> Option<f64> {
    let zero = 1e-12 * m2.max_abs() * mesh.measure2();
    if int2.abs() <= zero {
        None
    } else {
        Some(-(g2 * int1) / (g1 * int2))
    }
}

/// Principal Dirichlet eigenvalue of `-Δ` on the largest zero interval of
/// `m2`. An end touching the outer boundary keeps its Neumann condition.
pub fn dirichlet_zero_set_eigen(mesh: &Mesh, m2: &CoefficientField) -> Result<f64> {
    let zs = m2.zero_set(m2.tau_zero());
    let iv = zs.largest().ok_or(Error::EmptyZeroSet)?;
    if !iv.interior {
        warn!("zero set [{}, {}] of m2 touches the subdomain boundary; the degenerate limit is not guaranteed", iv.lo, iv.hi);
    }
    let cells = (((iv.hi - iv.lo) / mesh.h2()).round() as usize).max(8);
    let seg = Segment::new(iv.lo, iv.hi, cells, mesh.spec.radial_power);
    let edge = 1e-12 * (mesh.outer.b - mesh.outer.a);
    let right = if (mesh.outer.b - iv.hi).abs() <= edge { BoundaryKind::Neumann } else { BoundaryKind::Dirichlet };
    let op = assemble_scalar(&seg, &vec![0.0; seg.len()], BoundaryKind::Dirichlet, right)?;
    Ok(eigen::principal_scalar(&op)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ctx(m1: FieldDef, m2: FieldDef, g1: f64, g2: f64) -> SpectralContext {
        SpectralContext::from_defs(DomainSpec::flat(0.0, 0.5, 1.0, 40, 40), &m1, &m2, g1, g2).unwrap()
    }

    #[test]
    fn origin_and_shift() {
        let c = ctx(FieldDef::Constant(1.0), FieldDef::Constant(1.0), 1.0, 2.0);
        assert!(c.eval_f(0.0, 0.0).unwrap().abs() < 1e-10);
        for l in [-2.0, 0.5, 3.0] {
            assert!((c.eval_f(l, l).unwrap() + l).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_weight_root_is_mu0() {
        let seg = Segment::new(0.5, 1.0, 64, 0);
        let p = ScalarProblem::new(&seg, &[1.0; 65], BoundaryKind::Robin(2.0), BoundaryKind::Neumann).unwrap();
        let mu0 = p.mu(0.0).unwrap();
        assert!((p.mu(0.7).unwrap() - (mu0 - 0.7)).abs() < 1e-10);
        let r = p.roots().unwrap();
        assert_eq!(r.outcome, RootOutcome::Unique);
        assert!((r.plus - mu0).abs() < 1e-9);
        assert_eq!(r.minus, f64::NEG_INFINITY);
        let neg = ScalarProblem::new(&seg, &[-1.0; 65], BoundaryKind::Robin(2.0), BoundaryKind::Neumann).unwrap();
        let rn = neg.roots().unwrap();
        assert!((rn.minus + mu0).abs() < 1e-9 && rn.plus == f64::INFINITY);
    }

    #[test]
    fn sign_changing_weight_two_roots() {
        let seg = Segment::new(0.5, 1.0, 64, 0);
        let c: Vec<f64> = seg.nodes.iter().map(|x| x - 0.75).collect();
        let p = ScalarProblem::new(&seg, &c, BoundaryKind::Robin(1.0), BoundaryKind::Neumann).unwrap();
        let r = p.roots().unwrap();
        assert_eq!(r.outcome, RootOutcome::Two);
        assert!(r.minus < 0.0 && r.plus > 0.0);
        assert!(p.mu(r.minus).unwrap().abs() < 1e-8 && p.mu(r.plus).unwrap().abs() < 1e-8);
    }

    #[test]
    fn mu_star_arithmetic() {
        // ∫m1 = 0.5, ∫m2 = -0.25 with γ1 = γ2
        let c = ctx(FieldDef::Constant(1.0), FieldDef::Constant(-0.5), 1.0, 1.0);
        assert!((c.mu_star().unwrap() - 2.0).abs() < 1e-12);
        let z = ctx(FieldDef::Constant(1.0), FieldDef::Expression("x - 0.75".into()), 1.0, 1.0);
        assert!(z.mu_star().is_none());
    }

    #[test]
    fn dirichlet_limit_closed_form() {
        let m2 = FieldDef::Piecewise { breakpoints: vec![0.6, 0.8], values: vec![1.0, 0.0, 1.0] };
        let c = ctx(FieldDef::Constant(1.0), m2, 1.0, 1.0);
        let d = c.landmarks.dirichlet_limit.unwrap();
        assert!((d - PI * PI / 0.04).abs() / d < 5e-3, "{d}");
        let none = ctx(FieldDef::Constant(1.0), FieldDef::Constant(1.0), 1.0, 1.0);
        assert!(matches!(none.degenerate_limit(0.0), Err(Error::EmptyZeroSet)));
    }

    #[test]
    fn gradient_matches_differences() {
        let c = ctx(FieldDef::Expression("sin(6*x)".into()), FieldDef::Expression("x - 0.7".into()), 0.5, 2.0);
        let (_, g) = c.eval_f_grad(1.5, -2.0).unwrap();
        let h = 1e-5;
        let d1 = (c.eval_f(1.5 + h, -2.0).unwrap() - c.eval_f(1.5 - h, -2.0).unwrap()) / (2.0 * h);
        let d2 = (c.eval_f(1.5, -2.0 + h).unwrap() - c.eval_f(1.5, -2.0 - h).unwrap()) / (2.0 * h);
        assert!((g[0] - d1).abs() < 1e-6 && (g[1] - d2).abs() < 1e-6);
    }
}
