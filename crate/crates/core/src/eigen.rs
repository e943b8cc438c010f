//! Principal eigenpairs of the assembled operators.
//!
//! All operators here are tridiagonal Z-matrices, hence diagonally similar to
//! a symmetric matrix. The principal eigenvalue is the smallest eigenvalue and
//! owns the only positive eigenvector. It is bracketed with Sturm counts, then
//! refined by shifted inverse iteration from a shift certified to lie below
//! it, so `(A - σI)` is a nonsingular M-matrix and every iterate stays positive.

use log::debug;
use serde::Serialize;

use crate::banded::Tridiagonal;
use crate::dense::{self, Dense, Eigenvalue};
use crate::error::{Error, Result};
use crate::operator::{InterfaceOperator, ScalarOperator};

pub const TOL_EIG: f64 = 1e-10;
pub const MAX_ITER: usize = 10_000;
pub const DENSE_LIMIT: usize = 400;
/// Components below `-POSITIVITY_TOL` void the positivity certificate.
pub const POSITIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: TOL_EIG, max_iter: MAX_ITER }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenResult {
    pub value: f64,
    /// Normalized to max-norm 1.
    pub eigenfunction: Vec<f64>,
    /// `‖Aφ - value φ‖∞`.
    pub residual: f64,
    /// `min φ`.
    pub positivity_margin: f64,
    pub iterations: usize,
    /// Symmetrizing weights `d` (`diag(d) A` symmetric); `d ⊙ φ` is the left
    /// eigenvector.
    #[serde(skip)]
    pub weights: Vec<f64>,
}

impl EigenResult {
    /// Derivative of the eigenvalue when `c_j` is perturbed by `t * dc_j`
    /// for `j` in `offset..offset + dc.len()`.
    pub fn potential_derivative(&self, offset: usize, dc: &[f64]) -> f64 {
        let norm: f64 = self.weights.iter().zip(&self.eigenfunction).map(|(w, p)| w * p * p).sum();
        let num: f64 = dc
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let p = self.eigenfunction[offset + j];
                self.weights[offset + j] * p * p * m
            })
            .sum();
        num / norm
    }
}

/// Residual tolerance actually enforced: the requested one, floored at a
/// small multiple of the rounding level of a matrix-vector product.
pub fn effective_tol(matrix: &Tridiagonal, tol: f64) -> f64 {
    tol.max(64.0 * f64::EPSILON * matrix.max_abs_row_sum())
}

pub fn principal_interface(op: &InterfaceOperator) -> Result<EigenResult> {
    principal(&op.matrix, EigenOptions::default())
}

pub fn principal_scalar(op: &ScalarOperator) -> Result<EigenResult> {
    principal(&op.matrix, EigenOptions::default())
}

/// Principal eigenpair of a tridiagonal matrix.
pub fn principal(matrix: &Tridiagonal, opts: EigenOptions) -> Result<EigenResult> {
    let product_ok = matrix.lower.iter().zip(&matrix.upper).all(|(l, u)| l * u >= 0.0);
    if product_ok {
        sturm_inverse_iteration(matrix, opts)
    } else {
        shifted_power(matrix, opts)
    }
}

fn symmetrizing_weights(matrix: &Tridiagonal) -> Vec<f64> {
    // Decoupled blocks (zero products) restart the recursion at 1.
    let n = matrix.dim();
    let mut d = vec![1.0; n];
    for i in 0..n.saturating_sub(1) {
        let (u, l) = (matrix.upper[i], matrix.lower[i]);
        d[i + 1] = if u * l > 0.0 { d[i] * u / l } else { 1.0 };
    }
    let m = d.iter().fold(0.0_f64, |a, &b| a.max(b));
    d.iter_mut().for_each(|v| *v /= m);
    d
}

fn weighted_rayleigh(matrix: &Tridiagonal, w: &[f64], phi: &[f64]) -> (f64, Vec<f64>) {
    let ap = matrix.matvec(phi);
    let num: f64 = w.iter().zip(phi).zip(&ap).map(|((w, p), a)| w * p * a).sum();
    let den: f64 = w.iter().zip(phi).map(|(w, p)| w * p * p).sum();
    (num / den, ap)
}

fn residual_of(ap: &[f64], phi: &[f64], rho: f64) -> f64 {
    ap.iter().zip(phi).map(|(a, p)| (a - rho * p).abs()).fold(0.0, f64::max)
}

fn finish(matrix: &Tridiagonal, value: f64, phi: Vec<f64>, residual: f64, iterations: usize, weights: Vec<f64>) -> Result<EigenResult> {
    let margin = phi.iter().copied().fold(f64::INFINITY, f64::min);
    if !(margin > -POSITIVITY_TOL) {
        return Err(Error::NoPositivityCertificate { min: margin });
    }
    debug!("principal eigenvalue {value:.12e} (dim {}, {iterations} iterations, residual {residual:.2e})", matrix.dim());
    Ok(EigenResult { value, eigenfunction: phi, residual, positivity_margin: margin, iterations, weights })
}

fn sturm_inverse_iteration(matrix: &Tridiagonal, opts: EigenOptions) -> Result<EigenResult> {
    let n = matrix.dim();
    let scale = matrix.max_abs_row_sum().max(f64::MIN_POSITIVE);
    let tol = effective_tol(matrix, opts.tol);
    let weights = symmetrizing_weights(matrix);

    // Gershgorin lower bound and min-diagonal upper bound.
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..n {
        let mut off = 0.0;
        if i > 0 {
            off += matrix.lower[i - 1].abs();
        }
        if i + 1 < n {
            off += matrix.upper[i].abs();
        }
        lo = lo.min(matrix.diag[i] - off);
        hi = hi.min(matrix.diag[i]);
    }
    lo -= 1e-12 * scale + f64::MIN_POSITIVE;
    hi += 1e-12 * scale + f64::MIN_POSITIVE;
    let mut iterations = 0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * scale {
            break;
        }
        iterations += 1;
        if matrix.count_below(mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut sigma = lo - (hi - lo) - 1e-13 * scale;

    let mut phi = vec![1.0; n];
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    for it in 0..opts.max_iter {
        iterations += 1;
        let y = match matrix.solve_shifted(sigma, &phi) {
            Ok(y) if y.iter().all(|v| v.is_finite()) => y,
            _ => {
                sigma -= 1e-8 * scale;
                continue;
            }
        };
        phi = y;
        dense::normalize_max(&mut phi);
        let (rho, ap) = weighted_rayleigh(matrix, &weights, &phi);
        let res = residual_of(&ap, &phi, rho);
        if best.as_ref().is_none_or(|b| res < b.2) {
            best = Some((rho, phi.clone(), res));
        }
        if res <= tol {
            return finish(matrix, rho, phi, res, iterations, weights);
        }
        // stalled well above tolerance: back the shift off and keep going
        if it > 0 && it % 8 == 0 {
            sigma -= (hi - lo).max(1e-10 * scale);
        }
    }
    let (_, _, res) = best.unwrap_or((0.0, phi, f64::INFINITY));
    Err(Error::NoConvergence { iterations, residual: res })
}

/// Inverse iteration with the fixed shift `s = 1 + max_i Σ_j |A_ij|`, used
/// when the matrix is not symmetrizable.
fn shifted_power(matrix: &Tridiagonal, opts: EigenOptions) -> Result<EigenResult> {
    let n = matrix.dim();
    let s = 1.0 + matrix.max_abs_row_sum();
    let tol = effective_tol(matrix, opts.tol);
    let weights = vec![1.0; n];
    let mut phi = vec![1.0; n];
    let mut last = f64::INFINITY;
    for it in 1..=opts.max_iter {
        phi = matrix.solve_shifted(-s, &phi)?;
        dense::normalize_max(&mut phi);
        let (rho, ap) = weighted_rayleigh(matrix, &weights, &phi);
        let res = residual_of(&ap, &phi, rho);
        last = res;
        if res <= tol {
            return finish(matrix, rho, phi, res, it, weights);
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: last })
}

/// Full spectrum of the dense matrix plus its principal (positive) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub eigenvalues: Vec<Eigenvalue>,
    pub principal: f64,
    pub eigenvector: Vec<f64>,
}

/// Brute-force oracle: every eigenvalue by Hessenberg QR, then the real
/// eigenvalues in ascending order are tested for a single-signed eigenvector.
pub fn dense_oracle(matrix: &Tridiagonal) -> Result<OracleResult> {
    let n = matrix.dim();
    if n > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { dim: n, limit: DENSE_LIMIT });
    }
    let a = Dense::from_rows(&matrix.to_dense());
    let eigenvalues = dense::eigenvalues(&a)?;
    let scale = a.norm_inf().max(1.0);
    let mut real: Vec<f64> = eigenvalues.iter().filter(|e| e.im.abs() <= 1e-9 * scale).map(|e| e.re).collect();
    real.sort_by(f64::total_cmp);
    for lambda in real {
        let v = dense::eigenvector(&a, lambda);
        if v.iter().all(|&x| x > -1e-8) {
            return Ok(OracleResult { eigenvalues, principal: lambda, eigenvector: v });
        }
    }
    let min = eigenvalues.iter().map(|e| e.re).fold(f64::INFINITY, f64::min);
    Err(Error::NoPositivityCertificate { min })
}

/// Smallest eigenvalue of the symmetrized matrix `D^{1/2} A D^{-1/2}` by
/// Jacobi rotations, i.e. the minimum of the weighted Rayleigh quotient.
pub fn rayleigh_minimum(matrix: &Tridiagonal) -> Result<f64> {
    let n = matrix.dim();
    if n > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { dim: n, limit: DENSE_LIMIT });
    }
    let d = matrix.symmetrizer().ok_or(Error::InvalidCoupling { gamma1: f64::NAN, gamma2: f64::NAN })?;
    let sq: Vec<f64> = d.iter().map(|v| v.sqrt()).collect();
    let inv: Vec<f64> = sq.iter().map(|v| 1.0 / v).collect();
    let a = Dense::from_rows(&matrix.to_dense()).scaled(&sq, &inv);
    // symmetrize away rounding
    let mut s = a.clone();
    for i in 0..n {
        for j in 0..n {
            s.set(i, j, 0.5 * (a.at(i, j) + a.at(j, i)));
        }
    }
    Ok(dense::symmetric_eigenvalues(&s)[0])
}
