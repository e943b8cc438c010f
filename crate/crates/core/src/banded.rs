//! Tridiagonal matrices.
//!
//! Every operator assembled in this crate couples only neighbouring unknowns,
//! including the interface pair `u1(xs)`, `u2(xs)` which sit next to each
//! other in the global ordering. All of them are Z-matrices (nonpositive
//! off-diagonal) with `lower[i] * upper[i] > 0`, hence diagonally similar to
//! a symmetric matrix.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    /// `lower[i] = A[i + 1][i]`
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    /// `upper[i] = A[i][i + 1]`
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal { lower: vec![0.0; n.saturating_sub(1)], diag: vec![0.0; n], upper: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.upper[i]
        } else if i == j + 1 {
            self.lower[j]
        } else {
            0.0
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// `self + diag(d)`.
    pub fn with_added_diagonal(&self, d: &[f64]) -> Tridiagonal {
        let mut out = self.clone();
        out.diag.iter_mut().zip(d).for_each(|(a, b)| *a += b);
        out
    }

    pub fn shifted(&self, t: f64) -> Tridiagonal {
        let mut out = self.clone();
        out.diag.iter_mut().for_each(|a| *a += t);
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.matvec(&vec![1.0; self.dim()])
    }

    /// `max_i Σ_j |A[i][j]|`.
    pub fn max_abs_row_sum(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.lower[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.upper[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn is_z_matrix(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|&v| v <= 0.0)
    }

    /// Positive weights `d` with `diag(d) * A` symmetric, normalized to
    /// `max d = 1`. `None` when some off-diagonal pair has a nonpositive product.
    pub fn symmetrizer(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        let mut d = vec![1.0; n];
        for i in 0..n.saturating_sub(1) {
            let (u, l) = (self.upper[i], self.lower[i]);
            if !(u * l > 0.0) {
                return None;
            }
            d[i + 1] = d[i] * u / l;
        }
        let m = d.iter().fold(0.0_f64, |a, &b| a.max(b));
        d.iter_mut().for_each(|v| *v /= m);
        Some(d)
    }

    /// Pivots of the elimination of `A - sigma I` without pivoting.
    pub fn pivots(&self, sigma: f64) -> Vec<f64> {
        let n = self.dim();
        let mut p = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] - sigma;
            if i > 0 {
                v -= self.lower[i - 1] * self.upper[i - 1] / p[i - 1];
            }
            if v == 0.0 {
                v = -f64::MIN_POSITIVE;
            }
            p[i] = v;
        }
        p
    }

    /// Number of eigenvalues below `sigma` (Sturm count). Valid when the
    /// matrix is symmetrizable.
    pub fn count_below(&self, sigma: f64) -> usize {
        self.pivots(sigma).iter().filter(|&&p| p < 0.0).count()
    }

    /// Solve `(A - sigma I) x = rhs` by elimination without pivoting, which is
    /// stable for the M-matrices used throughout.
    pub fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let mut piv = self.diag[i] - sigma;
            let mut r = rhs[i];
            if i > 0 {
                piv -= self.lower[i - 1] * c[i - 1];
                r -= self.lower[i - 1] * prev;
            }
            if piv == 0.0 || !piv.is_finite() {
                return Err(Error::Singular { row: i, pivot: piv });
            }
            if i + 1 < n {
                c[i] = self.upper[i] / piv;
            }
            prev = r / piv;
            x[i] = prev;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.solve_shifted(0.0, rhs)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Tridiagonal {
        Tridiagonal { lower: vec![-1.0, -2.0, -0.5], diag: vec![2.0, 3.0, 4.0, 1.0], upper: vec![-3.0, -1.0, -0.25] }
    }

    #[test]
    fn solve_roundtrip() {
        let a = sample();
        let x = vec![1.0, -2.0, 0.5, 3.0];
        let b = a.matvec(&x);
        let y = a.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn symmetrizer_symmetrizes() {
        let a = sample();
        let d = a.symmetrizer().unwrap();
        for i in 0..3 {
            let up = d[i] * a.upper[i];
            let lo = d[i + 1] * a.lower[i];
            assert!((up - lo).abs() < 1e-14);
        }
    }

    #[test]
    fn sturm_count_brackets_eigenvalues() {
        // [[2,-1],[-1,2]] has eigenvalues 1 and 3
        let a = Tridiagonal { lower: vec![-1.0], diag: vec![2.0, 2.0], upper: vec![-1.0] };
        assert_eq!(a.count_below(0.5), 0);
        assert_eq!(a.count_below(1.5), 1);
        assert_eq!(a.count_below(3.5), 2);
    }
}
