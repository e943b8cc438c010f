//! One-dimensional root finding and maximization helpers.

use crate::error::{Error, Result};

/// Stopping rule: `|f| <= ftol` or bracket width `<= xtol * (1 + |x|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootTol {
    pub xtol: f64,
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for RootTol {
    fn default() -> Self {
        RootTol { xtol: 1e-10, ftol: 1e-12, max_iter: 200 }
    }
}

/// Root of `f` in a sign-change bracket `[a, b]`, where `f` also returns
/// its derivative. Newton steps are accepted while they stay inside the
/// bracket and shrink it fast enough; bisection otherwise.
pub fn newton_bracketed<F>(mut f: F, a: f64, b: f64, tol: RootTol) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (fa, _) = f(a)?;
    let (fb, _) = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoConvergence { iterations: 0, residual: fa.abs().min(fb.abs()) });
    }
    // orient so that f(lo) < 0 < f(hi)
    let (mut lo, mut hi) = if fa < 0.0 { (a, b) } else { (b, a) };
    let mut x = 0.5 * (a + b);
    let mut dx_old = (b - a).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x)?;
    for _ in 0..tol.max_iter {
        if fx.abs() <= tol.ftol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton_ok = dfx != 0.0 && {
            let t = x - fx / dfx;
            (t - lo) * (t - hi) < 0.0 && (2.0 * fx).abs() <= (dx_old * dfx).abs()
        };
        dx_old = dx;
        if newton_ok {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        if (hi - lo).abs() <= tol.xtol * (1.0 + x.abs()) {
            return Ok(x);
        }
        let r = f(x)?;
        fx = r.0;
        dfx = r.1;
    }
    if (hi - lo).abs() <= 1e3 * tol.xtol * (1.0 + x.abs()) {
        return Ok(x);
    }
    Err(Error::NoConvergence { iterations: tol.max_iter, residual: fx.abs() })
}

/// Plain bisection on a sign-change bracket.
pub fn bisect<F>(mut f: F, a: f64, b: f64, tol: RootTol) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    newton_bracketed(|x| Ok((f(x)?, 0.0)), a, b, tol)
}

/// Walk from `start` in steps `step, 2 step, 4 step, ...` until `pred`
/// holds or `limit` is passed. Returns the first point satisfying `pred` and
/// the previous point.
pub fn expand<F>(mut pred: F, start: f64, step: f64, limit: f64) -> Result<Option<(f64, f64)>>
where
    F: FnMut(f64) -> Result<bool>,
{
    let mut prev = start;
    let mut s = step;
    loop {
        let x = start + s;
        let beyond = if step > 0.0 { x > limit } else { x < limit };
        if beyond {
            let x = limit;
            return Ok(if pred(x)? { Some((x, prev)) } else { None });
        }
        if pred(x)? {
            return Ok(Some((x, prev)));
        }
        prev = x;
        s *= 2.0;
    }
}

/// Maximizer of a unimodal function on `[a, b]` by golden-section search.
pub fn golden_max<F>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..300 {
        if (b - a).abs() <= xtol * (1.0 + c.abs().max(d.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_finds_sqrt2() {
        let r = newton_bracketed(|x| Ok((x * x - 2.0, 2.0 * x)), 0.0, 3.0, RootTol::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bisect_decreasing() {
        let r = bisect(|x| Ok(1.0 - x.powi(3)), -1.0, 4.0, RootTol::default()).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn expansion_and_golden() {
        let (x, prev) = expand(|x| Ok(x > 37.0), 0.0, 1.0, 1e6).unwrap().unwrap();
        assert_eq!((x, prev), (64.0, 32.0));
        assert!(expand(|x| Ok(x > 37.0), 0.0, 1.0, 20.0).unwrap().is_none());
        let (m, v) = golden_max(|x| Ok(-(x - 0.3) * (x - 0.3) + 2.0), -5.0, 5.0, 1e-10).unwrap();
        assert!((m - 0.3).abs() < 1e-7 && (v - 2.0).abs() < 1e-12);
    }
}
