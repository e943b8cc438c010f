use std::f64::consts::PI;

use kedem_core::eigen::{principal_interface, principal_scalar};
use kedem_core::geometry::Segment;
use kedem_core::operator::{assemble_interface, assemble_scalar, BoundaryKind};
use kedem_core::{build_mesh, DomainSpec};

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `(y, y')` at `x` for `y'' = -q y`, `y(0) = 1`, `y'(0) = 0`.
fn even_solution(q: f64, x: f64) -> (f64, f64) {
    if q > 0.0 {
        let k = q.sqrt();
        ((k * x).cos(), -k * (k * x).sin())
    } else {
        let k = (-q).sqrt();
        ((k * x).cosh(), k * (k * x).sinh())
    }
}

/// Principal eigenvalue of the coupled problem on `(0, xs) ∪ (xs, 1)` with
/// piecewise constant potentials, as the first zero of the 2x2 interface
/// determinant above `min c`.
fn coupled_oracle(xs: f64, c1: f64, c2: f64, g1: f64, g2: f64) -> f64 {
    let det = |s: f64| {
        let (u, du) = even_solution(s - c1, xs);
        let (w, dw_rev) = even_solution(s - c2, 1.0 - xs);
        let dw = -dw_rev;
        (du + g1 * u) * (dw - g2 * w) + g1 * g2 * u * w
    };
    let mut a = c1.min(c2) - 1e-9;
    let step = 1e-3;
    while det(a).signum() == det(a + step).signum() {
        a += step;
    }
    bisect(det, a, a + step)
}

#[test]
fn coupled_problem_converges_to_transcendental_root() {
    let (xs, c1, c2, g1, g2) = (0.4, 0.0, 5.0, 0.7, 2.0);
    let exact = coupled_oracle(xs, c1, c2, g1, g2);
    let mut errs = Vec::new();
    for n in [40, 80, 160, 320] {
        let mesh = build_mesh(DomainSpec::flat(0.0, xs, 1.0, (n as f64 * xs) as usize, (n as f64 * (1.0 - xs)) as usize)).unwrap();
        let op = assemble_interface(&mesh, &vec![c1; mesh.nodes1().len()], &vec![c2; mesh.nodes2().len()], g1, g2).unwrap();
        errs.push((principal_interface(&op).unwrap().value - exact).abs());
    }
    for w in errs.windows(2) {
        let p = (w[0] / w[1]).log2();
        assert!((p - 2.0).abs() < 0.25, "order {p}, errors {errs:?}");
    }
    assert!(errs[3] < 1e-4);
}

#[test]
fn discrete_dirichlet_spectrum_is_exact() {
    for n in [8, 33, 100] {
        let seg = Segment::new(0.0, 1.0, n, 0);
        let op = assemble_scalar(&seg, &vec![0.0; n + 1], BoundaryKind::Dirichlet, BoundaryKind::Dirichlet).unwrap();
        let h = 1.0 / n as f64;
        let exact = 4.0 / (h * h) * (PI * h / 2.0).sin().powi(2);
        let v = principal_scalar(&op).unwrap().value;
        assert!((v - exact).abs() < 1e-10 * exact, "n = {n}: {v} vs {exact}");
    }
}

#[test]
fn radial_ball_dirichlet() {
    // u = sin(πr)/r on the unit ball in R^3
    let seg = Segment::new(0.0, 1.0, 400, 2);
    let op = assemble_scalar(&seg, &vec![0.0; 401], BoundaryKind::Neumann, BoundaryKind::Dirichlet).unwrap();
    let v = principal_scalar(&op).unwrap().value;
    assert!((v - PI * PI).abs() < 1e-3, "{v}");
}

#[test]
fn radial_robin_disk() {
    // k = 1: u = J0(κr), κ J0'(κ) + γ J0(κ) = 0. With γ small, σ ≈ 2γ.
    let g = 1e-3;
    let seg = Segment::new(0.0, 1.0, 200, 1);
    let op = assemble_scalar(&seg, &vec![0.0; 201], BoundaryKind::Neumann, BoundaryKind::Robin(g)).unwrap();
    let v = principal_scalar(&op).unwrap().value;
    assert!((v - 2.0 * g).abs() < 1e-6, "{v}");
}
