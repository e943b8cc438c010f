//! Finite-volume assembly of the coupled interface operator and of the scalar
//! sub-operators on one subdomain (or a sub-interval of it).
//!
//! Rows are first built in flux form `S u = V (-Δu + c u)`, with `V` the
//! dual-cell volume of each node, and then divided by `V`. The interface rows
//! carry the membrane fluxes `|Σ| γ1 (u1 - u2)` and `|Σ| γ2 (u2 - u1)`.

use serde::{Deserialize, Serialize};

use crate::banded::Tridiagonal;
use crate::error::{Error, Result};
use crate::geometry::{Mesh, Segment};

/// Discrete `(-Δ + c1, -Δ + c2)` with membrane coupling at `xs` and Neumann
/// conditions at the axis `x0` and on `Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceOperator {
    pub matrix: Tridiagonal,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Potential at every unknown, global ordering.
    pub potential: Vec<f64>,
    /// Dual-cell volumes, global ordering.
    pub volumes: Vec<f64>,
    pub mesh: Mesh,
}

impl InterfaceOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Same coupling with the potential replaced by `c`.
    pub fn with_potential(&self, c: &[f64]) -> InterfaceOperator {
        let delta: Vec<f64> = c.iter().zip(&self.potential).map(|(a, b)| a - b).collect();
        InterfaceOperator { matrix: self.matrix.with_added_diagonal(&delta), potential: c.to_vec(), ..self.clone() }
    }

    /// Flux-form matrix `V A` (symmetric when `γ1 = γ2`).
    pub fn weighted(&self) -> Vec<Vec<f64>> {
        let mut d = self.matrix.to_dense();
        for (row, v) in d.iter_mut().zip(&self.volumes) {
            row.iter_mut().for_each(|a| *a *= v);
        }
        d
    }

    /// Plain-text dense dump, one row per line.
    pub fn dump(&self) -> String {
        dump_rows(&self.matrix.to_dense())
    }
}

/// Dense rows as text, one row per line.
pub fn dump_rows(rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// `∂ν u + γ u = 0`.
    Robin(f64),
    Neumann,
    Dirichlet,
}

/// A scalar operator `-Δ + c` on one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarOperator {
    pub matrix: Tridiagonal,
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    /// Coordinates of the unknowns (Dirichlet ends removed).
    pub nodes: Vec<f64>,
    pub volumes: Vec<f64>,
}

impl ScalarOperator {
    pub fn dump(&self) -> String {
        dump_rows(&self.matrix.to_dense())
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Flux-form rows of `-(r^k u')'` on a segment with natural (Neumann) ends.
fn stiffness(seg: &Segment) -> Tridiagonal {
    let n = seg.len();
    let mut t = Tridiagonal::zeros(n);
    for i in 0..n - 1 {
        let g = seg.face_conductance(i);
        t.upper[i] = -g;
        t.lower[i] = -g;
        t.diag[i] += g;
        t.diag[i + 1] += g;
    }
    t
}

fn divide_rows(t: &mut Tridiagonal, volumes: &[f64]) {
    let n = t.dim();
    for i in 0..n {
        let v = volumes[i];
        t.diag[i] /= v;
        if i + 1 < n {
            t.upper[i] /= v;
        }
        if i > 0 {
            t.lower[i - 1] /= v;
        }
    }
}

pub fn assemble_interface(mesh: &Mesh, c1: &[f64], c2: &[f64], gamma1: f64, gamma2: f64) -> Result<InterfaceOperator> {
    if !(gamma1 > 0.0 && gamma2 > 0.0) || !gamma1.is_finite() || !gamma2.is_finite() {
        return Err(Error::InvalidCoupling { gamma1, gamma2 });
    }
    let (n1, n2) = (mesh.inner.len(), mesh.outer.len());
    if c1.len() != n1 || c2.len() != n2 {
        return Err(Error::FieldDefinition(format!("potential lengths ({}, {}) do not match the mesh ({n1}, {n2})", c1.len(), c2.len())));
    }
    let s1 = stiffness(&mesh.inner);
    let s2 = stiffness(&mesh.outer);
    let n = n1 + n2;
    let mut t = Tridiagonal::zeros(n);
    t.diag[..n1].copy_from_slice(&s1.diag);
    t.diag[n1..].copy_from_slice(&s2.diag);
    t.upper[..n1 - 1].copy_from_slice(&s1.upper);
    t.lower[..n1 - 1].copy_from_slice(&s1.lower);
    t.upper[n1..].copy_from_slice(&s2.upper);
    t.lower[n1..].copy_from_slice(&s2.lower);

    let sigma = mesh.sigma_measure();
    let (i1, i2) = (mesh.interface_index_1(), mesh.interface_index_2());
    t.diag[i1] += sigma * gamma1;
    t.upper[i1] = -sigma * gamma1;
    t.diag[i2] += sigma * gamma2;
    t.lower[i1] = -sigma * gamma2;

    let volumes = mesh.volumes();
    divide_rows(&mut t, &volumes);
    let potential: Vec<f64> = c1.iter().chain(c2).copied().collect();
    for (d, c) in t.diag.iter_mut().zip(&potential) {
        *d += c;
    }
    Ok(InterfaceOperator { matrix: t, gamma1, gamma2, potential, volumes, mesh: mesh.clone() })
}

/// `-Δ + c` on a segment with the given end conditions. The Robin weight is
/// `r^k` at the end (so the boundary flux is measured like `|Σ|`).
pub fn assemble_scalar(seg: &Segment, c: &[f64], left: BoundaryKind, right: BoundaryKind) -> Result<ScalarOperator> {
    let n = seg.len();
    if c.len() != n {
        return Err(Error::FieldDefinition(format!("potential has {} values, segment has {n} nodes", c.len())));
    }
    let mut t = stiffness(seg);
    if let BoundaryKind::Robin(g) = left {
        t.diag[0] += g * seg.weight_at(seg.a);
    }
    if let BoundaryKind::Robin(g) = right {
        t.diag[n - 1] += g * seg.weight_at(seg.b);
    }
    let mut volumes = seg.volumes.clone();
    divide_rows(&mut t, &volumes);
    for (d, v) in t.diag.iter_mut().zip(c) {
        *d += v;
    }
    let mut nodes = seg.nodes.clone();
    let lo = usize::from(left == BoundaryKind::Dirichlet);
    let hi = n - usize::from(right == BoundaryKind::Dirichlet);
    if hi <= lo {
        return Err(Error::InvalidGeometry("no unknowns left after Dirichlet elimination".into()));
    }
    if lo > 0 || hi < n {
        t = Tridiagonal { lower: t.lower[lo..hi - 1].to_vec(), diag: t.diag[lo..hi].to_vec(), upper: t.upper[lo..hi - 1].to_vec() };
        nodes = nodes[lo..hi].to_vec();
        volumes = volumes[lo..hi].to_vec();
    }
    Ok(ScalarOperator { matrix: t, left, right, nodes, volumes })
}
