//! One-dimensional and radially symmetric realizations of the two-subdomain
//! layout: `Ω1 = (x0, xs)`, interface `Σ = {xs}`, `Ω2 = (xs, xL)`, outer
//! boundary `Γ = {xL}`.
//!
//! With `radial_power = k` every measure carries the weight `r^k`, so `k = N - 1`
//! reduces a radially symmetric ball/annulus configuration in `R^N` to the
//! interval. The left end `x0` is a symmetry axis with a homogeneous Neumann
//! condition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of cells per subdomain.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub x0: f64,
    pub xs: f64,
    #[serde(rename = "xl")]
    pub x_l: f64,
    #[serde(default)]
    pub radial_power: u32,
    pub n1: usize,
    pub n2: usize,
}

impl DomainSpec {
    pub fn flat(x0: f64, xs: f64, x_l: f64, n1: usize, n2: usize) -> Self {
        DomainSpec { x0, xs, x_l, radial_power: 0, n1, n2 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.x0.is_finite() && self.xs.is_finite() && self.x_l.is_finite();
        if !finite || !(self.x0 < self.xs && self.xs < self.x_l) {
            return Err(Error::InvalidGeometry(format!("need x0 < xs < xL, got x0 = {}, xs = {}, xL = {}", self.x0, self.xs, self.x_l)));
        }
        if self.n1 < MIN_CELLS || self.n2 < MIN_CELLS {
            return Err(Error::InvalidGeometry(format!("need n1, n2 >= {MIN_CELLS}, got n1 = {}, n2 = {}", self.n1, self.n2)));
        }
        if self.radial_power >= 1 && self.x0 < 0.0 {
            return Err(Error::InvalidGeometry(format!("radial reduction needs x0 >= 0, got {}", self.x0)));
        }
        Ok(())
    }

    /// Same layout with cell counts multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        DomainSpec { n1: self.n1 * factor, n2: self.n2 * factor, ..*self }
    }
}

/// A uniform grid on `[a, b]` with `cells` cells and `cells + 1` nodes.
///
/// `volumes[i]` is the weighted measure `∫ r^k dr` of the dual cell around
/// node `i` (half cells at both ends), so the volumes sum to the weighted
/// length of the segment exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub radial_power: u32,
    pub nodes: Vec<f64>,
    pub volumes: Vec<f64>,
}

impl Segment {
    pub fn new(a: f64, b: f64, cells: usize, radial_power: u32) -> Self {
        assert!(cells >= 1 && a < b, "degenerate segment [{a}, {b}] with {cells} cells");
        let h = (b - a) / cells as f64;
        let nodes: Vec<f64> = (0..=cells).map(|i| if i == cells { b } else { a + i as f64 * h }).collect();
        let volumes = (0..=cells)
            .map(|i| {
                let lo = if i == 0 { a } else { 0.5 * (nodes[i - 1] + nodes[i]) };
                let hi = if i == cells { b } else { 0.5 * (nodes[i] + nodes[i + 1]) };
                weighted_length(lo, hi, radial_power)
            })
            .collect();
        Segment { a, b, h, radial_power, nodes, volumes }
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Radial weight `r^k` at a point.
    pub fn weight_at(&self, x: f64) -> f64 {
        radial_weight(x, self.radial_power)
    }

    /// Flux coefficient `r^k(x_{i+1/2}) / h` of the face between nodes `i` and `i + 1`.
    pub fn face_conductance(&self, i: usize) -> f64 {
        let mid = 0.5 * (self.nodes[i] + self.nodes[i + 1]);
        radial_weight(mid, self.radial_power) / self.h
    }

    /// Weighted length `∫_a^b r^k dr`.
    pub fn measure(&self) -> f64 {
        weighted_length(self.a, self.b, self.radial_power)
    }
}

pub(crate) fn radial_weight(x: f64, k: u32) -> f64 {
    if k == 0 {
        1.0
    } else {
        x.powi(k as i32)
    }
}

fn weighted_length(lo: f64, hi: f64, k: u32) -> f64 {
    if k == 0 {
        hi - lo
    } else {
        let p = k as i32 + 1;
        (hi.powi(p) - lo.powi(p)) / p as f64
    }
}

/// Which side of the interface a quantity lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subdomain {
    Inner,
    Outer,
}

impl Subdomain {
    pub fn index(self) -> u8 {
        match self {
            Subdomain::Inner => 1,
            Subdomain::Outer => 2,
        }
    }
}

/// Meshes on both subdomains. The interface coordinate `xs` appears twice:
/// as the last node of `Ω1` and the first node of `Ω2`, carrying the two
/// one-sided traces `u1(xs)` and `u2(xs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub spec: DomainSpec,
    pub inner: Segment,
    pub outer: Segment,
}

impl Mesh {
    pub fn h1(&self) -> f64 {
        self.inner.h
    }

    pub fn h2(&self) -> f64 {
        self.outer.h
    }

    pub fn nodes1(&self) -> &[f64] {
        &self.inner.nodes
    }

    pub fn nodes2(&self) -> &[f64] {
        &self.outer.nodes
    }

    pub fn segment(&self, sub: Subdomain) -> &Segment {
        match sub {
            Subdomain::Inner => &self.inner,
            Subdomain::Outer => &self.outer,
        }
    }

    /// Number of unknowns of the coupled problem, `n1 + n2 + 2`.
    pub fn dim(&self) -> usize {
        self.inner.len() + self.outer.len()
    }

    /// Global index of the `Ω1` copy of the interface node.
    pub fn interface_index_1(&self) -> usize {
        self.inner.len() - 1
    }

    /// Global index of the `Ω2` copy of the interface node.
    pub fn interface_index_2(&self) -> usize {
        self.inner.len()
    }

    /// Global index range of a subdomain's unknowns.
    pub fn range(&self, sub: Subdomain) -> std::ops::Range<usize> {
        match sub {
            Subdomain::Inner => 0..self.inner.len(),
            Subdomain::Outer => self.inner.len()..self.dim(),
        }
    }

    /// `|Ω1|` as the weighted measure.
    pub fn measure1(&self) -> f64 {
        self.inner.measure()
    }

    pub fn measure2(&self) -> f64 {
        self.outer.measure()
    }

    /// `|Σ|`: 1 in flat geometry, `xs^k` in radial mode.
    pub fn sigma_measure(&self) -> f64 {
        radial_weight(self.spec.xs, self.spec.radial_power)
    }

    /// All coordinates in global ordering (interface coordinate repeated).
    pub fn coordinates(&self) -> Vec<f64> {
        self.inner.nodes.iter().chain(self.outer.nodes.iter()).copied().collect()
    }

    /// Dual-cell volumes in global ordering.
    pub fn volumes(&self) -> Vec<f64> {
        self.inner.volumes.iter().chain(self.outer.volumes.iter()).copied().collect()
    }

    /// Evaluate a function of `x` at every unknown.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.coordinates().into_iter().map(f).collect()
    }
}

pub fn build_mesh(spec: DomainSpec) -> Result<Mesh> {
    spec.validate()?;
    let inner = Segment::new(spec.x0, spec.xs, spec.n1, spec.radial_power);
    let outer = Segment::new(spec.xs, spec.x_l, spec.n2, spec.radial_power);
    Ok(Mesh { spec, inner, outer })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * (1.0 + b.abs())
    }

    #[test]
    fn flat_uniform_split() {
        let mesh = build_mesh(DomainSpec::flat(0.0, 0.5, 1.0, 8, 8)).unwrap();
        assert!(close(mesh.h1(), 1.0 / 16.0));
        assert!(close(mesh.h2(), 1.0 / 16.0));
        assert!(close(mesh.measure1(), 0.5));
        assert!(close(mesh.measure2(), 0.5));
        assert_eq!(mesh.sigma_measure(), 1.0);
        assert_eq!(mesh.dim(), 18);
        let vol: f64 = mesh.inner.volumes.iter().sum();
        assert!(close(vol, 0.5));
    }

    #[test]
    fn radial_measures() {
        let spec = DomainSpec { x0: 1.0, xs: 2.0, x_l: 3.0, radial_power: 1, n1: 8, n2: 8 };
        let mesh = build_mesh(spec).unwrap();
        assert!(close(mesh.measure1(), 1.5));
        assert!(close(mesh.sigma_measure(), 2.0));
        let vol: f64 = mesh.inner.volumes.iter().sum();
        assert!(close(vol, 1.5));
        let vol2: f64 = mesh.outer.volumes.iter().sum();
        assert!(close(vol2, 2.5));
    }

    #[test]
    fn ordering_violation() {
        let spec = DomainSpec::flat(0.5, 0.4, 1.0, 8, 8);
        assert!(matches!(build_mesh(spec), Err(Error::InvalidGeometry(_))));
        let spec = DomainSpec::flat(0.0, 0.5, 1.0, 4, 8);
        assert!(matches!(build_mesh(spec), Err(Error::InvalidGeometry(_))));
        let spec = DomainSpec { x0: -1.0, xs: 0.5, x_l: 1.0, radial_power: 2, n1: 8, n2: 8 };
        assert!(matches!(build_mesh(spec), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn interface_node_duplicated() {
        let mesh = build_mesh(DomainSpec::flat(0.0, 0.3, 1.0, 9, 13)).unwrap();
        let u = mesh.sample(|x| (3.0 * x).sin());
        assert_eq!(u[mesh.interface_index_1()], u[mesh.interface_index_2()]);
        assert_eq!(*mesh.nodes1().last().unwrap(), 0.3);
        assert_eq!(mesh.nodes2()[0], 0.3);
    }

    #[test]
    fn refinement_halves_spacing() {
        let spec = DomainSpec { x0: 0.0, xs: 0.5, x_l: 1.25, radial_power: 2, n1: 10, n2: 12 };
        let coarse = build_mesh(spec).unwrap();
        let fine = build_mesh(spec.refined(2)).unwrap();
        assert!(close(fine.h1(), coarse.h1() / 2.0));
        assert!(close(fine.h2(), coarse.h2() / 2.0));
        assert!(close(fine.measure2(), coarse.measure2()));
        let v: f64 = fine.volumes().iter().sum();
        assert!(close(v, coarse.measure1() + coarse.measure2()));
    }
}
