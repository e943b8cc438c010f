//! Weights `m_i` and potentials `c_i` sampled on one subdomain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{Segment, Subdomain};

/// Relative zero threshold: `|value| <= ZERO_REL * max|field|` counts as zero.
pub const ZERO_REL: f64 = 1e-12;

/// How a field is specified before sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldDef {
    Constant(f64),
    Expression(String),
    /// Piecewise constant: `values[j]` on `(breakpoints[j-1], breakpoints[j])`,
    /// so `values.len() == breakpoints.len() + 1`. A node sitting exactly on a
    /// breakpoint receives the mean of the two adjacent values.
    Piecewise {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// Tabulated values, linearly interpolated and held constant outside the table.
    Sampled {
        nodes: Vec<f64>,
        samples: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Constant,
    PiecewiseConstant,
    Sampled,
    Expression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    /// `m >= 0` and `m` not identically zero.
    NonnegNontrivial,
    /// `m <= 0` and `m` not identically zero.
    NonposNontrivial,
    ChangesSign,
    Zero,
}

impl SignClass {
    pub fn negated(self) -> SignClass {
        match self {
            SignClass::NonnegNontrivial => SignClass::NonposNontrivial,
            SignClass::NonposNontrivial => SignClass::NonnegNontrivial,
            other => other,
        }
    }
}

/// A field sampled at the nodes of one subdomain.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    pub subdomain: Subdomain,
    pub kind: FieldKind,
    pub values: Vec<f64>,
    segment: Segment,
    pieces: Option<Vec<(f64, f64, f64)>>,
}

/// A closed interval `[lo, hi]` where the field is (numerically) nonpositive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroInterval {
    pub lo: f64,
    pub hi: f64,
    /// The interval stays a positive distance away from both subdomain ends.
    pub interior: bool,
}

impl ZeroInterval {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ZeroSet {
    pub intervals: Vec<ZeroInterval>,
}

impl ZeroSet {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn largest(&self) -> Option<ZeroInterval> {
        self.intervals.iter().copied().max_by(|a, b| a.length().total_cmp(&b.length()))
    }

    /// Every interval avoids the subdomain ends.
    pub fn all_interior(&self) -> bool {
        self.intervals.iter().all(|iv| iv.interior)
    }
}

impl FieldDef {
    pub fn kind(&self) -> FieldKind {
        match self {
            FieldDef::Constant(_) => FieldKind::Constant,
            FieldDef::Expression(_) => FieldKind::Expression,
            FieldDef::Piecewise { .. } => FieldKind::PiecewiseConstant,
            FieldDef::Sampled { .. } => FieldKind::Sampled,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            FieldDef::Constant(v) if !v.is_finite() => Err(Error::FieldDefinition(format!("non-finite constant {v}"))),
            FieldDef::Piecewise { breakpoints, values } => {
                if values.len() != breakpoints.len() + 1 {
                    return Err(Error::FieldDefinition(format!(
                        "piecewise table needs one more value than breakpoints ({} breakpoints, {} values)",
                        breakpoints.len(),
                        values.len()
                    )));
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::FieldDefinition("breakpoints must be strictly increasing".into()));
                }
                Ok(())
            }
            FieldDef::Sampled { nodes, samples } => {
                if nodes.is_empty() || nodes.len() != samples.len() {
                    return Err(Error::FieldDefinition(format!(
                        "sampled table needs matching nonempty nodes/samples ({} vs {})",
                        nodes.len(),
                        samples.len()
                    )));
                }
                if nodes.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::FieldDefinition("sample nodes must be strictly increasing".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Sample the definition on a segment.
    pub fn sample(&self, segment: &Segment, subdomain: Subdomain) -> Result<CoefficientField> {
        self.validate()?;
        let values: Vec<f64> = match self {
            FieldDef::Constant(v) => vec![*v; segment.len()],
            FieldDef::Expression(src) => {
                let e = Expr::parse(src)?;
                segment.nodes.iter().map(|&x| e.eval(x)).collect()
            }
            FieldDef::Piecewise { breakpoints, values } => {
                let tol = 1e-12 * (segment.b - segment.a);
                segment.nodes.iter().map(|&x| piecewise_at(breakpoints, values, x, tol)).collect()
            }
            FieldDef::Sampled { nodes, samples } => segment.nodes.iter().map(|&x| interpolate(nodes, samples, x)).collect(),
        };
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::FieldDefinition(format!("field evaluates to {bad} on the mesh")));
        }
        let pieces = match self {
            FieldDef::Piecewise { breakpoints, values } => {
                let mut out = Vec::with_capacity(values.len());
                for (j, &v) in values.iter().enumerate() {
                    let lo = if j == 0 { f64::NEG_INFINITY } else { breakpoints[j - 1] };
                    let hi = breakpoints.get(j).copied().unwrap_or(f64::INFINITY);
                    out.push((lo.max(segment.a), hi.min(segment.b), v));
                }
                Some(out.into_iter().filter(|(lo, hi, _)| hi > lo).collect())
            }
            _ => None,
        };
        Ok(CoefficientField { subdomain, kind: self.kind(), values, segment: segment.clone(), pieces })
    }
}

fn piecewise_at(breakpoints: &[f64], values: &[f64], x: f64, tol: f64) -> f64 {
    for (j, &b) in breakpoints.iter().enumerate() {
        if (x - b).abs() <= tol {
            return 0.5 * (values[j] + values[j + 1]);
        }
        if x < b {
            return values[j];
        }
    }
    values[values.len() - 1]
}

fn interpolate(nodes: &[f64], samples: &[f64], x: f64) -> f64 {
    if x <= nodes[0] {
        return samples[0];
    }
    if x >= nodes[nodes.len() - 1] {
        return samples[samples.len() - 1];
    }
    let j = nodes.partition_point(|&t| t <= x) - 1;
    let t = (x - nodes[j]) / (nodes[j + 1] - nodes[j]);
    samples[j] + t * (samples[j + 1] - samples[j])
}

/// Sign class of a sample vector; `|v| <= tau` counts as zero.
pub fn classify_values(values: &[f64], tau: f64) -> SignClass {
    let pos = values.iter().any(|&v| v > tau);
    let neg = values.iter().any(|&v| v < -tau);
    match (pos, neg) {
        (true, true) => SignClass::ChangesSign,
        (true, false) => SignClass::NonnegNontrivial,
        (false, true) => SignClass::NonposNontrivial,
        (false, false) => SignClass::Zero,
    }
}

impl CoefficientField {
    /// Wrap nodal values directly (kind `Sampled`).
    pub fn from_values(segment: &Segment, subdomain: Subdomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != segment.len() {
            return Err(Error::FieldDefinition(format!("expected {} nodal values, got {}", segment.len(), values.len())));
        }
        Ok(CoefficientField { subdomain, kind: FieldKind::Sampled, values, segment: segment.clone(), pieces: None })
    }

    pub fn segment(&self) -> &Segment {
        &self.segment
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Default zero threshold `ZERO_REL * max|m|`.
    pub fn tau_zero(&self) -> f64 {
        ZERO_REL * self.max_abs()
    }

    pub fn sign_class(&self) -> SignClass {
        classify_values(&self.values, self.tau_zero())
    }

    /// Sign class, rejecting the identically zero field.
    pub fn classify_sign(&self) -> Result<SignClass> {
        match self.sign_class() {
            SignClass::Zero => Err(Error::AllZero { subdomain: self.subdomain.index() }),
            s => Ok(s),
        }
    }

    /// `∫ m r^k dr` with the dual-cell weights of the mesh (the composite
    /// trapezoid rule in flat geometry).
    pub fn integrate(&self) -> f64 {
        self.values.iter().zip(&self.segment.volumes).map(|(v, w)| v * w).sum()
    }

    pub fn scaled(&self, a: f64) -> CoefficientField {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= a);
        if let Some(p) = out.pieces.as_mut() {
            p.iter_mut().for_each(|piece| piece.2 *= a);
        }
        out
    }

    /// Nodal combination `a * self + b * other` (the piece table is dropped).
    pub fn combine(&self, a: f64, other: &CoefficientField, b: f64) -> CoefficientField {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        CoefficientField { subdomain: self.subdomain, kind: FieldKind::Sampled, values, segment: self.segment.clone(), pieces: None }
    }

    /// Maximal closed intervals where the field is `<= tau`. Runs of a single
    /// node (isolated zeros) are not reported.
    pub fn zero_set(&self, tau: f64) -> ZeroSet {
        let (a, b) = (self.segment.a, self.segment.b);
        let margin = 1e-12 * (b - a);
        let mut raw: Vec<(f64, f64)> = Vec::new();
        if let Some(pieces) = &self.pieces {
            for &(lo, hi, v) in pieces {
                if v <= tau {
                    match raw.last_mut() {
                        Some(last) if (last.1 - lo).abs() <= margin => last.1 = hi,
                        _ => raw.push((lo, hi)),
                    }
                }
            }
        } else {
            let nodes = &self.segment.nodes;
            let mut start: Option<usize> = None;
            for i in 0..=self.values.len() {
                let zero = i < self.values.len() && self.values[i] <= tau;
                match (zero, start) {
                    (true, None) => start = Some(i),
                    (false, Some(s)) => {
                        if i - 1 > s {
                            raw.push((nodes[s], nodes[i - 1]));
                        }
                        start = None;
                    }
                    _ => {}
                }
            }
        }
        let intervals = raw
            .into_iter()
            .filter(|(lo, hi)| hi - lo > margin)
            .map(|(lo, hi)| ZeroInterval { lo, hi, interior: lo - a > margin && b - hi > margin })
            .collect();
        ZeroSet { intervals }
    }
}
