//! Run configuration: one TOML file per experiment.
//!
//! ```toml
//! seed = 7
//!
//! [domain]
//! x0 = 0.0
//! xs = 0.5
//! xl = 1.0
//! n1 = 64
//! n2 = 64
//!
//! [interface]
//! gamma1 = 1.0
//! gamma2 = 1.0
//!
//! [weights]
//! m1 = 1.0
//! m2 = "x - 0.8"
//! ```
//!
//! Optional sections `[tolerances]`, `[eigen]`, `[curve]`, `[logistic]`,
//! `[verify]` and `[svg]` tune the individual commands.

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use kedem_core::curve::{TraceOptions, R_CAP, TOL_CURVE};
use kedem_core::eigen::{EigenOptions, MAX_ITER, TOL_EIG};
use kedem_core::fields::FieldDef;
use kedem_core::logistic::IterationMode;
use kedem_core::operator::BoundaryKind;
use kedem_core::spectral::SpectralContext;
use kedem_core::{build_mesh, DomainSpec, Error, Subdomain};
use serde::Deserialize;
use toml::Spanned;

/// A configuration problem, located at a line of the file when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{}: {}", self.path.display(), l, self.message),
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interface {
    pub gamma1: Spanned<f64>,
    pub gamma2: Spanned<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub m1: Spanned<FieldDef>,
    pub m2: Spanned<FieldDef>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub eig: f64,
    pub curve: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eig: TOL_EIG, curve: TOL_CURVE }
    }
}

/// Scalar subproblem on one subdomain instead of the coupled operator.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarSection {
    pub subdomain: u8,
    pub left: BoundaryKind,
    pub right: BoundaryKind,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigenSection {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Extra potentials added to `-λ_i m_i`.
    pub c1: Option<FieldDef>,
    pub c2: Option<FieldDef>,
    /// Number of mesh levels in the refinement table (each doubles n1, n2).
    pub refinements: usize,
    pub scalar: Option<ScalarSection>,
}

impl Default for EigenSection {
    fn default() -> Self {
        EigenSection { lambda1: 0.0, lambda2: 0.0, c1: None, c2: None, refinements: 4, scalar: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveSection {
    pub rays: usize,
    pub r_cap: f64,
    pub arc_fraction: f64,
}

impl Default for CurveSection {
    fn default() -> Self {
        let t = TraceOptions::default();
        CurveSection { rays: t.n_rays, r_cap: R_CAP, arc_fraction: t.arc_fraction }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogisticSection {
    pub p1: f64,
    pub p2: f64,
    pub grid: [usize; 2],
    pub lambda1: Option<[f64; 2]>,
    pub lambda2: Option<[f64; 2]>,
    /// Points whose solution profiles are written out.
    pub profiles: Vec<[f64; 2]>,
    pub mode: IterationMode,
    pub max_iter: usize,
}

impl Default for LogisticSection {
    fn default() -> Self {
        LogisticSection {
            p1: 2.0,
            p2: 2.0,
            grid: [11, 11],
            lambda1: None,
            lambda2: None,
            profiles: Vec::new(),
            mode: IterationMode::NewtonShift,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub draws: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection { draws: 50 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvgSection {
    pub width: u32,
    pub height: u32,
    /// Background sampling grid for the sign of `F`.
    pub grid: [usize; 2],
    pub lambda1: Option<[f64; 2]>,
    pub lambda2: Option<[f64; 2]>,
}

impl Default for SvgSection {
    fn default() -> Self {
        SvgSection { width: 720, height: 540, grid: [72, 54], lambda1: None, lambda2: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    #[serde(default)]
    seed: u64,
    domain: Spanned<DomainSpec>,
    interface: Interface,
    weights: Weights,
    #[serde(default)]
    tolerances: Option<Spanned<Tolerances>>,
    #[serde(default)]
    eigen: EigenSection,
    #[serde(default)]
    curve: CurveSection,
    #[serde(default)]
    logistic: LogisticSection,
    #[serde(default)]
    verify: VerifySection,
    #[serde(default)]
    svg: SvgSection,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub path: PathBuf,
    pub seed: u64,
    pub domain: DomainSpec,
    pub gamma1: f64,
    pub gamma2: f64,
    pub m1: FieldDef,
    pub m2: FieldDef,
    pub tolerances: Tolerances,
    pub eigen: EigenSection,
    pub curve: CurveSection,
    pub logistic: LogisticSection,
    pub verify: VerifySection,
    pub svg: SvgSection,
    source: String,
    spans: Spans,
}

#[derive(Debug, Clone)]
struct Spans {
    domain: Range<usize>,
    gamma1: Range<usize>,
    gamma2: Range<usize>,
    m1: Range<usize>,
    m2: Range<usize>,
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let source = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: path.to_owned(),
            line: None,
            message: format!("cannot read: {e}"),
        })?;
        RunConfig::parse(path, source)
    }

    pub fn parse(path: &Path, source: String) -> Result<RunConfig, ConfigError> {
        let raw: Raw = toml::from_str(&source).map_err(|e| ConfigError {
            path: path.to_owned(),
            line: e.span().map(|s| line_of(&source, s.start)),
            message: e.message().trim().to_string(),
        })?;
        let spans = Spans {
            domain: raw.domain.span(),
            gamma1: raw.interface.gamma1.span(),
            gamma2: raw.interface.gamma2.span(),
            m1: raw.weights.m1.span(),
            m2: raw.weights.m2.span(),
        };
        let tol_span = raw.tolerances.as_ref().map(|t| t.span());
        let cfg = RunConfig {
            path: path.to_owned(),
            seed: raw.seed,
            domain: raw.domain.into_inner(),
            gamma1: *raw.interface.gamma1.get_ref(),
            gamma2: *raw.interface.gamma2.get_ref(),
            m1: raw.weights.m1.into_inner(),
            m2: raw.weights.m2.into_inner(),
            tolerances: raw.tolerances.map(|t| t.into_inner()).unwrap_or_default(),
            eigen: raw.eigen,
            curve: raw.curve,
            logistic: raw.logistic,
            verify: raw.verify,
            svg: raw.svg,
            source,
            spans,
        };
        let t = &cfg.tolerances;
        if !(t.eig > 0.0 && t.curve > 0.0) {
            return Err(
                cfg.error_at(tol_span.map(|s| s.start), format!("tolerances must be positive, got eig = {}, curve = {}", t.eig, t.curve))
            );
        }
        cfg.revalidate()?;
        Ok(cfg)
    }

    /// Checks that do not depend on where a value came from; rerun after
    /// command-line overrides.
    pub fn revalidate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(self.error_at(None, msg));
        let t = &self.tolerances;
        if !(t.eig > 0.0 && t.curve > 0.0) {
            return bad(format!("tolerances must be positive, got eig = {}, curve = {}", t.eig, t.curve));
        }
        if self.curve.rays < kedem_core::curve::MIN_RAYS {
            return bad(format!("curve.rays must be at least {}, got {}", kedem_core::curve::MIN_RAYS, self.curve.rays));
        }
        if !(self.logistic.p1 > 1.0 && self.logistic.p2 > 1.0) {
            return bad(format!("logistic.p1 and logistic.p2 must exceed 1, got {} and {}", self.logistic.p1, self.logistic.p2));
        }
        if self.logistic.grid.iter().chain(&self.svg.grid).any(|&n| n < 2) {
            return bad("grids need at least 2 points per axis".into());
        }
        if self.eigen.refinements == 0 {
            return bad("eigen.refinements must be at least 1".into());
        }
        if let Some(s) = &self.eigen.scalar {
            if s.subdomain != 1 && s.subdomain != 2 {
                return bad(format!("eigen.scalar.subdomain must be 1 or 2, got {}", s.subdomain));
            }
        }
        for r in [self.logistic.lambda1, self.logistic.lambda2, self.svg.lambda1, self.svg.lambda2].into_iter().flatten() {
            if r[0].partial_cmp(&r[1]) != Some(std::cmp::Ordering::Less) {
                return bad(format!("range [{}, {}] is empty", r[0], r[1]));
            }
        }
        // geometry problems surface here rather than inside a command
        build_mesh(self.domain).map_err(|e| self.core_error(e))?;
        Ok(())
    }

    fn error_at(&self, offset: Option<usize>, message: String) -> ConfigError {
        ConfigError { path: self.path.clone(), line: offset.map(|o| line_of(&self.source, o)), message }
    }

    /// Attach a core validation error to the section it came from.
    pub fn core_error(&self, e: Error) -> ConfigError {
        let offset = match &e {
            Error::InvalidGeometry(_) => Some(self.spans.domain.start),
            Error::InvalidCoupling { gamma1, .. } if !(*gamma1 > 0.0 && gamma1.is_finite()) => Some(self.spans.gamma1.start),
            Error::InvalidCoupling { .. } => Some(self.spans.gamma2.start),
            Error::AllZero { subdomain: 1 } => Some(self.spans.m1.start),
            Error::AllZero { .. } => Some(self.spans.m2.start),
            _ => None,
        };
        self.error_at(offset, e.to_string())
    }

    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions { tol: self.tolerances.eig, max_iter: MAX_ITER }
    }

    pub fn trace_options(&self) -> TraceOptions {
        TraceOptions {
            n_rays: self.curve.rays,
            r_cap: self.curve.r_cap,
            tol_curve: self.tolerances.curve,
            arc_fraction: self.curve.arc_fraction,
            ..TraceOptions::default()
        }
    }

    /// Build the spectral context, locating field errors at `m1` / `m2`.
    pub fn context(&self) -> Result<SpectralContext, ConfigError> {
        self.context_for(self.domain)
    }

    pub fn context_for(&self, spec: DomainSpec) -> Result<SpectralContext, ConfigError> {
        let mesh = build_mesh(spec).map_err(|e| self.core_error(e))?;
        let f1 = self.m1.sample(&mesh.inner, Subdomain::Inner).map_err(|e| self.error_at(Some(self.spans.m1.start), e.to_string()))?;
        let f2 = self.m2.sample(&mesh.outer, Subdomain::Outer).map_err(|e| self.error_at(Some(self.spans.m2.start), e.to_string()))?;
        SpectralContext::with_options(mesh, f1, f2, self.gamma1, self.gamma2, self.eigen_options()).map_err(|e| match e {
            Error::FieldDefinition(_) | Error::UnsupportedSign(_) | Error::Expression { .. } => {
                self.error_at(Some(self.spans.m1.start.min(self.spans.m2.start)), e.to_string())
            }
            other => self.core_error(other),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "seed = 3\n[domain]\nx0 = 0.0\nxs = 0.5\nxl = 1.0\nn1 = 16\nn2 = 16\n\n[interface]\ngamma1 = 1.0\ngamma2 = 2.0\n\n[weights]\nm1 = 1.0\nm2 = \"x - 0.8\"\n";

    fn parse(s: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::parse(Path::new("test.toml"), s.to_string())
    }

    #[test]
    fn minimal_config() {
        let c = parse(BASE).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.domain.n1, 16);
        assert_eq!(c.m2, FieldDef::Expression("x - 0.8".into()));
        assert_eq!(c.logistic.grid, [11, 11]);
        c.context().unwrap();
    }

    #[test]
    fn piecewise_and_sections() {
        let s = BASE.replace("m1 = 1.0", "m1 = { breakpoints = [0.25], values = [1.0, 2.0] }")
            + "[eigen]\nrefinements = 2\nscalar = { subdomain = 1, left = \"neumann\", right = { robin = 3.0 } }\n[logistic]\ngrid = [5, 7]\nmode = \"picard\"\n";
        let c = parse(&s).unwrap();
        assert!(matches!(c.m1, FieldDef::Piecewise { .. }));
        assert_eq!(c.eigen.scalar.unwrap().right, BoundaryKind::Robin(3.0));
        assert_eq!(c.logistic.mode, IterationMode::Picard);
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse(&BASE.replace("gamma2 = 2.0", "gamma2 = 2.0\ngamma3 = 1.0")).unwrap_err();
        assert_eq!(e.line, Some(12));
        let e = parse(&BASE.replace("xs = 0.5", "xs = 1.5")).unwrap_err();
        assert_eq!(e.line, Some(2));
        let c = parse(&BASE.replace("gamma1 = 1.0", "gamma1 = -1.0")).unwrap();
        let e = c.context().unwrap_err();
        assert_eq!(e.line, Some(10));
        let c = parse(&BASE.replace("m2 = \"x - 0.8\"", "m2 = \"x - \"")).unwrap();
        assert_eq!(c.context().unwrap_err().line, Some(15));
        assert!(parse("[domain\n").unwrap_err().line.is_some());
    }
}
