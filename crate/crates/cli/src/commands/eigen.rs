//! Principal eigenvalue at one parameter point, with a refinement table.

use kedem_core::eigen::{self, EigenResult};
use kedem_core::fields::FieldDef;
use kedem_core::operator::{assemble_interface, assemble_scalar};
use kedem_core::{build_mesh, DomainSpec, Mesh, Subdomain};
use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::{self, opt, OutDir};

#[derive(Debug, Serialize)]
struct Row {
    n1: usize,
    n2: usize,
    value: f64,
    residual: f64,
    positivity_margin: f64,
    iterations: usize,
    order: String,
    extrapolated: String,
}

struct Level {
    mesh: Mesh,
    result: EigenResult,
    dump: String,
    coords: Vec<f64>,
}

fn potential(cfg: &RunConfig, mesh: &Mesh, sub: Subdomain) -> Result<Vec<f64>, Failure> {
    let (m, c, lam) = match sub {
        Subdomain::Inner => (&cfg.m1, &cfg.eigen.c1, cfg.eigen.lambda1),
        Subdomain::Outer => (&cfg.m2, &cfg.eigen.c2, cfg.eigen.lambda2),
    };
    let seg = mesh.segment(sub);
    let m = m.sample(seg, sub)?.values;
    let c = c.as_ref().unwrap_or(&FieldDef::Constant(0.0)).sample(seg, sub)?.values;
    Ok(m.iter().zip(&c).map(|(m, c)| c - lam * m).collect())
}

fn level(cfg: &RunConfig, spec: DomainSpec) -> Result<Level, Failure> {
    let mesh = build_mesh(spec).map_err(|e| cfg.core_error(e))?;
    let c1 = potential(cfg, &mesh, Subdomain::Inner)?;
    let c2 = potential(cfg, &mesh, Subdomain::Outer)?;
    let opts = cfg.eigen_options();
    let (result, dump, coords) = match &cfg.eigen.scalar {
        Some(s) => {
            let (sub, c) = if s.subdomain == 1 { (Subdomain::Inner, c1) } else { (Subdomain::Outer, c2) };
            let op = assemble_scalar(mesh.segment(sub), &c, s.left, s.right)?;
            (eigen::principal(&op.matrix, opts)?, op.dump(), op.nodes.clone())
        }
        None => {
            let op = assemble_interface(&mesh, &c1, &c2, cfg.gamma1, cfg.gamma2).map_err(|e| cfg.core_error(e))?;
            (eigen::principal(&op.matrix, opts)?, op.dump(), mesh.coordinates())
        }
    };
    Ok(Level { mesh, result, dump, coords })
}

/// Observed order from three successive values on meshes refined by 2.
pub fn observed_order(v: &[f64]) -> Option<f64> {
    let (a, b, c) = (v[v.len() - 3], v[v.len() - 2], v[v.len() - 1]);
    let (d1, d2) = (b - a, c - b);
    let floor = 1e-12 * (1.0 + c.abs());
    if d1.abs() <= floor || d2.abs() <= floor || d1.signum() != d2.signum() {
        return None;
    }
    Some((d1 / d2).log2())
}

pub fn run(cfg: &RunConfig, out: &OutDir, dump_matrix: bool) -> Result<bool, Failure> {
    let mut levels = Vec::new();
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for j in 0..cfg.eigen.refinements {
        let l = level(cfg, cfg.domain.refined(1 << j))?;
        values.push(l.result.value);
        let order = if values.len() >= 3 { observed_order(&values) } else { None };
        let extrap = if values.len() >= 2 {
            let p = order.unwrap_or(2.0);
            let (a, b) = (values[values.len() - 2], values[values.len() - 1]);
            Some(b + (b - a) / (2f64.powf(p) - 1.0))
        } else {
            None
        };
        rows.push(Row {
            n1: l.mesh.spec.n1,
            n2: l.mesh.spec.n2,
            value: l.result.value,
            residual: l.result.residual,
            positivity_margin: l.result.positivity_margin,
            iterations: l.result.iterations,
            order: opt(order),
            extrapolated: opt(extrap),
        });
        levels.push(l);
    }
    let what = match &cfg.eigen.scalar {
        Some(s) => format!("sigma1 on subdomain {} ({:?}, {:?})", s.subdomain, s.left, s.right),
        None => "Lambda1 of the coupled operator".to_string(),
    };
    println!("{what} at (lambda1, lambda2) = ({}, {})", cfg.eigen.lambda1, cfg.eigen.lambda2);
    println!(
        "{:>6} {:>6} {:>22} {:>10} {:>10} {:>6} {:>8} {:>22}",
        "n1", "n2", "value", "residual", "min phi", "iter", "order", "extrapolated"
    );
    for r in &rows {
        println!(
            "{:>6} {:>6} {:>22.15e} {:>10.2e} {:>10.3e} {:>6} {:>8} {:>22}",
            r.n1,
            r.n2,
            r.value,
            r.residual,
            r.positivity_margin,
            r.iterations,
            if r.order.is_empty() { "-".into() } else { format!("{:.3}", r.order.parse::<f64>().unwrap()) },
            r.extrapolated
        );
    }
    out.csv("eigen.csv", &rows)?;
    let first = &levels[0];
    let phi: Vec<output::ProfileRow> = match &cfg.eigen.scalar {
        Some(s) => first
            .coords
            .iter()
            .zip(&first.result.eigenfunction)
            .map(|(&x, &u)| output::ProfileRow { x, subdomain: s.subdomain, u })
            .collect(),
        None => output::profile(&first.mesh, &first.result.eigenfunction),
    };
    out.csv("eigenfunction.csv", &phi)?;
    if dump_matrix {
        let p = out.text("matrix.txt", &first.dump)?;
        println!("matrix written to {}", p.display());
    }
    Ok(true)
}
