//! CSV and text writers. All numbers use Rust's shortest round-trip
//! formatting, so identical inputs give byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kedem_core::Mesh;
use serde::Serialize;

use crate::failure::Failure;

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> Result<OutDir, Failure> {
        fs::create_dir_all(path).map_err(|e| Failure::Output(format!("{}: {e}", path.display())))?;
        Ok(OutDir(path.to_owned()))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    pub fn csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<PathBuf, Failure> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(path)
    }

    /// CSV preceded by `# key = value` comment lines.
    pub fn csv_with_header<T: Serialize>(&self, name: &str, header: &[(String, String)], rows: &[T]) -> Result<PathBuf, Failure> {
        let path = self.path(name);
        let mut file = fs::File::create(&path)?;
        for (k, v) in header {
            writeln!(file, "# {k} = {v}")?;
        }
        let mut w = csv::Writer::from_writer(file);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(path)
    }

    pub fn text(&self, name: &str, body: &str) -> Result<PathBuf, Failure> {
        let path = self.path(name);
        fs::write(&path, body)?;
        Ok(path)
    }
}

#[derive(Serialize)]
pub struct ProfileRow {
    pub x: f64,
    pub subdomain: u8,
    pub u: f64,
}

/// Nodal values in global ordering as `(x, subdomain, u)` rows.
pub fn profile(mesh: &Mesh, u: &[f64]) -> Vec<ProfileRow> {
    let n1 = mesh.nodes1().len();
    mesh.coordinates().iter().zip(u).enumerate().map(|(i, (&x, &u))| ProfileRow { x, subdomain: if i < n1 { 1 } else { 2 }, u }).collect()
}

/// `Some(v)` as its number, `None` as an empty cell.
pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Shortest round-trip text, in exponent form for very small or large values.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}
