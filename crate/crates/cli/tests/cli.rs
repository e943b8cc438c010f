use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn kedem(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kedem")).arg("--config").arg(config).arg("--out").arg(out).args(args).output().expect("spawn kedem")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "status {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p
}

// data rows of a csv file, skipping `#` header comments and the column line
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

const FLAT: &str = r#"
seed = 3

[domain]
x0 = 0.0
xs = 0.5
xl = 1.0
n1 = 16
n2 = 16

[interface]
gamma1 = 1.0
gamma2 = 2.0

[weights]
m1 = 1.0
m2 = "x - 0.75"
"#;

#[test]
fn zero_potential_gives_zero_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{FLAT}\n[eigen]\nrefinements = 2\n"));
    let out = kedem(&["eigen"], &cfg, &dir.path().join("out"));
    ok(&out);
    for row in rows(&dir.path().join("out/eigen.csv")) {
        let v: f64 = row[2].parse().unwrap();
        assert!(v.abs() < 1e-10, "{v}");
    }
}

#[test]
fn coupled_refinement_is_second_order() {
    let dir = tempfile::tempdir().unwrap();
    ok(&kedem(&["eigen"], &configs().join("coupled_constant.toml"), dir.path()));
    let table = rows(&dir.path().join("eigen.csv"));
    let order: f64 = table.last().unwrap()[6].parse().unwrap();
    assert!((order - 2.0).abs() < 0.2, "{order}");
}

#[test]
fn robin_neumann_matches_transcendental_root() {
    // cos(kx) on (0, 1/2) with u' + 3u = 0 at the right end: k tan(k/2) = 3
    let g = |k: f64| k * (k / 2.0).tan() - 3.0;
    let (mut lo, mut hi) = (1e-6, std::f64::consts::PI - 1e-6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    let exact = 2.0 + k * k;

    let dir = tempfile::tempdir().unwrap();
    ok(&kedem(&["eigen"], &configs().join("robin_neumann.toml"), dir.path()));
    let table = rows(&dir.path().join("eigen.csv"));
    let last = table.last().unwrap();
    let finest: f64 = last[2].parse().unwrap();
    let extrapolated: f64 = last[7].parse().unwrap();
    assert!((finest - exact).abs() < 1e-5, "{finest} vs {exact}");
    assert!((extrapolated - exact).abs() < 1e-8, "{extrapolated} vs {exact}");
}

#[test]
fn curve_writes_trace_landmarks_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    ok(&kedem(&["curve", "--rays", "96"], &configs().join("both_sign.toml"), dir.path()));
    let trace = rows(&dir.path().join("trace.csv"));
    assert!(trace.len() > 40);
    let landmarks = std::fs::read_to_string(dir.path().join("landmarks.toml")).unwrap();
    let table: toml::Table = landmarks.parse().unwrap();
    assert!(table.contains_key("mu_star"), "{landmarks}");
    let svg = std::fs::read_to_string(dir.path().join("curve.svg")).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(!svg.contains("href"), "svg must not reference external resources");
    assert_eq!(svg.matches("<svg").count(), 1);
}

#[test]
fn runs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = configs().join("m2_sign_pos.toml");
    for d in [&a, &b] {
        ok(&kedem(&["curve", "--rays", "64"], &cfg, d.path()));
        ok(&kedem(&["logistic", "--grid", "5x5"], &cfg, d.path()));
    }
    for f in ["trace.csv", "landmarks.toml", "curve.svg", "existence.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn classify_agrees_with_trace() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["both_nonneg", "m2_sign_neg", "m2_sign_zero", "both_sign"] {
        let out = kedem(&["classify"], &configs().join(format!("{name}.toml")), dir.path());
        ok(&out);
    }
    assert!(dir.path().join("classify.csv").exists());
}

#[test]
fn verify_passes_with_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = kedem(&["verify", "--coarse"], &configs().join("both_sign.toml"), dir.path());
    ok(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(!stdout.contains("FAIL"), "{stdout}");
    assert!(dir.path().join("verify.csv").exists());
}

#[test]
fn bad_config_exits_with_two_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let body = FLAT.replace("gamma2 = 2.0", "gamma2 = 0.0");
    let cfg = write_config(dir.path(), &body);
    let out = kedem(&["curve"], &cfg, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    let line = body.lines().position(|l| l.starts_with("gamma2")).unwrap() + 1;
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains(&format!("run.toml:{line}:")), "{stderr}");

    let cfg = write_config(dir.path(), "seed = 1\n[domain]\nxs = 0.5\n");
    let out = kedem(&["eigen"], &cfg, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn logistic_existence_map() {
    let dir = tempfile::tempdir().unwrap();
    ok(&kedem(&["logistic", "--grid", "7x7"], &configs().join("both_nonneg.toml"), dir.path()));
    let table = rows(&dir.path().join("existence.csv"));
    assert_eq!(table.len(), 49);
    let mut yes = 0;
    for row in &table {
        let f: f64 = row[2].parse().unwrap();
        match row[3].as_str() {
            "yes" => {
                yes += 1;
                assert!(f < 0.0);
                let sup: f64 = row[4].parse().unwrap();
                assert!(sup > 0.0);
            }
            "no" => assert!(f > 0.0),
            other => assert_eq!(other, "indeterminate"),
        }
    }
    assert!(yes > 0);
}
