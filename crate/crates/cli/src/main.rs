//! `kedem`: principal eigenvalues, eigencurves and logistic persistence maps
//! for two-subdomain problems with membrane coupling.

mod commands;
mod config;
mod failure;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::failure::{Failure, EXIT_VERIFY};
use crate::output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "kedem", version, about = "Eigencurves of interface problems with membrane coupling")]
struct Cli {
    /// Experiment file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "kedem-out")]
    out: PathBuf,
    /// Initial number of rays for the curve sweep.
    #[arg(long, global = true, value_name = "N")]
    rays: Option<usize>,
    /// Parameter grid for logistic maps and SVG backgrounds, e.g. 21x21.
    #[arg(long, global = true, value_name = "N1xN2", value_parser = parse_grid)]
    grid: Option<[usize; 2]>,
    /// Seed for randomized checks.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    /// Write the dense operator matrix to matrix.txt.
    #[arg(long, global = true)]
    dump_matrix: bool,
    #[arg(long, global = true, value_name = "X")]
    tol_eig: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    tol_curve: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Principal eigenvalue with a mesh-refinement table.
    Eigen,
    /// Trace the eigencurve F = 0 and plot it.
    Curve,
    /// Case tag and predicted landmark signs checked against a trace.
    Classify,
    /// Existence map and solution profiles of the logistic problem.
    Logistic,
    /// Randomized property suite.
    Verify {
        /// Replace the mesh by the coarsest allowed one.
        #[arg(long)]
        coarse: bool,
    },
}

fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected N1xN2, got {s:?}"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let g = [n(a)?, n(b)?];
    if g.iter().any(|&v| v < 2) {
        return Err("grid sides must be at least 2".into());
    }
    Ok(g)
}

fn load(cli: &Cli) -> Result<RunConfig, Failure> {
    let path = cli.config.as_ref().ok_or_else(|| Failure::Config("--config PATH is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(r) = cli.rays {
        cfg.curve.rays = r;
    }
    if let Some(g) = cli.grid {
        cfg.logistic.grid = g;
        cfg.svg.grid = g;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tol_eig {
        cfg.tolerances.eig = t;
    }
    if let Some(t) = cli.tol_curve {
        cfg.tolerances.curve = t;
    }
    cfg.revalidate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let cfg = load(cli)?;
    let out = OutDir::create(&cli.out)?;
    match cli.command {
        Command::Eigen => commands::eigen::run(&cfg, &out, cli.dump_matrix),
        Command::Curve => commands::curve::run(&cfg, &out, cli.dump_matrix),
        Command::Classify => commands::classify::run(&cfg, &out),
        Command::Logistic => commands::logistic::run(&cfg, &out),
        Command::Verify { coarse } => commands::verify::run(&cfg, &out, coarse),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY),
        Err(f) => {
            eprintln!("kedem: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flag() {
        assert_eq!(parse_grid("21x11"), Ok([21, 11]));
        assert_eq!(parse_grid("3X4"), Ok([3, 4]));
        assert!(parse_grid("1x5").is_err());
        assert!(parse_grid("12").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
