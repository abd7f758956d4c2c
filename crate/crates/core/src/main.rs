use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use convexproj::cli::{parse_matrix, parse_vector, run, CommandName, RunConfig};
use convexproj::GeomError;

#[derive(Parser)]
#[command(
    name = "convexproj",
    version,
    about = "Hilbert geometry and rank experiments on convex projective domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Hilbert distance between two interior points.
    Distance,
    /// Eigenvalue data, translation length and rank-one verdict of a map.
    Classify,
    /// Forward orbit of a point and its predicted limit.
    Orbit,
    /// Ping-pong construction g_n = phi^n psi^-n.
    Pingpong,
    /// North-south dynamics check.
    Nscheck,
    /// Sampled rank report with CSV plot data.
    Rankreport,
}

#[derive(Args)]
struct Common {
    /// Built-in domain id or path to a domain JSON file.
    #[arg(long, global = true)]
    domain: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    pairs: Option<usize>,
    #[arg(long, global = true, default_value_t = 3)]
    cap: usize,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true)]
    radius: Option<f64>,
    /// Chart or homogeneous coordinates, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    y: Option<String>,
    /// Index into the domain's automorphism catalog.
    #[arg(long, global = true)]
    element: Option<usize>,
    /// Matrix rows separated by ';', entries by ','.
    #[arg(long, global = true, allow_hyphen_values = true)]
    matrix: Option<String>,
    /// Second ping-pong map, same format as --matrix.
    #[arg(long, global = true, allow_hyphen_values = true)]
    psi: Option<String>,
    /// JSON report path; the report goes to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// CSV output path (rankreport).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

fn config(cli: Cli) -> Result<RunConfig, GeomError> {
    let command = match cli.command {
        Command::Distance => CommandName::Distance,
        Command::Classify => CommandName::Classify,
        Command::Orbit => CommandName::Orbit,
        Command::Pingpong => CommandName::Pingpong,
        Command::Nscheck => CommandName::Nscheck,
        Command::Rankreport => CommandName::Rankreport,
    };
    let c = cli.common;
    let mut cfg = RunConfig::new(command);
    cfg.domain = c.domain;
    cfg.seed = c.seed;
    cfg.samples = c.samples;
    cfg.pairs = c.pairs;
    cfg.cap = c.cap;
    cfg.tol = c.tol;
    cfg.steps = c.steps;
    cfg.radius = c.radius;
    cfg.x = c.x.as_deref().map(parse_vector).transpose()?;
    cfg.y = c.y.as_deref().map(parse_vector).transpose()?;
    cfg.element = c.element;
    cfg.matrix = c.matrix.as_deref().map(parse_matrix).transpose()?;
    cfg.psi = c.psi.as_deref().map(parse_matrix).transpose()?;
    cfg.out = c.out;
    cfg.csv = c.csv;
    Ok(cfg)
}

fn write(path: &PathBuf, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(cli).and_then(|cfg| run(&cfg).map(|out| (cfg, out)));
    let (cfg, out) = match result {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_user_error() { 2 } else { 1 });
        }
    };
    let written = (|| -> anyhow::Result<()> {
        match &cfg.out {
            Some(path) => {
                write(path, &out.json)?;
                println!("{}", out.summary);
            }
            None => println!("{}", out.json),
        }
        if let (Some(path), Some(csv)) = (&cfg.csv, &out.csv) {
            write(path, csv)?;
        }
        Ok(())
    })();
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
