//! Experiment runners behind the `convexproj` binary. Each command turns a
//! [`RunConfig`] into a JSON report; identical configs give identical bytes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::domains::{builtin, builtin_ids, ConvexDomain, DomainSpec};
use crate::dynamics::{north_south_check, orbit, ping_pong, rank_one_verdict};
use crate::error::{GeomError, Result};
use crate::hilbert::{hilbert_distance, min_translation};
use crate::projlin::{cross_ratio, eigen_analysis, proximal_data, ProjMap, ProjPoint};
use crate::rankcheck::{rank_report, RankConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Distance,
    Classify,
    Orbit,
    Pingpong,
    Nscheck,
    Rankreport,
}

/// Everything a run depends on. Unset options take per-command defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandName,
    /// Built-in id or path to a domain JSON file.
    pub domain: Option<String>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub pairs: Option<usize>,
    pub cap: usize,
    /// Convergence tolerance for orbit limits and ping-pong eigenlines.
    pub tol: Option<f64>,
    pub steps: Option<usize>,
    pub radius: Option<f64>,
    pub x: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
    /// Index into the domain's automorphism catalog.
    pub element: Option<usize>,
    pub matrix: Option<Vec<Vec<f64>>>,
    /// Second map for ping-pong.
    pub psi: Option<Vec<Vec<f64>>>,
    /// Output paths do not affect the report and are left out of it.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: CommandName) -> Self {
        Self {
            command,
            domain: None,
            seed: 0,
            samples: None,
            pairs: None,
            cap: 3,
            tol: None,
            steps: None,
            radius: None,
            x: None,
            y: None,
            element: None,
            matrix: None,
            psi: None,
            out: None,
            csv: None,
        }
    }
}

/// A finished run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub json: String,
    pub csv: Option<String>,
    /// One-line human summary.
    pub summary: String,
}

/// Parses `"a,b,c"`.
pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| GeomError::InvalidInput(format!("not a number: '{t}'")))
        })
        .collect()
}

/// Parses rows separated by `;`, e.g. `"2,0;0,1"`.
pub fn parse_matrix(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').map(parse_vector).collect()
}

/// Resolves a built-in id or a JSON file path.
pub fn load_domain(source: &str) -> Result<ConvexDomain> {
    if builtin(source).is_ok() || !Path::new(source).exists() && !source.ends_with(".json") {
        return builtin(source);
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| GeomError::InvalidInput(format!("cannot read domain file '{source}': {e}")))?;
    DomainSpec::from_json(&text)?.build()
}

fn domain(config: &RunConfig) -> Result<ConvexDomain> {
    let src = config.domain.as_deref().ok_or_else(|| {
        GeomError::InvalidInput(format!(
            "--domain is required (builtins: {})",
            builtin_ids().join(", ")
        ))
    })?;
    load_domain(src)
}

fn element(config: &RunConfig, d: Option<&ConvexDomain>) -> Result<ProjMap> {
    if let Some(rows) = &config.matrix {
        return ProjMap::from_rows(rows);
    }
    let d = d.ok_or_else(|| GeomError::InvalidInput("--matrix is required".into()))?;
    let i = config.element.unwrap_or(0);
    d.automorphisms().get(i).cloned().ok_or_else(|| {
        GeomError::InvalidInput(format!(
            "element {i} out of range: catalog of '{}' has {} maps",
            d.name(),
            d.automorphisms().len()
        ))
    })
}

fn point(d: &ConvexDomain, coords: Option<&Vec<f64>>, flag: &str) -> Result<ProjPoint> {
    let c = coords.ok_or_else(|| GeomError::InvalidInput(format!("--{flag} is required")))?;
    d.embed_chart(c)
}

fn render(config: &RunConfig, result: Value) -> Result<String> {
    let doc = json!({ "command": config.command, "config": config, "result": result });
    serde_json::to_string_pretty(&doc).map_err(|e| GeomError::InvalidInput(e.to_string()))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn cmd_distance(config: &RunConfig) -> Result<RunOutput> {
    let d = domain(config)?;
    let x = point(&d, config.x.as_ref(), "x")?;
    let y = point(&d, config.y.as_ref(), "y")?;
    let h = hilbert_distance(&d, &x, &y)?;
    let (chord, cr) = if h == 0.0 && x.approx_eq(&y, crate::tol::POINT_EQ) {
        (None, None)
    } else {
        let ch = d.chord(&x, &y)?;
        let cr = cross_ratio(&ch.a, &x, &y, &ch.b)?;
        (Some(ch), Some(cr))
    };
    let result = json!({
        "domain": d.name(),
        "x": x,
        "y": y,
        "distance": h,
        "chord": chord.as_ref().map(|c| json!({ "a": c.a, "b": c.b })),
        "cross_ratio": cr,
    });
    Ok(RunOutput {
        json: render(config, result)?,
        csv: None,
        summary: format!("H = {h:.6}"),
    })
}

pub fn cmd_classify(config: &RunConfig) -> Result<RunOutput> {
    let d = domain(config)?;
    let g = element(config, Some(&d))?;
    let verdict = rank_one_verdict(&d, &g, config.cap, config.seed)?;
    let eig = eigen_analysis(&g)?;
    let pd = if eig.is_proximal {
        Some(proximal_data(&g)?)
    } else {
        None
    };
    let translation = min_translation(&d, &g, config.samples.unwrap_or(1000), config.seed)?;
    let result = json!({
        "domain": d.name(),
        "map": g,
        "moduli": eig.moduli,
        "is_proximal": eig.is_proximal,
        "is_biproximal": eig.is_biproximal,
        "attracting_line": pd.as_ref().map(|p| &p.attracting_line),
        "repelling_line": pd.as_ref().and_then(|p| p.repelling_line.as_ref()),
        "tau": translation.tau,
        "translation": translation,
        "rank_one": verdict,
    });
    Ok(RunOutput {
        json: render(config, result)?,
        csv: None,
        summary: format!(
            "verdict {:?}, tau = {:.6}",
            verdict.verdict, translation.tau
        ),
    })
}

pub fn cmd_orbit(config: &RunConfig) -> Result<RunOutput> {
    let d = domain(config)?;
    let g = element(config, Some(&d))?;
    let x = match &config.x {
        Some(c) => d.embed_chart(c)?,
        None => d.center(),
    };
    let rec = orbit(&d, &g, &x, config.steps.unwrap_or(40))?;
    let tol = config.tol.unwrap_or(1e-8);
    let err = rec.final_error();
    let converged = err.map(|e| e <= tol);
    let result = json!({
        "domain": d.name(),
        "orbit": rec,
        "final_error": err,
        "tolerance": tol,
        "converged": converged,
    });
    Ok(RunOutput {
        json: render(config, result)?,
        csv: None,
        summary: match err {
            Some(e) => format!("final error {e:.3e}"),
            None => "no rank-deficient limit".into(),
        },
    })
}

/// `diag(9, 3, 1)` and its conjugate by `I + J`.
pub fn default_ping_pong_pair() -> (ProjMap, ProjMap) {
    let phi = ProjMap::diagonal(&[9.0, 3.0, 1.0]).expect("invertible");
    let p = ProjMap::from_rows(&[
        vec![2.0, 1.0, 1.0],
        vec![1.0, 2.0, 1.0],
        vec![1.0, 1.0, 2.0],
    ])
    .expect("invertible");
    let psi = phi.conjugate_by(&p);
    (phi, psi)
}

pub fn cmd_pingpong(config: &RunConfig) -> Result<RunOutput> {
    let (phi, psi) = match (&config.matrix, &config.psi) {
        (Some(a), Some(b)) => (ProjMap::from_rows(a)?, ProjMap::from_rows(b)?),
        (None, None) => default_ping_pong_pair(),
        _ => {
            return Err(GeomError::InvalidInput(
                "--matrix and --psi must be given together".into(),
            ))
        }
    };
    let report = ping_pong(&phi, &psi, config.steps.unwrap_or(40))?;
    let tol = config.tol.unwrap_or(1e-6);
    let last_error = report.steps.last().and_then(|s| s.attracting_error);
    let result = json!({
        "phi": phi,
        "psi": psi,
        "report": report,
        "tolerance": tol,
        "attracting_error_within_tolerance": last_error.map(|e| e <= tol),
    });
    Ok(RunOutput {
        json: render(config, result)?,
        csv: None,
        summary: format!("proximal from n = {:?}", report.proximal_from),
    })
}

pub fn cmd_nscheck(config: &RunConfig) -> Result<RunOutput> {
    let d = domain(config)?;
    let g = element(config, Some(&d))?;
    let r = config.radius.unwrap_or(0.2);
    let report = north_south_check(
        &d,
        &g,
        r,
        r,
        config.steps.unwrap_or(20),
        config.samples.unwrap_or(1000),
        config.seed,
    )?;
    let summary = format!("N = {:?}", report.n);
    Ok(RunOutput {
        json: render(config, json!({ "domain": d.name(), "report": report }))?,
        csv: None,
        summary,
    })
}

pub fn cmd_rankreport(config: &RunConfig) -> Result<RunOutput> {
    let d = domain(config)?;
    let defaults = RankConfig::default();
    let rc = RankConfig {
        pairs: config.pairs.unwrap_or(defaults.pairs),
        samples: config.samples.unwrap_or(defaults.samples),
        cap: config.cap,
        seed: config.seed,
    };
    let report = rank_report(&d, &rc)?;
    Ok(RunOutput {
        json: render(config, to_value(&report))?,
        csv: Some(report.csv()),
        summary: format!(
            "{:?} ({} coherence violations)",
            report.verdict, report.coherence.violations
        ),
    })
}

pub fn run(config: &RunConfig) -> Result<RunOutput> {
    match config.command {
        CommandName::Distance => cmd_distance(config),
        CommandName::Classify => cmd_classify(config),
        CommandName::Orbit => cmd_orbit(config),
        CommandName::Pingpong => cmd_pingpong(config),
        CommandName::Nscheck => cmd_nscheck(config),
        CommandName::Rankreport => cmd_rankreport(config),
    }
}
