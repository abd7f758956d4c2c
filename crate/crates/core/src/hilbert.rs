//! The Hilbert metric, geodesic checks and minimal translation lengths.

use nalgebra::DVector;
use serde::Serialize;

use crate::domains::{ConvexDomain, DomainKind, Membership};
use crate::error::{GeomError, Result};
use crate::projlin::{eigen_analysis, ProjMap, ProjPoint};
use crate::sampling;
use crate::tol;

/// Additivity tolerance for points on a segment.
pub const GEODESIC_TOL: f64 = 1e-8;
/// Agreement between `H(x, gx)` and `τ` on a min set.
pub const MIN_SET_TOL: f64 = 1e-6;
/// Interior samples used to verify that a map preserves the domain.
const PRESERVATION_SAMPLES: usize = 200;
/// Number of best samples refined by descent.
const DESCENT_STARTS: usize = 8;
const DESCENT_ROUNDS: usize = 10;
const DESCENT_STEP: f64 = 0.05;

/// `½ log [a, x, y, b]` with `a, b` the chord endpoints.
pub fn hilbert_distance(d: &ConvexDomain, x: &ProjPoint, y: &ProjPoint) -> Result<f64> {
    d.require(x, Membership::Interior)?;
    d.require(y, Membership::Interior)?;
    if x.approx_eq(y, tol::POINT_EQ) {
        return Ok(0.0);
    }
    // A fixed evaluation order makes the result exactly symmetric.
    let (x, y) = match x.coords().iter().partial_cmp(y.coords().iter()) {
        Some(std::cmp::Ordering::Greater) => (y, x),
        _ => (x, y),
    };
    let ch = d.chord(x, y)?;
    Ok(distance_from_exits(ch.t_a, ch.t_b))
}

/// With `x` at parameter 0 and `y` at 1 the cross ratio is
/// `t_b(1 − t_a) / ((−t_a)(t_b − 1))`.
fn distance_from_exits(t_a: f64, t_b: f64) -> f64 {
    let h = 0.5 * ((1.0 / (t_b - 1.0)).ln_1p() + (-1.0 / t_a).ln_1p());
    h.max(0.0)
}

/// Whether `H(x, z) + H(z, y) = H(x, y)` within tolerance for `samples`
/// equally spaced `z` on the open segment.
pub fn geodesic_check(
    d: &ConvexDomain,
    x: &ProjPoint,
    y: &ProjPoint,
    samples: usize,
) -> Result<bool> {
    Ok(geodesic_defect(d, x, y, samples)? <= GEODESIC_TOL)
}

/// Largest additivity defect along the segment.
pub fn geodesic_defect(
    d: &ConvexDomain,
    x: &ProjPoint,
    y: &ProjPoint,
    samples: usize,
) -> Result<f64> {
    let u = d.require(x, Membership::Interior)?;
    let w = d.require(y, Membership::Interior)?;
    let total = hilbert_distance(d, x, y)?;
    let mut worst: f64 = 0.0;
    for k in 1..=samples {
        let s = k as f64 / (samples + 1) as f64;
        let z = ProjPoint::new(&u + (&w - &u) * s)?;
        let sum = hilbert_distance(d, x, &z)? + hilbert_distance(d, &z, y)?;
        worst = worst.max((sum - total).abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslationData {
    /// Minimal translation length, taken from the eigenvalue formula.
    pub tau: f64,
    /// `½ log(λ₁/λ_d)`.
    pub formula_value: f64,
    /// Sampled infimum of `H(x, gx)` after local descent.
    pub oracle_value: f64,
    /// Samples within [`MIN_SET_TOL`] of the oracle value.
    pub argmin_samples: Vec<ProjPoint>,
    pub seed: u64,
    /// Whether `g` is one of the domain's catalog maps. The formula is only
    /// cross-checked for catalog maps.
    pub in_catalog: bool,
}

/// Orthonormal basis of the chart tangent space `ker f`.
fn chart_directions(d: &ConvexDomain) -> Vec<DVector<f64>> {
    let f = d.chart_functional();
    let n = f.len();
    let mut out: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        let mut v = &e - f * (f[i] / f.norm_squared());
        for b in &out {
            v -= b * b.dot(&v);
        }
        if v.norm() > 1e-8 {
            out.push(v.normalize());
        }
        if out.len() + 1 == n {
            break;
        }
    }
    out
}

fn displacement(d: &ConvexDomain, g: &ProjMap, x: &ProjPoint) -> Option<f64> {
    let gx = g.apply(x).ok()?;
    hilbert_distance(d, x, &gx).ok()
}

/// Coordinate descent of `H(x, gx)` in chart directions with halving steps.
fn descend(d: &ConvexDomain, g: &ProjMap, start: DVector<f64>, value: f64) -> (DVector<f64>, f64) {
    let dirs = chart_directions(d);
    let (mut best, mut best_val) = (start, value);
    let mut step = DESCENT_STEP;
    for _ in 0..DESCENT_ROUNDS {
        let mut improved = true;
        while improved {
            improved = false;
            for e in &dirs {
                for sign in [1.0, -1.0] {
                    let cand = &best + e * (sign * step);
                    if d.classify_lift(&cand) != Membership::Interior {
                        continue;
                    }
                    let Ok(p) = ProjPoint::new(cand.clone()) else {
                        continue;
                    };
                    if let Some(v) = displacement(d, g, &p) {
                        if v < best_val - 1e-15 {
                            best = cand;
                            best_val = v;
                            improved = true;
                        }
                    }
                }
            }
        }
        step *= 0.5;
    }
    (best, best_val)
}

/// Formula value of `τ(g)` cross-checked by a sampled infimum of `H(x, gx)`.
pub fn min_translation(
    d: &ConvexDomain,
    g: &ProjMap,
    n_samples: usize,
    seed: u64,
) -> Result<TranslationData> {
    if n_samples == 0 {
        return Err(GeomError::InvalidInput(
            "n_samples must be at least 1".into(),
        ));
    }
    d.verify_automorphism(g, PRESERVATION_SAMPLES, sampling::derive_seed(seed, 1))?;
    let formula_value = eigen_analysis(g)?.half_log_ratio();

    let mut rng = sampling::rng(seed);
    let mut scored: Vec<(f64, DVector<f64>)> = Vec::with_capacity(n_samples);
    let center = d.chart_lift(&d.center())?;
    for i in 0..n_samples {
        let lift = if i == 0 {
            center.clone()
        } else {
            d.sample_interior_lift(&mut rng)
        };
        let p = ProjPoint::new(lift.clone())?;
        if let Some(v) = displacement(d, g, &p) {
            scored.push((v, lift));
        }
    }
    if scored.is_empty() {
        return Err(GeomError::DegenerateConfiguration(
            "no usable samples".into(),
        ));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    scored.truncate(DESCENT_STARTS);
    let refined: Vec<(f64, DVector<f64>)> = scored
        .into_iter()
        .map(|(v, lift)| {
            let (l, v) = descend(d, g, lift, v);
            (v, l)
        })
        .collect();
    let oracle_value = refined.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let argmin_samples = refined
        .iter()
        .filter(|r| r.0 <= oracle_value + MIN_SET_TOL)
        .map(|r| ProjPoint::new(r.1.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TranslationData {
        tau: formula_value,
        formula_value,
        oracle_value,
        argmin_samples,
        seed,
        in_catalog: d.catalog_index(g).is_some(),
    })
}

/// Largest `|H(x, gx) − τ|` over sampled `x` for a vertex-fixing `g`.
pub fn min_set_simplex_residual(
    s: &ConvexDomain,
    g: &ProjMap,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if !matches!(s.kind(), DomainKind::Simplex { .. }) {
        return Err(GeomError::InvalidInput(format!(
            "{} is not a simplex",
            s.name()
        )));
    }
    if g.dim() != s.ambient_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: s.ambient_dim(),
            found: g.dim(),
        });
    }
    let m = g.matrix();
    let off_diagonal = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).filter(move |&j| j != i).map(move |j| (i, j)))
        .any(|(i, j)| m[(i, j)].abs() > tol::DET_MIN);
    if off_diagonal || m.diagonal().iter().any(|&v| v <= 0.0) {
        return Err(GeomError::NotVertexFixing);
    }
    let tau = eigen_analysis(g)?.half_log_ratio();
    let mut rng = sampling::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_samples {
        let x = s.sample_interior(&mut rng);
        let gx = g.apply(&x)?;
        worst = worst.max((hilbert_distance(s, &x, &gx)? - tau).abs());
    }
    Ok(worst)
}

/// Whether `H(x, gx) = τ(g)` on every sample, i.e. the min set is the whole
/// simplex at sample resolution.
pub fn min_set_simplex_check(
    s: &ConvexDomain,
    g: &ProjMap,
    n_samples: usize,
    seed: u64,
) -> Result<bool> {
    Ok(min_set_simplex_residual(s, g, n_samples, seed)? <= MIN_SET_TOL)
}
