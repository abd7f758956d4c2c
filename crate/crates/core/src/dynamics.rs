//! Orbit dynamics of automorphisms: limits of iterates, the face dynamics of
//! limit endomorphisms, ping-pong, north-south dynamics and the rank one
//! isometry predicate.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::domains::{ConvexDomain, Membership, SimplicialResult, SimplicialValue};
use crate::error::{GeomError, Result};
use crate::projlin::{
    attracting_data, eigen_analysis, limit_of_sequence, power_limit, proximal_data,
    proximality_from_limit, Hyperplane, ProjEndo, ProjMap, ProjPoint,
};
use crate::sampling;
use crate::tol;

/// Interior samples used to verify that a map preserves the domain.
const PRESERVATION_SAMPLES: usize = 200;
/// Sampled points of `[ker T]` tested against the domain.
const KERNEL_SAMPLES: usize = 200;
/// Containment residual for the image of a limit in a face span.
const SPAN_TOL: f64 = 1e-7;
/// Sampled points on open segments.
const SEGMENT_POINTS: usize = 33;

/// One named check with its numerical residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Clause {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
}

impl Clause {
    pub fn new(name: impl Into<String>, pass: bool, residual: f64) -> Self {
        Self {
            name: name.into(),
            pass,
            residual,
        }
    }

    /// Passes when `residual ≤ tol`.
    fn within(name: &str, residual: f64, tol: f64) -> Self {
        Self::new(name, residual <= tol, residual)
    }
}

/// Structured verdict shared by the dynamics checks.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub clauses: Vec<Clause>,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub base: ProjPoint,
    pub automorphism: ProjMap,
    pub iterates: usize,
    /// `gᵏ x` for `k = 0..=n`.
    pub trajectory: Vec<ProjPoint>,
    /// `T(x)` for the limit `T` of the powers, when `x ∉ [ker T]`.
    pub limit_point: Option<ProjPoint>,
    /// The limit of `gⁿ` when it exists and is not invertible.
    pub limit_endo: Option<ProjEndo>,
}

impl OrbitRecord {
    /// Distance from the last trajectory point to the predicted limit.
    pub fn final_error(&self) -> Option<f64> {
        let last = self.trajectory.last()?;
        self.limit_point.as_ref().map(|l| last.angle_to(l))
    }
}

/// The forward orbit of an interior point together with the limit predicted
/// from `lim gⁿ`.
pub fn orbit(d: &ConvexDomain, g: &ProjMap, x: &ProjPoint, n: usize) -> Result<OrbitRecord> {
    d.verify_automorphism(g, PRESERVATION_SAMPLES, 0)?;
    d.require(x, Membership::Interior)?;
    let mut trajectory = Vec::with_capacity(n + 1);
    trajectory.push(x.clone());
    for k in 1..=n {
        trajectory.push(g.apply(&trajectory[k - 1])?);
    }
    let limit_endo = power_limit(g, 64, 1e-12)
        .ok()
        .filter(|t| t.rank() < t.dim());
    let limit_point = limit_endo.as_ref().and_then(|t| t.apply(x).ok());
    Ok(OrbitRecord {
        base: x.clone(),
        automorphism: g.clone(),
        iterates: n,
        trajectory,
        limit_point,
        limit_endo,
    })
}

/// Checks the dynamics of a convergent sequence of automorphisms: with
/// `g_n → T`, `g_n(base) → x` and `g_n⁻¹(base) → y`, the image of `T` lies in
/// the span of the face of `x`, `[ker T]` misses the domain and `y ∈ [ker T]`.
///
/// `inverses[n]` must be `seq[n]⁻¹`. They are passed in because inverting a
/// high power numerically loses the information the check needs; see
/// [`power_sequences`].
pub fn face_dynamics_check(
    d: &ConvexDomain,
    seq: &[ProjMap],
    inverses: &[ProjMap],
    base: &ProjPoint,
    seed: u64,
) -> Result<CheckReport> {
    d.require(base, Membership::Interior)?;
    if seq.len() != inverses.len() {
        return Err(GeomError::InvalidInput(format!(
            "{} maps but {} inverses",
            seq.len(),
            inverses.len()
        )));
    }
    let t = limit_of_sequence(seq)?;
    let s = limit_of_sequence(inverses)?;
    let x = t.apply(base)?;
    let y = s.apply(base)?;

    let mut clauses = Vec::new();
    let margin_x = d.margin(&x).unwrap_or(f64::NAN);
    clauses.push(Clause::new(
        "forward_limit_on_boundary",
        d.membership(&x) == Membership::Boundary,
        margin_x.abs(),
    ));
    clauses.push(match d.face_of(&x) {
        Ok(face) => Clause::within(
            "image_in_face_span",
            t.image_residual_outside(&face.span),
            SPAN_TOL,
        ),
        Err(_) => Clause::new("image_in_face_span", false, f64::INFINITY),
    });

    let mut rng = sampling::rng(seed);
    let k = t.kernel_basis();
    let mut worst: f64 = 0.0;
    for _ in 0..KERNEL_SAMPLES {
        let c = sampling::gaussian_vector(&mut rng, k.ncols());
        let Ok(p) = ProjPoint::new(k * c) else {
            continue;
        };
        if let Ok(m) = d.margin(&p) {
            worst = worst.max(m);
        }
    }
    clauses.push(Clause::new(
        "kernel_misses_domain",
        k.ncols() == 0 || worst <= tol::BOUNDARY_BAND,
        worst.max(0.0),
    ));
    clauses.push(Clause::within(
        "backward_limit_in_kernel",
        t.kernel_distance(&y),
        SPAN_TOL,
    ));
    Ok(CheckReport {
        clauses,
        params: params(&[
            ("domain", json!(d.name())),
            ("sequence_length", json!(seq.len())),
            ("limit_rank", json!(t.rank())),
            ("forward_limit", json!(x)),
            ("backward_limit", json!(y)),
        ]),
        seed: Some(seed),
    })
}

/// `(gⁿ)` and `(g⁻ⁿ)` for `n = 1..=len`.
pub fn power_sequences(g: &ProjMap, len: usize) -> (Vec<ProjMap>, Vec<ProjMap>) {
    let fwd = (1..=len as i64).map(|n| g.pow(n)).collect();
    let bwd = (1..=len as i64).map(|n| g.pow(-n)).collect();
    (fwd, bwd)
}

/// One step of the ping-pong construction `g_n = φⁿ ψ⁻ⁿ`.
#[derive(Clone, Debug, Serialize)]
pub struct PingPongStep {
    pub n: usize,
    pub is_proximal: bool,
    pub attracting_line: Option<ProjPoint>,
    pub repelling_line: Option<ProjPoint>,
    /// `sin∠(ℓ⁺_{g_n}, ℓ⁺_φ)`.
    pub attracting_error: Option<f64>,
    /// `sin∠(ℓ⁻_{g_n}, ℓ⁺_ψ)`.
    pub repelling_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PingPongReport {
    pub steps: Vec<PingPongStep>,
    /// Least `N` with `g_n` proximal for every `n ∈ [N, n_max]`.
    pub proximal_from: Option<usize>,
    pub clauses: Vec<Clause>,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
}

fn biproximal_data(
    g: &ProjMap,
    label: &str,
) -> Result<(ProjPoint, ProjPoint, Hyperplane, Hyperplane)> {
    let eig = eigen_analysis(g)?;
    if !eig.is_biproximal {
        return Err(GeomError::HypothesisViolated(format!(
            "{label} is not bi-proximal"
        )));
    }
    let pd = proximal_data(g)?;
    let lm = pd.repelling_line.expect("bi-proximal");
    let hp = pd.attracting_hyperplane.expect("bi-proximal");
    Ok((pd.attracting_line, lm, pd.repelling_hyperplane, hp))
}

/// Builds `g_n = φⁿ ψ⁻ⁿ` and tracks its proximality and eigenlines.
pub fn ping_pong(phi: &ProjMap, psi: &ProjMap, n_max: usize) -> Result<PingPongReport> {
    if phi.dim() != psi.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: phi.dim(),
            found: psi.dim(),
        });
    }
    let (phi_p, phi_m, phi_hm, phi_hp) = biproximal_data(phi, "phi")?;
    let (psi_p, psi_m, psi_hm, psi_hp) = biproximal_data(psi, "psi")?;
    let hypotheses = [
        ("l+_phi not in H+_psi", &phi_p, &psi_hp),
        ("l+_phi not in H-_psi", &phi_p, &psi_hm),
        ("l-_phi not in H+_psi", &phi_m, &psi_hp),
        ("l-_phi not in H-_psi", &phi_m, &psi_hm),
        ("l+_psi not in H+_phi", &psi_p, &phi_hp),
        ("l+_psi not in H-_phi", &psi_p, &phi_hm),
        ("l-_psi not in H+_phi", &psi_m, &phi_hp),
        ("l-_psi not in H-_phi", &psi_m, &phi_hm),
    ];
    let mut clauses = Vec::new();
    for (name, line, plane) in hypotheses {
        let m = plane.margin(line);
        if m <= tol::PING_PONG_MARGIN {
            return Err(GeomError::HypothesisViolated(format!(
                "{name} (margin {m:.3e})"
            )));
        }
        clauses.push(Clause::new(name, true, m));
    }

    let mut steps = Vec::with_capacity(n_max);
    let mut seq = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let k = n as i64;
        let g = phi.pow(k).compose(&psi.pow(-k));
        // Built directly rather than inverted: g_n is badly conditioned.
        let g_inv = psi.pow(k).compose(&phi.pow(-k));
        let plus = attracting_data(&g).ok().map(|p| p.0);
        let minus = attracting_data(&g_inv).ok().map(|p| p.0);
        steps.push(PingPongStep {
            n,
            is_proximal: plus.is_some(),
            attracting_error: plus.as_ref().map(|l| l.angle_to(&phi_p)),
            repelling_error: minus.as_ref().map(|l| l.angle_to(&psi_p)),
            attracting_line: plus,
            repelling_line: minus,
        });
        seq.push(g);
    }
    let proximal_from = match steps.iter().rposition(|s| !s.is_proximal) {
        None if !steps.is_empty() => Some(1),
        None => None,
        Some(i) if i + 1 < steps.len() => Some(i + 2),
        Some(_) => None,
    };
    if let Some(last) = steps.last() {
        clauses.push(Clause::new(
            "attracting_line_converges",
            last.attracting_error.is_some_and(|e| e <= 1e-6),
            last.attracting_error.unwrap_or(f64::INFINITY),
        ));
        clauses.push(Clause::new(
            "repelling_line_converges",
            last.repelling_error.is_some_and(|e| e <= 1e-6),
            last.repelling_error.unwrap_or(f64::INFINITY),
        ));
    }
    // The limit of g_n is a rank one transverse endomorphism with image ℓ⁺_φ.
    match proximality_from_limit(&seq) {
        Ok(lim) => clauses.push(Clause::within(
            "limit_is_proximal_with_image_l+_phi",
            lim.limit_point.angle_to(&phi_p),
            1e-6,
        )),
        Err(e) => clauses.push(Clause::new(
            format!("limit_is_proximal_with_image_l+_phi ({e})"),
            false,
            f64::INFINITY,
        )),
    }
    Ok(PingPongReport {
        steps,
        proximal_from,
        clauses,
        params: params(&[
            ("n_max", json!(n_max)),
            ("phi", json!(phi)),
            ("psi", json!(psi)),
        ]),
        seed: None,
    })
}

/// Result of a north-south dynamics sweep.
#[derive(Clone, Debug, Serialize)]
pub struct NorthSouthReport {
    /// Least `N ≤ N_max` such that the inclusions hold for all `n ∈ [N, N_max]`.
    pub n: Option<usize>,
    pub attracting_line: ProjPoint,
    pub repelling_line: ProjPoint,
    pub simplicial: SimplicialResult,
    pub mesh_size: usize,
    /// Whether the inclusions hold at each `n = 1..=N_max`.
    pub holds: Vec<bool>,
    pub clauses: Vec<Clause>,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
}

/// Samples a mixed boundary/interior mesh of the closed domain.
pub fn closure_mesh(d: &ConvexDomain, size: usize, seed: u64) -> Vec<ProjPoint> {
    let mut rng = sampling::rng(seed);
    (0..size)
        .map(|i| {
            if i % 2 == 0 {
                d.sample_boundary(&mut rng)
            } else {
                d.sample_interior(&mut rng)
            }
        })
        .collect()
}

/// Checks `γⁿ(Ω̄ ∖ B) ⊂ A` and `γ⁻ⁿ(Ω̄ ∖ A) ⊂ B` on a mesh, with `A`, `B`
/// chart balls around `ℓ⁺`, `ℓ⁻`.
#[allow(clippy::too_many_arguments)]
pub fn north_south_check(
    d: &ConvexDomain,
    gamma: &ProjMap,
    a_radius: f64,
    b_radius: f64,
    n_max: usize,
    mesh_size: usize,
    seed: u64,
) -> Result<NorthSouthReport> {
    d.verify_automorphism(gamma, PRESERVATION_SAMPLES, sampling::derive_seed(seed, 1))?;
    let eig = eigen_analysis(gamma)?;
    if !eig.is_biproximal {
        return Err(GeomError::HypothesisViolated(
            "gamma is not bi-proximal".into(),
        ));
    }
    let pd = proximal_data(gamma)?;
    let (lp, lm) = pd.axis().expect("bi-proximal");
    let simplicial = d
        .simplicial_distance(&lp, &lm, 2)
        .map_err(|e| GeomError::HypothesisViolated(format!("fixed points: {e}")))?;
    if !simplicial.exceeds(2) {
        let shown = match simplicial.value {
            SimplicialValue::Finite(k) => k.to_string(),
            SimplicialValue::AtLeast(k) => format!(">= {k}"),
        };
        return Err(GeomError::HypothesisViolated(format!(
            "s(l+, l-) = {shown} <= 2"
        )));
    }
    let mesh = closure_mesh(d, mesh_size, seed);
    let dist = |p: &ProjPoint, c: &ProjPoint| d.chart_distance(p, c).unwrap_or(f64::INFINITY);
    let outside_b: Vec<&ProjPoint> = mesh.iter().filter(|p| dist(p, &lm) >= b_radius).collect();
    let outside_a: Vec<&ProjPoint> = mesh.iter().filter(|p| dist(p, &lp) >= a_radius).collect();

    let mut holds = Vec::with_capacity(n_max);
    let mut worst = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let fwd = gamma.pow(n as i64);
        let bwd = gamma.pow(-(n as i64));
        let mut excess = f64::NEG_INFINITY;
        for p in &outside_b {
            let q = fwd.apply(p)?;
            excess = excess.max(dist(&q, &lp) - a_radius);
        }
        for p in &outside_a {
            let q = bwd.apply(p)?;
            excess = excess.max(dist(&q, &lm) - b_radius);
        }
        holds.push(excess < 0.0);
        worst.push(excess);
    }
    let n = match holds.iter().rposition(|h| !h) {
        None if n_max > 0 => Some(1),
        None => None,
        Some(i) if i + 1 < n_max => Some(i + 2),
        Some(_) => None,
    };
    let final_excess = worst.last().copied().unwrap_or(f64::INFINITY);
    Ok(NorthSouthReport {
        n,
        attracting_line: lp,
        repelling_line: lm,
        simplicial,
        mesh_size: mesh.len(),
        holds,
        clauses: vec![Clause::new(
            "inclusions_hold_at_n_max",
            n.is_some(),
            final_excess.max(0.0),
        )],
        params: params(&[
            ("domain", json!(d.name())),
            ("a_radius", json!(a_radius)),
            ("b_radius", json!(b_radius)),
            ("n_max", json!(n_max)),
        ]),
        seed: Some(seed),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    RankOneIsometry,
    HigherRankWitness,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankOneVerdict {
    pub is_biproximal: bool,
    pub attracting_line: Option<ProjPoint>,
    pub repelling_line: Option<ProjPoint>,
    pub s_value: Option<SimplicialResult>,
    /// The open segment `(ℓ⁺, ℓ⁻)` lies in the interior at every sample.
    pub segment_interior: bool,
    /// `[ℓ⁺, ℓ⁻] ⊂ ∂Ω`.
    pub segment_in_boundary: bool,
    pub verdict: Verdict,
    /// `½ log(λ₁/λ_d)`; positivity stands in for a positive infimum of the
    /// displacement.
    pub tau: f64,
    /// For rank one isometries of strictly convex domains: whether every
    /// sampled boundary point `w` has `(ℓ⁺, w) ∪ (w, ℓ⁻) ⊂ Ω`.
    pub open_segments_through_boundary: Option<bool>,
}

/// Whether the open segment between two closed-domain points is interior at
/// `SEGMENT_POINTS` samples.
pub fn open_segment_interior(d: &ConvexDomain, x: &ProjPoint, y: &ProjPoint) -> Result<bool> {
    let u = d.chart_lift(x)?;
    let w = d.chart_lift(y)?;
    Ok((1..=SEGMENT_POINTS).all(|k| {
        let s = k as f64 / (SEGMENT_POINTS + 1) as f64;
        d.classify_lift(&(&u + (&w - &u) * s)) == Membership::Interior
    }))
}

/// Decides whether `g` is a rank one isometry (bi-proximal with
/// `s(ℓ⁺, ℓ⁻) > 2`) or witnesses higher rank (`[ℓ⁺, ℓ⁻] ⊂ ∂Ω`).
pub fn rank_one_verdict(
    d: &ConvexDomain,
    g: &ProjMap,
    cap: usize,
    seed: u64,
) -> Result<RankOneVerdict> {
    d.verify_automorphism(g, PRESERVATION_SAMPLES, sampling::derive_seed(seed, 1))?;
    let eig = eigen_analysis(g)?;
    let tau = eig.half_log_ratio();
    let mut out = RankOneVerdict {
        is_biproximal: eig.is_biproximal,
        attracting_line: None,
        repelling_line: None,
        s_value: None,
        segment_interior: false,
        segment_in_boundary: false,
        verdict: Verdict::Inconclusive,
        tau,
        open_segments_through_boundary: None,
    };
    if !eig.is_biproximal {
        return Ok(out);
    }
    let (lp, lm) = proximal_data(g)?.axis().expect("bi-proximal");
    out.attracting_line = Some(lp.clone());
    out.repelling_line = Some(lm.clone());
    if d.membership(&lp) != Membership::Boundary || d.membership(&lm) != Membership::Boundary {
        return Ok(out);
    }
    let s = d.simplicial_distance(&lp, &lm, cap)?;
    out.segment_interior = open_segment_interior(d, &lp, &lm)?;
    out.segment_in_boundary = d.segment_in_boundary(&lp, &lm)?;
    let rank_one = s.certified_infinite
        || (cap >= 3 && s.value == SimplicialValue::AtLeast(cap + 1))
        || s.exceeds(2);
    out.verdict = if rank_one {
        Verdict::RankOneIsometry
    } else if out.segment_in_boundary {
        Verdict::HigherRankWitness
    } else {
        Verdict::Inconclusive
    };
    out.s_value = Some(s);
    if out.verdict == Verdict::RankOneIsometry && d.is_strictly_convex() {
        let mut rng = sampling::rng(seed);
        let mut ok = true;
        for _ in 0..64 {
            let w = d.sample_boundary(&mut rng);
            if w.approx_eq(&lp, 1e-6) || w.approx_eq(&lm, 1e-6) {
                continue;
            }
            ok &= open_segment_interior(d, &lp, &w)? && open_segment_interior(d, &w, &lm)?;
        }
        out.open_segments_through_boundary = Some(ok);
    }
    Ok(out)
}
