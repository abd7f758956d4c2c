//! Sampled evaluation of the rank conditions and the aggregated rank report.
//!
//! Every check returns "evidence" at the stated sample sizes and caps, never
//! a proof. Each recorded witness carries enough data to be re-evaluated by
//! [`replay`].

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domains::{ConvexDomain, Membership, SimplicialResult, SimplicialValue};
use crate::dynamics::{rank_one_verdict, Verdict};
use crate::error::{GeomError, Result};
use crate::projlin::{eigen_analysis, real_eigenspaces, ProjMap, ProjPoint};
use crate::sampling;
use crate::tol;

pub const SCHEMA: &str = "rankreport/1";

/// Witnesses kept per condition; failures are kept first.
pub const MAX_WITNESSES: usize = 5;

/// Translation lengths at or below this are treated as elliptic or parabolic.
pub const TAU_MIN: f64 = 1e-9;

const EXTREME_SEQUENCE_LEN: usize = 30;
const EIGENSPACE_SAMPLES: usize = 256;
const DISTINCT_TOL: f64 = 1e-6;

/// The sampled conditions of the rank characterization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    HigherRank,
    ExtremeSet,
    ExtremeSegments,
    SimplicialAtMostTwo,
    SimplicialFinite,
    CentralizerIndex,
    FixedPoints,
    AxisInBoundary,
    AxisSimplicialFinite,
}

impl Condition {
    pub const ALL: [Condition; 9] = [
        Condition::HigherRank,
        Condition::ExtremeSet,
        Condition::ExtremeSegments,
        Condition::SimplicialAtMostTwo,
        Condition::SimplicialFinite,
        Condition::CentralizerIndex,
        Condition::FixedPoints,
        Condition::AxisInBoundary,
        Condition::AxisSimplicialFinite,
    ];

    /// Conditions whose witness directions must agree on a single domain.
    pub const COHERENT: [Condition; 4] = [
        Condition::ExtremeSegments,
        Condition::SimplicialAtMostTwo,
        Condition::AxisInBoundary,
        Condition::AxisSimplicialFinite,
    ];

    pub fn number(self) -> u8 {
        match self {
            Condition::HigherRank => 2,
            Condition::ExtremeSet => 3,
            Condition::ExtremeSegments => 4,
            Condition::SimplicialAtMostTwo => 5,
            Condition::SimplicialFinite => 6,
            Condition::CentralizerIndex => 8,
            Condition::FixedPoints => 9,
            Condition::AxisInBoundary => 10,
            Condition::AxisSimplicialFinite => 11,
        }
    }

    /// Stable report key, e.g. `"5_simplicial_le_2"`.
    pub fn key(self) -> &'static str {
        match self {
            Condition::HigherRank => "2_higher_rank",
            Condition::ExtremeSet => "3_extreme_set",
            Condition::ExtremeSegments => "4_extreme_segments",
            Condition::SimplicialAtMostTwo => "5_simplicial_le_2",
            Condition::SimplicialFinite => "6_simplicial_finite",
            Condition::CentralizerIndex => "8_centralizer_index",
            Condition::FixedPoints => "9_fixed_points",
            Condition::AxisInBoundary => "10_axis_in_boundary",
            Condition::AxisSimplicialFinite => "11_axis_simplicial_finite",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.key() == key)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Unknown,
    NotEvaluable,
}

/// One evaluated sample. `points` are the inputs of the predicate; `element`
/// indexes the domain's automorphism catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub points: Vec<ProjPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<usize>,
    pub pass: Option<bool>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionResult {
    pub outcome: Outcome,
    pub samples: usize,
    pub passes: usize,
    pub fails: usize,
    pub unknown: usize,
    /// `passes / (passes + fails)` when anything was decided.
    pub rate: Option<f64>,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConditionResult {
    fn not_evaluable(note: &str) -> Self {
        Self {
            outcome: Outcome::NotEvaluable,
            samples: 0,
            passes: 0,
            fails: 0,
            unknown: 0,
            rate: None,
            witnesses: Vec::new(),
            note: Some(note.to_string()),
        }
    }
}

/// How a tally turns into an outcome.
#[derive(Clone, Copy)]
enum Rule {
    /// Pass iff every decided sample passes.
    All,
    /// Pass iff every sample passes; otherwise fail only if none pass.
    Rate,
}

#[derive(Default)]
struct Tally {
    passes: usize,
    fails: usize,
    unknown: usize,
    failing: Vec<Witness>,
    other: Vec<Witness>,
}

impl Tally {
    fn record(&mut self, w: Witness) {
        match w.pass {
            Some(true) => self.passes += 1,
            Some(false) => self.fails += 1,
            None => self.unknown += 1,
        }
        if w.pass == Some(false) {
            if self.failing.len() < MAX_WITNESSES {
                self.failing.push(w);
            }
        } else if self.other.len() < MAX_WITNESSES {
            self.other.push(w);
        }
    }

    fn finish(self, rule: Rule, note: Option<String>) -> ConditionResult {
        let decided = self.passes + self.fails;
        let outcome = match rule {
            _ if decided == 0 => Outcome::Unknown,
            Rule::All if self.fails > 0 => Outcome::Fail,
            Rule::All => Outcome::Pass,
            Rule::Rate if self.passes == 0 => Outcome::Fail,
            Rule::Rate if self.fails == 0 && self.unknown == 0 => Outcome::Pass,
            Rule::Rate => Outcome::Unknown,
        };
        let mut witnesses = self.failing;
        let room = MAX_WITNESSES - witnesses.len();
        witnesses.extend(self.other.into_iter().take(room));
        ConditionResult {
            outcome,
            samples: decided + self.unknown,
            passes: self.passes,
            fails: self.fails,
            unknown: self.unknown,
            rate: (decided > 0).then(|| self.passes as f64 / decided as f64),
            witnesses,
            note,
        }
    }
}

fn sample_pair<R: Rng>(
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> ProjPoint,
) -> Option<(ProjPoint, ProjPoint)> {
    let x = draw(rng);
    let y = draw(rng);
    (!x.approx_eq(&y, DISTINCT_TOL)).then_some((x, y))
}

fn chart_sum(d: &ConvexDomain, pts: &[&ProjPoint]) -> Result<ProjPoint> {
    let mut acc = DVector::zeros(d.ambient_dim());
    for p in pts {
        acc += d.chart_lift(p)?;
    }
    ProjPoint::new(acc)
}

/// Seeks a properly embedded triangle containing the chord through `p, q`.
/// Returns the third vertex when one is found.
pub fn triangle_through(
    d: &ConvexDomain,
    p: &ProjPoint,
    q: &ProjPoint,
) -> Result<(Option<bool>, Option<ProjPoint>)> {
    let chord = d.chord(p, q)?;
    let s = d.simplicial_distance(&chord.a, &chord.b, 2)?;
    if s.exceeds(2) {
        return Ok((Some(false), None));
    }
    let Some(2) = s.finite() else {
        return Ok((None, None));
    };
    let c = s.chain[1].clone();
    let embedded = d.segment_in_boundary(&chord.a, &c)?
        && d.segment_in_boundary(&c, &chord.b)?
        && d.membership(&chart_sum(d, &[&chord.a, &chord.b, &c])?) == Membership::Interior;
    Ok((embedded.then_some(true), Some(c)))
}

/// Searches sampled interior pairs for properly embedded triangles through
/// their chords. Reported as a rate.
pub fn check_higher_rank_segments(d: &ConvexDomain, n_pairs: usize, seed: u64) -> ConditionResult {
    let mut rng = sampling::rng(seed);
    let mut tally = Tally::default();
    for _ in 0..n_pairs {
        let Some((p, q)) = sample_pair(&mut rng, |r| d.sample_interior(r)) else {
            continue;
        };
        let (pass, detail) = match triangle_through(d, &p, &q) {
            Ok((pass, Some(c))) => (pass, format!("third vertex {:?}", c.coords().as_slice())),
            Ok((pass, None)) => (pass, "no triangle found".to_string()),
            Err(e) => (None, e.to_string()),
        };
        tally.record(Witness {
            points: vec![p, q],
            element: None,
            pass,
            detail,
        });
    }
    tally.finish(
        Rule::Rate,
        Some("rate of sampled pairs inside a properly embedded triangle".into()),
    )
}

/// Samples boundary points for properness of the extreme set and extreme
/// sequences for closedness.
pub fn check_extreme_set(d: &ConvexDomain, n_samples: usize, seed: u64) -> ConditionResult {
    let mut rng = sampling::rng(seed);
    let mut proper = Tally::default();
    let mut closed = Tally::default();
    for _ in 0..n_samples {
        let x = d.sample_boundary(&mut rng);
        let extreme = d.is_extreme(&x).ok();
        let detail = match extreme {
            Some(true) => "boundary point is extreme",
            _ => "boundary point is not extreme",
        };
        proper.record(Witness {
            points: vec![x],
            element: None,
            pass: extreme.map(|e| !e),
            detail: detail.into(),
        });
    }
    for _ in 0..n_samples.div_ceil(10) {
        let (seq, lim) = d.sample_extreme_sequence(&mut rng, EXTREME_SEQUENCE_LEN);
        let mut points = seq;
        points.push(lim);
        let pass = extreme_sequence_closed(d, &points).ok();
        closed.record(Witness {
            points,
            element: None,
            pass,
            detail: "extreme sequence has an extreme limit".into(),
        });
    }
    let is_proper = proper.passes > 0;
    let is_closed = closed.fails == 0 && closed.passes > 0;
    let outcome = match (is_proper, is_closed) {
        (true, true) => Outcome::Pass,
        _ if proper.passes + proper.fails == 0 => Outcome::Unknown,
        _ => Outcome::Fail,
    };
    let n_sequences = closed.passes + closed.fails + closed.unknown;
    let note = format!(
        "proper: {} of {} boundary samples non-extreme; closed: {} of {} sequences",
        proper.passes, n_samples, closed.passes, n_sequences
    );
    // Properness fails only in aggregate: every sampled boundary point is a
    // failing witness then.
    let mut witnesses = Vec::new();
    if !is_proper {
        witnesses.extend(proper.failing);
    }
    witnesses.extend(closed.failing);
    if is_proper {
        witnesses.extend(proper.other.into_iter().filter(|w| w.pass == Some(true)));
    }
    witnesses.extend(closed.other);
    witnesses.truncate(MAX_WITNESSES);
    ConditionResult {
        outcome,
        samples: n_samples + n_sequences,
        passes: proper.passes + closed.passes,
        fails: proper.fails + closed.fails,
        unknown: proper.unknown + closed.unknown,
        rate: None,
        witnesses,
        note: Some(note),
    }
}

fn extreme_sequence_closed(d: &ConvexDomain, points: &[ProjPoint]) -> Result<bool> {
    for x in points {
        if !d.is_extreme(x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs `segment_in_boundary` on sampled distinct extreme pairs.
pub fn check_pairwise_extreme_segments(
    d: &ConvexDomain,
    n_pairs: usize,
    seed: u64,
) -> ConditionResult {
    let mut rng = sampling::rng(seed);
    let mut tally = Tally::default();
    for _ in 0..n_pairs {
        let Some((x, y)) = sample_pair(&mut rng, |r| d.sample_extreme(r)) else {
            continue;
        };
        let pass = d.segment_in_boundary(&x, &y).ok();
        tally.record(Witness {
            points: vec![x, y],
            element: None,
            pass,
            detail: "segment between extreme points lies in the boundary".into(),
        });
    }
    tally.finish(Rule::All, None)
}

fn at_most_two(s: &SimplicialResult) -> Option<bool> {
    match s.finite() {
        Some(k) if k <= 2 => Some(true),
        _ if s.exceeds(2) => Some(false),
        _ => None,
    }
}

fn finite_value(s: &SimplicialResult) -> Option<bool> {
    if s.finite().is_some() {
        Some(true)
    } else if s.certified_infinite {
        Some(false)
    } else {
        None
    }
}

fn describe(s: &SimplicialResult) -> String {
    match s.value {
        SimplicialValue::Finite(k) => format!("s = {k}"),
        SimplicialValue::AtLeast(k) if s.certified_infinite => format!("s = inf (searched to {k})"),
        SimplicialValue::AtLeast(k) => format!("s >= {k}"),
    }
}

/// Simplicial distances of sampled boundary pairs.
#[derive(Clone, Debug, Default)]
pub struct SimplicialSamples {
    pub at_most_two: ConditionResult,
    pub finite: ConditionResult,
    pub values: Vec<(SimplicialValue, bool)>,
}

impl Default for ConditionResult {
    fn default() -> Self {
        Tally::default().finish(Rule::All, None)
    }
}

/// Samples boundary pairs and records the `s ≤ 2` and `s < ∞` conditions.
pub fn check_simplicial_bounds(
    d: &ConvexDomain,
    n_pairs: usize,
    cap: usize,
    seed: u64,
) -> Result<SimplicialSamples> {
    if cap < 3 {
        return Err(GeomError::InvalidInput(format!(
            "cap must be at least 3, got {cap}"
        )));
    }
    let mut rng = sampling::rng(seed);
    let mut le2 = Tally::default();
    let mut fin = Tally::default();
    let mut values = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let Some((x, y)) = sample_pair(&mut rng, |r| d.sample_boundary(r)) else {
            continue;
        };
        let (p2, pf, detail) = match d.simplicial_distance(&x, &y, cap) {
            Ok(s) => {
                values.push((s.value, s.exact));
                (at_most_two(&s), finite_value(&s), describe(&s))
            }
            Err(e) => (None, None, e.to_string()),
        };
        le2.record(Witness {
            points: vec![x.clone(), y.clone()],
            element: None,
            pass: p2,
            detail: detail.clone(),
        });
        fin.record(Witness {
            points: vec![x, y],
            element: None,
            pass: pf,
            detail,
        });
    }
    Ok(SimplicialSamples {
        at_most_two: le2.finish(Rule::All, None),
        finite: fin.finish(Rule::All, Some(format!("cap {cap}"))),
        values,
    })
}

/// Boundary points fixed by an automorphism.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryFixedPoints {
    pub points: Vec<ProjPoint>,
    /// Some eigenspace meets the boundary in infinitely many points.
    pub infinite: bool,
}

impl BoundaryFixedPoints {
    pub fn at_least_three(&self) -> bool {
        self.infinite || self.points.len() >= 3
    }
}

/// Eigenlines of `g` on the boundary. Higher dimensional eigenspaces are
/// probed by sampling and by maximizing the margin on their chart slice.
pub fn boundary_fixed_points(
    d: &ConvexDomain,
    g: &ProjMap,
    seed: u64,
) -> Result<BoundaryFixedPoints> {
    let f = d.chart_functional().clone();
    let mut rng = sampling::rng(seed);
    let mut out = BoundaryFixedPoints {
        points: Vec::new(),
        infinite: false,
    };
    for space in real_eigenspaces(g)? {
        let b = &space.basis;
        let fe = b.transpose() * &f;
        if fe.norm() <= 1e-12 {
            continue;
        }
        if b.ncols() == 1 {
            let lift = b.column(0) / fe[0];
            if d.classify_lift(&lift) == Membership::Boundary {
                push_distinct(&mut out.points, ProjPoint::new(lift)?);
            }
            continue;
        }
        eigenspace_points(d, b, &fe, &mut rng, &mut out)?;
        if out.infinite {
            break;
        }
    }
    Ok(out)
}

fn push_distinct(points: &mut Vec<ProjPoint>, x: ProjPoint) -> bool {
    if points.iter().any(|p| p.approx_eq(&x, DISTINCT_TOL)) {
        return false;
    }
    points.push(x);
    true
}

/// Orthonormal basis of the complement of `fe` in its ambient space.
fn complement(fe: &DVector<f64>) -> DMatrix<f64> {
    let k = fe.len();
    let u = fe.normalize();
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(k - 1);
    for i in 0..k {
        let mut v = DVector::zeros(k);
        v[i] = 1.0;
        v -= &u * u.dot(&v);
        for c in &cols {
            v -= c * c.dot(&v);
        }
        if v.norm() > 1e-6 && cols.len() < k - 1 {
            cols.push(v.normalize());
        }
    }
    DMatrix::from_columns(&cols)
}

fn eigenspace_points<R: Rng>(
    d: &ConvexDomain,
    b: &DMatrix<f64>,
    fe: &DVector<f64>,
    rng: &mut R,
    out: &mut BoundaryFixedPoints,
) -> Result<()> {
    let k = b.ncols();
    let base = b * (fe / fe.norm_squared());
    let normal = b * complement(fe);
    let lift_of = |t: &DVector<f64>| &base + &normal * t;
    let margin_of = |t: &DVector<f64>| d.cone_margin(&lift_of(t));

    let mut found: Vec<ProjPoint> = Vec::new();
    let mut interior: Option<DVector<f64>> = None;
    for _ in 0..EIGENSPACE_SAMPLES {
        let v = b * sampling::gaussian_vector(rng, k);
        let fv = v.dot(d.chart_functional());
        if fv.abs() <= 1e-9 * v.norm() {
            continue;
        }
        let lift = v / fv;
        match d.classify_lift(&lift) {
            Membership::Boundary => {
                push_distinct(&mut found, ProjPoint::new(lift)?);
            }
            Membership::Interior => interior = Some(lift),
            Membership::Outside => {}
        }
    }
    if interior.is_none() {
        let starts = std::iter::once(DVector::zeros(k - 1))
            .chain((0..3).map(|_| sampling::gaussian_vector(rng, k - 1)));
        for t0 in starts.collect::<Vec<_>>() {
            let t = maximize(&margin_of, t0, rng);
            let m = margin_of(&t);
            if m > tol::BOUNDARY_BAND {
                interior = Some(lift_of(&t));
                break;
            }
            if m >= -tol::BOUNDARY_BAND {
                push_distinct(&mut found, ProjPoint::new(lift_of(&t))?);
            }
        }
    }
    if let Some(u) = interior {
        if k == 2 {
            let dir = &normal.column(0).into_owned();
            let (ta, tb) = d.line_exits(&u, dir);
            push_distinct(&mut out.points, ProjPoint::new(&u + dir * ta)?);
            push_distinct(&mut out.points, ProjPoint::new(&u + dir * tb)?);
        } else {
            out.infinite = true;
        }
        return Ok(());
    }
    if found.len() >= 2 {
        out.infinite = true;
        return Ok(());
    }
    for x in found {
        push_distinct(&mut out.points, x);
    }
    Ok(())
}

/// Pattern search for the maximum of a concave function.
fn maximize<R: Rng>(
    f: &impl Fn(&DVector<f64>) -> f64,
    mut t: DVector<f64>,
    rng: &mut R,
) -> DVector<f64> {
    let n = t.len();
    let mut dirs: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e
        })
        .collect();
    if n > 1 {
        dirs.extend((0..2 * n).map(|_| sampling::unit_vector(rng, n)));
    }
    let mut best = f(&t);
    let mut step = 1.0;
    while step > 1e-13 {
        let mut moved = false;
        for dir in &dirs {
            for sign in [1.0, -1.0] {
                let cand = &t + dir * (sign * step);
                let v = f(&cand);
                if v > best {
                    best = v;
                    t = cand;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    t
}

/// Per-element data behind conditions (9)–(11).
#[derive(Clone, Debug, Serialize)]
pub struct ElementSummary {
    pub index: usize,
    pub tau: f64,
    pub is_biproximal: bool,
    /// Number of boundary fixed points; absent when `tau` is not positive.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_fixed_points: Option<usize>,
    pub fixed_points_infinite: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis_simplicial: Option<SimplicialValue>,
}

/// Conditions (9)–(11) over the automorphism catalog.
#[derive(Clone, Debug)]
pub struct CatalogChecks {
    pub fixed_points: ConditionResult,
    pub axis_in_boundary: ConditionResult,
    pub axis_simplicial_finite: ConditionResult,
    pub elements: Vec<ElementSummary>,
}

fn fixed_point_witness(
    d: &ConvexDomain,
    i: usize,
    seed: u64,
) -> Result<(Option<bool>, String, f64, BoundaryFixedPoints)> {
    let g = &d.automorphisms()[i];
    let tau = eigen_analysis(g)?.half_log_ratio();
    if tau <= TAU_MIN {
        let fp = BoundaryFixedPoints {
            points: Vec::new(),
            infinite: false,
        };
        return Ok((None, format!("tau = {tau:.3e} not positive"), tau, fp));
    }
    let fp = boundary_fixed_points(d, g, seed)?;
    let detail = if fp.infinite {
        "infinitely many boundary fixed points".to_string()
    } else {
        format!("{} boundary fixed points", fp.points.len())
    };
    Ok((Some(fp.at_least_three()), detail, tau, fp))
}

fn axis_witnesses(
    d: &ConvexDomain,
    i: usize,
    cap: usize,
    seed: u64,
) -> Result<(
    Option<Witness>,
    Option<Witness>,
    crate::dynamics::RankOneVerdict,
)> {
    let v = rank_one_verdict(d, &d.automorphisms()[i], cap, seed)?;
    let (Some(lp), Some(lm)) = (v.attracting_line.clone(), v.repelling_line.clone()) else {
        return Ok((None, None, v));
    };
    let points = vec![lp, lm];
    let seg = Witness {
        points: points.clone(),
        element: Some(i),
        pass: Some(v.segment_in_boundary),
        detail: "axis segment lies in the boundary".into(),
    };
    let (pass, detail) = match &v.s_value {
        Some(s) => (finite_value(s), describe(s)),
        None => (None, "axis endpoints not on the boundary".into()),
    };
    let fin = Witness {
        points,
        element: Some(i),
        pass,
        detail,
    };
    Ok((Some(seg), Some(fin), v))
}

/// Fixed-point counts, axis segments and axis simplicial distances for every
/// catalog element. Only elements with positive translation length enter
/// condition (9); only bi-proximal ones enter (10) and (11).
pub fn check_catalog_elements(d: &ConvexDomain, cap: usize, seed: u64) -> Result<CatalogChecks> {
    if d.automorphisms().is_empty() {
        return Err(GeomError::EmptyCatalog);
    }
    let mut fixed = Tally::default();
    let mut seg = Tally::default();
    let mut fin = Tally::default();
    let mut elements = Vec::new();
    let mut skipped = 0;
    for i in 0..d.automorphisms().len() {
        let element_seed = sampling::derive_seed(seed, i as u64);
        let (pass, detail, tau, fp) = fixed_point_witness(d, i, element_seed)?;
        if pass.is_some() {
            fixed.record(Witness {
                points: fp.points.clone(),
                element: Some(i),
                pass,
                detail,
            });
        } else {
            skipped += 1;
        }
        let (ws, wf, v) = axis_witnesses(d, i, cap, element_seed)?;
        if let Some(w) = ws {
            seg.record(w);
        }
        if let Some(w) = wf {
            fin.record(w);
        }
        elements.push(ElementSummary {
            index: i,
            tau,
            is_biproximal: v.is_biproximal,
            boundary_fixed_points: pass.map(|_| fp.points.len()),
            fixed_points_infinite: fp.infinite,
            verdict: v.verdict,
            axis_simplicial: v.s_value.as_ref().map(|s| s.value),
        });
    }
    let none_biprox =
        (seg.passes + seg.fails + seg.unknown == 0).then(|| "no bi-proximal elements".to_string());
    Ok(CatalogChecks {
        fixed_points: fixed.finish(
            Rule::All,
            Some(format!("{skipped} elements with non-positive tau skipped")),
        ),
        axis_in_boundary: seg.finish(Rule::All, none_biprox.clone()),
        axis_simplicial_finite: fin.finish(Rule::All, none_biprox),
        elements,
    })
}

/// Re-evaluates a recorded witness.
pub fn replay(
    d: &ConvexDomain,
    condition: Condition,
    w: &Witness,
    cap: usize,
    seed: u64,
) -> Result<Option<bool>> {
    let pair = || -> Result<(&ProjPoint, &ProjPoint)> {
        match w.points.as_slice() {
            [x, y, ..] => Ok((x, y)),
            _ => Err(GeomError::InvalidInput("witness needs two points".into())),
        }
    };
    let element = || -> Result<usize> {
        w.element
            .filter(|&i| i < d.automorphisms().len())
            .ok_or_else(|| GeomError::InvalidInput("witness has no valid element".into()))
    };
    match condition {
        Condition::HigherRank => {
            let (p, q) = pair()?;
            Ok(triangle_through(d, p, q)?.0)
        }
        Condition::ExtremeSet => match w.points.as_slice() {
            [x] => Ok(Some(!d.is_extreme(x)?)),
            pts => Ok(Some(extreme_sequence_closed(d, pts)?)),
        },
        Condition::ExtremeSegments => {
            let (x, y) = pair()?;
            Ok(Some(d.segment_in_boundary(x, y)?))
        }
        Condition::SimplicialAtMostTwo => {
            let (x, y) = pair()?;
            Ok(at_most_two(&d.simplicial_distance(x, y, cap)?))
        }
        Condition::SimplicialFinite => {
            let (x, y) = pair()?;
            Ok(finite_value(&d.simplicial_distance(x, y, cap)?))
        }
        Condition::CentralizerIndex => Ok(None),
        Condition::FixedPoints => {
            let i = element()?;
            Ok(fixed_point_witness(d, i, sampling::derive_seed(seed, i as u64))?.0)
        }
        Condition::AxisInBoundary => {
            let i = element()?;
            Ok(
                axis_witnesses(d, i, cap, sampling::derive_seed(seed, i as u64))?
                    .0
                    .and_then(|w| w.pass),
            )
        }
        Condition::AxisSimplicialFinite => {
            let i = element()?;
            Ok(
                axis_witnesses(d, i, cap, sampling::derive_seed(seed, i as u64))?
                    .1
                    .and_then(|w| w.pass),
            )
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankVerdict {
    RankOneEvidence,
    HigherRankEvidence,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankConfig {
    pub pairs: usize,
    pub samples: usize,
    pub cap: usize,
    pub seed: u64,
}

impl Default for RankConfig {
    fn default() -> Self {
        Self {
            pairs: 500,
            samples: 200,
            cap: 3,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Coherence {
    /// Witnesses of conditions (4), (5), (10), (11) whose direction disagrees
    /// with the majority.
    pub violations: usize,
    pub agreeing: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    pub schema: &'static str,
    pub domain: String,
    pub ambient_dim: usize,
    pub reducible: bool,
    pub conditions: BTreeMap<&'static str, ConditionResult>,
    pub verdict: RankVerdict,
    pub coherence: Coherence,
    pub seeds: BTreeMap<&'static str, u64>,
    pub caps: RankConfig,
    pub elements: Vec<ElementSummary>,
    /// Per-pair simplicial distances and their exactness.
    #[serde(skip)]
    pub pair_values: Vec<(SimplicialValue, bool)>,
    /// Witness directions per coherent condition, over all samples.
    #[serde(skip)]
    pub directions: BTreeMap<Condition, (usize, usize)>,
}

impl RankReport {
    pub fn condition(&self, c: Condition) -> &ConditionResult {
        &self.conditions[c.key()]
    }

    /// CSV rows of per-pair simplicial distances and per-element translation
    /// lengths.
    pub fn csv(&self) -> String {
        let mut out = String::from("record,index,value,qualifier\n");
        for (i, (v, exact)) in self.pair_values.iter().enumerate() {
            let (k, q) = match v {
                SimplicialValue::Finite(k) => (*k, "exact"),
                SimplicialValue::AtLeast(k) => (*k, "at_least"),
            };
            let q = if *exact { q } else { "upper_bound" };
            out.push_str(&format!("pair_s,{i},{k},{q}\n"));
        }
        for e in &self.elements {
            out.push_str(&format!("element_tau,{},{},\n", e.index, e.tau));
        }
        out
    }
}

fn overall(conditions: &BTreeMap<&'static str, ConditionResult>) -> RankVerdict {
    let passes = conditions
        .values()
        .filter(|c| c.outcome == Outcome::Pass)
        .count();
    let fails = conditions
        .values()
        .filter(|c| c.outcome == Outcome::Fail)
        .count();
    match (passes, fails) {
        (p, 0) if p > 0 => RankVerdict::HigherRankEvidence,
        (0, f) if f > 0 => RankVerdict::RankOneEvidence,
        _ => RankVerdict::Mixed,
    }
}

/// Runs every check concurrently and aggregates the report.
pub fn rank_report(d: &ConvexDomain, config: &RankConfig) -> Result<RankReport> {
    let seed_of = |c: Condition| condition_seed(config, c);
    let (higher, extreme, segments, simplicial, catalog) = std::thread::scope(|s| {
        let higher =
            s.spawn(|| check_higher_rank_segments(d, config.pairs, seed_of(Condition::HigherRank)));
        let extreme =
            s.spawn(|| check_extreme_set(d, config.samples, seed_of(Condition::ExtremeSet)));
        let segments = s.spawn(|| {
            check_pairwise_extreme_segments(d, config.pairs, seed_of(Condition::ExtremeSegments))
        });
        let simplicial = s.spawn(|| {
            check_simplicial_bounds(
                d,
                config.pairs,
                config.cap,
                seed_of(Condition::SimplicialAtMostTwo),
            )
        });
        let catalog =
            s.spawn(|| check_catalog_elements(d, config.cap, seed_of(Condition::FixedPoints)));
        (
            higher.join().expect("check thread panicked"),
            extreme.join().expect("check thread panicked"),
            segments.join().expect("check thread panicked"),
            simplicial.join().expect("check thread panicked"),
            catalog.join().expect("check thread panicked"),
        )
    });
    let simplicial = simplicial?;
    let (fixed, axis_seg, axis_fin, elements) = match catalog {
        Ok(c) => (
            c.fixed_points,
            c.axis_in_boundary,
            c.axis_simplicial_finite,
            c.elements,
        ),
        Err(GeomError::EmptyCatalog) => {
            let empty = || ConditionResult {
                note: Some("empty automorphism catalog".into()),
                ..ConditionResult::default()
            };
            (empty(), empty(), empty(), Vec::new())
        }
        Err(e) => return Err(e),
    };

    let mut directions = BTreeMap::new();
    for (c, r) in [
        (Condition::ExtremeSegments, &segments),
        (Condition::SimplicialAtMostTwo, &simplicial.at_most_two),
        (Condition::AxisInBoundary, &axis_seg),
        (Condition::AxisSimplicialFinite, &axis_fin),
    ] {
        directions.insert(c, (r.passes, r.fails));
    }
    let (t, f) = directions
        .values()
        .fold((0, 0), |(t, f), (p, q)| (t + p, f + q));
    let coherence = Coherence {
        violations: t.min(f),
        agreeing: t.max(f),
    };

    let mut conditions = BTreeMap::new();
    conditions.insert(Condition::HigherRank.key(), higher);
    conditions.insert(Condition::ExtremeSet.key(), extreme);
    conditions.insert(Condition::ExtremeSegments.key(), segments);
    conditions.insert(Condition::SimplicialAtMostTwo.key(), simplicial.at_most_two);
    conditions.insert(Condition::SimplicialFinite.key(), simplicial.finite);
    conditions.insert(
        Condition::CentralizerIndex.key(),
        ConditionResult::not_evaluable("group-theoretic condition"),
    );
    conditions.insert(Condition::FixedPoints.key(), fixed);
    conditions.insert(Condition::AxisInBoundary.key(), axis_seg);
    conditions.insert(Condition::AxisSimplicialFinite.key(), axis_fin);
    let verdict = overall(&conditions);

    let seeds = Condition::ALL
        .into_iter()
        .filter(|&c| c != Condition::CentralizerIndex)
        .map(|c| (c.key(), condition_seed(config, c)))
        .collect();

    Ok(RankReport {
        schema: SCHEMA,
        domain: d.name().to_string(),
        ambient_dim: d.ambient_dim(),
        reducible: d.is_reducible(),
        conditions,
        verdict,
        coherence,
        seeds,
        caps: *config,
        elements,
        pair_values: simplicial.values,
        directions,
    })
}

/// Seed under which the witnesses of `c` were produced in a report.
pub fn condition_seed(config: &RankConfig, c: Condition) -> u64 {
    let c = match c {
        Condition::SimplicialFinite => Condition::SimplicialAtMostTwo,
        Condition::AxisInBoundary | Condition::AxisSimplicialFinite => Condition::FixedPoints,
        c => c,
    };
    sampling::derive_seed(config.seed, c.number() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::builtin;

    fn small(seed: u64) -> RankConfig {
        RankConfig {
            pairs: 60,
            samples: 40,
            cap: 3,
            seed,
        }
    }

    #[test]
    fn simplex_diagonal_fixes_three_vertices() {
        let d = builtin("simplex2").unwrap();
        let g = ProjMap::diagonal(&[4.0, 2.0, 1.0]).unwrap();
        let fp = boundary_fixed_points(&d, &g, 1).unwrap();
        assert!(!fp.infinite);
        assert_eq!(fp.points.len(), 3);
    }

    #[test]
    fn disk_boost_fixes_two_points() {
        let d = builtin("disk").unwrap();
        let e = std::f64::consts::E;
        let g = ProjMap::from_rows(&[
            vec![(e + 1.0 / e) / 2.0, 0.0, (e - 1.0 / e) / 2.0],
            vec![0.0, 1.0, 0.0],
            vec![(e - 1.0 / e) / 2.0, 0.0, (e + 1.0 / e) / 2.0],
        ])
        .unwrap();
        let fp = boundary_fixed_points(&d, &g, 1).unwrap();
        assert!(!fp.infinite);
        assert_eq!(fp.points.len(), 2);
        assert!(!fp.at_least_three());
    }

    #[test]
    fn psd_congruence_has_three_fixed_points() {
        let d = builtin("psd3").unwrap();
        let g = d.automorphisms()[0].clone();
        let fp = boundary_fixed_points(&d, &g, 3).unwrap();
        assert!(fp.at_least_three(), "{fp:?}");
    }

    #[test]
    fn cone_over_disk_fixed_points() {
        let d = builtin("cone_disk").unwrap();
        let autos = d.automorphisms();
        let scaling = boundary_fixed_points(&d, &autos[3], 5).unwrap();
        assert!(scaling.infinite);
        // Rotating the base while scaling the apex fixes only the apex and the
        // centre of the base.
        let rotation = boundary_fixed_points(&d, &autos[1], 5).unwrap();
        assert!(!rotation.infinite);
        assert_eq!(rotation.points.len(), 2);
    }

    #[test]
    fn verdicts_on_catalog_domains() {
        for (id, want) in [
            ("ball3", RankVerdict::RankOneEvidence),
            ("psd3", RankVerdict::HigherRankEvidence),
            ("simplex2", RankVerdict::HigherRankEvidence),
        ] {
            let d = builtin(id).unwrap();
            let r = rank_report(&d, &small(7)).unwrap();
            assert_eq!(r.verdict, want, "{id}: {:#?}", r.conditions);
            assert_eq!(r.coherence.violations, 0, "{id}");
        }
        assert!(
            rank_report(&builtin("simplex2").unwrap(), &small(7))
                .unwrap()
                .reducible
        );
    }

    #[test]
    fn witnesses_replay() {
        for id in ["disk", "psd3", "simplex2", "square"] {
            let d = builtin(id).unwrap();
            let cfg = small(11);
            let r = rank_report(&d, &cfg).unwrap();
            for c in Condition::ALL {
                for w in &r.condition(c).witnesses {
                    let again = replay(&d, c, w, cfg.cap, condition_seed(&cfg, c)).unwrap();
                    assert_eq!(again, w.pass, "{id} {}: {w:?}", c.key());
                }
                if r.condition(c).outcome == Outcome::Fail {
                    assert!(r
                        .condition(c)
                        .witnesses
                        .iter()
                        .any(|w| w.pass == Some(false)));
                }
            }
        }
    }

    #[test]
    fn triangles_in_the_psd_cone() {
        let d = builtin("psd3").unwrap();
        let r = check_higher_rank_segments(&d, 40, 2);
        assert_eq!(r.outcome, Outcome::Pass, "{r:?}");
        let disk = builtin("disk").unwrap();
        assert_eq!(
            check_higher_rank_segments(&disk, 20, 2).outcome,
            Outcome::Fail
        );
    }

    #[test]
    fn csv_has_one_row_per_pair_and_element() {
        let d = builtin("simplex2").unwrap();
        let r = rank_report(&d, &small(3)).unwrap();
        let rows = r.csv().lines().count();
        assert_eq!(rows, 1 + r.pair_values.len() + r.elements.len());
    }

    #[test]
    fn cap_below_three_is_rejected() {
        let d = builtin("disk").unwrap();
        assert!(check_simplicial_bounds(&d, 5, 2, 0).is_err());
    }
}
