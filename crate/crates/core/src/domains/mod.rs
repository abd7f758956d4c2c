//! Properly convex domains: membership, chords, faces, extreme points and the
//! simplicial distance on the boundary.
//!
//! Every domain is described by the open convex cone over it. Membership is
//! decided by a *cone margin*: a concave function, homogeneous of degree one,
//! that is positive on the open cone, zero on its boundary and negative off
//! the closed cone. Evaluated at the chart lift of a point (the representative
//! on which the chart functional equals one) it is a distance-like margin in
//! chart coordinates.

mod catalog;
mod faces;
pub mod psd;

use nalgebra::{DVector, Vector3};
use rand::Rng;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::projlin::{ProjMap, ProjPoint};
use crate::sampling;
use crate::tol;

pub use catalog::{
    builtin, builtin_ids, koecher_vinberg_families, symmetric_catalog, CatalogEntry, ConeFamily,
    DomainMeta, DomainSpec,
};
pub use faces::{FaceData, FaceDescriptor, FactorFace, SimplicialResult, SimplicialValue};

/// A bounded convex polytope in an affine chart, in V- and H-representation.
#[derive(Clone, Debug)]
pub struct Polytope {
    vertices: Vec<DVector<f64>>,
    /// `(a, b)` with `a·x ≤ b` and `|a| = 1`.
    halfspaces: Vec<(DVector<f64>, f64)>,
    /// Vertex indices on each facet.
    incidence: Vec<Vec<usize>>,
}

impl Polytope {
    /// Incidence tolerance between vertices and facet hyperplanes.
    const INCIDENCE_TOL: f64 = 1e-9;

    pub fn new(vertices: Vec<DVector<f64>>, halfspaces: Vec<(DVector<f64>, f64)>) -> Result<Self> {
        let n = vertices
            .first()
            .map(|v| v.len())
            .ok_or_else(|| GeomError::InvalidDomain("polytope has no vertices".into()))?;
        if let Some(i) = vertices.iter().position(|v| v.len() != n) {
            return Err(GeomError::InvalidDomain(format!(
                "vertex {i} has dimension {} (expected {n})",
                vertices[i].len()
            )));
        }
        let mut hs = Vec::with_capacity(halfspaces.len());
        for (j, (a, b)) in halfspaces.into_iter().enumerate() {
            let norm = a.norm();
            if a.len() != n || norm == 0.0 {
                return Err(GeomError::InvalidDomain(format!(
                    "halfspace {j} is malformed"
                )));
            }
            hs.push((a / norm, b / norm));
        }
        let incidence = hs
            .iter()
            .map(|(a, b)| {
                (0..vertices.len())
                    .filter(|&i| (b - a.dot(&vertices[i])).abs() <= Self::INCIDENCE_TOL)
                    .collect()
            })
            .collect();
        Ok(Self {
            vertices,
            halfspaces: hs,
            incidence,
        })
    }

    /// The square `[-1,1]²`.
    pub fn square() -> Self {
        let v = |x: f64, y: f64| DVector::from_vec(vec![x, y]);
        Self::new(
            vec![v(1.0, 1.0), v(-1.0, 1.0), v(-1.0, -1.0), v(1.0, -1.0)],
            vec![
                (v(1.0, 0.0), 1.0),
                (v(0.0, 1.0), 1.0),
                (v(-1.0, 0.0), 1.0),
                (v(0.0, -1.0), 1.0),
            ],
        )
        .expect("square is well formed")
    }

    pub fn affine_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[(DVector<f64>, f64)] {
        &self.halfspaces
    }

    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    /// Homogeneous slack `b·t − a·x` of facet `j` at `(x, t)`.
    fn slack(&self, j: usize, v: &DVector<f64>) -> f64 {
        let n = self.affine_dim();
        let (a, b) = &self.halfspaces[j];
        b * v[n] - a.dot(&v.rows(0, n))
    }

    fn lifted_vertex(&self, i: usize) -> DVector<f64> {
        let n = self.affine_dim();
        let mut v = DVector::zeros(n + 1);
        v.rows_mut(0, n).copy_from(&self.vertices[i]);
        v[n] = 1.0;
        v
    }
}

#[derive(Clone, Debug)]
pub enum DomainKind {
    /// The open `k`-simplex `{x_i > 0}` in `P(R^{k+1})`.
    Simplex {
        dim: usize,
    },
    /// The unit ball `{|x| < 1}` in the chart `x_{n+1} = 1` of `P(R^{n+1})`.
    Ellipsoid {
        dim: usize,
    },
    Polytope(Polytope),
    /// Positive definite 3×3 matrices in `P(Sym₃) = P(R⁶)`.
    PsdCone3,
    /// The projectivized direct sum of the factor cones.
    Product(Vec<ConvexDomain>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

/// The two boundary points of the line through two interior points, ordered
/// `a, x, y, b`. `t_a < 0 < 1 < t_b` locate them on `u + t(w − u)` where `u`,
/// `w` are the chart lifts of `x`, `y`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryChord {
    pub a: ProjPoint,
    pub b: ProjPoint,
    pub t_a: f64,
    pub t_b: f64,
}

#[derive(Clone, Debug)]
pub struct ConvexDomain {
    name: String,
    kind: DomainKind,
    chart: DVector<f64>,
    automorphisms: Vec<ProjMap>,
}

impl ConvexDomain {
    fn build(name: impl Into<String>, kind: DomainKind) -> Self {
        let chart = match &kind {
            DomainKind::Simplex { dim } => DVector::from_element(dim + 1, 1.0),
            DomainKind::Ellipsoid { dim } => {
                let mut f = DVector::zeros(dim + 1);
                f[*dim] = 1.0;
                f
            }
            DomainKind::Polytope(p) => {
                let n = p.affine_dim();
                let mut f = DVector::zeros(n + 1);
                f[n] = 1.0;
                f
            }
            DomainKind::PsdCone3 => DVector::from_vec(vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]),
            DomainKind::Product(fs) => {
                let parts: Vec<f64> = fs.iter().flat_map(|f| f.chart.iter().copied()).collect();
                DVector::from_vec(parts)
            }
        };
        Self {
            name: name.into(),
            kind,
            chart,
            automorphisms: Vec::new(),
        }
    }

    pub fn simplex(dim: usize) -> Self {
        let mut d = Self::build(format!("simplex{dim}"), DomainKind::Simplex { dim });
        d.automorphisms = catalog::simplex_automorphisms(dim);
        d
    }

    pub fn ellipsoid(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GeomError::InvalidDomain(
                "ellipsoid dimension must be ≥ 1".into(),
            ));
        }
        let mut d = Self::build(format!("ball{dim}"), DomainKind::Ellipsoid { dim });
        d.automorphisms = catalog::ellipsoid_automorphisms(dim);
        Ok(d)
    }

    pub fn polytope(name: impl Into<String>, p: Polytope) -> Self {
        Self::build(name, DomainKind::Polytope(p))
    }

    pub fn psd_cone3() -> Self {
        let mut d = Self::build("psd3", DomainKind::PsdCone3);
        d.automorphisms = catalog::psd_automorphisms();
        d
    }

    pub fn product(factors: Vec<ConvexDomain>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(GeomError::InvalidDomain(
                "a product needs at least two factors".into(),
            ));
        }
        let name = format!(
            "product({})",
            factors
                .iter()
                .map(|f| f.name.as_str())
                .collect::<Vec<_>>()
                .join(",")
        );
        let automorphisms = catalog::product_automorphisms(&factors);
        let mut d = Self::build(name, DomainKind::Product(factors));
        d.automorphisms = automorphisms;
        Ok(d)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_automorphisms(mut self, autos: Vec<ProjMap>) -> Self {
        self.automorphisms = autos;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn automorphisms(&self) -> &[ProjMap] {
        &self.automorphisms
    }

    pub fn chart_functional(&self) -> &DVector<f64> {
        &self.chart
    }

    /// Dimension `d` of the ambient `R^d`.
    pub fn ambient_dim(&self) -> usize {
        self.chart.len()
    }

    pub fn is_strictly_convex(&self) -> bool {
        matches!(self.kind, DomainKind::Ellipsoid { .. })
    }

    /// Reducibility by construction: products and simplices of dimension ≥ 1.
    pub fn is_reducible(&self) -> bool {
        match self.kind {
            DomainKind::Simplex { dim } => dim >= 1,
            DomainKind::Product(_) => true,
            _ => false,
        }
    }

    fn check_dim(&self, x: &ProjPoint) -> Result<()> {
        if x.dim() != self.ambient_dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.ambient_dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Representative with chart functional one.
    pub fn chart_lift(&self, x: &ProjPoint) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        let u = x.unit();
        let f = self.chart.dot(&u);
        if f.abs() <= 1e-12 * self.chart.norm() {
            return Err(GeomError::ChartOverflow);
        }
        Ok(u / f)
    }

    /// Point of the affine chart given by `n = d − 1` coordinates. Ellipsoids
    /// and polytopes use `(x, 1)`; simplices use the first `k` barycentric
    /// coordinates. Other kinds take homogeneous coordinates only.
    pub fn embed_chart(&self, coords: &[f64]) -> Result<ProjPoint> {
        let d = self.ambient_dim();
        if coords.len() == d {
            return ProjPoint::from_slice(coords);
        }
        if coords.len() + 1 != d {
            return Err(GeomError::DimensionMismatch {
                expected: d,
                found: coords.len(),
            });
        }
        let mut v = coords.to_vec();
        match self.kind {
            DomainKind::Ellipsoid { .. } | DomainKind::Polytope(_) => v.push(1.0),
            DomainKind::Simplex { .. } => v.push(1.0 - coords.iter().sum::<f64>()),
            _ => {
                return Err(GeomError::InvalidInput(format!(
                    "{} takes homogeneous coordinates ({d} values)",
                    self.name
                )))
            }
        }
        ProjPoint::from_slice(&v)
    }

    /// Cone margin of an arbitrary vector.
    pub fn cone_margin(&self, v: &DVector<f64>) -> f64 {
        match &self.kind {
            DomainKind::Simplex { .. } => v.min(),
            DomainKind::Ellipsoid { dim } => v[*dim] - v.rows(0, *dim).norm(),
            DomainKind::Polytope(p) => (0..p.halfspaces.len())
                .map(|j| p.slack(j, v))
                .fold(f64::INFINITY, f64::min),
            DomainKind::PsdCone3 => psd::min_eigenvalue(v),
            DomainKind::Product(fs) => {
                let mut off = 0;
                let mut m = f64::INFINITY;
                for f in fs {
                    let k = f.ambient_dim();
                    m = m.min(f.cone_margin(&v.rows(off, k).into_owned()));
                    off += k;
                }
                m
            }
        }
    }

    pub fn classify_lift(&self, v: &DVector<f64>) -> Membership {
        let m = self.cone_margin(v);
        if m > tol::BOUNDARY_BAND {
            Membership::Interior
        } else if m >= -tol::BOUNDARY_BAND {
            Membership::Boundary
        } else {
            Membership::Outside
        }
    }

    /// Margin at the chart lift of `x`.
    pub fn margin(&self, x: &ProjPoint) -> Result<f64> {
        Ok(self.cone_margin(&self.chart_lift(x)?))
    }

    pub fn contains(&self, x: &ProjPoint) -> Result<Membership> {
        Ok(self.classify_lift(&self.chart_lift(x)?))
    }

    /// Like [`contains`](Self::contains) but points at infinity of the chart
    /// count as outside.
    pub fn membership(&self, x: &ProjPoint) -> Membership {
        match self.contains(x) {
            Ok(m) => m,
            Err(_) => Membership::Outside,
        }
    }

    pub(crate) fn require(&self, x: &ProjPoint, want: Membership) -> Result<DVector<f64>> {
        let v = self.chart_lift(x)?;
        if self.classify_lift(&v) != want {
            return Err(match want {
                Membership::Interior => GeomError::NotInterior,
                _ => GeomError::NotBoundary,
            });
        }
        Ok(v)
    }

    /// Euclidean distance between chart lifts.
    pub fn chart_distance(&self, x: &ProjPoint, y: &ProjPoint) -> Result<f64> {
        Ok((self.chart_lift(x)? - self.chart_lift(y)?).norm())
    }

    /// A fixed interior point.
    pub fn center(&self) -> ProjPoint {
        ProjPoint::new(self.center_lift()).expect("nonzero center")
    }

    fn center_lift(&self) -> DVector<f64> {
        match &self.kind {
            DomainKind::Simplex { dim } => DVector::from_element(dim + 1, 1.0 / (dim + 1) as f64),
            DomainKind::Ellipsoid { dim } => {
                let mut v = DVector::zeros(dim + 1);
                v[*dim] = 1.0;
                v
            }
            DomainKind::Polytope(p) => {
                let n = p.affine_dim();
                let mut v = DVector::zeros(n + 1);
                for i in 0..p.vertices.len() {
                    v += p.lifted_vertex(i);
                }
                v / p.vertices.len() as f64
            }
            DomainKind::PsdCone3 => psd::from_matrix(&nalgebra::Matrix3::identity()) / 3.0,
            DomainKind::Product(fs) => {
                let w = 1.0 / fs.len() as f64;
                let parts: Vec<f64> = fs
                    .iter()
                    .flat_map(|f| (f.center_lift() * w).iter().copied().collect::<Vec<_>>())
                    .collect();
                DVector::from_vec(parts)
            }
        }
    }

    /// Parameters `t_a < 0 < t_b` where `u + t·dir` meets the boundary, for an
    /// interior chart lift `u` and a chart-tangent direction `dir`.
    pub(crate) fn line_exits(&self, u: &DVector<f64>, dir: &DVector<f64>) -> (f64, f64) {
        match &self.kind {
            DomainKind::Simplex { .. } => linear_exits((0..u.len()).map(|i| (u[i], dir[i]))),
            DomainKind::Polytope(p) => {
                linear_exits((0..p.halfspaces.len()).map(|j| (p.slack(j, u), p.slack(j, dir))))
            }
            DomainKind::Ellipsoid { dim } => {
                let n = *dim;
                // (u_l + t δ_l)² = |u_r + t δ_r|²
                let (ul, dl) = (u[n], dir[n]);
                let ur = u.rows(0, n);
                let dr = dir.rows(0, n);
                let qa = dl * dl - dr.norm_squared();
                let qb = 2.0 * (ul * dl - ur.dot(&dr));
                let qc = ul * ul - ur.norm_squared();
                let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
                let q = -0.5 * (qb + qb.signum() * disc);
                let (r1, r2) = if q == 0.0 {
                    let r = (-qc / qa).sqrt();
                    (-r, r)
                } else {
                    (q / qa, qc / q)
                };
                (r1.min(r2), r1.max(r2))
            }
            DomainKind::PsdCone3 => psd_exits(u, dir),
            DomainKind::Product(_) => self.line_exits_bisection(u, dir),
        }
    }

    /// Boundary crossings found by bisection on the cone margin. Used for
    /// products and as an independent check of the closed forms.
    pub fn line_exits_bisection(&self, u: &DVector<f64>, dir: &DVector<f64>) -> (f64, f64) {
        let exit = |sign: f64| {
            let mut lo = 0.0;
            let mut hi = 1.0;
            while self.cone_margin(&(u + dir * (sign * hi))) > 0.0 {
                lo = hi;
                hi *= 2.0;
                if hi > 1e12 {
                    return sign * hi;
                }
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.cone_margin(&(u + dir * (sign * mid))) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            sign * lo
        };
        (exit(-1.0), exit(1.0))
    }

    fn chord_from_exits(
        &self,
        u: &DVector<f64>,
        w: &DVector<f64>,
        (t_a, t_b): (f64, f64),
    ) -> Result<BoundaryChord> {
        let dir = w - u;
        Ok(BoundaryChord {
            a: ProjPoint::new(u + &dir * t_a)?,
            b: ProjPoint::new(u + &dir * t_b)?,
            t_a,
            t_b,
        })
    }

    fn chord_lifts(&self, x: &ProjPoint, y: &ProjPoint) -> Result<(DVector<f64>, DVector<f64>)> {
        let u = self.require(x, Membership::Interior)?;
        let w = self.require(y, Membership::Interior)?;
        if x.approx_eq(y, tol::POINT_EQ) {
            return Err(GeomError::CoincidentPoints);
        }
        Ok((u, w))
    }

    /// The boundary points of the line through interior `x ≠ y`.
    pub fn chord(&self, x: &ProjPoint, y: &ProjPoint) -> Result<BoundaryChord> {
        let (u, w) = self.chord_lifts(x, y)?;
        let exits = self.line_exits(&u, &(&w - &u));
        self.chord_from_exits(&u, &w, exits)
    }

    /// [`chord`](Self::chord) computed by bisection for every kind.
    pub fn chord_bisection(&self, x: &ProjPoint, y: &ProjPoint) -> Result<BoundaryChord> {
        let (u, w) = self.chord_lifts(x, y)?;
        let exits = self.line_exits_bisection(&u, &(&w - &u));
        self.chord_from_exits(&u, &w, exits)
    }

    /// Random chart-tangent unit direction.
    fn tangent_direction<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        let f = &self.chart;
        loop {
            let g = sampling::gaussian_vector(rng, self.ambient_dim());
            let t = &g - f * (f.dot(&g) / f.norm_squared());
            let n = t.norm();
            if n > 1e-8 {
                return t / n;
            }
        }
    }

    /// Chart lift of a random interior point.
    pub fn sample_interior_lift<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        match &self.kind {
            DomainKind::Simplex { dim } => sampling::dirichlet(rng, dim + 1),
            DomainKind::Ellipsoid { dim } => {
                let mut v = DVector::zeros(dim + 1);
                v.rows_mut(0, *dim)
                    .copy_from(&sampling::ball_point(rng, *dim));
                v[*dim] = 1.0;
                v
            }
            DomainKind::Polytope(p) => {
                let w = sampling::dirichlet(rng, p.vertices.len());
                let mut v = DVector::zeros(p.affine_dim() + 1);
                for i in 0..p.vertices.len() {
                    v += p.lifted_vertex(i) * w[i];
                }
                v
            }
            DomainKind::PsdCone3 => {
                let g = nalgebra::Matrix3::from_fn(|_, _| {
                    rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, rng)
                });
                let m = g * g.transpose() + nalgebra::Matrix3::identity() * 1e-3;
                psd::from_matrix(&(m / m.trace()))
            }
            DomainKind::Product(fs) => {
                let w = sampling::dirichlet(rng, fs.len());
                let parts: Vec<f64> = fs
                    .iter()
                    .enumerate()
                    .flat_map(|(i, f)| {
                        (f.sample_interior_lift(rng) * w[i])
                            .iter()
                            .copied()
                            .collect::<Vec<_>>()
                    })
                    .collect();
                DVector::from_vec(parts)
            }
        }
    }

    pub fn sample_interior<R: Rng>(&self, rng: &mut R) -> ProjPoint {
        ProjPoint::new(self.sample_interior_lift(rng)).expect("nonzero sample")
    }

    /// A random boundary point: the exit of a random chart ray from a random
    /// interior point.
    pub fn sample_boundary<R: Rng>(&self, rng: &mut R) -> ProjPoint {
        let u = self.sample_interior_lift(rng);
        let dir = self.tangent_direction(rng);
        let (_, t_b) = self.line_exits(&u, &dir);
        ProjPoint::new(u + dir * t_b).expect("nonzero boundary point")
    }

    /// A random extreme point.
    pub fn sample_extreme<R: Rng>(&self, rng: &mut R) -> ProjPoint {
        ProjPoint::new(self.sample_extreme_lift(rng)).expect("nonzero extreme point")
    }

    fn sample_extreme_lift<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        match &self.kind {
            DomainKind::Simplex { dim } => {
                let mut v = DVector::zeros(dim + 1);
                v[rng.random_range(0..=*dim)] = 1.0;
                v
            }
            DomainKind::Polytope(p) => p.lifted_vertex(rng.random_range(0..p.vertices.len())),
            DomainKind::Ellipsoid { dim } => {
                let mut v = DVector::zeros(dim + 1);
                v.rows_mut(0, *dim)
                    .copy_from(&sampling::unit_vector(rng, *dim));
                v[*dim] = 1.0;
                v
            }
            DomainKind::PsdCone3 => {
                let z = Vector3::from_iterator(sampling::unit_vector(rng, 3).iter().copied());
                psd::outer(&z)
            }
            DomainKind::Product(fs) => {
                let i = rng.random_range(0..fs.len());
                self.embed_factor(i, &fs[i].sample_extreme_lift(rng))
            }
        }
    }

    /// A convergent sequence of extreme points together with its limit. Finite
    /// extreme sets give constant sequences.
    pub fn sample_extreme_sequence<R: Rng>(
        &self,
        rng: &mut R,
        len: usize,
    ) -> (Vec<ProjPoint>, ProjPoint) {
        let (seq, lim) = self.extreme_sequence_lifts(rng, len);
        (
            seq.into_iter()
                .map(|v| ProjPoint::new(v).expect("nonzero"))
                .collect(),
            ProjPoint::new(lim).expect("nonzero"),
        )
    }

    fn extreme_sequence_lifts<R: Rng>(
        &self,
        rng: &mut R,
        len: usize,
    ) -> (Vec<DVector<f64>>, DVector<f64>) {
        match &self.kind {
            DomainKind::Simplex { .. } | DomainKind::Polytope(_) => {
                let v = self.sample_extreme_lift(rng);
                (vec![v.clone(); len], v)
            }
            DomainKind::Ellipsoid { dim } => {
                let z = sampling::unit_vector(rng, *dim);
                let w = sampling::unit_vector(rng, *dim);
                let lift = |z: DVector<f64>| {
                    let mut v = DVector::zeros(dim + 1);
                    v.rows_mut(0, *dim).copy_from(&z.normalize());
                    v[*dim] = 1.0;
                    v
                };
                let seq = (1..=len)
                    .map(|j| lift(&z + &w * 0.5f64.powi(j as i32)))
                    .collect();
                (seq, lift(z))
            }
            DomainKind::PsdCone3 => {
                let z = Vector3::from_iterator(sampling::unit_vector(rng, 3).iter().copied());
                let w = Vector3::from_iterator(sampling::unit_vector(rng, 3).iter().copied());
                let seq = (1..=len)
                    .map(|j| {
                        let p = (z + w * 0.5f64.powi(j as i32)).normalize();
                        psd::outer(&p)
                    })
                    .collect();
                (seq, psd::outer(&z))
            }
            DomainKind::Product(fs) => {
                let i = rng.random_range(0..fs.len());
                let (seq, lim) = fs[i].extreme_sequence_lifts(rng, len);
                (
                    seq.iter().map(|v| self.embed_factor(i, v)).collect(),
                    self.embed_factor(i, &lim),
                )
            }
        }
    }

    fn factor_offsets(&self) -> Vec<usize> {
        match &self.kind {
            DomainKind::Product(fs) => fs
                .iter()
                .scan(0, |off, f| {
                    let o = *off;
                    *off += f.ambient_dim();
                    Some(o)
                })
                .collect(),
            _ => vec![0],
        }
    }

    fn embed_factor(&self, i: usize, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.ambient_dim());
        let off = self.factor_offsets()[i];
        out.rows_mut(off, v.len()).copy_from(v);
        out
    }

    /// Checks that `g` and `g⁻¹` keep sampled interior points in the closed
    /// domain.
    pub fn verify_automorphism(&self, g: &ProjMap, n_samples: usize, seed: u64) -> Result<()> {
        if g.dim() != self.ambient_dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.ambient_dim(),
                found: g.dim(),
            });
        }
        let mut rng = sampling::rng(seed);
        let ginv = g.inverse();
        let mut points = vec![self.center()];
        points.extend((0..n_samples).map(|_| self.sample_interior(&mut rng)));
        for (i, x) in points.iter().enumerate() {
            for (label, h) in [("g", g), ("g^-1", &ginv)] {
                let y = h.apply(x)?;
                if self.membership(&y) == Membership::Outside {
                    return Err(GeomError::NotAutomorphism(format!(
                        "{label} maps sample {i} outside {}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether `g` is (up to projective equality) one of the catalog maps.
    pub fn catalog_index(&self, g: &ProjMap) -> Option<usize> {
        self.automorphisms.iter().position(|h| h.distance(g) < 1e-9)
    }
}

/// Exits for constraints `s_j(u) + t·s_j(dir) ≥ 0`.
fn linear_exits(pairs: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    let mut t_a = f64::NEG_INFINITY;
    let mut t_b = f64::INFINITY;
    for (s, ds) in pairs {
        if ds < 0.0 {
            t_b = t_b.min(-s / ds);
        } else if ds > 0.0 {
            t_a = t_a.max(-s / ds);
        }
    }
    (t_a, t_b)
}

/// `det(U + tΔ) = 0` via the eigenvalues `μ` of `L⁻¹ΔL⁻ᵀ` with `U = LLᵀ`.
fn psd_exits(u: &DVector<f64>, dir: &DVector<f64>) -> (f64, f64) {
    let um = psd::to_matrix(u);
    let dm = psd::to_matrix(dir);
    let Some(chol) = nalgebra::Cholesky::new(um) else {
        return (0.0, 0.0);
    };
    let linv = chol
        .l()
        .try_inverse()
        .expect("Cholesky factor is invertible");
    let m = linv * dm * linv.transpose();
    let m = (m + m.transpose()) * 0.5;
    let (mu, _) = psd::sorted_eigen(&m);
    let t_b = if mu[0] < 0.0 {
        -1.0 / mu[0]
    } else {
        f64::INFINITY
    };
    let t_a = if mu[2] > 0.0 {
        -1.0 / mu[2]
    } else {
        f64::NEG_INFINITY
    };
    (t_a, t_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix3;

    fn p(c: &[f64]) -> ProjPoint {
        ProjPoint::from_slice(c).unwrap()
    }

    #[test]
    fn contains_examples() {
        let s = ConvexDomain::simplex(2);
        assert_eq!(
            s.contains(&p(&[1.0, 1.0, 1.0])).unwrap(),
            Membership::Interior
        );
        let b = ConvexDomain::ellipsoid(3).unwrap();
        assert_eq!(
            b.contains(&p(&[1.0, 0.0, 0.0, 1.0])).unwrap(),
            Membership::Boundary
        );
        assert_eq!(
            b.contains(&p(&[1.0, 0.0, 0.0, 0.0])),
            Err(GeomError::ChartOverflow)
        );
        let c = ConvexDomain::psd_cone3();
        let x = ProjPoint::new(psd::from_matrix(&Matrix3::from_diagonal(&Vector3::new(
            1.0, 1.0, 0.0,
        ))))
        .unwrap();
        assert_eq!(c.contains(&x).unwrap(), Membership::Boundary);
        assert_eq!(c.contains(&c.center()).unwrap(), Membership::Interior);
    }

    #[test]
    fn chord_disk_diameter() {
        let disk = ConvexDomain::ellipsoid(2).unwrap();
        let ch = disk
            .chord(&p(&[0.0, 0.0, 1.0]), &p(&[0.5, 0.0, 1.0]))
            .unwrap();
        assert!(ch.a.approx_eq(&p(&[-1.0, 0.0, 1.0]), 1e-12));
        assert!(ch.b.approx_eq(&p(&[1.0, 0.0, 1.0]), 1e-12));
        assert_abs_diff_eq!(ch.t_a, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ch.t_b, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn chord_triangle_barycentric() {
        // x = barycenter, y = midpoint between barycenter and v1.
        let s = ConvexDomain::simplex(2);
        let x = p(&[1.0, 1.0, 1.0]);
        let y = p(&[2.0, 0.5, 0.5]);
        let ch = s.chord(&x, &y).unwrap();
        // Closed form: u = (1/3,1/3,1/3), w = (2/3,1/6,1/6), δ = (1/3,−1/6,−1/6).
        // b: 1/3 − t/6 = 0 → t = 2 → (1, 0, 0); a: 1/3 + t/3 = 0 → t = −1 → (0, 1/2, 1/2).
        assert_abs_diff_eq!(ch.t_b, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ch.t_a, -1.0, epsilon = 1e-12);
        assert!(ch.b.approx_eq(&p(&[1.0, 0.0, 0.0]), 1e-12));
        assert!(ch.a.approx_eq(&p(&[0.0, 1.0, 1.0]), 1e-12));
        assert_eq!(s.contains(&ch.a).unwrap(), Membership::Boundary);
        assert_eq!(s.contains(&ch.b).unwrap(), Membership::Boundary);
    }

    #[test]
    fn chord_errors() {
        let disk = ConvexDomain::ellipsoid(2).unwrap();
        let c = disk.center();
        assert_eq!(disk.chord(&c, &c).unwrap_err(), GeomError::CoincidentPoints);
        assert_eq!(
            disk.chord(&c, &p(&[2.0, 0.0, 1.0])).unwrap_err(),
            GeomError::NotInterior
        );
    }

    #[test]
    fn psd_chord_matches_bisection() {
        let c = ConvexDomain::psd_cone3();
        let mut rng = sampling::rng(11);
        for _ in 0..20 {
            let x = c.sample_interior(&mut rng);
            let y = c.sample_interior(&mut rng);
            let exact = c.chord(&x, &y).unwrap();
            let bis = c.chord_bisection(&x, &y).unwrap();
            assert!((exact.t_a - bis.t_a).abs() < 1e-9 * (1.0 + exact.t_a.abs()));
            assert!((exact.t_b - bis.t_b).abs() < 1e-9 * (1.0 + exact.t_b.abs()));
            for end in [&exact.a, &exact.b] {
                assert!(c.margin(end).unwrap().abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn samplers_land_where_expected() {
        let mut rng = sampling::rng(5);
        for d in [
            ConvexDomain::simplex(3),
            ConvexDomain::ellipsoid(3).unwrap(),
            ConvexDomain::psd_cone3(),
            builtin("square").unwrap(),
            builtin("cone_disk").unwrap(),
        ] {
            for _ in 0..50 {
                assert_eq!(
                    d.contains(&d.sample_interior(&mut rng)).unwrap(),
                    Membership::Interior
                );
                assert_eq!(
                    d.contains(&d.sample_boundary(&mut rng)).unwrap(),
                    Membership::Boundary
                );
                let e = d.sample_extreme(&mut rng);
                assert!(d.is_extreme(&e).unwrap(), "{} {:?}", d.name(), e);
            }
        }
    }

    #[test]
    fn non_automorphism_is_rejected() {
        let disk = ConvexDomain::ellipsoid(2).unwrap();
        let g = ProjMap::diagonal(&[2.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            disk.verify_automorphism(&g, 200, 1),
            Err(GeomError::NotAutomorphism(_))
        ));
        for h in disk.automorphisms() {
            disk.verify_automorphism(h, 200, 1).unwrap();
        }
    }

    #[test]
    fn embed_chart_conventions() {
        let s = ConvexDomain::simplex(2);
        assert!(s
            .embed_chart(&[0.2, 0.3])
            .unwrap()
            .approx_eq(&p(&[0.2, 0.3, 0.5]), 1e-12));
        let disk = ConvexDomain::ellipsoid(2).unwrap();
        assert!(disk
            .embed_chart(&[0.5, 0.0])
            .unwrap()
            .approx_eq(&p(&[0.5, 0.0, 1.0]), 1e-12));
        assert!(disk.embed_chart(&[0.5]).is_err());
    }
}
