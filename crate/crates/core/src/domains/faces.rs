//! Open faces, boundary segments and the simplicial distance.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Serialize, Serializer};

use super::{psd, ConvexDomain, DomainKind, Membership, Polytope};
use crate::error::{GeomError, Result};
use crate::projlin::ProjPoint;
use crate::tol;

/// Eigenvalue threshold separating kernel from range of a chart-normalized
/// boundary matrix.
const PSD_RANK_TOL: f64 = 1e-9;

/// Relative size below which a product component counts as zero.
const FACTOR_ZERO: f64 = 1e-10;

/// Combinatorial description of an open face.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceData {
    /// The whole open domain.
    Open,
    /// Indices of the facets (vanishing coordinates for a simplex) containing
    /// the face.
    Facets(Vec<usize>),
    /// A single boundary point of a strictly convex domain.
    Singleton,
    /// Orthonormal kernel vectors shared by every matrix in the face.
    Kernel(Vec<[f64; 3]>),
    Product(Vec<FactorFace>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorFace {
    /// The component vanishes.
    Absent,
    Face(FaceData),
}

/// The open face `F_Ω(x)` through a boundary point.
#[derive(Clone, Debug, Serialize)]
pub struct FaceDescriptor {
    pub witness: ProjPoint,
    /// Projective dimension of the face.
    pub dim: usize,
    /// Orthonormal basis (columns) of the linear span of the face.
    #[serde(serialize_with = "serialize_columns")]
    pub span: DMatrix<f64>,
    pub data: FaceData,
}

fn serialize_columns<S: Serializer>(
    m: &DMatrix<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let cols: Vec<Vec<f64>> = m
        .column_iter()
        .map(|c| c.iter().copied().collect())
        .collect();
    cols.serialize(s)
}

impl FaceDescriptor {
    /// Orthogonal projector onto the span.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.span * self.span.transpose()
    }

    pub fn same_span(&self, other: &FaceDescriptor) -> bool {
        self.span.ncols() == other.span.ncols()
            && (self.projector() - other.projector()).norm() < 1e-7
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "k")]
pub enum SimplicialValue {
    Finite(usize),
    /// The search stopped at the cap without connecting the points.
    AtLeast(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplicialResult {
    pub value: SimplicialValue,
    /// Boundary points `x = z_0, …, z_k = y` with every `[z_i, z_{i+1}] ⊂ ∂Ω`.
    pub chain: Vec<ProjPoint>,
    /// The value is the true distance (or a certified lower bound for
    /// `AtLeast`), not just a bound from a sampled search.
    pub exact: bool,
    /// No finite chain exists.
    pub certified_infinite: bool,
}

impl SimplicialResult {
    pub fn finite(&self) -> Option<usize> {
        match self.value {
            SimplicialValue::Finite(k) => Some(k),
            SimplicialValue::AtLeast(_) => None,
        }
    }

    /// Whether the distance is certified to exceed `k`.
    pub fn exceeds(&self, k: usize) -> bool {
        match self.value {
            SimplicialValue::Finite(m) => self.exact && m > k,
            SimplicialValue::AtLeast(m) => self.certified_infinite || (self.exact && m > k),
        }
    }

    fn finite_chain(chain: Vec<ProjPoint>, exact: bool) -> Self {
        Self {
            value: SimplicialValue::Finite(chain.len() - 1),
            chain,
            exact,
            certified_infinite: false,
        }
    }
}

/// Orthonormal basis of the span of `vs`.
fn orthonormal_span(vs: &[DVector<f64>], d: usize) -> DMatrix<f64> {
    if vs.is_empty() {
        return DMatrix::zeros(d, 0);
    }
    let m = DMatrix::from_columns(vs);
    let svd = m.svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let smax = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol::RANK_REL * smax)
        .map(|i| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(d, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

fn basis_vector(d: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(d);
    v[i] = 1.0;
    v
}

impl Polytope {
    fn active_facets(&self, v: &DVector<f64>) -> Vec<usize> {
        (0..self.halfspaces.len())
            .filter(|&j| self.slack(j, v) <= tol::BOUNDARY_BAND)
            .collect()
    }

    fn face_vertices(&self, facets: &[usize]) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|i| facets.iter().all(|&j| self.incidence[j].contains(i)))
            .collect()
    }
}

/// Facet structure shared by simplices and polytopes.
struct FacetSystem {
    /// Vertex indices on each facet.
    incidence: Vec<BTreeSet<usize>>,
    /// Lifted vertices.
    vertices: Vec<DVector<f64>>,
}

impl ConvexDomain {
    fn facet_system(&self) -> Option<FacetSystem> {
        match &self.kind {
            DomainKind::Simplex { dim } => {
                let d = dim + 1;
                Some(FacetSystem {
                    incidence: (0..d)
                        .map(|i| (0..d).filter(|&j| j != i).collect())
                        .collect(),
                    vertices: (0..d).map(|i| basis_vector(d, i)).collect(),
                })
            }
            DomainKind::Polytope(p) => Some(FacetSystem {
                incidence: p
                    .incidence
                    .iter()
                    .map(|s| s.iter().copied().collect())
                    .collect(),
                vertices: (0..p.vertices.len()).map(|i| p.lifted_vertex(i)).collect(),
            }),
            _ => None,
        }
    }

    fn active_facets(&self, v: &DVector<f64>) -> Vec<usize> {
        match &self.kind {
            DomainKind::Simplex { .. } => (0..v.len())
                .filter(|&i| v[i] <= tol::BOUNDARY_BAND)
                .collect(),
            DomainKind::Polytope(p) => p.active_facets(v),
            _ => Vec::new(),
        }
    }

    /// Span and combinatorial data of the open face through a closed-domain
    /// chart lift.
    fn face_lift(&self, v: &DVector<f64>) -> (DMatrix<f64>, FaceData) {
        let d = self.ambient_dim();
        if self.classify_lift(v) == Membership::Interior {
            return (DMatrix::identity(d, d), FaceData::Open);
        }
        match &self.kind {
            DomainKind::Simplex { .. } => {
                let zeros = self.active_facets(v);
                let cols: Vec<DVector<f64>> = (0..d)
                    .filter(|i| !zeros.contains(i))
                    .map(|i| basis_vector(d, i))
                    .collect();
                (orthonormal_span(&cols, d), FaceData::Facets(zeros))
            }
            DomainKind::Polytope(p) => {
                let facets = p.active_facets(v);
                let verts: Vec<DVector<f64>> = p
                    .face_vertices(&facets)
                    .into_iter()
                    .map(|i| p.lifted_vertex(i))
                    .collect();
                (orthonormal_span(&verts, d), FaceData::Facets(facets))
            }
            DomainKind::Ellipsoid { .. } => (
                orthonormal_span(std::slice::from_ref(v), d),
                FaceData::Singleton,
            ),
            DomainKind::PsdCone3 => {
                let span = psd::span_of_range(&psd::range(v, PSD_RANK_TOL));
                let ker = psd::kernel(v, PSD_RANK_TOL)
                    .into_iter()
                    .map(|k| canonical_sign(&k))
                    .collect();
                (orthonormal_span(&span, d), FaceData::Kernel(ker))
            }
            DomainKind::Product(fs) => {
                let offsets = self.factor_offsets();
                let scale = v.norm();
                let mut cols = Vec::new();
                let mut parts = Vec::new();
                for (f, &off) in fs.iter().zip(&offsets) {
                    let k = f.ambient_dim();
                    let comp = v.rows(off, k).into_owned();
                    if comp.norm() <= FACTOR_ZERO * scale {
                        parts.push(FactorFace::Absent);
                        continue;
                    }
                    let lift = &comp / f.chart.dot(&comp);
                    let (span, data) = f.face_lift(&lift);
                    for c in span.column_iter() {
                        let mut e = DVector::zeros(d);
                        e.rows_mut(off, k).copy_from(&c);
                        cols.push(e);
                    }
                    parts.push(FactorFace::Face(data));
                }
                (orthonormal_span(&cols, d), FaceData::Product(parts))
            }
        }
    }

    /// The open face through a boundary point.
    pub fn face_of(&self, x: &ProjPoint) -> Result<FaceDescriptor> {
        let v = self.require(x, Membership::Boundary)?;
        let (span, data) = self.face_lift(&v);
        Ok(FaceDescriptor {
            witness: x.clone(),
            dim: span.ncols().saturating_sub(1),
            span,
            data,
        })
    }

    /// Whether `x` and `y` lie in the same open face of the closed domain.
    pub fn same_face(&self, x: &ProjPoint, y: &ProjPoint) -> Result<bool> {
        let u = self.chart_lift(x)?;
        let w = self.chart_lift(y)?;
        if self.classify_lift(&u) == Membership::Outside
            || self.classify_lift(&w) == Membership::Outside
        {
            return Err(GeomError::NotBoundary);
        }
        let (su, _) = self.face_lift(&u);
        let (sw, _) = self.face_lift(&w);
        Ok(su.ncols() == sw.ncols() && (&su * su.transpose() - &sw * sw.transpose()).norm() < 1e-7)
    }

    /// Boundary points whose face is a single point.
    pub fn is_extreme(&self, x: &ProjPoint) -> Result<bool> {
        let v = self.chart_lift(x)?;
        match self.classify_lift(&v) {
            Membership::Boundary => Ok(self.face_lift(&v).0.ncols() == 1),
            Membership::Interior => Ok(false),
            Membership::Outside => Err(GeomError::NotBoundary),
        }
    }

    /// Whether the closed segment `[x, y]` (the one inside the closed domain)
    /// lies in the boundary.
    pub fn segment_in_boundary(&self, x: &ProjPoint, y: &ProjPoint) -> Result<bool> {
        let u = self.chart_lift(x)?;
        let w = self.chart_lift(y)?;
        let cu = self.classify_lift(&u);
        let cw = self.classify_lift(&w);
        if cu == Membership::Outside || cw == Membership::Outside {
            return Err(GeomError::NotBoundary);
        }
        if cu == Membership::Interior || cw == Membership::Interior {
            return Ok(false);
        }
        Ok(match &self.kind {
            DomainKind::Simplex { .. } | DomainKind::Polytope(_) => {
                let au = self.active_facets(&u);
                self.active_facets(&w).iter().any(|j| au.contains(j))
            }
            DomainKind::Ellipsoid { .. } => x.approx_eq(y, tol::POINT_EQ),
            DomainKind::PsdCone3 => psd::min_eigenvalue(&((&u + &w) * 0.5)) <= tol::SEGMENT_BAND,
            DomainKind::Product(_) => {
                let n = tol::SEGMENT_SAMPLES;
                (0..n).all(|i| {
                    let s = i as f64 / (n - 1) as f64;
                    self.cone_margin(&(&u + (&w - &u) * s)) <= tol::SEGMENT_BAND
                })
            }
        })
    }

    /// Least `k` such that `x` and `y` are joined by `k` boundary segments.
    /// Searches stop after `cap` segments where no closed form is available.
    pub fn simplicial_distance(
        &self,
        x: &ProjPoint,
        y: &ProjPoint,
        cap: usize,
    ) -> Result<SimplicialResult> {
        let u = self.require(x, Membership::Boundary)?;
        let w = self.require(y, Membership::Boundary)?;
        if x.approx_eq(y, tol::POINT_EQ) {
            return Ok(SimplicialResult::finite_chain(vec![x.clone()], true));
        }
        if self.segment_in_boundary(x, y)? {
            return Ok(SimplicialResult::finite_chain(
                vec![x.clone(), y.clone()],
                true,
            ));
        }
        match &self.kind {
            DomainKind::Simplex { .. } | DomainKind::Polytope(_) => {
                let sys = self.facet_system().expect("facet system");
                Ok(facet_bfs(
                    &sys,
                    &self.active_facets(&u),
                    &self.active_facets(&w),
                    x,
                    y,
                ))
            }
            DomainKind::Ellipsoid { .. } => Ok(SimplicialResult {
                value: SimplicialValue::AtLeast(cap + 1),
                chain: Vec::new(),
                exact: true,
                certified_infinite: true,
            }),
            DomainKind::PsdCone3 => {
                let kx = psd::kernel(&u, PSD_RANK_TOL);
                let ky = psd::kernel(&w, PSD_RANK_TOL);
                let z = kx[0].cross(&ky[0]);
                if z.norm() < 1e-12 {
                    return Err(GeomError::DegenerateConfiguration(
                        "kernels are parallel but the segment left the boundary".into(),
                    ));
                }
                let mid = ProjPoint::new(psd::outer(&z.normalize()))?;
                Ok(SimplicialResult::finite_chain(
                    vec![x.clone(), mid, y.clone()],
                    true,
                ))
            }
            DomainKind::Product(_) => self.product_chain_search(x, y, &u, &w, cap),
        }
    }

    /// Breadth-first search over factor projections of the endpoints.
    fn product_chain_search(
        &self,
        x: &ProjPoint,
        y: &ProjPoint,
        u: &DVector<f64>,
        w: &DVector<f64>,
        cap: usize,
    ) -> Result<SimplicialResult> {
        let DomainKind::Product(fs) = &self.kind else {
            unreachable!("product search on a non-product domain");
        };
        let mut nodes = vec![x.clone(), y.clone()];
        let offsets = self.factor_offsets();
        for v in [u, w] {
            for (f, &off) in fs.iter().zip(&offsets) {
                let comp = v.rows(off, f.ambient_dim()).into_owned();
                if comp.norm() <= FACTOR_ZERO * v.norm() {
                    continue;
                }
                let mut e = DVector::zeros(self.ambient_dim());
                e.rows_mut(off, comp.len()).copy_from(&comp);
                let p = ProjPoint::new(e)?;
                if self.membership(&p) == Membership::Boundary
                    && !nodes.iter().any(|q| q.approx_eq(&p, tol::POINT_EQ))
                {
                    nodes.push(p);
                }
            }
        }
        let n = nodes.len();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let e = self.segment_in_boundary(&nodes[i], &nodes[j])?;
                adj[i][j] = e;
                adj[j][i] = e;
            }
        }
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![usize::MAX; n];
        depth[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            if depth[i] >= cap {
                continue;
            }
            for j in 0..n {
                if adj[i][j] && depth[j] == usize::MAX {
                    depth[j] = depth[i] + 1;
                    parent[j] = i;
                    queue.push_back(j);
                }
            }
        }
        if depth[1] == usize::MAX {
            return Ok(SimplicialResult {
                value: SimplicialValue::AtLeast(cap + 1),
                chain: Vec::new(),
                exact: false,
                certified_infinite: false,
            });
        }
        let mut chain = vec![nodes[1].clone()];
        let mut i = 1;
        while i != 0 {
            i = parent[i];
            chain.push(nodes[i].clone());
        }
        chain.reverse();
        // Distance one was ruled out above, so a two-step chain is optimal.
        let exact = chain.len() <= 3;
        Ok(SimplicialResult::finite_chain(chain, exact))
    }
}

fn canonical_sign(k: &Vector3<f64>) -> [f64; 3] {
    let s = k
        .iter()
        .find(|c| c.abs() > 1e-12)
        .map(|c| c.signum())
        .unwrap_or(1.0);
    [k[0] * s, k[1] * s, k[2] * s]
}

/// Shortest chain through facets: consecutive facets share a vertex, which
/// becomes the intermediate chain point.
fn facet_bfs(
    sys: &FacetSystem,
    from: &[usize],
    to: &[usize],
    x: &ProjPoint,
    y: &ProjPoint,
) -> SimplicialResult {
    let n = sys.incidence.len();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &f in from {
        seen[f] = true;
        queue.push_back(f);
    }
    let mut end = None;
    while let Some(f) = queue.pop_front() {
        if to.contains(&f) {
            end = Some(f);
            break;
        }
        for g in 0..n {
            if !seen[g] && !sys.incidence[f].is_disjoint(&sys.incidence[g]) {
                seen[g] = true;
                parent[g] = f;
                queue.push_back(g);
            }
        }
    }
    let Some(mut f) = end else {
        return SimplicialResult {
            value: SimplicialValue::AtLeast(n + 1),
            chain: Vec::new(),
            exact: true,
            certified_infinite: true,
        };
    };
    let mut facets = vec![f];
    while parent[f] != usize::MAX {
        f = parent[f];
        facets.push(f);
    }
    facets.reverse();
    let mut chain = vec![x.clone()];
    for pair in facets.windows(2) {
        let v = *sys.incidence[pair[0]]
            .intersection(&sys.incidence[pair[1]])
            .next()
            .expect("adjacent facets share a vertex");
        chain.push(ProjPoint::new(sys.vertices[v].clone()).expect("nonzero vertex"));
    }
    chain.push(y.clone());
    SimplicialResult::finite_chain(chain, true)
}

#[cfg(test)]
mod tests {
    use super::super::builtin;
    use super::*;
    use nalgebra::Matrix3;

    fn p(c: &[f64]) -> ProjPoint {
        ProjPoint::from_slice(c).unwrap()
    }

    fn psd_point(m: Matrix3<f64>) -> ProjPoint {
        ProjPoint::new(psd::from_matrix(&m)).unwrap()
    }

    #[test]
    fn simplex_faces() {
        let s = ConvexDomain::simplex(2);
        let e = s.face_of(&p(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(e.dim, 0);
        assert_eq!(e.data, FaceData::Facets(vec![1, 2]));
        let edge = s.face_of(&p(&[1.0, 1.0, 0.0])).unwrap();
        assert_eq!(edge.dim, 1);
        assert!(s
            .same_face(&p(&[1.0, 1.0, 0.0]), &p(&[1.0, 3.0, 0.0]))
            .unwrap());
        assert!(!s
            .same_face(&p(&[1.0, 1.0, 0.0]), &p(&[1.0, 0.0, 0.0]))
            .unwrap());
        assert_eq!(s.face_of(&s.center()).unwrap_err(), GeomError::NotBoundary);
    }

    #[test]
    fn disk_faces_are_points() {
        let disk = ConvexDomain::ellipsoid(2).unwrap();
        let f = disk.face_of(&p(&[0.6, 0.8, 1.0])).unwrap();
        assert_eq!(f.dim, 0);
        assert_eq!(f.data, FaceData::Singleton);
    }

    #[test]
    fn psd_faces() {
        let c = ConvexDomain::psd_cone3();
        let rank2 = psd_point(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0)));
        let f = c.face_of(&rank2).unwrap();
        assert_eq!(f.dim, 2);
        assert_eq!(f.data, FaceData::Kernel(vec![[0.0, 0.0, 1.0]]));
        let rank1 = psd_point(Matrix3::from_diagonal(&Vector3::new(1.0, 0.0, 0.0)));
        assert_eq!(c.face_of(&rank1).unwrap().dim, 0);
        assert!(c.is_extreme(&rank1).unwrap());
    }

    #[test]
    fn product_faces() {
        let cd = builtin("cone_disk").unwrap();
        let apex = p(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(cd.face_of(&apex).unwrap().dim, 0);
        // Lateral ray between a circle point and the apex.
        let lateral = p(&[1.0, 0.0, 1.0, 1.0]);
        assert_eq!(cd.face_of(&lateral).unwrap().dim, 1);
        // The base disk.
        let base = p(&[0.2, 0.1, 1.0, 0.0]);
        assert_eq!(cd.face_of(&base).unwrap().dim, 2);
    }

    #[test]
    fn simplicial_distance_simplex() {
        let s = ConvexDomain::simplex(2);
        let a = p(&[1.0, 1.0, 0.0]);
        let b = p(&[0.0, 1.0, 1.0]);
        let r = s.simplicial_distance(&a, &b, 5).unwrap();
        assert_eq!(r.value, SimplicialValue::Finite(2));
        assert_eq!(r.chain.len(), 3);
        assert!(r.chain[1].approx_eq(&p(&[0.0, 1.0, 0.0]), 1e-12));
        assert_eq!(
            s.simplicial_distance(&a, &a, 5).unwrap().value,
            SimplicialValue::Finite(0)
        );
        let v = p(&[1.0, 0.0, 0.0]);
        assert_eq!(
            s.simplicial_distance(&a, &v, 5).unwrap().value,
            SimplicialValue::Finite(1)
        );
    }

    #[test]
    fn simplicial_distance_square() {
        let sq = builtin("square").unwrap();
        let corner = |x: f64, y: f64| p(&[x, y, 1.0]);
        let r = sq
            .simplicial_distance(&corner(1.0, 1.0), &corner(-1.0, -1.0), 5)
            .unwrap();
        assert_eq!(r.value, SimplicialValue::Finite(2));
        let r = sq
            .simplicial_distance(&corner(1.0, 0.0), &corner(-1.0, 0.0), 5)
            .unwrap();
        assert_eq!(r.value, SimplicialValue::Finite(3));
    }

    #[test]
    fn simplicial_distance_disk_is_infinite() {
        let disk = ConvexDomain::ellipsoid(2).unwrap();
        let r = disk
            .simplicial_distance(&p(&[1.0, 0.0, 1.0]), &p(&[0.0, 1.0, 1.0]), 4)
            .unwrap();
        assert_eq!(r.value, SimplicialValue::AtLeast(5));
        assert!(r.certified_infinite && r.exceeds(2));
    }

    #[test]
    fn simplicial_distance_psd() {
        let c = ConvexDomain::psd_cone3();
        let x = psd_point(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0)));
        let y = psd_point(Matrix3::from_diagonal(&Vector3::new(0.0, 1.0, 1.0)));
        let r = c.simplicial_distance(&x, &y, 5).unwrap();
        assert_eq!(r.value, SimplicialValue::Finite(2));
        for pair in r.chain.windows(2) {
            assert!(c.segment_in_boundary(&pair[0], &pair[1]).unwrap());
        }
        let z = psd_point(Matrix3::from_diagonal(&Vector3::new(1.0, 0.0, 1.0)));
        let w = psd_point(Matrix3::from_diagonal(&Vector3::new(2.0, 0.0, 1.0)));
        assert_eq!(
            c.simplicial_distance(&z, &w, 5).unwrap().value,
            SimplicialValue::Finite(1)
        );
    }

    #[test]
    fn simplicial_distance_cone_disk() {
        let cd = builtin("cone_disk").unwrap();
        let a = p(&[1.0, 0.0, 1.0, 1.0]);
        let b = p(&[-1.0, 0.0, 1.0, 1.0]);
        let r = cd.simplicial_distance(&a, &b, 4).unwrap();
        assert_eq!(r.value, SimplicialValue::Finite(2));
        for pair in r.chain.windows(2) {
            assert!(cd.segment_in_boundary(&pair[0], &pair[1]).unwrap());
        }
    }

    #[test]
    fn segment_checks() {
        let s = ConvexDomain::simplex(2);
        assert!(s
            .segment_in_boundary(&p(&[1.0, 0.0, 0.0]), &p(&[0.0, 1.0, 0.0]))
            .unwrap());
        assert!(!s
            .segment_in_boundary(&p(&[1.0, 0.0, 0.0]), &p(&[0.0, 1.0, 1.0]))
            .unwrap());
        let disk = ConvexDomain::ellipsoid(2).unwrap();
        assert!(!disk
            .segment_in_boundary(&p(&[1.0, 0.0, 1.0]), &p(&[0.0, 1.0, 1.0]))
            .unwrap());
    }
}
