//! Projective linear algebra: points of `P(R^d)`, elements of `PGL_d(R)`,
//! classes in `P(End(R^d))`, cross ratios, eigenvalue moduli and proximality.

use nalgebra::{DMatrix, DVector, Schur, SVD};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GeomError, Result};
use crate::tol;

/// Entries below this magnitude are skipped when fixing the canonical sign.
const SIGN_EPS: f64 = 1e-12;

// ─────────────────────────────────────────────
// Points
// ─────────────────────────────────────────────

/// A point of `P(R^d)` stored in canonical form: max-abs coordinate 1, first
/// nonzero coordinate positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint {
    coords: DVector<f64>,
}

impl ProjPoint {
    pub fn new(v: DVector<f64>) -> Result<Self> {
        let m = v.amax();
        if !(m.is_finite() && m > 0.0) {
            return Err(GeomError::ZeroVector);
        }
        let mut c = v / m;
        if let Some(first) = c.iter().find(|x| x.abs() > SIGN_EPS) {
            if *first < 0.0 {
                c.neg_mut();
            }
        }
        Ok(Self { coords: c })
    }

    pub fn from_slice(s: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(s))
    }

    /// The coordinate point `[e_i]`.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        Self { coords: v }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Unit Euclidean representative (sign as in the canonical form).
    pub fn unit(&self) -> DVector<f64> {
        self.coords.normalize()
    }

    /// Equality of canonical forms within `tol` in the max norm. Both signs are
    /// compared so that points whose leading coordinate sits at the sign
    /// threshold still compare equal.
    pub fn approx_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let minus = (&self.coords - &other.coords).amax();
        let plus = (&self.coords + &other.coords).amax();
        minus.min(plus) <= tol
    }

    /// Sine of the angle between the two lines.
    pub fn angle_to(&self, other: &ProjPoint) -> f64 {
        let u = self.unit();
        let v = other.unit();
        (&u - &v * u.dot(&v)).norm()
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(GeomError::DimensionMismatch {
                expected: d,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        ProjPoint::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

/// A linear hyperplane stored by its unit normal covector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hyperplane {
    #[serde(serialize_with = "ser_vec")]
    normal: DVector<f64>,
}

impl Hyperplane {
    pub fn from_normal(normal: DVector<f64>) -> Result<Self> {
        let n = normal.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(GeomError::ZeroVector);
        }
        Ok(Self { normal: normal / n })
    }

    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }

    /// `|⟨n, x̂⟩|` for the unit representative of `x`: the sine of the angle
    /// between the line and the hyperplane.
    pub fn margin(&self, x: &ProjPoint) -> f64 {
        self.normal.dot(&x.unit()).abs()
    }

    pub fn contains(&self, x: &ProjPoint, tol: f64) -> bool {
        self.margin(x) <= tol
    }

    /// Orthonormal basis (as columns) of the hyperplane.
    pub fn basis(&self) -> DMatrix<f64> {
        let d = self.normal.len();
        let p = DMatrix::identity(d, d) - &self.normal * self.normal.transpose();
        let svd = SVD::new(p, true, false);
        let order = sorted_indices(&svd.singular_values);
        let u = svd.u.expect("requested U");
        DMatrix::from_columns(
            &order[..d - 1]
                .iter()
                .map(|&i| u.column(i).into_owned())
                .collect::<Vec<_>>(),
        )
    }
}

// ─────────────────────────────────────────────
// Maps and endomorphism classes
// ─────────────────────────────────────────────

/// Unit Frobenius norm, first nonzero entry positive.
fn canonical(m: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = m.norm();
    if !(n.is_finite() && n > 0.0) {
        return None;
    }
    let mut c = m / n;
    // Row-major scan so that "first" matches the JSON serialization order.
    let first = (0..c.nrows())
        .flat_map(|i| (0..c.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| c[(i, j)])
        .find(|x| x.abs() > SIGN_EPS);
    if let Some(f) = first {
        if f < 0.0 {
            c.neg_mut();
        }
    }
    Some(c)
}

/// Sign-invariant Frobenius distance between two canonical matrices.
pub fn projective_matrix_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm().min((a + b).norm())
}

fn sorted_indices(values: &DVector<f64>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    idx
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(GeomError::InvalidInput("empty matrix".into()));
    }
    let m = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(GeomError::DimensionMismatch {
            expected: m,
            found: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn ser_vec<S: Serializer>(v: &DVector<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_slice().serialize(s)
}

/// An element of `PGL_d(R)` in canonical scaling.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjMap {
    matrix: DMatrix<f64>,
}

impl ProjMap {
    /// Validates squareness and invertibility (`|det| > 1e-12` at unit
    /// Frobenius norm).
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GeomError::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let c = canonical(m).ok_or(GeomError::ZeroMatrix)?;
        if c.determinant().abs() <= tol::DET_MIN {
            return Err(GeomError::Singular);
        }
        Ok(Self { matrix: c })
    }

    /// Products and powers of valid maps are invertible in exact arithmetic
    /// even when their unit-norm determinant underflows the input threshold
    /// (e.g. `diag(4,2,1)^40`), so they bypass the determinant check.
    fn from_product(m: DMatrix<f64>) -> Self {
        Self {
            matrix: canonical(m).expect("product of invertible maps is nonzero"),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    pub fn identity(d: usize) -> Self {
        Self::from_product(DMatrix::identity(d, d))
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.matrix)
    }

    /// The inverse class. High powers can be numerically singular even though
    /// the exact map is invertible; those fall back to a pseudo-inverse, so
    /// callers that need `g⁻ⁿ` accurately should use `pow(-n)`.
    pub fn inverse(&self) -> ProjMap {
        let inv = self.matrix.clone().try_inverse().unwrap_or_else(|| {
            self.matrix
                .clone()
                .pseudo_inverse(f64::MIN_POSITIVE)
                .expect("SVD of a finite matrix")
        });
        Self::from_product(inv)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjMap) -> ProjMap {
        Self::from_product(&self.matrix * &other.matrix)
    }

    /// Conjugate `p · self · p⁻¹`.
    pub fn conjugate_by(&self, p: &ProjMap) -> ProjMap {
        p.compose(self).compose(&p.inverse())
    }

    /// Canonical `selfⁿ` for `n ∈ Z` by repeated squaring with renormalization.
    pub fn pow(&self, n: i64) -> ProjMap {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = DMatrix::identity(self.dim(), self.dim());
        let mut sq = base.matrix;
        while e > 0 {
            if e & 1 == 1 {
                acc = canonical(&acc * &sq).expect("nonzero");
            }
            e >>= 1;
            if e > 0 {
                sq = canonical(&sq * &sq).expect("nonzero");
            }
        }
        Self::from_product(acc)
    }

    pub fn apply(&self, x: &ProjPoint) -> Result<ProjPoint> {
        x.check_dim(self.dim())?;
        ProjPoint::new(&self.matrix * x.coords())
    }

    /// Sign-invariant Frobenius distance between canonical forms.
    pub fn distance(&self, other: &ProjMap) -> f64 {
        projective_matrix_distance(&self.matrix, &other.matrix)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let id = canonical(DMatrix::identity(self.dim(), self.dim())).expect("nonzero");
        self.distance(&ProjMap { matrix: id }) <= tol
    }
}

impl Serialize for ProjMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        ProjMap::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// The class of a nonzero endomorphism in `P(End(R^d))`, with numerical rank,
/// image and kernel.
#[derive(Clone, Debug)]
pub struct ProjEndo {
    matrix: DMatrix<f64>,
    rank: usize,
    image_basis: DMatrix<f64>,
    kernel_basis: DMatrix<f64>,
}

impl ProjEndo {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GeomError::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let c = canonical(m).ok_or(GeomError::ZeroMatrix)?;
        let d = c.nrows();
        let svd = SVD::new(c.clone(), true, true);
        let order = sorted_indices(&svd.singular_values);
        let s1 = svd.singular_values[order[0]];
        let rank = order
            .iter()
            .filter(|&&i| svd.singular_values[i] > tol::RANK_REL * s1)
            .count();
        let u = svd.u.expect("requested U");
        let vt = svd.v_t.expect("requested V^T");
        let image_cols: Vec<DVector<f64>> = order[..rank]
            .iter()
            .map(|&i| u.column(i).into_owned())
            .collect();
        let kernel_cols: Vec<DVector<f64>> = order[rank..]
            .iter()
            .map(|&i| vt.row(i).transpose())
            .collect();
        Ok(Self {
            matrix: c,
            rank,
            image_basis: columns_or_empty(d, &image_cols),
            kernel_basis: columns_or_empty(d, &kernel_cols),
        })
    }

    pub fn from_map(g: &ProjMap) -> Self {
        Self::new(g.matrix.clone()).expect("invertible map is a nonzero endomorphism")
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    /// Rank-one projector onto `line` along `kernel`.
    pub fn projector(line: &DVector<f64>, kernel: &Hyperplane) -> Result<Self> {
        let denom = kernel.normal().dot(line);
        if denom.abs() <= tol::TRANSVERSE * line.norm() {
            return Err(GeomError::NotTransverse);
        }
        Self::new(line * kernel.normal().transpose() / denom)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Orthonormal columns spanning the image.
    pub fn image_basis(&self) -> &DMatrix<f64> {
        &self.image_basis
    }

    /// Orthonormal columns spanning the kernel.
    pub fn kernel_basis(&self) -> &DMatrix<f64> {
        &self.kernel_basis
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.matrix)
    }

    /// The image as a point, when the rank is one.
    pub fn image_point(&self) -> Option<ProjPoint> {
        (self.rank == 1)
            .then(|| ProjPoint::new(self.image_basis.column(0).into_owned()).expect("unit column"))
    }

    /// Euclidean distance of the unit representative of `x` from `ker T`.
    pub fn kernel_distance(&self, x: &ProjPoint) -> f64 {
        let u = x.unit();
        if self.kernel_basis.ncols() == 0 {
            return 1.0;
        }
        let proj = &self.kernel_basis * (self.kernel_basis.transpose() * &u);
        (u - proj).norm()
    }

    /// How far the image sticks out of a subspace given by orthonormal
    /// columns: the largest residual of an image basis vector after
    /// projecting onto the subspace. Zero iff `image ⊂ span`.
    pub fn image_residual_outside(&self, span: &DMatrix<f64>) -> f64 {
        let p = span * span.transpose();
        (0..self.image_basis.ncols())
            .map(|i| {
                let v = self.image_basis.column(i);
                (v - &p * v).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `image ⊕ kernel = R^d`, decided by the smallest singular value of the
    /// joint basis.
    pub fn image_kernel_transverse(&self) -> bool {
        self.image_kernel_margin() > tol::TRANSVERSE
    }

    pub fn image_kernel_margin(&self) -> f64 {
        let d = self.dim();
        let mut joint = DMatrix::zeros(d, d);
        joint.columns_mut(0, self.rank).copy_from(&self.image_basis);
        joint
            .columns_mut(self.rank, d - self.rank)
            .copy_from(&self.kernel_basis);
        joint.singular_values().min()
    }

    pub fn apply(&self, x: &ProjPoint) -> Result<ProjPoint> {
        x.check_dim(self.dim())?;
        if self.kernel_distance(x) <= tol::KERNEL_DIST {
            return Err(GeomError::InKernel);
        }
        ProjPoint::new(&self.matrix * x.unit())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjEndo) -> Result<ProjEndo> {
        if self.dim() != other.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let prod = &self.matrix * &other.matrix;
        if prod.norm() <= tol::ZERO_ENDO {
            return Err(GeomError::ZeroComposite);
        }
        ProjEndo::new(prod)
    }

    pub fn distance(&self, other: &ProjEndo) -> f64 {
        projective_matrix_distance(&self.matrix, &other.matrix)
    }
}

impl Serialize for ProjEndo {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ProjEndo", 2)?;
        st.serialize_field("rows", &self.rows())?;
        st.serialize_field("rank", &self.rank)?;
        st.end()
    }
}

fn columns_or_empty(d: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    if cols.is_empty() {
        DMatrix::zeros(d, 0)
    } else {
        DMatrix::from_columns(cols)
    }
}

// ─────────────────────────────────────────────
// Cross ratio
// ─────────────────────────────────────────────

fn det2(p: (f64, f64), q: (f64, f64)) -> f64 {
    p.0 * q.1 - p.1 * q.0
}

/// `[a,x,y,b] = |x−b||y−a| / (|x−a||y−b|)` for four distinct collinear points.
///
/// Computed from 2×2 determinants in an orthonormal basis of the common line,
/// which equals the affine-chart value for every admissible chart.
pub fn cross_ratio(a: &ProjPoint, x: &ProjPoint, y: &ProjPoint, b: &ProjPoint) -> Result<f64> {
    let d = a.dim();
    for p in [x, y, b] {
        p.check_dim(d)?;
    }
    let pts = [a, x, y, b];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if pts[i].approx_eq(pts[j], tol::POINT_EQ) {
                return Err(GeomError::DegenerateConfiguration(format!(
                    "inputs {i} and {j} coincide"
                )));
            }
        }
    }
    let units: Vec<DVector<f64>> = pts.iter().map(|p| p.unit()).collect();
    let stacked = DMatrix::from_fn(4, d, |i, j| units[i][j]);
    let svd = SVD::new(stacked, false, true);
    let order = sorted_indices(&svd.singular_values);
    let s1 = svd.singular_values[order[0]];
    let rank = order
        .iter()
        .filter(|&&i| svd.singular_values[i] > tol::RANK_REL * s1)
        .count();
    if rank != 2 {
        return Err(GeomError::NotCollinear { rank });
    }
    let vt = svd.v_t.expect("requested V^T");
    let p = vt.row(order[0]).transpose();
    let q = vt.row(order[1]).transpose();
    let c: Vec<(f64, f64)> = units.iter().map(|u| (u.dot(&p), u.dot(&q))).collect();
    let (ca, cx, cy, cb) = (c[0], c[1], c[2], c[3]);
    let num = det2(cx, cb) * det2(cy, ca);
    let den = det2(cx, ca) * det2(cy, cb);
    if den.abs() <= f64::EPSILON {
        return Err(GeomError::DegenerateConfiguration(
            "vanishing chart denominator".into(),
        ));
    }
    Ok((num / den).abs())
}

// ─────────────────────────────────────────────
// Eigenvalues and proximality
// ─────────────────────────────────────────────

/// Sorted eigenvalue moduli of the `|det| = 1` lift.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenData {
    pub moduli: Vec<f64>,
    pub is_proximal: bool,
    pub is_biproximal: bool,
}

impl EigenData {
    pub fn lambda_max(&self) -> f64 {
        self.moduli[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.moduli.last().expect("nonempty")
    }

    /// `½ log(λ₁/λ_d)`.
    pub fn half_log_ratio(&self) -> f64 {
        0.5 * (self.lambda_max() / self.lambda_min()).ln()
    }
}

fn gap_exceeds(hi: f64, lo: f64) -> bool {
    hi > 0.0 && (hi - lo) / hi > tol::PROXIMAL_GAP
}

fn complex_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<nalgebra::Complex<f64>>> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(GeomError::EigenFailure)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

pub fn eigen_analysis(g: &ProjMap) -> Result<EigenData> {
    let eig = complex_eigenvalues(g.matrix())?;
    let mut moduli: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    if moduli.iter().any(|m| !m.is_finite()) {
        return Err(GeomError::EigenFailure);
    }
    moduli.sort_by(|a, b| b.total_cmp(a));
    let d = moduli.len() as f64;
    let scale = if moduli.iter().all(|&m| m > 0.0) {
        (moduli.iter().map(|m| m.ln()).sum::<f64>() / d).exp()
    } else {
        // Numerically singular products: normalize by λ₁ so the gap tests
        // still apply.
        let det = g.matrix().determinant().abs();
        if det == 0.0 {
            moduli[0]
        } else {
            det.powf(1.0 / d)
        }
    };
    for m in &mut moduli {
        *m /= scale;
    }
    let n = moduli.len();
    let is_proximal = n >= 2 && gap_exceeds(moduli[0], moduli[1]);
    let is_biproximal = is_proximal && gap_exceeds(1.0 / moduli[n - 1], 1.0 / moduli[n - 2]);
    Ok(EigenData {
        moduli,
        is_proximal,
        is_biproximal,
    })
}

/// A real eigenvalue of the canonical matrix with an orthonormal basis
/// (columns) of its eigenspace.
#[derive(Clone, Debug)]
pub struct RealEigenspace {
    pub eigenvalue: f64,
    pub basis: DMatrix<f64>,
}

/// Real eigenvalues (clustered to relative `1e-7`) and their eigenspaces.
pub fn real_eigenspaces(g: &ProjMap) -> Result<Vec<RealEigenspace>> {
    let m = g.matrix();
    let eig = complex_eigenvalues(m)?;
    let scale = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut reals: Vec<f64> = eig
        .iter()
        .filter(|z| z.im.abs() <= 1e-9 * scale)
        .map(|z| z.re)
        .collect();
    reals.sort_by(|a, b| b.total_cmp(a));
    let mut clusters: Vec<f64> = Vec::new();
    for r in reals {
        match clusters.last() {
            Some(&c) if (c - r).abs() <= 1e-7 * scale => {}
            _ => clusters.push(r),
        }
    }
    let d = m.nrows();
    let mut out = Vec::with_capacity(clusters.len());
    for lambda in clusters {
        let shifted = m - DMatrix::identity(d, d) * lambda;
        let svd = SVD::new(shifted, false, true);
        let vt = svd.v_t.expect("requested V^T");
        let cols: Vec<DVector<f64>> = (0..d)
            .filter(|&i| svd.singular_values[i] <= 1e-7 * scale)
            .map(|i| vt.row(i).transpose())
            .collect();
        if !cols.is_empty() {
            out.push(RealEigenspace {
                eigenvalue: lambda,
                basis: DMatrix::from_columns(&cols),
            });
        }
    }
    Ok(out)
}

/// Attracting line and repelling hyperplane of a proximal map, plus the same
/// data for the inverse when bi-proximal.
#[derive(Clone, Debug, Serialize)]
pub struct ProximalData {
    pub attracting_line: ProjPoint,
    pub repelling_hyperplane: Hyperplane,
    pub repelling_line: Option<ProjPoint>,
    pub attracting_hyperplane: Option<Hyperplane>,
}

impl ProximalData {
    /// `ℓ⁺` and `ℓ⁻` when bi-proximal.
    pub fn axis(&self) -> Option<(ProjPoint, ProjPoint)> {
        self.repelling_line
            .as_ref()
            .map(|m| (self.attracting_line.clone(), m.clone()))
    }
}

/// Dominant eigenline and its invariant complementary hyperplane, whose normal
/// is the left eigenvector for the same eigenvalue.
fn dominant_line(m: &DMatrix<f64>) -> Result<(ProjPoint, Hyperplane)> {
    let eig = complex_eigenvalues(m)?;
    let top = eig
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .ok_or(GeomError::EigenFailure)?;
    let d = m.nrows();
    let shifted = m - DMatrix::identity(d, d) * top.re;
    let svd = SVD::new(shifted, true, true);
    let smallest = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty");
    let right = svd.v_t.expect("requested V^T").row(smallest).transpose();
    let left = svd.u.expect("requested U").column(smallest).into_owned();
    let line = ProjPoint::new(right)?;
    let plane = Hyperplane::from_normal(left)?;
    if plane.margin(&line) <= tol::TRANSVERSE {
        return Err(GeomError::NotTransverse);
    }
    Ok((line, plane))
}

/// `ℓ⁺` and `H⁻` of a proximal map, without touching the inverse.
pub fn attracting_data(g: &ProjMap) -> Result<(ProjPoint, Hyperplane)> {
    if !eigen_analysis(g)?.is_proximal {
        return Err(GeomError::NotProximal);
    }
    dominant_line(g.matrix())
}

pub fn proximal_data(g: &ProjMap) -> Result<ProximalData> {
    let eig = eigen_analysis(g)?;
    if !eig.is_proximal {
        return Err(GeomError::NotProximal);
    }
    let (attracting_line, repelling_hyperplane) = dominant_line(g.matrix())?;
    let (repelling_line, attracting_hyperplane) = if eig.is_biproximal {
        let (l, h) = dominant_line(g.inverse().matrix())?;
        (Some(l), Some(h))
    } else {
        (None, None)
    };
    Ok(ProximalData {
        attracting_line,
        repelling_hyperplane,
        repelling_line,
        attracting_hyperplane,
    })
}

/// `[T(x)]` for `x ∉ [ker T]`.
pub fn apply(t: &ProjEndo, x: &ProjPoint) -> Result<ProjPoint> {
    t.apply(x)
}

/// The class of `S·T`.
pub fn compose(s: &ProjEndo, t: &ProjEndo) -> Result<ProjEndo> {
    s.compose(t)
}

/// `lim gⁿ` in `P(End(R^d))` via repeated squaring of the canonical form;
/// stops once successive forms differ by less than `tol` (sign-invariant
/// Frobenius distance).
pub fn power_limit(g: &ProjMap, max_iter: usize, tol: f64) -> Result<ProjEndo> {
    if max_iter == 0 {
        return Err(GeomError::InvalidInput(
            "max_iter must be at least 1".into(),
        ));
    }
    let mut current = g.matrix().clone();
    for _ in 0..max_iter {
        let next = canonical(&current * &current).expect("power of invertible map");
        if projective_matrix_distance(&next, &current) < tol {
            return ProjEndo::new(next);
        }
        current = next;
    }
    Err(GeomError::NoConvergence(max_iter))
}

/// Outcome of the proximality criterion applied to a convergent sequence.
#[derive(Clone, Debug, Serialize)]
pub struct ProximalLimit {
    /// `rank T = 1` and `image T ⊕ ker T = R^d`.
    pub proximal: bool,
    pub limit_point: ProjPoint,
    /// First index from which every element is proximal.
    pub proximal_from: Option<usize>,
    /// Every element of the tail (last quarter) is proximal and its attracting
    /// line is no further from `image T` than the first tail element's.
    pub tail_consistent: bool,
    /// `sin∠(ℓ⁺_{g_last}, image T)`.
    pub final_deviation: f64,
    #[serde(skip)]
    pub limit: ProjEndo,
}

pub fn limit_of_sequence(seq: &[ProjMap]) -> Result<ProjEndo> {
    let last = seq
        .last()
        .ok_or_else(|| GeomError::InvalidInput("empty sequence".into()))?;
    let q = (seq.len() / 4).max(1);
    let start = seq.len().saturating_sub(q + 1);
    let spread = seq[start..]
        .iter()
        .map(|g| g.distance(last))
        .fold(0.0, f64::max);
    if spread >= tol::CAUCHY {
        return Err(GeomError::NotConverged(spread));
    }
    Ok(ProjEndo::from_map(last))
}

pub fn proximality_from_limit(seq: &[ProjMap]) -> Result<ProximalLimit> {
    let t = limit_of_sequence(seq)?;
    if t.rank() > 1 {
        return Err(GeomError::RankTooHigh(t.rank()));
    }
    let limit_point = t.image_point().expect("rank one");
    if t.kernel_distance(&limit_point) <= tol::KERNEL_DIST {
        return Err(GeomError::NotTransverse);
    }
    let flags: Vec<Option<ProjPoint>> = seq
        .iter()
        .map(|g| proximal_data(g).ok().map(|p| p.attracting_line))
        .collect();
    let proximal_from = flags
        .iter()
        .rposition(|f| f.is_none())
        .map_or(Some(0), |i| (i + 1 < seq.len()).then_some(i + 1));
    let q = (seq.len() / 4).max(1);
    let tail = &flags[seq.len() - q..];
    let devs: Vec<f64> = tail
        .iter()
        .map(|f| {
            f.as_ref()
                .map_or(f64::INFINITY, |l| l.angle_to(&limit_point))
        })
        .collect();
    let final_deviation = *devs.last().expect("nonempty tail");
    let tail_consistent =
        devs.iter().all(|d| d.is_finite()) && final_deviation <= devs[0] + tol::POINT_EQ;
    Ok(ProximalLimit {
        proximal: true,
        limit_point,
        proximal_from,
        tail_consistent,
        final_deviation,
        limit: t,
    })
}
