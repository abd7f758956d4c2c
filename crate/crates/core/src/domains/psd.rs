//! Coordinates on the cone of 3×3 symmetric matrices.
//!
//! A symmetric matrix is stored as `(a11, a22, a33, √2·a12, √2·a13, √2·a23)`,
//! so the Euclidean inner product of coordinates is the Frobenius product and
//! congruences `X ↦ M X Mᵀ` act linearly.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3};

use crate::error::Result;
use crate::projlin::ProjMap;

pub const DIM: usize = 6;

const OFF: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

pub fn to_matrix(v: &DVector<f64>) -> Matrix3<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        m[(i, i)] = v[i];
    }
    for (k, &(i, j)) in OFF.iter().enumerate() {
        m[(i, j)] = v[3 + k] * s;
        m[(j, i)] = v[3 + k] * s;
    }
    m
}

pub fn from_matrix(m: &Matrix3<f64>) -> DVector<f64> {
    let r = std::f64::consts::SQRT_2;
    let mut v = DVector::zeros(DIM);
    for i in 0..3 {
        v[i] = m[(i, i)];
    }
    for (k, &(i, j)) in OFF.iter().enumerate() {
        v[3 + k] = 0.5 * (m[(i, j)] + m[(j, i)]) * r;
    }
    v
}

/// Rank-one point `[z zᵀ]`.
pub fn outer(z: &Vector3<f64>) -> DVector<f64> {
    from_matrix(&(z * z.transpose()))
}

/// Eigenvalues ascending with matching eigenvectors.
pub fn sorted_eigen(m: &Matrix3<f64>) -> ([f64; 3], [Vector3<f64>; 3]) {
    let e = SymmetricEigen::new(*m);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.map(|i| e.eigenvalues[i]);
    let vecs = idx.map(|i| e.eigenvectors.column(i).into_owned());
    (vals, vecs)
}

pub fn min_eigenvalue(v: &DVector<f64>) -> f64 {
    sorted_eigen(&to_matrix(v)).0[0]
}

/// Eigenvectors whose eigenvalue is at most `threshold` (an orthonormal kernel
/// basis for a boundary point).
pub fn kernel(v: &DVector<f64>, threshold: f64) -> Vec<Vector3<f64>> {
    let (vals, vecs) = sorted_eigen(&to_matrix(v));
    (0..3)
        .filter(|&i| vals[i] <= threshold)
        .map(|i| vecs[i])
        .collect()
}

/// Eigenvectors whose eigenvalue exceeds `threshold` (a range basis).
pub fn range(v: &DVector<f64>, threshold: f64) -> Vec<Vector3<f64>> {
    let (vals, vecs) = sorted_eigen(&to_matrix(v));
    (0..3)
        .filter(|&i| vals[i] > threshold)
        .map(|i| vecs[i])
        .collect()
}

/// Orthonormal coordinate basis of `{U S Uᵀ : S symmetric}` for orthonormal
/// columns `U`.
pub fn span_of_range(u: &[Vector3<f64>]) -> Vec<DVector<f64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for a in 0..u.len() {
        out.push(outer(&u[a]));
        for b in (a + 1)..u.len() {
            let m = (u[a] * u[b].transpose() + u[b] * u[a].transpose()) * s;
            out.push(from_matrix(&m));
        }
    }
    out
}

/// The linear map `X ↦ M X Mᵀ` in coordinates.
pub fn congruence(m: &Matrix3<f64>) -> Result<ProjMap> {
    let mut cols = Vec::with_capacity(DIM);
    for j in 0..DIM {
        let mut e = DVector::zeros(DIM);
        e[j] = 1.0;
        let x = to_matrix(&e);
        cols.push(from_matrix(&(m * x * m.transpose())));
    }
    ProjMap::new(DMatrix::from_columns(&cols))
}
