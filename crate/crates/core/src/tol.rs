//! Numerical thresholds shared across the crate.
//!
//! Every predicate that is exact in the continuum is decided numerically with
//! one of these bands. Call sites that accept a tolerance override take it as an
//! explicit parameter; the constants are the defaults.

/// Equality of canonical projective points (max-norm of the difference).
pub const POINT_EQ: f64 = 1e-9;

/// `|det|` lower bound for a unit-Frobenius matrix to count as invertible.
pub const DET_MIN: f64 = 1e-12;

/// Singular values below `RANK_REL * σ₁` are treated as zero.
pub const RANK_REL: f64 = 1e-9;

/// Relative gap `(λ₁ − λ₂)/λ₁` above which a map is proximal.
pub const PROXIMAL_GAP: f64 = 1e-9;

/// Line/hyperplane transversality margin.
pub const TRANSVERSE: f64 = 1e-9;

/// Distance from the kernel below which a point counts as in the kernel.
pub const KERNEL_DIST: f64 = 1e-9;

/// Frobenius norm under which a composite endomorphism is zero.
pub const ZERO_ENDO: f64 = 1e-12;

/// Boundary band for the signed membership margin in chart coordinates.
pub const BOUNDARY_BAND: f64 = 1e-10;

/// Band for the midpoint test deciding whether a segment lies in the boundary.
pub const SEGMENT_BAND: f64 = 1e-9;

/// Cauchy spread for a sequence in `P(End)` to count as converged.
pub const CAUCHY: f64 = 1e-8;

/// Transversality margin demanded of ping-pong inputs.
pub const PING_PONG_MARGIN: f64 = 1e-6;

/// Samples used on a segment when no exact boundary-segment test exists.
pub const SEGMENT_SAMPLES: usize = 33;
