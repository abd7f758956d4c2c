//! Numerical convex real projective geometry.
//!
//! The crate is organised bottom-up:
//!
//! * [`projlin`]: projective points, maps and endomorphism classes, cross
//!   ratios, eigenvalue moduli, proximality and limits of powers.
//! * [`domains`]: a catalog of properly convex domains (simplices, ellipsoids,
//!   polytopes, the projectivized 3×3 PSD cone and joins of these) with
//!   membership, chords, faces, extreme points and the simplicial distance on
//!   the boundary.
//! * [`hilbert`]: the Hilbert metric, geodesic checks and minimal translation
//!   lengths.
//! * [`dynamics`]: orbits, limit endomorphisms, ping-pong, north-south
//!   dynamics and the rank one isometry predicate.
//! * [`rankcheck`]: sampled evaluation of the higher rank conditions and the
//!   aggregated `rankreport/1` document.
//! * [`cli`]: the command implementations behind the `convexproj` binary.

pub mod cli;
pub mod domains;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod projlin;
pub mod rankcheck;
pub mod sampling;
pub mod tol;

pub use error::{GeomError, Result};
