//! KMS measures, transfer operators and phase portraits for rational maps on
//! the Riemann sphere and for self-similar affine systems.
//!
//! Everything is realized at the level of finitely atomic measures: the
//! transfer operator `F(δ_y) = Σ_{x ∈ R⁻¹(y)} δ_x`, its index-weighted
//! companion `G*`, the trace conditions (K1)/(K2), explicit finite-type KMS
//! measures anchored at branched points, and atomic approximants of the
//! Lyubich and Hutchinson measures.

pub mod error;
pub mod exact;
pub mod expr;
pub mod ifs;
pub mod kms;
pub mod measure;
pub mod polyroots;
pub mod projective;
pub mod ratmap;

pub use error::{Error, Result};
pub use expr::{parse_map, MapExpression};
pub use ifs::IfsSystem;
pub use measure::{AtomicMeasure, PlanePoint, Space, Support, TestFunctionLibrary};
pub use projective::SpherePoint;
pub use ratmap::RationalMap;

/// Default chordal clustering tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default cap on the number of atoms any single measure may carry.
pub const DEFAULT_ATOM_BUDGET: usize = 2_000_000;

/// Numerical knobs shared by the engines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    /// Chordal (sphere) or Euclidean (plane) merge tolerance.
    pub tol: f64,
    pub atom_budget: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { tol: DEFAULT_TOL, atom_budget: DEFAULT_ATOM_BUDGET }
    }
}
