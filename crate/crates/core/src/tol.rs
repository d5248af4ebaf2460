//! Default tolerances.

/// Structural identities: Hermiticity, unitarity, Gram matrices, reconstruction.
pub const STRUCTURAL: f64 = 1e-12;

/// Model-level checks, e.g. completeness of the case-study Kraus set.
pub const MODEL: f64 = 1e-8;

/// Relative cutoff below which B-matrix eigenvalues are dropped.
pub const TRUNCATION: f64 = 1e-12;

/// B-matrix eigenvalues below this are reported as a non-CP signal.
pub const NEGATIVE_B: f64 = -1e-8;
