//! Subsystem Kraus representations of completely positive maps on bipartite systems.
//!
//! Given Kraus operators of a composite map and the initial state of one
//! factor, [`reduction::reduce_subsystem`] returns Kraus operators for the
//! other factor. Around that sit Choi-matrix CP diagnostics, separable-ensemble
//! analysis, and a two-qubit thermal decoherence model in [`casestudy`].

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod casestudy;
pub mod channels;
pub mod error;
pub mod io;
pub mod linalg;
pub mod parallel;
pub mod random;
pub mod reduction;
pub mod tol;
pub mod verify;

pub use channels::{
    apply_map, channel_distance, choi_matrix, completeness_defect, cp_verdict, ChoiMatrix,
    CpVerdict, DensityMatrix, KrausMap,
};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Subsystem};
pub use parallel::Execution;
pub use reduction::{reduce_subsystem, Bipartition, ReductionResult};
