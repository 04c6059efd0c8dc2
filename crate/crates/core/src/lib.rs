//! Finite-dimensional time-dependent cryptohermitian quantum mechanics.
//!
//! A non-Hermitian `H(t)` with real spectrum becomes a physical observable
//! once paired with a metric `Θ = Ω†Ω`. This crate builds such metrics and
//! Dyson maps, propagates states with the covariant generator
//! `H − iΩ⁻¹Ω̇`, compares it with the lower-case Hermitian picture and the
//! naive law, and decides whether a time-independent metric can serve a
//! polynomial `H(t)`.

// `!(x > 0.0)` is used on purpose so NaN falls into the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biorthogonal;
pub mod dyson;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod metric;
pub mod models;
pub mod quasistationary;
pub mod registry;
pub mod taylor;

pub use biorthogonal::{biorthogonal_decompose, BiorthonormalSystem};
pub use dyson::{ConstantDyson, DerivativeSource, DysonFamily, ExpPolyDyson, TabulatedDyson};
pub use error::{Error, Result};
pub use evolution::{
    crosscheck_pictures, evolution_operators, generator, propagate_h, propagate_naive, propagate_pair,
    CrosscheckReport, StateTrajectory, TimeGrid,
};
pub use linalg::{Matrix, Vector};
pub use metric::{
    dyson_from_metric, expectation, hermitize, metric_from_dyson, metric_from_spectral, physical_inner, projector_pair,
    MetricOperator,
};
pub use quasistationary::{qs_certify, qs_scan, qs_solve, QsCertificate, QsStatus, ScanStatistics};
pub use taylor::TaylorHamiltonian;
