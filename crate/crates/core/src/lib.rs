//! Schur multipliers with vector-valued symbols: Schatten norms, row/column
//! spaces `R_p`, `C_p`, `RC_p`, Riesz-Schur transforms, a zoo of classical
//! symbols, Gaussian Monte Carlo checks, lower-bound norm estimators and the
//! seeded experiment suites behind the command-line runner.

pub mod error;
pub mod family;
pub mod gaussian;
pub mod linalg;
pub mod norm_lab;
pub mod riesz;
pub mod schur;
pub mod suite;
pub mod vector_valued;
pub mod zoo;

pub use error::{Error, Result};
pub use family::{CVector, Conjugation, VectorFamily};
pub use linalg::ComplexMatrix;
pub use riesz::{RieszInstance, RieszMeasurement};
pub use norm_lab::{estimate_sp_norm, EstimateOptions, NormEstimate};
pub use schur::{apply_multiplier, Provenance, SchurSymbol};
pub use suite::{run_suite, ExperimentReport, Format, SuiteConfig};
pub use vector_valued::{duality_bracket, RcNorm, SplitOptions, VectorValuedElement};
