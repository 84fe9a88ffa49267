//! Topological molecular featurization and model-comparison statistics.
//!
//! The pipeline lifts a molecular graph to a cell complex of dimensions 0..3,
//! extracts compressed topological features (Betti numbers, Hodge Laplacian
//! spectra, spectral chains, skeleton centralities, shortest-path statistics)
//! into a fixed-length vector, and provides the statistical machinery used to
//! compare cross-validated models: Nadeau-Bengio corrected paired tests, Holm
//! step-down adjustment, and non-parametric bootstrap intervals.

pub mod ecc;
pub mod lifting;
pub mod molio;
pub mod pna;
pub mod rng;
pub mod spectral;
pub mod statlab;
#[doc(hidden)]
pub mod testutil;
