//! The line as a Wasserstein space.
//!
//! Measures are quantile vectors with uniform cell mass (see
//! [`QuantileDensity`]), which makes `W₂` an `L²` distance and turns the
//! potential energy, the Boltzmann entropy and the Rényi entropy into convex
//! functions of the vector. Their resolvents are solved by pointwise Newton
//! (potential) and by damped Newton with a tridiagonal Hessian (entropies).

mod compat;
mod functionals;
mod quantile;
mod resolvent;

use thiserror::Error;

pub use compat::{
    a3_constants, build_wasserstein_problem, check_compatibility, CompatibilityReport, Ordering,
    PairingCase, Verdict,
};
pub use functionals::{
    entropy, potential_energy, Entropy, EntropyKind, PotentialEnergy, PotentialSpec,
};
pub use quantile::{
    normal_cdf, normal_pdf, normal_quantile, quantile_of_gaussian, quantile_of_mixture,
    w2_distance, w2_distance_sq, MixtureComponent, QuantileDensity, W2Metric, GAP_FLOOR,
};
pub use resolvent::{
    check_optimality_tudorascu, resolvent_entropy, resolvent_potential, EntropySolve,
    SolverSettings,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WassError {
    #[error("quantile vector needs at least 4 cells, got {0}")]
    TooFewCells(usize),
    #[error("quantile value {0} is not finite")]
    NonFinite(usize),
    #[error("quantile vector is not monotone at cell {0}")]
    NonMonotone(usize),
    #[error("cell counts differ ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("Newton solve failed{}: residual {residual:e} after {iterations} iterations", index.map(|i| format!(" at cell {i}")).unwrap_or_default())]
    NewtonFailure {
        index: Option<usize>,
        iterations: usize,
        residual: f64,
    },
    #[error("quantile inversion failed: {0}")]
    InversionFailure(String),
}
