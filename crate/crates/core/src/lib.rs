//! Trotter-type splitting for gradient flows in metric spaces.
//!
//! The scheme alternates the resolvents of two functionals,
//! `x^k = J²_{h_k} J¹_{h_k} x^{k−1}`, and the [`scheme`] module provides both
//! the runner and numerical checks of the inequalities that govern its
//! convergence. Two concrete spaces are included: [`euclidean`] (convex
//! quadratics, with closed-form resolvents and flows) and [`wass1d`]
//! (probability measures on the line with the 2-Wasserstein metric, where the
//! splitting of entropy and potential energy approximates Fokker-Planck and
//! porous-medium dynamics). [`oracles`] holds the reference solutions and
//! [`cli`] the command-line front end.

pub mod cli;
pub mod energy;
pub mod euclidean;
pub mod oracles;
pub mod scheme;
pub mod wass1d;

pub use energy::Energy;
pub use scheme::{
    run_scheme, Component, Discretisation, Functional, Metric, Resolved, SchemeError, SolveError,
    SplitProblem, TolerancePolicy, TrajectoryRecord,
};
