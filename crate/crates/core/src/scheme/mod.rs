//! Splitting scheme over an abstract metric space.
//!
//! A [`SplitProblem`] bundles a metric with two functionals `φ¹`, `φ²`, each
//! of which knows how to evaluate itself and how to compute its resolvent
//!
//! ```text
//! J_h x = argmin_y  φ(y) + d²(x, y) / (2h).
//! ```
//!
//! [`run_scheme`] iterates `x^k = J²_{h_k} J¹_{h_k} x^{k-1}` and records the
//! bookkeeping (`δ_k`, `Δ_k`, step distances, energies) that the diagnostic
//! checks in [`diagnostics`] consume.
//!
//! # Clocks
//!
//! The discretisation clock is `t^k = 2 Σ_{j≤k} h_j`: every step spends `h_k`
//! in each of the two resolvents. The limit curve `u` of the scheme satisfies
//! `d/dt d²(u(t), y) ≤ φ(y) − φ(u(t))` on that clock, so it is the gradient flow
//! of `φ` run at half speed. Closed-form flows are therefore compared at *flow
//! time* `t / 2` (see [`flow_time`]).

pub mod convergence;
pub mod diagnostics;
pub mod discretisation;
pub mod evi;
pub mod gronwall;
pub mod interpolants;
pub mod tolerance;
pub mod trajectory;

use thiserror::Error;

use crate::energy::Energy;

pub use convergence::{
    trotter_convergence_study, ConvergenceRow, ConvergenceTable, Reference, SampledPath,
};
pub use diagnostics::{
    check_a3, check_apriori, check_discrete_evi, check_r_integral, moreau_yosida_value,
    verify_devi, A3Constants, A3Report, AprioriReport, ChiMode, DeviReport, DiscreteEviReport,
    RIntegralReport,
};
pub use discretisation::Discretisation;
pub use evi::{check_evi_integral, EviEntry, EviReport, TimeSamples};
pub use gronwall::gronwall_bound;
pub use interpolants::{ell, interpolants, piecewise_paths, Interpolants};
pub use tolerance::TolerancePolicy;
pub use trajectory::{run_scheme, StepRecord, TrajectoryRecord};

/// Converts a discretisation-clock time `t` into the time of the gradient flow
/// the scheme approximates.
pub fn flow_time(t: f64) -> f64 {
    0.5 * t
}

/// Inverse of [`flow_time`].
pub fn scheme_time(flow_t: f64) -> f64 {
    2.0 * flow_t
}

/// Which of the two functionals of a [`SplitProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Component {
    First,
    Second,
}

impl Component {
    pub fn index(self) -> u8 {
        match self {
            Component::First => 1,
            Component::Second => 2,
        }
    }
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "phi{}", self.index())
    }
}

/// Failure of an inner resolvent solve.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct SolveError(pub String);

/// Output of a resolvent computation.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved<P> {
    pub point: P,
    /// Bound on the metric gradient of the Moreau-Yosida objective at `point`;
    /// zero for closed-form resolvents.
    pub certificate: f64,
}

impl<P> Resolved<P> {
    pub fn exact(point: P) -> Self {
        Resolved {
            point,
            certificate: 0.0,
        }
    }
}

pub trait Metric<P>: Send + Sync {
    fn distance(&self, x: &P, y: &P) -> f64;

    fn distance_sq(&self, x: &P, y: &P) -> f64 {
        let d = self.distance(x, y);
        d * d
    }
}

/// A lower semicontinuous functional together with its resolvent.
pub trait Functional<P>: Send + Sync {
    fn name(&self) -> String;

    fn value(&self, x: &P) -> Energy;

    fn resolvent(&self, h: f64, x: &P) -> Result<Resolved<P>, SolveError>;

    /// Membership in the effective domain `D(φ)`.
    fn contains(&self, x: &P) -> bool {
        self.value(x).is_finite()
    }
}

/// `φ ≡ 0` with the identity resolvent.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroFunctional;

impl<P: Clone> Functional<P> for ZeroFunctional {
    fn name(&self) -> String {
        "zero".into()
    }

    fn value(&self, _x: &P) -> Energy {
        Energy::Finite(0.0)
    }

    fn resolvent(&self, _h: f64, x: &P) -> Result<Resolved<P>, SolveError> {
        Ok(Resolved::exact(x.clone()))
    }
}

/// Metric space with a split functional `φ = φ¹ + φ²`.
pub struct SplitProblem<P> {
    metric: Box<dyn Metric<P>>,
    first: Box<dyn Functional<P>>,
    second: Box<dyn Functional<P>>,
}

impl<P> SplitProblem<P> {
    pub fn new(
        metric: impl Metric<P> + 'static,
        first: impl Functional<P> + 'static,
        second: impl Functional<P> + 'static,
    ) -> Self {
        SplitProblem {
            metric: Box::new(metric),
            first: Box::new(first),
            second: Box::new(second),
        }
    }

    pub fn from_boxed(
        metric: Box<dyn Metric<P>>,
        first: Box<dyn Functional<P>>,
        second: Box<dyn Functional<P>>,
    ) -> Self {
        SplitProblem {
            metric,
            first,
            second,
        }
    }

    pub fn functional(&self, which: Component) -> &dyn Functional<P> {
        match which {
            Component::First => self.first.as_ref(),
            Component::Second => self.second.as_ref(),
        }
    }

    pub fn distance(&self, x: &P, y: &P) -> f64 {
        self.metric.distance(x, y)
    }

    pub fn distance_sq(&self, x: &P, y: &P) -> f64 {
        self.metric.distance_sq(x, y)
    }

    pub fn energy(&self, which: Component, x: &P) -> Energy {
        self.functional(which).value(x)
    }

    /// `φ(x) = φ¹(x) + φ²(x)`, infinite outside `D(φ¹) ∩ D(φ²)`.
    pub fn phi(&self, x: &P) -> Energy {
        self.first.value(x) + self.second.value(x)
    }

    pub fn resolvent(&self, which: Component, h: f64, x: &P) -> Result<Resolved<P>, SolveError> {
        self.functional(which).resolvent(h, x)
    }

    pub fn in_domain(&self, x: &P) -> bool {
        self.first.contains(x) && self.second.contains(x)
    }

    pub fn describe(&self) -> String {
        format!("({}, {})", self.first.name(), self.second.name())
    }
}

/// Errors raised by the scheme runner and the diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("discretisation must contain at least one step")]
    EmptyDiscretisation,
    #[error("step {index} has invalid size {value} (must be finite and > 0)")]
    InvalidStep { index: usize, value: f64 },
    #[error("resolvent of {which} failed at step {step}: {source}")]
    ResolventFailure {
        step: usize,
        which: Component,
        source: SolveError,
    },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("time {t} outside [0, {end}]")]
    OutOfRange { t: f64, end: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("sample grid does not resolve the interval ({a}, {b})")]
    GridTooCoarse { a: f64, b: f64 },
}
