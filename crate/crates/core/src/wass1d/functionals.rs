use std::fmt;
use std::sync::Arc;

use super::quantile::QuantileDensity;
use super::resolvent::{resolvent_entropy, resolvent_potential, SolverSettings};
use super::WassError;
use crate::energy::Energy;
use crate::scheme::{Functional, Resolved, SolveError};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convex potential `V` with `0 ≤ V″ ≤ c`.
#[derive(Clone)]
pub struct PotentialSpec {
    name: String,
    v: ScalarFn,
    dv: ScalarFn,
    d2v: ScalarFn,
    c: f64,
    /// `Some(λ)` when `V = λx²/2`, whose resolvent is a plain division.
    quadratic: Option<f64>,
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("name", &self.name)
            .field("c", &self.c)
            .finish()
    }
}

impl PotentialSpec {
    /// Builds and validates a custom potential from `V`, `V′`, `V″` and the
    /// curvature bound `c`.
    pub fn new(
        name: impl Into<String>,
        v: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2v: impl Fn(f64) -> f64 + Send + Sync + 'static,
        c: f64,
    ) -> Result<Self, WassError> {
        let spec = PotentialSpec {
            name: name.into(),
            v: Arc::new(v),
            dv: Arc::new(dv),
            d2v: Arc::new(d2v),
            c,
            quadratic: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `V(x) = λx²/2`, `c = λ`.
    pub fn quadratic(lambda: f64) -> Result<Self, WassError> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(WassError::InvalidParameter(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        let mut spec = PotentialSpec::new(
            format!("quadratic({lambda})"),
            move |x| 0.5 * lambda * x * x,
            move |x| lambda * x,
            move |_| lambda,
            lambda,
        )?;
        spec.quadratic = Some(lambda);
        Ok(spec)
    }

    pub fn zero() -> Self {
        PotentialSpec::quadratic(0.0).expect("zero potential is valid")
    }

    /// `V(x) = a log cosh(x)`, `c = a`.
    pub fn log_cosh(a: f64) -> Result<Self, WassError> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(WassError::InvalidParameter(format!(
                "scale must be finite and >= 0, got {a}"
            )));
        }
        PotentialSpec::new(
            format!("log_cosh({a})"),
            move |x: f64| {
                // log cosh x = |x| + log(1 + e^{-2|x|}) − log 2, stable for large |x|
                let y = x.abs();
                a * (y + (-2.0 * y).exp().ln_1p() - std::f64::consts::LN_2)
            },
            move |x: f64| a * x.tanh(),
            move |x: f64| a / x.cosh().powi(2),
            a,
        )
    }

    /// Samples `V″` on a wide grid and compares `V′` with central differences
    /// of `V`.
    pub fn validate(&self) -> Result<(), WassError> {
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(WassError::InvalidParameter(format!(
                "curvature bound must be finite and >= 0, got {}",
                self.c
            )));
        }
        let eps = 1e-5;
        for j in 0..=800 {
            let x = -40.0 + 0.1 * j as f64;
            let d2 = (self.d2v)(x);
            if !(d2 >= -1e-12 && d2 <= self.c + 1e-12) {
                return Err(WassError::InvalidParameter(format!(
                    "V''({x}) = {d2} outside [0, c = {}]",
                    self.c
                )));
            }
            let fd = ((self.v)(x + eps) - (self.v)(x - eps)) / (2.0 * eps);
            let d1 = (self.dv)(x);
            if (d1 - fd).abs() > 1e-6 * (1.0 + (self.v)(x).abs() + d1.abs()) {
                return Err(WassError::InvalidParameter(format!(
                    "V'({x}) = {d1} disagrees with difference quotient {fd}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn quadratic_coefficient(&self) -> Option<f64> {
        self.quadratic
    }

    pub fn v(&self, x: f64) -> f64 {
        (self.v)(x)
    }

    pub fn dv(&self, x: f64) -> f64 {
        (self.dv)(x)
    }

    pub fn d2v(&self, x: f64) -> f64 {
        (self.d2v)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyKind {
    /// `∫ ρ log ρ`
    Boltzmann,
    /// `(1/(m−1)) ∫ ρ^m`, `m ∈ (1, 4]`
    Renyi { m: f64 },
}

impl EntropyKind {
    pub fn renyi(m: f64) -> Result<Self, WassError> {
        if !(m > 1.0 && m <= 4.0) {
            return Err(WassError::InvalidParameter(format!(
                "Renyi exponent must lie in (1, 4], got {m}"
            )));
        }
        Ok(EntropyKind::Renyi { m })
    }

    pub fn validate(self) -> Result<Self, WassError> {
        match self {
            EntropyKind::Boltzmann => Ok(self),
            EntropyKind::Renyi { m } => EntropyKind::renyi(m),
        }
    }

    pub fn exponent(self) -> Option<f64> {
        match self {
            EntropyKind::Boltzmann => None,
            EntropyKind::Renyi { m } => Some(m),
        }
    }
}

impl fmt::Display for EntropyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyKind::Boltzmann => write!(f, "boltzmann"),
            EntropyKind::Renyi { m } => write!(f, "renyi({m})"),
        }
    }
}

/// `(1/N) Σ V(x_i)`
pub fn potential_energy(mu: &QuantileDensity, pot: &PotentialSpec) -> f64 {
    mu.values().iter().map(|&x| pot.v(x)).sum::<f64>() / mu.len() as f64
}

/// Discrete entropy with gaps `g_j = x_{j+1} − x_j` and local density
/// `1/(N g_j)`:
///
/// * Boltzmann: `−(1/(N−1)) Σ log(N g_j)`
/// * Rényi: `(1/((m−1)(N−1))) Σ (N g_j)^{1−m}`
pub fn entropy(mu: &QuantileDensity, kind: EntropyKind) -> Result<f64, WassError> {
    if let Some(i) = mu.first_collapsed_gap() {
        return Err(WassError::NonMonotone(i));
    }
    let n = mu.len() as f64;
    let value = match kind {
        EntropyKind::Boltzmann => -mu.gaps().map(|g| (n * g).ln()).sum::<f64>() / (n - 1.0),
        EntropyKind::Renyi { m } => {
            mu.gaps().map(|g| (n * g).powf(1.0 - m)).sum::<f64>() / ((m - 1.0) * (n - 1.0))
        }
    };
    Ok(value)
}

/// Potential energy as a functional on quantile vectors.
#[derive(Debug, Clone)]
pub struct PotentialEnergy {
    pub spec: PotentialSpec,
    pub settings: SolverSettings,
}

impl PotentialEnergy {
    pub fn new(spec: PotentialSpec) -> Self {
        PotentialEnergy {
            spec,
            settings: SolverSettings::default(),
        }
    }
}

impl Functional<QuantileDensity> for PotentialEnergy {
    fn name(&self) -> String {
        format!("V[{}]", self.spec.name())
    }

    fn value(&self, x: &QuantileDensity) -> Energy {
        Energy::from(potential_energy(x, &self.spec))
    }

    fn resolvent(
        &self,
        h: f64,
        x: &QuantileDensity,
    ) -> Result<Resolved<QuantileDensity>, SolveError> {
        resolvent_potential(x, &self.spec, h, &self.settings)
            .map(|(point, certificate)| Resolved { point, certificate })
            .map_err(|e| SolveError(e.to_string()))
    }
}

/// Boltzmann or Rényi entropy as a functional on quantile vectors; infinite on
/// vectors with a collapsed cell.
#[derive(Debug, Clone)]
pub struct Entropy {
    pub kind: EntropyKind,
    pub settings: SolverSettings,
}

impl Entropy {
    pub fn new(kind: EntropyKind) -> Self {
        Entropy {
            kind,
            settings: SolverSettings::default(),
        }
    }
}

impl Functional<QuantileDensity> for Entropy {
    fn name(&self) -> String {
        match self.kind {
            EntropyKind::Boltzmann => "H".into(),
            EntropyKind::Renyi { m } => format!("F[m={m}]"),
        }
    }

    fn value(&self, x: &QuantileDensity) -> Energy {
        entropy(x, self.kind)
            .map(Energy::from)
            .unwrap_or(Energy::Infinite)
    }

    fn resolvent(
        &self,
        h: f64,
        x: &QuantileDensity,
    ) -> Result<Resolved<QuantileDensity>, SolveError> {
        resolvent_entropy(x, self.kind, h, &self.settings)
            .map(|s| Resolved {
                point: s.point,
                certificate: s.gradient_norm,
            })
            .map_err(|e| SolveError(e.to_string()))
    }
}
