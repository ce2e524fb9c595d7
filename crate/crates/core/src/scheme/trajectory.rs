use crate::energy::Energy;

use super::{Component, Discretisation, SchemeError, SplitProblem};

/// Bookkeeping for one step `x^{k-1} → x̂^k → x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<P> {
    /// `x̂^k = J¹_{h_k} x^{k-1}`
    pub half: P,
    /// `x^k = J²_{h_k} x̂^k`
    pub full: P,
    pub phi1_half: f64,
    /// `φ²(x̂^k)`; may be `+∞` since `J¹` only maps into the closure of `D(φ²)`.
    pub phi2_half: Energy,
    pub phi1_full: f64,
    pub phi2_full: f64,
    /// `δ_k = [φ¹(x^k) − φ¹(x̂^k)]⁺`
    pub delta: f64,
    /// `Δ_k = Σ_{j≤k} δ_j`
    pub cum_delta: f64,
    /// `d²(x^k, x^{k-1})`
    pub step_dist_sq: f64,
    /// Largest solver certificate of the two resolvents.
    pub certificate: f64,
}

impl<P> StepRecord<P> {
    pub fn phi_full(&self) -> f64 {
        self.phi1_full + self.phi2_full
    }
}

/// Immutable record of a scheme run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord<P> {
    initial: P,
    phi1_initial: f64,
    phi2_initial: f64,
    steps: Vec<StepRecord<P>>,
    disc: Discretisation,
}

impl<P> TrajectoryRecord<P> {
    /// Assembles a record from raw parts without recomputing anything.
    ///
    /// Used to load recorded runs and to build corrupted fixtures; the
    /// diagnostics are expected to flag inconsistent bookkeeping.
    pub fn from_parts_unchecked(
        initial: P,
        phi1_initial: f64,
        phi2_initial: f64,
        steps: Vec<StepRecord<P>>,
        disc: Discretisation,
    ) -> Result<Self, SchemeError> {
        if steps.len() != disc.len() {
            return Err(SchemeError::InvalidInput(format!(
                "record has {} steps but discretisation has {}",
                steps.len(),
                disc.len()
            )));
        }
        Ok(TrajectoryRecord {
            initial,
            phi1_initial,
            phi2_initial,
            steps,
            disc,
        })
    }

    pub fn into_parts(self) -> (P, f64, f64, Vec<StepRecord<P>>, Discretisation) {
        (
            self.initial,
            self.phi1_initial,
            self.phi2_initial,
            self.steps,
            self.disc,
        )
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn discretisation(&self) -> &Discretisation {
        &self.disc
    }

    pub fn steps(&self) -> &[StepRecord<P>] {
        &self.steps
    }

    /// Step `k` (1-based).
    pub fn step(&self, k: usize) -> &StepRecord<P> {
        &self.steps[k - 1]
    }

    pub fn initial(&self) -> &P {
        &self.initial
    }

    /// `x^k` for `k = 0, …, n`.
    pub fn point(&self, k: usize) -> &P {
        if k == 0 {
            &self.initial
        } else {
            &self.steps[k - 1].full
        }
    }

    pub fn final_point(&self) -> &P {
        self.point(self.len())
    }

    /// `φ(x^k)` for `k = 0, …, n`.
    pub fn phi(&self, k: usize) -> f64 {
        if k == 0 {
            self.phi1_initial + self.phi2_initial
        } else {
            self.steps[k - 1].phi_full()
        }
    }

    pub fn phi1(&self, k: usize) -> f64 {
        if k == 0 {
            self.phi1_initial
        } else {
            self.steps[k - 1].phi1_full
        }
    }

    pub fn phi2(&self, k: usize) -> f64 {
        if k == 0 {
            self.phi2_initial
        } else {
            self.steps[k - 1].phi2_full
        }
    }

    /// `δ_k` (1-based).
    pub fn delta(&self, k: usize) -> f64 {
        self.steps[k - 1].delta
    }

    /// `Δ_k`, with `Δ_0 = 0`.
    pub fn cum_delta(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.steps[k - 1].cum_delta
        }
    }

    pub fn max_certificate(&self) -> f64 {
        self.steps.iter().map(|s| s.certificate).fold(0.0, f64::max)
    }
}

/// Runs the splitting scheme `x̂^k = J¹_{h_k} x^{k-1}`, `x^k = J²_{h_k} x̂^k`.
pub fn run_scheme<P: Clone>(
    problem: &SplitProblem<P>,
    x0: &P,
    disc: &Discretisation,
) -> Result<TrajectoryRecord<P>, SchemeError> {
    let (phi1_initial, phi2_initial) = match (
        problem.energy(Component::First, x0).finite(),
        problem.energy(Component::Second, x0).finite(),
    ) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(SchemeError::DomainViolation(
                "initial point is outside D(phi1) ∩ D(phi2)".into(),
            ))
        }
    };

    let mut steps: Vec<StepRecord<P>> = Vec::with_capacity(disc.len());
    let mut cum_delta = 0.0;
    for (idx, &h) in disc.steps().iter().enumerate() {
        let k = idx + 1;
        let prev = steps.last().map(|s| &s.full).unwrap_or(x0);

        let half = problem
            .resolvent(Component::First, h, prev)
            .map_err(|source| SchemeError::ResolventFailure {
                step: k,
                which: Component::First,
                source,
            })?;
        let full = problem
            .resolvent(Component::Second, h, &half.point)
            .map_err(|source| SchemeError::ResolventFailure {
                step: k,
                which: Component::Second,
                source,
            })?;

        let phi1_half = problem
            .energy(Component::First, &half.point)
            .finite()
            .ok_or_else(|| {
                SchemeError::DomainViolation(format!("half-step point of step {k} left D(phi1)"))
            })?;
        let phi2_half = problem.energy(Component::Second, &half.point);
        let (phi1_full, phi2_full) = match (
            problem.energy(Component::First, &full.point).finite(),
            problem.energy(Component::Second, &full.point).finite(),
        ) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(SchemeError::DomainViolation(format!(
                    "full-step point of step {k} left D(phi)"
                )))
            }
        };

        let delta = (phi1_full - phi1_half).max(0.0);
        cum_delta += delta;
        let step_dist_sq = problem.distance_sq(&full.point, prev);
        steps.push(StepRecord {
            half: half.point,
            full: full.point,
            phi1_half,
            phi2_half,
            phi1_full,
            phi2_full,
            delta,
            cum_delta,
            step_dist_sq,
            certificate: half.certificate.max(full.certificate),
        });
    }

    Ok(TrajectoryRecord {
        initial: x0.clone(),
        phi1_initial,
        phi2_initial,
        steps,
        disc: disc.clone(),
    })
}
