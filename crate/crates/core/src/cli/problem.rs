use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::{PotentialKind, ProblemConfig, RunConfig, Schedule};
use super::CliError;
use crate::euclidean::{build_euclidean_problem, EuclideanPoint, QuadraticFunctional};
use crate::oracles::{barenblatt_quantiles, BarenblattParams, OUParams};
use crate::scheme::{Discretisation, SplitProblem};
use crate::wass1d::{
    build_wasserstein_problem, quantile_of_gaussian, EntropyKind, Ordering, PotentialSpec,
    QuantileDensity,
};

/// Closed-form reference available for a Wasserstein problem.
#[derive(Debug, Clone, Copy)]
pub enum WassOracle {
    Ou(OUParams),
    Barenblatt(BarenblattParams),
}

impl WassOracle {
    /// State at flow time `tau`.
    pub fn at(&self, tau: f64, cells: usize) -> QuantileDensity {
        match self {
            WassOracle::Ou(p) => {
                crate::oracles::ou_quantiles(p, tau, cells).expect("parameters validated")
            }
            WassOracle::Barenblatt(p) => {
                barenblatt_quantiles(p, p.t0 + tau, cells).expect("t >= t0")
            }
        }
    }
}

pub struct EuclideanSetup {
    pub problem: SplitProblem<EuclideanPoint>,
    pub x0: EuclideanPoint,
    pub f1: QuadraticFunctional,
    pub f2: QuadraticFunctional,
}

pub struct WassSetup {
    pub problem: SplitProblem<QuantileDensity>,
    pub x0: QuantileDensity,
    pub potential: PotentialSpec,
    pub kind: EntropyKind,
    pub order: Ordering,
    pub cells: usize,
    pub oracle: Option<WassOracle>,
}

pub enum Setup {
    Euclidean(EuclideanSetup),
    Wass(WassSetup),
}

pub fn build(cfg: &RunConfig) -> Result<Setup, CliError> {
    let config_err = |e: String| CliError::Config(e);
    Ok(match &cfg.problem {
        ProblemConfig::Euclidean { f1, f2, x0 } => Setup::Euclidean(EuclideanSetup {
            problem: build_euclidean_problem(f1.clone(), f2.clone())
                .map_err(|e| config_err(e.to_string()))?,
            x0: x0.clone(),
            f1: f1.clone(),
            f2: f2.clone(),
        }),
        ProblemConfig::FokkerPlanck {
            potential,
            order,
            cells,
            m0,
            sigma0,
        } => {
            let x0 = quantile_of_gaussian(*m0, *sigma0, *cells)
                .map_err(|e| config_err(e.to_string()))?;
            let oracle = match potential {
                PotentialKind::Quadratic { lambda } if *lambda > 0.0 => Some(WassOracle::Ou(
                    OUParams::new(*lambda, *m0, *sigma0).map_err(|e| config_err(e.to_string()))?,
                )),
                _ => None,
            };
            wass_setup(
                potential.spec(),
                EntropyKind::Boltzmann,
                *order,
                *cells,
                x0,
                oracle,
            )?
        }
        ProblemConfig::PorousMedium {
            potential,
            order,
            cells,
            m,
            t0,
        } => {
            let params = BarenblattParams::new(*m, *t0).map_err(|e| config_err(e.to_string()))?;
            let x0 = barenblatt_quantiles(&params, *t0, *cells)
                .map_err(|e| config_err(e.to_string()))?;
            let spec = potential.spec();
            let oracle = (spec.c() == 0.0).then_some(WassOracle::Barenblatt(params));
            wass_setup(
                spec,
                EntropyKind::Renyi { m: *m },
                *order,
                *cells,
                x0,
                oracle,
            )?
        }
    })
}

fn wass_setup(
    potential: PotentialSpec,
    kind: EntropyKind,
    order: Ordering,
    cells: usize,
    x0: QuantileDensity,
    oracle: Option<WassOracle>,
) -> Result<Setup, CliError> {
    let problem = build_wasserstein_problem(potential.clone(), kind, order)
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Setup::Wass(WassSetup {
        problem,
        x0,
        potential,
        kind,
        order,
        cells,
        oracle,
    }))
}

pub fn discretisation(cfg: &RunConfig) -> Result<Discretisation, CliError> {
    match &cfg.schedule {
        Schedule::Uniform(n) => Discretisation::uniform(*n, cfg.total_time),
        Schedule::Explicit(h) => Discretisation::new(h.clone()),
    }
    .map_err(|e| CliError::Config(e.to_string()))
}

/// Seeded comparison points for the inequality checks.
pub trait ProbeSampler<P> {
    /// A point of `D(φ)` away from the trajectory.
    fn domain_point(&self, rng: &mut ChaCha8Rng) -> P;
    /// A point of `D(φ)` near `y`.
    fn perturb(&self, y: &P, rng: &mut ChaCha8Rng) -> P;
}

pub struct EuclideanSampler {
    pub center: EuclideanPoint,
    pub scale: f64,
}

impl ProbeSampler<EuclideanPoint> for EuclideanSampler {
    fn domain_point(&self, rng: &mut ChaCha8Rng) -> EuclideanPoint {
        let n = self.center.len();
        &self.center + DVector::from_fn(n, |_, _| self.scale * rng.random_range(-1.0..1.0))
    }

    fn perturb(&self, y: &EuclideanPoint, rng: &mut ChaCha8Rng) -> EuclideanPoint {
        let r: f64 = 10f64.powf(rng.random_range(-3.0..0.0));
        y + DVector::from_fn(y.len(), |_, _| r * self.scale * rng.random_range(-1.0..1.0))
    }
}

/// Gaussian quantile vectors, and convex combinations with them, which stay
/// strictly monotone.
pub struct WassSampler {
    pub cells: usize,
}

impl ProbeSampler<QuantileDensity> for WassSampler {
    fn domain_point(&self, rng: &mut ChaCha8Rng) -> QuantileDensity {
        let mean = rng.random_range(-1.0..1.0);
        let sigma = rng.random_range(0.5..2.0);
        quantile_of_gaussian(mean, sigma, self.cells).expect("valid Gaussian")
    }

    fn perturb(&self, y: &QuantileDensity, rng: &mut ChaCha8Rng) -> QuantileDensity {
        let w = self.domain_point(rng);
        let s: f64 = 10f64.powf(rng.random_range(-3.0..0.0));
        let z = y
            .values()
            .iter()
            .zip(w.values())
            .map(|(a, b)| (1.0 - s) * a + s * b)
            .collect();
        QuantileDensity::new(z).expect("convex combination of monotone vectors")
    }
}
