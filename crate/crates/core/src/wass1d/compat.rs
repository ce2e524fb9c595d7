use serde::Serialize;

use super::functionals::{
    entropy, potential_energy, Entropy, EntropyKind, PotentialEnergy, PotentialSpec,
};
use super::quantile::{QuantileDensity, W2Metric};
use super::resolvent::{resolvent_entropy, resolvent_potential, SolverSettings};
use super::WassError;
use crate::scheme::{A3Constants, ChiMode, SplitProblem};

/// Which functional is resolved first in each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Ordering {
    /// `φ¹` = entropy, `φ²` = potential energy.
    EntropyFirst,
    /// `φ¹` = potential energy, `φ²` = entropy.
    PotentialFirst,
}

/// The four admissible pairings of a potential energy with an entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairingCase {
    /// `(H, V)`
    EntropyPotential,
    /// `(V, H)`
    PotentialEntropy,
    /// `(F, V)`
    RenyiPotential,
    /// `(V, F)`
    PotentialRenyi,
}

impl PairingCase {
    pub fn of(kind: EntropyKind, order: Ordering) -> Self {
        match (kind, order) {
            (EntropyKind::Boltzmann, Ordering::EntropyFirst) => PairingCase::EntropyPotential,
            (EntropyKind::Boltzmann, Ordering::PotentialFirst) => PairingCase::PotentialEntropy,
            (EntropyKind::Renyi { .. }, Ordering::EntropyFirst) => PairingCase::RenyiPotential,
            (EntropyKind::Renyi { .. }, Ordering::PotentialFirst) => PairingCase::PotentialRenyi,
        }
    }

    /// Case number `1..=4` in the usual listing `(H,V), (V,H), (F,V), (V,F)`.
    pub fn number(self) -> u8 {
        match self {
            PairingCase::EntropyPotential => 1,
            PairingCase::PotentialEntropy => 2,
            PairingCase::RenyiPotential => 3,
            PairingCase::PotentialRenyi => 4,
        }
    }
}

pub fn build_wasserstein_problem(
    pot: PotentialSpec,
    kind: EntropyKind,
    order: Ordering,
) -> Result<SplitProblem<QuantileDensity>, WassError> {
    let kind = kind.validate()?;
    pot.validate()?;
    let v = PotentialEnergy::new(pot);
    let e = Entropy::new(kind);
    Ok(match order {
        Ordering::EntropyFirst => SplitProblem::new(W2Metric, e, v),
        Ordering::PotentialFirst => SplitProblem::new(W2Metric, v, e),
    })
}

/// Sufficient condition for a bounded `Δ_n` that applies to a pairing, with
/// its constants:
///
/// * `(H,V)`: `H(J^V μ) ≤ H(μ) + ch`
/// * `(V,H)`: `V(J^H μ) ≤ V(μ) + ch`
/// * `(F,V)`: `F(J^V μ) ≤ e^{(m−1)ch} F(μ)`
/// * `(V,F)`: `V(J^F μ) ≤ V(μ) + c(m−1)h F(J^F μ)` and `F(J^V μ) ≤ e^{(m−1)ch} F(μ)`
pub fn a3_constants(
    pot: &PotentialSpec,
    kind: EntropyKind,
    order: Ordering,
) -> (ChiMode, A3Constants) {
    let c = pot.c();
    match (PairingCase::of(kind, order), kind.exponent()) {
        (PairingCase::RenyiPotential, Some(m)) => (
            ChiMode::Phi1,
            A3Constants {
                c: 0.0,
                alpha: (m - 1.0) * c,
            },
        ),
        (PairingCase::PotentialRenyi, Some(m)) => (
            ChiMode::Phi2,
            A3Constants {
                c: c * (m - 1.0),
                alpha: (m - 1.0) * c,
            },
        ),
        _ => (ChiMode::Constant, A3Constants { c, alpha: 0.0 }),
    }
}

/// One evaluated compatibility inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
}

impl Verdict {
    fn new(name: &'static str, lhs: f64, rhs: f64, base: f64) -> Self {
        Verdict {
            name,
            lhs,
            rhs,
            tolerance: base * (1.0 + lhs.abs().max(rhs.abs())),
        }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub verdicts: Vec<Verdict>,
}

impl CompatibilityReport {
    pub fn holds(&self) -> bool {
        self.verdicts.iter().all(Verdict::holds)
    }

    /// Largest `lhs − rhs − tolerance`.
    pub fn worst_excess(&self) -> f64 {
        self.verdicts
            .iter()
            .map(|v| -v.slack() - v.tolerance)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

/// Evaluates the compatibility inequalities between `V` and the entropies at
/// `μ`. The two Boltzmann inequalities are always checked; the two Rényi ones
/// only when `kind` is Rényi.
///
/// Each verdict allows `10 (τ + 1/N)(1 + |value|)`, where `τ` is the solver
/// tolerance.
pub fn check_compatibility(
    mu: &QuantileDensity,
    pot: &PotentialSpec,
    kind: EntropyKind,
    h: f64,
    settings: &SolverSettings,
) -> Result<CompatibilityReport, WassError> {
    let kind = kind.validate()?;
    let c = pot.c();
    let base = 10.0 * (settings.tolerance + 1.0 / mu.len() as f64);
    let (after_v, _) = resolvent_potential(mu, pot, h, settings)?;
    let after_h = resolvent_entropy(mu, EntropyKind::Boltzmann, h, settings)?.point;

    let mut verdicts = vec![
        Verdict::new(
            "H-est",
            entropy(&after_v, EntropyKind::Boltzmann)?,
            entropy(mu, EntropyKind::Boltzmann)? + c * h,
            base,
        ),
        Verdict::new(
            "V-est",
            potential_energy(&after_h, pot),
            potential_energy(mu, pot) + c * h,
            base,
        ),
    ];
    if let Some(m) = kind.exponent() {
        let after_f = resolvent_entropy(mu, kind, h, settings)?.point;
        let f_after_f = entropy(&after_f, kind)?;
        verdicts.push(Verdict::new(
            "F-est",
            entropy(&after_v, kind)?,
            ((m - 1.0) * c * h).exp() * entropy(mu, kind)?,
            base,
        ));
        verdicts.push(Verdict::new(
            "VF-est",
            potential_energy(&after_f, pot),
            potential_energy(mu, pot) + c * (m - 1.0) * h * f_after_f,
            base,
        ));
    }
    Ok(CompatibilityReport { verdicts })
}
