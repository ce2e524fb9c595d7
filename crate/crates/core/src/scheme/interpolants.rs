//! Continuous interpolants of the discrete scheme quantities.

use super::{Discretisation, SchemeError, SplitProblem, TrajectoryRecord};

/// Sawtooth `ℓ(t)`: affine on each cell `[t^{k-1}, t^k)`, zero at every node,
/// with left limit one at `t^k`.
pub fn ell(disc: &Discretisation, t: f64) -> Result<f64, SchemeError> {
    let k = disc.cell_of(t)?;
    if t >= disc.final_time() {
        return Ok(0.0);
    }
    let start = disc.time(k - 1);
    Ok(((t - start) / (2.0 * disc.step(k))).clamp(0.0, 1.0))
}

/// The right-continuous step path `x̲(t)` and the left-continuous step path
/// `x̄(t)`, both equal to `x^k` at `t^k`.
pub fn piecewise_paths<P>(traj: &TrajectoryRecord<P>, t: f64) -> Result<(&P, &P), SchemeError> {
    let disc = traj.discretisation();
    let k = disc.cell_of(t)?;
    if t >= disc.final_time() {
        let p = traj.final_point();
        return Ok((p, p));
    }
    if t == disc.time(k - 1) {
        let p = traj.point(k - 1);
        return Ok((p, p));
    }
    Ok((traj.point(k - 1), traj.point(k)))
}

/// Index `k` such that `x̄(t) = x^k`.
pub(crate) fn overline_index(disc: &Discretisation, t: f64) -> Result<usize, SchemeError> {
    let k = disc.cell_of(t)?;
    if t >= disc.final_time() {
        return Ok(disc.len());
    }
    if t == disc.time(k - 1) {
        return Ok(k - 1);
    }
    Ok(k)
}

/// Values of the three interpolants at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interpolants {
    /// `d²_{h,x}(t, y) = (1−ℓ) d²(x̲(t), y) + ℓ d²(x̄(t), y)`
    pub dist_sq: f64,
    /// `φ_{h,x}(t) = (1−ℓ) φ(x̲(t)) + ℓ φ(x̄(t))`
    pub phi: f64,
    /// Remainder `R_{h,x}(t)`; zero at `t = t^n` where no cell is active.
    pub remainder: f64,
}

/// Value of `R_{h,x}` at the left end (`ℓ = 0`) and right end (`ℓ → 1`) of
/// cell `k`. `R` is affine in between.
pub(crate) fn remainder_endpoints<P>(traj: &TrajectoryRecord<P>, k: usize) -> (f64, f64) {
    let step = traj.step(k);
    let h = traj.discretisation().step(k);
    let tail = step.delta - step.step_dist_sq / (4.0 * h);
    (traj.phi(k - 1) - traj.phi(k) + tail, tail)
}

pub fn interpolants<P>(
    traj: &TrajectoryRecord<P>,
    problem: &SplitProblem<P>,
    t: f64,
    y: &P,
) -> Result<Interpolants, SchemeError> {
    let disc = traj.discretisation();
    let l = ell(disc, t)?;
    let k = disc.cell_of(t)?;
    let (under, over) = piecewise_paths(traj, t)?;

    let phi_of = |p: &P| {
        problem
            .phi(p)
            .finite()
            .ok_or_else(|| SchemeError::DomainViolation("trajectory point outside D(phi)".into()))
    };
    let dist_sq = (1.0 - l) * problem.distance_sq(under, y) + l * problem.distance_sq(over, y);
    let phi = (1.0 - l) * phi_of(under)? + l * phi_of(over)?;
    let remainder = if t >= disc.final_time() {
        0.0
    } else {
        let (start, end) = remainder_endpoints(traj, k);
        (1.0 - l) * start + l * end
    };
    Ok(Interpolants {
        dist_sq,
        phi,
        remainder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ell_nodes_and_midpoints() {
        let d = Discretisation::new(vec![0.25, 0.5, 0.125]).unwrap();
        for &t in d.times() {
            assert_eq!(ell(&d, t).unwrap(), 0.0);
        }
        for k in 1..=d.len() {
            let mid = 0.5 * (d.time(k - 1) + d.time(k));
            assert!((ell(&d, mid).unwrap() - 0.5).abs() < 1e-15);
            let eps = 1e-12;
            assert!((ell(&d, d.time(k) - eps).unwrap() - 1.0).abs() < 1e-10);
        }
        assert!(ell(&d, -1e-3).is_err());
        assert!(ell(&d, d.final_time() + 1e-3).is_err());
    }

    #[test]
    fn ell_in_unit_interval() {
        let d = Discretisation::new(vec![0.3, 0.1, 0.7, 0.2]).unwrap();
        let end = d.final_time();
        for i in 0..=1000 {
            let l = ell(&d, end * i as f64 / 1000.0).unwrap();
            assert!((0.0..=1.0).contains(&l));
        }
    }
}
