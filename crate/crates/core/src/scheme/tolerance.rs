use super::TrajectoryRecord;

/// Slack granted to the exact inequalities when resolvents are computed
/// iteratively.
///
/// `tol = max(floor, certificate_factor · certificate) · (1 + |φ(x⁰)| + 1/min h_k)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    pub floor: f64,
    pub certificate_factor: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            floor: 1e-10,
            certificate_factor: 10.0,
        }
    }
}

impl TolerancePolicy {
    pub fn base(&self, certificate: f64) -> f64 {
        self.floor.max(self.certificate_factor * certificate)
    }

    pub fn scale<P>(traj: &TrajectoryRecord<P>) -> f64 {
        1.0 + traj.phi(0).abs() + 1.0 / traj.discretisation().min_step()
    }

    pub fn for_trajectory<P>(&self, traj: &TrajectoryRecord<P>) -> f64 {
        self.base(traj.max_certificate()) * Self::scale(traj)
    }
}
