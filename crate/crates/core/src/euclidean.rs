//! Convex quadratic functionals on `ℝⁿ` with closed-form resolvents, plus the
//! exact gradient flow of their sum.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::energy::Energy;
use crate::scheme::{Functional, Metric, Resolved, SolveError, SplitProblem};

pub type EuclideanPoint = DVector<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EuclideanError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0})")]
    NotPsd(f64),
    #[error("non-finite entry")]
    NonFinite,
    #[error("linear system is singular")]
    SingularSystem,
}

/// `φ(x) = ½ xᵀAx + bᵀx + c0` with `A` symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFunctional {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c0: f64,
}

impl QuadraticFunctional {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c0: f64) -> Result<Self, EuclideanError> {
        if !a.is_square() || a.nrows() != b.len() {
            return Err(EuclideanError::DimensionMismatch(format!(
                "A is {}x{}, b has length {}",
                a.nrows(),
                a.ncols(),
                b.len()
            )));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) || !c0.is_finite() {
            return Err(EuclideanError::NonFinite);
        }
        if a != a.transpose() {
            return Err(EuclideanError::NotSymmetric);
        }
        if a.nrows() > 0 {
            let min_eig = a.clone().symmetric_eigen().eigenvalues.min();
            if min_eig < -1e-12 {
                return Err(EuclideanError::NotPsd(min_eig));
            }
        }
        Ok(QuadraticFunctional { a, b, c0 })
    }

    /// `½ λ |x − center|²`.
    pub fn isotropic(lambda: f64, center: &[f64]) -> Result<Self, EuclideanError> {
        let n = center.len();
        let c = DVector::from_column_slice(center);
        let a = DMatrix::identity(n, n) * lambda;
        let b = -&c * lambda;
        let c0 = 0.5 * lambda * c.dot(&c);
        QuadraticFunctional::new(a, b, c0)
    }

    pub fn zero(dim: usize) -> Self {
        QuadraticFunctional {
            a: DMatrix::zeros(dim, dim),
            b: DVector::zeros(dim),
            c0: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn linear(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn eval(&self, x: &EuclideanPoint) -> f64 {
        0.5 * x.dot(&(&self.a * x)) + self.b.dot(x) + self.c0
    }

    pub fn gradient(&self, x: &EuclideanPoint) -> EuclideanPoint {
        &self.a * x + &self.b
    }
}

/// Resolvent of a quadratic: solves `(I + hA) y = x − h b` by Cholesky.
pub fn prox_quadratic(
    f: &QuadraticFunctional,
    h: f64,
    x: &EuclideanPoint,
) -> Result<EuclideanPoint, EuclideanError> {
    if x.len() != f.dim() {
        return Err(EuclideanError::DimensionMismatch(format!(
            "point has length {}, expected {}",
            x.len(),
            f.dim()
        )));
    }
    let n = f.dim();
    let system = DMatrix::identity(n, n) + &f.a * h;
    let rhs = x - &f.b * h;
    let chol = system.cholesky().ok_or(EuclideanError::SingularSystem)?;
    Ok(chol.solve(&rhs))
}

/// Exact gradient flow of `φ¹ + φ²` from `x0`, at flow time `t`:
/// `u(t) = exp(−tM)(x0 − x*) + x*` with `M = A1 + A2` and `M x* = −(b1 + b2)`.
///
/// On `ker M` the linear part drives a drift `−t·P_ker(b)`; the pseudo-inverse
/// solution handles the range of `M`.
pub fn exact_flow(
    f1: &QuadraticFunctional,
    f2: &QuadraticFunctional,
    x0: &EuclideanPoint,
    t: f64,
) -> Result<EuclideanPoint, EuclideanError> {
    if f1.dim() != f2.dim() || x0.len() != f1.dim() {
        return Err(EuclideanError::DimensionMismatch(
            "flow operands disagree in dimension".into(),
        ));
    }
    let m = &f1.a + &f2.a;
    let b = &f1.b + &f2.b;
    let eig = m.symmetric_eigen();
    let q = &eig.eigenvectors;
    // Work in the eigenbasis: u' = −diag(λ) u − b̃.
    let u0 = q.transpose() * x0;
    let bt = q.transpose() * &b;
    let scale = eig.eigenvalues.amax().max(1.0);
    let ut = DVector::from_iterator(
        u0.len(),
        (0..u0.len()).map(|i| {
            let lam = eig.eigenvalues[i];
            if lam.abs() <= 1e-12 * scale {
                u0[i] - t * bt[i]
            } else {
                let star = -bt[i] / lam;
                (-t * lam).exp() * (u0[i] - star) + star
            }
        }),
    );
    Ok(q * ut)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EuclideanMetric;

impl Metric<EuclideanPoint> for EuclideanMetric {
    fn distance(&self, x: &EuclideanPoint, y: &EuclideanPoint) -> f64 {
        (x - y).norm()
    }

    fn distance_sq(&self, x: &EuclideanPoint, y: &EuclideanPoint) -> f64 {
        (x - y).norm_squared()
    }
}

impl Functional<EuclideanPoint> for QuadraticFunctional {
    fn name(&self) -> String {
        format!("quadratic[{}]", self.dim())
    }

    fn value(&self, x: &EuclideanPoint) -> Energy {
        Energy::from(self.eval(x))
    }

    fn resolvent(
        &self,
        h: f64,
        x: &EuclideanPoint,
    ) -> Result<Resolved<EuclideanPoint>, SolveError> {
        prox_quadratic(self, h, x)
            .map(Resolved::exact)
            .map_err(|e| SolveError(e.to_string()))
    }
}

pub fn build_euclidean_problem(
    f1: QuadraticFunctional,
    f2: QuadraticFunctional,
) -> Result<SplitProblem<EuclideanPoint>, EuclideanError> {
    if f1.dim() != f2.dim() {
        return Err(EuclideanError::DimensionMismatch(format!(
            "phi1 has dimension {}, phi2 {}",
            f1.dim(),
            f2.dim()
        )));
    }
    Ok(SplitProblem::new(EuclideanMetric, f1, f2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> EuclideanPoint {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn prox_examples() {
        let id = QuadraticFunctional::isotropic(1.0, &[0.0]).unwrap();
        assert!((prox_quadratic(&id, 1.0, &v(&[2.0])).unwrap()[0] - 1.0).abs() < 1e-15);

        let zero = QuadraticFunctional::zero(3);
        let x = v(&[1.0, -2.0, 3.5]);
        assert_eq!(prox_quadratic(&zero, 0.7, &x).unwrap(), x);

        let diag =
            QuadraticFunctional::new(DMatrix::from_diagonal(&v(&[1.0, 3.0])), v(&[0.0, 0.0]), 0.0)
                .unwrap();
        let y = prox_quadratic(&diag, 0.5, &v(&[1.0, 1.0])).unwrap();
        assert!((y[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((y[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert_eq!(
            QuadraticFunctional::new(asym, v(&[0.0, 0.0]), 0.0),
            Err(EuclideanError::NotSymmetric)
        );
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            QuadraticFunctional::new(indefinite, v(&[0.0, 0.0]), 0.0),
            Err(EuclideanError::NotPsd(_))
        ));
        assert!(matches!(
            QuadraticFunctional::new(DMatrix::identity(2, 2), v(&[0.0]), 0.0),
            Err(EuclideanError::DimensionMismatch(_))
        ));
        assert!(matches!(
            build_euclidean_problem(QuadraticFunctional::zero(2), QuadraticFunctional::zero(3)),
            Err(EuclideanError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn exact_flow_examples() {
        let half = QuadraticFunctional::isotropic(1.0, &[0.0]).unwrap();
        let u = exact_flow(&half, &half, &v(&[1.0]), 1.0).unwrap();
        assert!((u[0] - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(exact_flow(&half, &half, &v(&[0.3]), 0.0).unwrap()[0], 0.3);

        let d =
            QuadraticFunctional::new(DMatrix::from_diagonal(&v(&[1.0, 4.0])), v(&[0.0, 0.0]), 0.0)
                .unwrap();
        let u = exact_flow(&d, &QuadraticFunctional::zero(2), &v(&[1.0, 1.0]), 0.5).unwrap();
        assert!((u[0] - (-0.5f64).exp()).abs() < 1e-14);
        assert!((u[1] - (-2.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn exact_flow_handles_kernel_drift() {
        // φ(x) = x₂ on ℝ²: flow is pure drift along −e₂.
        let lin = QuadraticFunctional::new(DMatrix::zeros(2, 2), v(&[0.0, 1.0]), 0.0).unwrap();
        let u = exact_flow(&lin, &QuadraticFunctional::zero(2), &v(&[1.0, 1.0]), 2.0).unwrap();
        assert!((u - v(&[1.0, -1.0])).norm() < 1e-14);
    }

    #[test]
    fn isotropic_shift() {
        let f = QuadraticFunctional::isotropic(1.0, &[1.0]).unwrap();
        assert!((f.eval(&v(&[0.0])) - 0.5).abs() < 1e-15);
        let y = prox_quadratic(&f, 1.0, &v(&[0.0])).unwrap();
        assert!((y[0] - 0.5).abs() < 1e-15);
    }
}
