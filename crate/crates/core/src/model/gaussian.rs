use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Multivariate normal law with a cached Cholesky factor.
#[derive(Clone, Debug)]
pub struct Gaussian {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    log_norm: f64,
}

impl Gaussian {
    /// `state` is only used to label the error.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>, state: usize) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::Dimension("Gaussian of dimension 0".into()));
        }
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::Dimension(format!(
                "covariance of state {} is {}x{}, expected {d}x{d}",
                state + 1,
                cov.nrows(),
                cov.ncols()
            )));
        }
        let scale = cov.amax().max(1.0);
        if (&cov - cov.transpose()).amax() > 1e-12 * scale {
            return Err(Error::NotPositiveDefinite { state: state + 1 });
        }
        let chol = Cholesky::new(cov.clone()).ok_or(Error::NotPositiveDefinite { state: state + 1 })?;
        let log_det: f64 = chol.l().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
        if !log_det.is_finite() {
            return Err(Error::NotPositiveDefinite { state: state + 1 });
        }
        let log_norm = -0.5 * (d as f64 * LN_2PI + log_det);
        Ok(Gaussian {
            mean,
            cov,
            chol,
            log_norm,
        })
    }

    pub fn standard(d: usize) -> Self {
        Gaussian::new(DVector::zeros(d), DMatrix::identity(d, d), 0).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Lower Cholesky factor `L` with `L Lᵀ = Σ`.
    pub fn cholesky_l(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    pub fn log_det(&self) -> f64 {
        self.chol.l().diagonal().iter().map(|v| 2.0 * v.ln()).sum()
    }

    /// `(v-μ)ᵀ Σ⁻¹ (v-μ)`
    pub fn mahalanobis_sq(&self, v: &DVector<f64>) -> f64 {
        let diff = v - &self.mean;
        let sol = self.chol.solve(&diff);
        diff.dot(&sol)
    }

    pub fn log_density(&self, v: &DVector<f64>) -> f64 {
        self.log_norm - 0.5 * self.mahalanobis_sq(v)
    }

    pub fn log_density_slice(&self, v: &[f64]) -> f64 {
        if self.dim() == 1 {
            let z = v[0] - self.mean[0];
            return self.log_norm - 0.5 * z * z / self.cov[(0, 0)];
        }
        self.log_density(&DVector::from_column_slice(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_normal_at_zero() {
        let g = Gaussian::standard(1);
        let expect = -0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((g.log_density_slice(&[0.0]) - expect).abs() < 1e-15);
    }

    #[test]
    fn indefinite_covariance_rejected() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let err = Gaussian::new(DVector::zeros(2), cov, 0).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { state: 1 }));
    }

    #[test]
    fn asymmetric_covariance_rejected() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(Gaussian::new(DVector::zeros(2), cov, 0).is_err());
    }

    #[test]
    fn bivariate_density_matches_closed_form() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let g = Gaussian::new(DVector::from_vec(vec![1.0, -1.0]), cov.clone(), 0).unwrap();
        let v = DVector::from_vec(vec![0.3, 0.2]);
        let det: f64 = 2.0 * 1.0 - 0.25;
        let inv = cov.try_inverse().unwrap();
        let diff = &v - g.mean();
        let q = (diff.transpose() * inv * &diff)[(0, 0)];
        let expect = -0.5 * (2.0 * LN_2PI + det.ln() + q);
        assert!((g.log_density(&v) - expect).abs() < 1e-12);
    }
}
