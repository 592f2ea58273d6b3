//! Volatility models σ(x,t) driving the stochastic dual dynamics.

use thiserror::Error;

use crate::linalg::Matrix;
use crate::traffic::{path_volatility, PathSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("volatility entries must be finite")]
    NonFinite,
    #[error("edge volatilities must be nonnegative")]
    NegativeVolatility,
    #[error("log-power exponent must exceed 1/2, got {0}")]
    Exponent(f64),
    #[error("invalid noise model: {0}")]
    Invalid(String),
}

/// Time profile `g(t)` of a decaying scalar volatility `σ₀·g(t)·I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecaySchedule {
    /// `1 / log(e + t)`
    InvLog,
    /// `1 / √(1 + t)`
    InvSqrtT,
    /// `1 / log(e + t)^q`, `q > ½`
    LogPower(f64),
}

impl DecaySchedule {
    pub fn factor(self, t: f64) -> f64 {
        let l = (std::f64::consts::E + t).ln();
        match self {
            DecaySchedule::InvLog => 1.0 / l,
            DecaySchedule::InvSqrtT => 1.0 / (1.0 + t).sqrt(),
            DecaySchedule::LogPower(q) => l.powf(-q),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NoiseModel {
    Constant(Matrix),
    DecayingScalar {
        base: f64,
        schedule: DecaySchedule,
        dim: usize,
    },
    /// Path × edge volatility `σ_e·1(e ∈ p)`.
    PathCorrelated {
        sigma_e: Vec<f64>,
        volatility: Matrix,
    },
}

impl NoiseModel {
    pub fn constant(sigma: Matrix) -> Result<Self, NoiseError> {
        if !sigma.is_finite() {
            return Err(NoiseError::NonFinite);
        }
        Ok(NoiseModel::Constant(sigma))
    }

    pub fn isotropic(dim: usize, sigma: f64) -> Result<Self, NoiseError> {
        Self::constant(Matrix::scaled_identity(dim, sigma))
    }

    pub fn zero(dim: usize) -> Self {
        NoiseModel::Constant(Matrix::zeros(dim, dim))
    }

    pub fn decaying(base: f64, schedule: DecaySchedule, dim: usize) -> Result<Self, NoiseError> {
        if !base.is_finite() {
            return Err(NoiseError::NonFinite);
        }
        if let DecaySchedule::LogPower(q) = schedule {
            if !(q > 0.5) || !q.is_finite() {
                return Err(NoiseError::Exponent(q));
            }
        }
        if dim == 0 {
            return Err(NoiseError::Invalid("dimension must be ≥ 1".into()));
        }
        Ok(NoiseModel::DecayingScalar { base, schedule, dim })
    }

    pub fn path_correlated(paths: &PathSet, sigma_e: Vec<f64>) -> Result<Self, NoiseError> {
        if sigma_e.iter().any(|s| !s.is_finite()) {
            return Err(NoiseError::NonFinite);
        }
        if sigma_e.iter().any(|&s| s < 0.0) {
            return Err(NoiseError::NegativeVolatility);
        }
        if let Some(e) = paths.paths.iter().flatten().find(|&&e| e >= sigma_e.len()) {
            return Err(NoiseError::Invalid(format!(
                "path references edge {e} without a volatility"
            )));
        }
        let volatility = path_volatility(paths, &sigma_e);
        Ok(NoiseModel::PathCorrelated { sigma_e, volatility })
    }

    /// State dimension `n`.
    pub fn state_dim(&self) -> usize {
        match self {
            NoiseModel::Constant(s) => s.rows(),
            NoiseModel::DecayingScalar { dim, .. } => *dim,
            NoiseModel::PathCorrelated { volatility, .. } => volatility.rows(),
        }
    }

    /// Driving Wiener dimension `m`.
    pub fn wiener_dim(&self) -> usize {
        match self {
            NoiseModel::Constant(s) => s.cols(),
            NoiseModel::DecayingScalar { dim, .. } => *dim,
            NoiseModel::PathCorrelated { volatility, .. } => volatility.cols(),
        }
    }

    /// Lipschitz modulus in `x`; every implemented model is state-independent.
    pub fn lipschitz(&self) -> f64 {
        0.0
    }

    pub fn is_zero(&self) -> bool {
        match self {
            NoiseModel::Constant(s) => s.as_slice().iter().all(|&v| v == 0.0),
            NoiseModel::DecayingScalar { base, .. } => *base == 0.0,
            NoiseModel::PathCorrelated { volatility, .. } => volatility.as_slice().iter().all(|&v| v == 0.0),
        }
    }

    pub fn volatility(&self, _x: &[f64], t: f64) -> Matrix {
        match self {
            NoiseModel::Constant(s) => s.clone(),
            NoiseModel::DecayingScalar { base, schedule, dim } => {
                Matrix::scaled_identity(*dim, base * schedule.factor(t))
            }
            NoiseModel::PathCorrelated { volatility, .. } => volatility.clone(),
        }
    }

    pub fn covariance(&self, x: &[f64], t: f64) -> Matrix {
        self.volatility(x, t).gram()
    }

    /// `tr Σ(x,t) = ‖σ(x,t)‖_F²`.
    pub fn trace_covariance(&self, _x: &[f64], t: f64) -> f64 {
        match self {
            NoiseModel::Constant(s) => s.frobenius_sq(),
            NoiseModel::DecayingScalar { base, schedule, dim } => {
                let g = base * schedule.factor(t);
                g * g * *dim as f64
            }
            NoiseModel::PathCorrelated { volatility, .. } => volatility.frobenius_sq(),
        }
    }

    /// `σ*² = sup ‖σ(x,t)‖_F²`; decaying profiles peak at `t = 0`.
    pub fn sup_bound(&self) -> f64 {
        self.trace_covariance(&[], 0.0)
    }

    /// Writes `σ(x,t)·ξ` into `out`.
    pub fn apply_into(&self, _x: &[f64], t: f64, xi: &[f64], out: &mut [f64]) {
        match self {
            NoiseModel::Constant(s) | NoiseModel::PathCorrelated { volatility: s, .. } => s.mul_vec_into(xi, out),
            NoiseModel::DecayingScalar { base, schedule, .. } => {
                let g = base * schedule.factor(t);
                for (o, z) in out.iter_mut().zip(xi) {
                    *o = g * z;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::jacobi_eigen;

    #[test]
    fn constant_examples() {
        let m = NoiseModel::isotropic(2, 0.5).unwrap();
        assert_eq!(m.volatility(&[0.3, 0.1], 7.0), Matrix::diag(&[0.5, 0.5]));
        assert_eq!(m.covariance(&[0.0, 0.0], 0.0), Matrix::diag(&[0.25, 0.25]));
        assert_eq!(m.sup_bound(), 0.5);
        assert_eq!(NoiseModel::zero(3).sup_bound(), 0.0);
    }

    #[test]
    fn decaying_examples() {
        let e = std::f64::consts::E;
        let m = NoiseModel::decaying(1.0, DecaySchedule::InvLog, 2).unwrap();
        let v = m.volatility(&[0.0, 0.0], e * e - e);
        assert!(v.max_abs_diff(&Matrix::diag(&[0.5, 0.5])) < 1e-15);
        let m = NoiseModel::decaying(1.0, DecaySchedule::InvSqrtT, 3).unwrap();
        assert_eq!(m.sup_bound(), 3.0);
        assert!(NoiseModel::decaying(1.0, DecaySchedule::LogPower(0.5), 1).is_err());
    }

    #[test]
    fn log_power_beats_inverse_root_log() {
        let g = DecaySchedule::LogPower(0.75);
        // g(t)·√(log t) ~ (log t)^(½−q) decreases once log t dominates e
        let vals: Vec<f64> = (4..=12)
            .map(|k| {
                let t = 10f64.powf(k as f64 / 2.0);
                g.factor(t) * t.ln().sqrt()
            })
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn path_correlated_rows_follow_incidence() {
        // two paths sharing edge 0, each with one private edge
        let ps = PathSet {
            paths: vec![vec![0, 1], vec![0, 2]],
            truncated: false,
        };
        let m = NoiseModel::path_correlated(&ps, vec![0.25; 3]).unwrap();
        let v = m.volatility(&[0.5, 0.5], 0.0);
        assert_eq!(v.row(0), &[0.25, 0.25, 0.0]);
        assert_eq!(v.row(1), &[0.25, 0.0, 0.25]);
        assert_eq!(m.covariance(&[], 0.0)[(0, 1)], 0.0625);
        assert!(NoiseModel::path_correlated(&ps, vec![0.25, -0.1, 0.2]).is_err());
    }

    #[test]
    fn covariance_is_psd() {
        let s = Matrix::from_rows(&[vec![0.3, -0.2, 0.0], vec![0.1, 0.4, 0.5]]);
        let m = NoiseModel::constant(s).unwrap();
        let c = m.covariance(&[], 0.0);
        assert!(c.is_symmetric(0.0));
        assert!(jacobi_eigen(&c).values[0] >= -1e-12);
        assert!((c.trace() - m.sup_bound()).abs() < 1e-15);
    }
}
