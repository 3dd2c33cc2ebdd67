use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::bisect;

/// Inverse temperature together with the constants it determines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: f64,
    /// `e^{−β/2}`.
    pub x: f64,
    /// `(1+x)/(1−x)`.
    pub c_beta: f64,
    /// `c_β e^{−β}`.
    pub gamma_beta: f64,
}

pub fn model_params(beta: f64) -> Result<ModelParams> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let x = (-beta / 2.0).exp();
    let c_beta = (1.0 + x) / (1.0 - x);
    Ok(ModelParams {
        beta,
        x,
        c_beta,
        gamma_beta: c_beta * x * x,
    })
}

impl ModelParams {
    pub fn new(beta: f64) -> Result<Self> {
        model_params(beta)
    }

    pub fn log_gamma(&self) -> f64 {
        self.c_beta.ln() - self.beta
    }

    /// `E_β(V_1²) = 2x/(1−x)²`.
    pub fn var_increment(&self) -> f64 {
        2.0 * self.x / ((1.0 - self.x) * (1.0 - self.x))
    }

    /// Probability of the increment `k` under the two-sided geometric law.
    pub fn increment_prob(&self, k: i64) -> f64 {
        self.x.powi(k.unsigned_abs() as i32) / self.c_beta
    }
}

/// Root in (0,1) of `x³ + x² + x − 1`.
pub fn x_critical() -> f64 {
    bisect(|x| ((x + 1.0) * x + 1.0) * x - 1.0, 0.0, 1.0, 0.0)
}

/// The critical inverse temperature, where `Γ_β = 1`.
pub fn beta_c() -> f64 {
    -2.0 * x_critical().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_point() {
        let b = beta_c();
        assert!((b - 1.2187557268720).abs() < 1e-12);
        assert!((x_critical() - 0.543689012692076).abs() < 1e-14);
        assert!(((-b / 2.0).exp() - x_critical()).abs() < 1e-15);
        assert!((model_params(b).unwrap().gamma_beta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn c_beta_against_series() {
        let p = model_params(2.0).unwrap();
        let series: f64 = (-200i64..=200).map(|k| (-(k.abs() as f64)).exp()).sum();
        assert!((p.c_beta - series).abs() < 1e-12);
        assert!((p.c_beta - 2.16395).abs() < 1e-5);
        let big = model_params(50.0).unwrap();
        assert!((big.c_beta - 1.0).abs() < 1e-10 && big.gamma_beta < 1e-20);
    }

    #[test]
    fn gamma_is_decreasing() {
        let bc = beta_c();
        let mut prev = f64::INFINITY;
        for i in 1..400 {
            let b = i as f64 * 0.01;
            let g = model_params(b).unwrap().gamma_beta;
            assert!(g < prev);
            assert_eq!(g > 1.0, b < bc);
            prev = g;
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(model_params(0.0).is_err());
        assert!(model_params(-1.0).is_err());
        assert!(model_params(f64::NAN).is_err());
    }
}
