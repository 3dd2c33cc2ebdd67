use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::mgf::log_mgf_unchecked;
use super::tilt::{solve_tilt, Tilt};
use super::ModelParams;
use crate::error::{Error, Result};
use crate::numerics::GaussLegendre;

/// Centered Gaussian field on a time grid with covariance
/// `∫_0^{s∧t} 𝔏″((1−u)h₀ + h₁) du`, optionally conditioned on `ξ(1) = 0` and
/// on a vanishing trapezoid integral.
#[derive(Clone, Debug)]
pub struct GaussianFieldSpec {
    pub tilt: Tilt,
    pub grid: Vec<f64>,
    pub covariance: DMatrix<f64>,
    pub conditioned: bool,
    /// Lower Cholesky factor of the unconditioned covariance.
    factor: DMatrix<f64>,
    /// Constraint rows and the matching Kriging gain, when conditioned.
    constraints: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

/// Variance function `K(t) = ∫_0^t 𝔏″((1−u)h₀ + h₁) du`.
pub fn variance_function(x: f64, tilt: &Tilt, t: f64) -> f64 {
    if tilt.h0.abs() > 1e-6 {
        // antiderivative of 𝔏″((1−u)h₀+h₁) is −𝔏′(·)/h₀
        (log_mgf_unchecked(x, tilt.h0 + tilt.h1, 1) - log_mgf_unchecked(x, tilt.at(t), 1))
            / tilt.h0
    } else {
        GaussLegendre::new(32).integrate(0.0, t, |u| log_mgf_unchecked(x, tilt.at(u), 2))
    }
}

/// Trapezoid weights on `0 = t_0 < t_1 < … < t_m`, with `ξ(0) = 0` dropped.
pub fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let m = grid.len();
    (0..m)
        .map(|k| {
            let left = if k == 0 { 0.0 } else { grid[k - 1] };
            let right = if k + 1 < m { grid[k + 1] } else { grid[k] };
            (right - left) / 2.0
        })
        .collect()
}

fn smallest_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

impl GaussianFieldSpec {
    pub fn new(beta: f64, tilt: Tilt, grid: &[f64], conditioned: bool) -> Result<Self> {
        let x = ModelParams::new(beta)?.x;
        if !tilt.in_domain(beta) {
            return Err(Error::Domain(format!("tilt ({}, {}) outside the domain", tilt.h0, tilt.h1)));
        }
        if grid.is_empty()
            || grid[0] <= 0.0
            || *grid.last().unwrap() > 1.0
            || grid.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidParameter(
                "grid must be strictly increasing inside (0, 1]".into(),
            ));
        }
        if conditioned && *grid.last().unwrap() != 1.0 {
            return Err(Error::InvalidParameter(
                "the conditioned field needs a grid ending at t = 1".into(),
            ));
        }
        let m = grid.len();
        let k: Vec<f64> = grid.iter().map(|&t| variance_function(x, &tilt, t)).collect();
        let base = DMatrix::from_fn(m, m, |i, j| k[i.min(j)]);
        let factor = match base.clone().cholesky() {
            Some(c) => c.l(),
            None => return Err(Error::NotPsd(smallest_eigenvalue(&base))),
        };
        if !conditioned {
            return Ok(Self {
                tilt,
                grid: grid.to_vec(),
                covariance: base,
                conditioned,
                factor,
                constraints: None,
            });
        }
        let w = trapezoid_weights(grid);
        let c = DMatrix::from_fn(2, m, |r, j| if r == 0 { (j == m - 1) as u8 as f64 } else { w[j] });
        let sc = &base * c.transpose();
        let s = &c * &sc;
        let s_inv = s
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("constraint covariance is singular".into()))?;
        let gain = &sc * s_inv;
        let mut cov = &base - &gain * sc.transpose();
        cov = (&cov + cov.transpose()) * 0.5;
        let scale = cov.amax().max(f64::MIN_POSITIVE);
        let min_eig = smallest_eigenvalue(&cov);
        if min_eig < -1e-10 * scale {
            return Err(Error::NotPsd(min_eig));
        }
        Ok(Self {
            tilt,
            grid: grid.to_vec(),
            covariance: cov,
            conditioned,
            factor,
            constraints: Some((c, gain)),
        })
    }

    /// Values of the two constraints (`ξ(1)`, trapezoid integral) on a sample.
    pub fn constraint_values(&self, sample: &[f64]) -> [f64; 2] {
        let w = trapezoid_weights(&self.grid);
        let integral = sample.iter().zip(&w).map(|(a, b)| a * b).sum();
        [*sample.last().unwrap(), integral]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let m = self.grid.len();
        let z = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut xi = &self.factor * z;
        if let Some((c, gain)) = &self.constraints {
            // Matheron's update: the constraints are removed exactly
            let r = c * &xi;
            xi -= gain * r;
        }
        xi.iter().cloned().collect()
    }
}

/// Field around the Wulff shape of area `q`.
pub fn xi_field(beta: f64, q: f64, grid: &[f64], conditioned: bool) -> Result<GaussianFieldSpec> {
    let tilt = solve_tilt(beta, q)?;
    GaussianFieldSpec::new(beta, tilt, grid, conditioned)
}

pub fn sample_xi<R: Rng + ?Sized>(spec: &GaussianFieldSpec, rng: &mut R) -> Vec<f64> {
    spec.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Vec<f64> {
        vec![0.2, 0.4, 0.6, 0.8, 1.0]
    }

    #[test]
    fn covariance_structure() {
        let f = xi_field(2.0, 0.5, &grid(), false).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let k = i.min(j);
                assert_eq!(f.covariance[(i, j)], f.covariance[(k, k)]);
            }
        }
        let x = (-1.0f64).exp();
        let gl = GaussLegendre::new(64);
        let direct = gl.integrate(0.0, 0.6, |u| log_mgf_unchecked(x, f.tilt.at(u), 2));
        assert!((direct - f.covariance[(2, 2)]).abs() < 1e-12);
        let first: Vec<f64> = [1e-3, 1e-6, 1e-9]
            .iter()
            .map(|&t| xi_field(2.0, 0.5, &[t, 1.0], false).unwrap().covariance[(0, 0)])
            .collect();
        assert!(first[2] < 1e-7 && first[1] < first[0] / 500.0 && first[2] < first[1] / 500.0);
    }

    #[test]
    fn conditioned_constraints_are_exact() {
        let f = xi_field(2.0, 0.5, &grid(), true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = f.sample(&mut rng);
            let [end, area] = f.constraint_values(&s);
            assert!(end.abs() < 1e-14 && area.abs() < 1e-14);
        }
        // conditioned covariance annihilates the constraint directions
        let w = DVector::from_vec(trapezoid_weights(&grid()));
        assert!((&f.covariance * w).amax() < 1e-14);
        assert!(f.covariance.column(4).amax() < 1e-14);
    }

    #[test]
    fn empirical_covariance() {
        let f = xi_field(2.0, 0.5, &grid(), false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20_000;
        let mut acc = DMatrix::<f64>::zeros(5, 5);
        for _ in 0..n {
            let s = DVector::from_vec(f.sample(&mut rng));
            acc += &s * s.transpose();
        }
        acc /= n as f64;
        for i in 0..5 {
            for j in 0..5 {
                let c = f.covariance[(i, j)];
                let se = ((f.covariance[(i, i)] * f.covariance[(j, j)] + c * c) / n as f64).sqrt();
                assert!((acc[(i, j)] - c).abs() < 4.0 * se);
            }
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(xi_field(2.0, 0.5, &[0.0, 1.0], false).is_err());
        assert!(xi_field(2.0, 0.5, &[0.5, 0.4], false).is_err());
        assert!(xi_field(2.0, 0.5, &[0.5, 0.9], true).is_err());
    }
}
