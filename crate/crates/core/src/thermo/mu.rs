use rand::Rng;

use super::ModelParams;
use crate::error::Result;

/// Symmetrised geometric law `μ_β`: mass `1−x` at zero and `(1−x)x^{|k|}/2`
/// elsewhere.
pub fn mu_beta(beta: f64, k: i64) -> Result<f64> {
    let x = ModelParams::new(beta)?.x;
    Ok(mu_prob(x, k))
}

#[inline]
pub fn mu_prob(x: f64, k: i64) -> f64 {
    if k == 0 {
        1.0 - x
    } else {
        0.5 * (1.0 - x) * x.powi(k.unsigned_abs() as i32)
    }
}

/// Geometric number of failures with success probability `1−x`, by inversion.
pub(crate) fn geometric<R: Rng + ?Sized>(x: f64, rng: &mut R) -> i64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    (u.ln() / x.ln()).floor() as i64
}

pub fn sample_mu_beta<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> Result<i64> {
    let x = ModelParams::new(beta)?.x;
    Ok(sample_mu(x, rng))
}

pub(crate) fn sample_mu<R: Rng + ?Sized>(x: f64, rng: &mut R) -> i64 {
    let m = geometric(x, rng);
    if m == 0 {
        0
    } else if rng.random::<bool>() {
        m
    } else {
        -m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalised_and_symmetric() {
        let beta = 1.3;
        let x = ModelParams::new(beta).unwrap().x;
        let tail = 0.5 * (1.0 - x) * x / (1.0 - x);
        assert!(((1.0 - x) + 2.0 * tail - 1.0).abs() < 1e-15);
        let s: f64 = (-300..=300).map(|k| mu_beta(beta, k).unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(mu_beta(beta, 0).unwrap(), 1.0 - (-beta / 2.0).exp());
        for k in 1..10 {
            assert_eq!(mu_beta(beta, k).unwrap(), mu_beta(beta, -k).unwrap());
        }
    }

    #[test]
    fn sampler_frequencies() {
        let beta = 1.2;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut c = [0usize; 5];
        for _ in 0..n {
            let k = sample_mu_beta(beta, &mut rng).unwrap();
            if k.abs() <= 2 {
                c[(k + 2) as usize] += 1;
            }
        }
        for (i, &ci) in c.iter().enumerate() {
            let p = mu_beta(beta, i as i64 - 2).unwrap();
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((ci as f64 / n as f64 - p).abs() < 4.0 * se);
        }
    }
}
