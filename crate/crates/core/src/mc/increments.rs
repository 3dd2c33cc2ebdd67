use rand::Rng;

use crate::error::{Error, Result};
use crate::thermo::ModelParams;

/// Two-sided geometric law with `P(k) ∝ a^k` for `k > 0`, `∝ b^{|k|}` for
/// `k < 0` and `∝ 1` at zero, sampled by inversion of one uniform.
#[derive(Clone, Copy, Debug)]
pub struct TwoSidedGeometric {
    ln_a: f64,
    ln_b: f64,
    p_zero: f64,
    p_pos: f64,
}

impl TwoSidedGeometric {
    pub fn new(a: f64, b: f64) -> Self {
        let (pa, pb) = (a / (1.0 - a), b / (1.0 - b));
        let z = 1.0 + pa + pb;
        Self {
            ln_a: a.ln(),
            ln_b: b.ln(),
            p_zero: 1.0 / z,
            p_pos: pa / z,
        }
    }

    /// Untilted increment law at `x = e^{−β/2}`.
    pub fn symmetric(x: f64) -> Self {
        Self::new(x, x)
    }

    /// Increment law tilted by `e^{hk}`.
    pub fn tilted(x: f64, h: f64) -> Self {
        Self::new(x * h.exp(), x * (-h).exp())
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random();
        if u < self.p_zero {
            return 0;
        }
        let t = u - self.p_zero;
        if t < self.p_pos {
            let w = 1.0 - t / self.p_pos;
            1 + (w.ln() / self.ln_a) as i64
        } else {
            let p_neg = 1.0 - self.p_zero - self.p_pos;
            let w = (1.0 - (t - self.p_pos) / p_neg).max(f64::MIN_POSITIVE);
            -1 - (w.ln() / self.ln_b) as i64
        }
    }
}

/// One increment `U` with `P(U = k) = x^{|k|}/c_β`.
pub fn sample_increment<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> Result<i64> {
    let p = ModelParams::new(beta)?;
    Ok(TwoSidedGeometric::symmetric(p.x).sample(rng))
}

/// One increment from the tilted law `ν_h(k) ∝ x^{|k|} e^{hk}`.
pub fn sample_tilted_increment<R: Rng + ?Sized>(beta: f64, h: f64, rng: &mut R) -> Result<i64> {
    let p = ModelParams::new(beta)?;
    check_tilt(beta, h)?;
    Ok(TwoSidedGeometric::tilted(p.x, h).sample(rng))
}

pub(crate) fn check_tilt(beta: f64, h: f64) -> Result<()> {
    if h.abs() < beta / 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "tilt h = {h} outside (-beta/2, beta/2) for beta = {beta}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::RngStream;
    use crate::thermo::log_mgf;

    #[test]
    fn zero_frequency_and_variance() {
        let beta = 1.4;
        let p = ModelParams::new(beta).unwrap();
        let mut rng = RngStream::new(1, 0);
        let n = 1_000_000;
        let (mut zeros, mut s1, mut s2, mut s4) = (0usize, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let u = sample_increment(beta, &mut rng).unwrap() as f64;
            zeros += (u == 0.0) as usize;
            s1 += u;
            s2 += u * u;
            s4 += u.powi(4);
        }
        let nf = n as f64;
        let p0 = 1.0 / p.c_beta;
        assert!((zeros as f64 / nf - p0).abs() < 3.0 * (p0 * (1.0 - p0) / nf).sqrt());
        let var = p.var_increment();
        let m2 = s2 / nf;
        let se = ((s4 / nf - m2 * m2) / nf).sqrt();
        assert!((m2 - var).abs() < 3.0 * se, "{m2} {var} {se}");
        assert!((s1 / nf).abs() < 3.0 * (var / nf).sqrt());
    }

    #[test]
    fn tilted_mean() {
        let (beta, h) = (2.0, 0.4);
        let mut rng = RngStream::new(2, 0);
        let n = 1_000_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let u = sample_tilted_increment(beta, h, &mut rng).unwrap() as f64;
            s1 += u;
            s2 += u * u;
        }
        let nf = n as f64;
        let mean = s1 / nf;
        let se = ((s2 / nf - mean * mean) / nf).sqrt();
        let want = log_mgf(beta, h, 1).unwrap();
        assert!((mean - want).abs() < 3.0 * se, "{mean} {want} {se}");
    }

    #[test]
    fn exact_probabilities() {
        let law = TwoSidedGeometric::new(0.3, 0.6);
        let z = 1.0 + 0.3 / 0.7 + 0.6 / 0.4;
        let mut rng = RngStream::new(3, 0);
        let n = 400_000;
        let mut c = std::collections::HashMap::new();
        for _ in 0..n {
            *c.entry(law.sample(&mut rng)).or_insert(0usize) += 1;
        }
        for k in -4i64..=3 {
            let p = if k >= 0 { 0.3f64.powi(k as i32) } else { 0.6f64.powi(-k as i32) } / z;
            let f = *c.get(&k).unwrap_or(&0) as f64 / n as f64;
            assert!((f - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "{k} {f} {p}");
        }
    }

    #[test]
    fn rejects_tilt_outside_domain() {
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(
            sample_tilted_increment(1.0, 0.5, &mut rng),
            Err(Error::Domain(_))
        ));
    }
}
