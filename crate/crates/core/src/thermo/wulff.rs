use super::mgf::log_mgf_unchecked;
use super::tilt::{solve_tilt_with, MixedLogMgf, Tilt};
use crate::error::{Error, Result};
use crate::numerics::GaussLegendre;

/// The deterministic limit shape `γ*_q` of a walk with area `q`.
#[derive(Clone, Debug)]
pub struct WulffShape {
    pub beta: f64,
    pub q: f64,
    pub tilt: Tilt,
    x: f64,
}

impl WulffShape {
    pub fn new(beta: f64, q: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
        }
        let m = MixedLogMgf::new(beta)?;
        let tilt = solve_tilt_with(&m, q)?;
        Ok(Self {
            beta,
            q,
            tilt,
            x: m.params.x,
        })
    }

    /// `γ*_q(t) = ∫_0^t 𝔏′((1−u)h̃₀ + h̃₁) du`, integrated in closed form.
    pub fn profile(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
        }
        let Tilt { h0, h1, .. } = self.tilt;
        if h0.abs() > 1e-6 {
            let l = |h| log_mgf_unchecked(self.x, h, 0);
            Ok((l(h0 + h1) - l((1.0 - t) * h0 + h1)) / h0)
        } else {
            let gl = GaussLegendre::new(32);
            Ok(gl.integrate(0.0, t, |u| log_mgf_unchecked(self.x, self.tilt.at(u), 1)))
        }
    }

    /// Limit of the rescaled upper envelope, `γ*_q/2`.
    pub fn envelope(&self, t: f64) -> Result<f64> {
        Ok(self.profile(t)? / 2.0)
    }

    /// `(t, γ*_q(t))` on `points` equally spaced times including both ends.
    pub fn table(&self, points: usize) -> Result<Vec<(f64, f64)>> {
        let points = points.max(2);
        (0..points)
            .map(|i| {
                let t = i as f64 / (points - 1) as f64;
                Ok((t, self.profile(t)?))
            })
            .collect()
    }

    /// `∫_0^1 γ*_q(t) dt`, by quadrature on panels graded geometrically
    /// towards both ends where the shape is steep.
    pub fn area(&self) -> Result<f64> {
        let gl = GaussLegendre::new(20);
        let mut breaks = vec![0.0];
        let mut b = 1e-14;
        while b < 0.25 {
            breaks.push(b);
            b *= 4.0;
        }
        let mid: Vec<f64> = breaks.iter().rev().map(|&t| 1.0 - t).collect();
        breaks.push(0.5);
        breaks.extend(mid);
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let mut err = None;
            total += gl.integrate(w[0], w[1], |t| match self.profile(t) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    f64::NAN
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        Ok(total)
    }
}

pub fn wulff(beta: f64, q: f64, t: f64) -> Result<f64> {
    WulffShape::new(beta, q)?.profile(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities() {
        for beta in [1.5, 2.0, 3.0] {
            for q in [0.1, 0.4, 1.0, 2.0] {
                let w = WulffShape::new(beta, q).unwrap();
                assert_eq!(w.profile(0.0).unwrap(), 0.0);
                assert!(w.profile(1.0).unwrap().abs() < 1e-10);
                assert!((w.area().unwrap() - q).abs() < 1e-8, "{beta} {q}");
                for i in 1..10 {
                    let t = i as f64 / 10.0;
                    let a = w.profile(t).unwrap();
                    assert!(a > 0.0);
                    assert!((a - w.profile(1.0 - t).unwrap()).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let w = WulffShape::new(2.0, 0.5).unwrap();
        let gl = GaussLegendre::new(64);
        let x = (-1.0f64).exp();
        for t in [0.1, 0.3, 0.7] {
            let direct = gl.integrate(0.0, t, |u| log_mgf_unchecked(x, w.tilt.at(u), 1));
            assert!((direct - w.profile(t).unwrap()).abs() < 1e-12);
        }
    }
}
