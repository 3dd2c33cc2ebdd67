use super::ModelParams;
use crate::error::{Error, Result};

/// Logarithmic moment generating function `𝔏(h) = log E_β[e^{hU_1}]` of the
/// two-sided geometric increment, and its first three derivatives.
///
/// With `a = xe^h`, `b = xe^{−h}`:
/// `𝔏(h) = 2 log(1−x) − log(1−a) − log(1−b)`.
pub fn log_mgf(beta: f64, h: f64, order: u8) -> Result<f64> {
    let p = ModelParams::new(beta)?;
    if h.abs() >= beta / 2.0 {
        return Err(Error::Domain(format!(
            "tilt h = {h} outside (-beta/2, beta/2) for beta = {beta}"
        )));
    }
    if order > 3 {
        return Err(Error::InvalidParameter(format!("derivative order {order} > 3")));
    }
    Ok(log_mgf_unchecked(p.x, h, order))
}

/// Same as [`log_mgf`] without validation; `x = e^{−β/2}`.
#[inline]
pub fn log_mgf_unchecked(x: f64, h: f64, order: u8) -> f64 {
    let a = x * h.exp();
    let b = x * (-h).exp();
    match order {
        0 => 2.0 * (-x).ln_1p() - (-a).ln_1p() - (-b).ln_1p(),
        1 => a / (1.0 - a) - b / (1.0 - b),
        2 => a / ((1.0 - a) * (1.0 - a)) + b / ((1.0 - b) * (1.0 - b)),
        _ => {
            a * (1.0 + a) / (1.0 - a).powi(3) - b * (1.0 + b) / (1.0 - b).powi(3)
        }
    }
}

/// The closed form as printed, `log[(1 + a/(1−a) + b/(1−b)) / c_β]`, kept as
/// an independent check of [`log_mgf_unchecked`].
pub fn log_mgf_direct(p: &ModelParams, h: f64) -> f64 {
    let a = p.x * h.exp();
    let b = p.x * (-h).exp();
    ((1.0 + a / (1.0 - a) + b / (1.0 - b)) / p.c_beta).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(beta: f64, h: f64, power: i32) -> f64 {
        let p = ModelParams::new(beta).unwrap();
        let mut m = [0.0; 3];
        // smallest terms first
        for j in (0..=8000i64).rev() {
            let k = if j % 2 == 0 { j / 2 } else { -(j + 1) / 2 };
            let w = (-beta / 2.0 * k.abs() as f64 + h * k as f64).exp() / p.c_beta;
            let kf = k as f64;
            m[0] += w;
            m[1] += w * kf;
            m[2] += w * kf * kf;
        }
        match power {
            0 => m[0].ln(),
            1 => m[1] / m[0],
            _ => m[2] / m[0] - (m[1] / m[0]).powi(2),
        }
    }

    #[test]
    fn values_at_zero() {
        for beta in [0.5, 1.2, 2.0] {
            assert_eq!(log_mgf(beta, 0.0, 0).unwrap(), 0.0);
            assert_eq!(log_mgf(beta, 0.0, 1).unwrap(), 0.0);
            let p = ModelParams::new(beta).unwrap();
            assert!((log_mgf(beta, 0.0, 2).unwrap() - p.var_increment()).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_series_and_printed_form() {
        for beta in [0.8, 2.0, 3.0] {
            let p = ModelParams::new(beta).unwrap();
            for i in -9..=9 {
                let h = 0.9 * beta / 2.0 * i as f64 / 9.0;
                let v = log_mgf(beta, h, 0).unwrap();
                assert!((v - log_mgf_direct(&p, h)).abs() < 1e-12);
                if beta > 1.0 {
                    let d = (v - series(beta, h, 0)).abs();
                    assert!(d < 1e-12, "{beta} {h} {d}");
                    assert!((log_mgf(beta, h, 1).unwrap() - series(beta, h, 1)).abs() < 1e-10);
                    assert!((log_mgf(beta, h, 2).unwrap() - series(beta, h, 2)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn third_derivative_by_differences() {
        let (beta, h, e) = (2.0, 0.3, 1e-5);
        let d = (log_mgf(beta, h + e, 2).unwrap() - log_mgf(beta, h - e, 2).unwrap()) / (2.0 * e);
        assert!((d - log_mgf(beta, h, 3).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn domain() {
        assert!(log_mgf(2.0, 1.0, 0).is_err());
        assert!(log_mgf(2.0, -1.2, 1).is_err());
        assert!(log_mgf(2.0, 0.99, 0).is_ok());
    }
}
