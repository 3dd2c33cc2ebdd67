use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::airy::ExcursionArea;
use super::ModelParams;
use crate::error::{Error, Result};

/// Constants entering the critical asymptotics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CritConstants {
    /// `E_β(V_1²)`.
    pub var_v1: f64,
    /// `C_β = E_β(V_1²)^{−1/2}`.
    pub c_big: f64,
    /// `∫_0^∞ u^{−3} w(u^{−3/2}) du` with `w(t) = C_β f_ex(C_β t)`.
    pub airy_integral: f64,
    /// Tail constant `c_1` of `P(X = n) ~ c_1 n^{−4/3}`.
    pub c_tail: f64,
    /// Tail constant of `P_μ(τ = n) ~ C_τ n^{−3/2}`.
    pub c_tau: f64,
    /// Prefactor `c` of `Z̃_L ~ c L^{−2/3}`.
    pub z_prefactor: f64,
}

/// `E[A^{1/3}]` for the standard excursion area `A`.
pub fn excursion_area_cube_root_mean() -> f64 {
    ExcursionArea::new().expect(f64::cbrt)
}

pub fn crit_constants(beta: f64) -> Result<CritConstants> {
    let p = ModelParams::new(beta)?;
    let var_v1 = p.var_increment();
    let c_big = var_v1.powf(-0.5);
    // ∫ t^{1/3} w(t) dt = C_β^{−1/3} E[A^{1/3}]
    let airy_integral = 2.0 / 3.0 * c_big.powf(-1.0 / 3.0) * excursion_area_cube_root_mean();
    let c_tau = (1.0 + (beta / 2.0).exp()) * (var_v1 / (2.0 * PI)).sqrt();
    Ok(CritConstants {
        var_v1,
        c_big,
        airy_integral,
        c_tail: c_tau * airy_integral,
        c_tau,
        z_prefactor: (1.0 + (beta / 2.0).exp()) / ((24.0 * PI * var_v1).sqrt() * airy_integral),
    })
}

/// `w(t) = C_β f_ex(C_β t)`.
pub fn excursion_area_density(beta: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let c = ModelParams::new(beta)?.var_increment().powf(-0.5);
    Ok(c * ExcursionArea::new().density(c * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::GaussLegendre;
    use crate::thermo::beta_c;

    #[test]
    fn positive_and_consistent() {
        let b = beta_c();
        let c = crit_constants(b).unwrap();
        assert!(c.var_v1 > 0.0 && c.c_big > 0.0 && c.airy_integral > 0.0);
        assert!(c.c_tail > 0.0 && c.z_prefactor > 0.0);
        assert!((c.var_v1 - 5.22226).abs() < 1e-4);
    }

    #[test]
    fn w_is_a_density_and_integral_forms_agree() {
        let b = beta_c();
        let c = crit_constants(b).unwrap();
        let f = ExcursionArea::new();
        let cb = c.c_big;
        let w = |t: f64| cb * f.density(cb * t);
        let gl = GaussLegendre::new(20);
        let hi = 5.0 / cb;
        let total = gl.integrate_composite(0.0, hi, 60, w);
        assert!((total - 1.0).abs() < 1e-4);
        let m = 2.0 / 3.0 * gl.integrate_composite(0.0, hi, 60, |t| t.cbrt() * w(t));
        assert!((m - c.airy_integral).abs() < 1e-6);
        // ∫ u^{−3} w(u^{−3/2}) du over the range where w is not negligible
        let (ulo, uhi) = (hi.powf(-2.0 / 3.0), (0.05 / cb).powf(-2.0 / 3.0));
        let direct = gl.integrate_composite(ulo, uhi, 200, |u| u.powi(-3) * w(u.powf(-1.5)));
        assert!((direct - c.airy_integral).abs() < 1e-6);
        assert!(excursion_area_density(b, 0.0).is_err());
    }
}
