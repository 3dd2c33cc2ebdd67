//! Density of the Brownian excursion area (the Airy distribution).

use std::f64::consts::PI;

use crate::numerics::GaussLegendre;

const AIRY_ZEROS: [f64; 10] = [
    -2.338107410459767,
    -4.087949444130971,
    -5.520559828095551,
    -6.786708090071759,
    -7.944133587120853,
    -9.022650853340980,
    -10.04017434155809,
    -11.00852430373326,
    -11.93601556323626,
    -12.82877675286576,
];

const GAMMA_ONE_SIXTH: f64 = 5.566316001780235;

/// `k`-th zero (1-based) of the Airy function Ai.
pub fn airy_zero(k: usize) -> f64 {
    assert!(k >= 1, "Airy zeros are numbered from 1");
    if k <= AIRY_ZEROS.len() {
        return AIRY_ZEROS[k - 1];
    }
    let t = 3.0 * PI * (4.0 * k as f64 - 1.0) / 8.0;
    let t2 = 1.0 / (t * t);
    let series = 1.0 + t2 * (5.0 / 48.0 + t2 * (-5.0 / 36.0 + t2 * (77125.0 / 82944.0)));
    -t.powf(2.0 / 3.0) * series
}

/// Tricomi `U(a, 4/3, z)` for `a ∈ {1/6, 7/6}` through
/// `U(a,b,z) = Γ(a)^{-1} ∫_0^∞ e^{−zt} t^{a−1} (1+t)^{b−a−1} dt`
/// after the substitution `t = (u⁶)/z`, which leaves a smooth integrand
/// with super-exponential decay.
struct Tricomi {
    gl: GaussLegendre,
}

impl Tricomi {
    const CUTOFF: f64 = 2.0;

    fn new() -> Self {
        Self {
            gl: GaussLegendre::new(48),
        }
    }

    /// `(U(1/6, 4/3, z), U(7/6, 4/3, z))`.
    fn pair(&self, z: f64) -> (f64, f64) {
        let (mut i1, mut i2) = (0.0, 0.0);
        let panels = 4;
        let h = Self::CUTOFF / panels as f64;
        for p in 0..panels {
            for (&u, &w) in self.gl.nodes.iter().zip(&self.gl.weights) {
                let s = h * (p as f64 + u);
                let s6 = s.powi(6);
                let e = (-s6).exp();
                let r = 1.0 + s6 / z;
                i1 += w * e * r.powf(1.0 / 6.0);
                i2 += w * s6 * e * r.powf(-5.0 / 6.0);
            }
        }
        i1 *= h;
        i2 *= h;
        let u16 = 6.0 / GAMMA_ONE_SIXTH * z.powf(-1.0 / 6.0) * i1;
        let u76 = 36.0 / GAMMA_ONE_SIXTH * z.powf(-7.0 / 6.0) * i2;
        (u16, u76)
    }

    /// `U(−5/6, 4/3, z)` from the contiguous relation
    /// `U(a−1) = (z−1) U(a) + U(a+1)/36` at `a = 1/6`.
    fn minus_five_sixths(&self, z: f64) -> f64 {
        let (u16, u76) = self.pair(z);
        (z - 1.0) * u16 + u76 / 36.0
    }
}

/// Evaluator for the excursion-area density `f_ex`.
pub struct ExcursionArea {
    tricomi: Tricomi,
    zeros: Vec<f64>,
}

impl Default for ExcursionArea {
    fn default() -> Self {
        Self::new()
    }
}

impl ExcursionArea {
    pub fn new() -> Self {
        Self {
            tricomi: Tricomi::new(),
            zeros: (1..=400).map(airy_zero).collect(),
        }
    }

    /// `f_ex(t) = (2√6/t²) Σ_k v_k^{2/3} e^{−v_k} U(−5/6, 4/3, v_k)` with
    /// `v_k = 2|a_k|³/(27t²)`. Below `t = 0.05` the density is under 1e−300.
    pub fn density(&self, t: f64) -> f64 {
        if t < 0.05 {
            return 0.0;
        }
        let mut s = 0.0;
        for a in &self.zeros {
            let v = 2.0 * a.abs().powi(3) / (27.0 * t * t);
            if v > 700.0 {
                break;
            }
            s += v.powf(2.0 / 3.0) * (-v).exp() * self.tricomi.minus_five_sixths(v);
        }
        (2.0 * 6f64.sqrt() / (t * t) * s).max(0.0)
    }

    /// `∫_0^∞ g(t) f_ex(t) dt`, by composite quadrature on `[0.05, 5]`.
    pub fn expect<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let gl = GaussLegendre::new(20);
        gl.integrate_composite(0.05, 5.0, 60, |t| g(t) * self.density(t))
    }
}

/// Leading large-`t` behaviour `(72√6/√π) t² e^{−6t²}`.
pub fn tail_asymptotic(t: f64) -> f64 {
    72.0 * 6f64.sqrt() / PI.sqrt() * t * t * (-6.0 * t * t).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_continue_smoothly() {
        // the asymptotic formula reproduces the tabulated tenth zero
        let t = 3.0 * PI * 39.0 / 8.0;
        let t2 = 1.0 / (t * t);
        let z = -t.powf(2.0 / 3.0) * (1.0 + t2 * (5.0 / 48.0 + t2 * (-5.0 / 36.0 + t2 * 77125.0 / 82944.0)));
        assert!((z - AIRY_ZEROS[9]).abs() < 1e-9);
    }

    #[test]
    fn tricomi_reference_values() {
        // reference values from an independent multiprecision evaluation
        let u = Tricomi::new();
        assert!((u.minus_five_sixths(0.3) - -0.85656240833793586).abs() < 1e-13);
        assert!((u.minus_five_sixths(5.0) - 3.0781888099230061).abs() < 1e-13);
        assert!((u.minus_five_sixths(100.0) / 45.964560280441105 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn density_reference_values() {
        let f = ExcursionArea::new();
        let refs = [
            (0.2, 7.1012843922405794e-7),
            (0.3, 0.045491105729716751),
            (0.5, 2.4295478730963648),
            (0.8, 1.1139124749617294),
            (1.0, 0.21811908409571694),
            (1.5, 0.00029152382780443158),
            (2.0, 1.4604258102041404e-8),
        ];
        for (t, v) in refs {
            assert!((f.density(t) / v - 1.0).abs() < 1e-7, "{t}: {} vs {v}", f.density(t));
        }
        assert!((f.density(2.5) / 3.1610780119984716e-14 - 1.0).abs() < 0.05);
    }

    #[test]
    fn moments() {
        let f = ExcursionArea::new();
        assert!((f.expect(|_| 1.0) - 1.0).abs() < 1e-10);
        assert!((f.expect(|t| t) - (PI / 8.0).sqrt()).abs() < 1e-10);
        assert!((f.expect(|t| t * t) - 5.0 / 12.0).abs() < 1e-10);
    }
}
