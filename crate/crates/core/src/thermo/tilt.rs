use serde::{Deserialize, Serialize};

use super::mgf::log_mgf_unchecked;
use super::ModelParams;
use crate::error::{Error, Result};
use crate::numerics::{dilog, GaussLegendre};

/// Exponential tilt `H = (h₀, h₁)` of the pair (area, endpoint).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tilt {
    pub h0: f64,
    pub h1: f64,
    /// Norm of the stationarity residual left by the solver (0 for a tilt
    /// that was not solved for).
    pub residual: f64,
    pub iterations: usize,
}

impl Tilt {
    pub fn new(h0: f64, h1: f64) -> Self {
        Self {
            h0,
            h1,
            residual: 0.0,
            iterations: 0,
        }
    }

    /// Tilt applied to the increment at relative time `u ∈ [0,1]`.
    pub fn at(&self, u: f64) -> f64 {
        (1.0 - u) * self.h0 + self.h1
    }

    /// Both extreme arguments `h₁` and `h₀ + h₁` lie in `(−β/2, β/2)`.
    pub fn in_domain(&self, beta: f64) -> bool {
        self.h1.abs() < beta / 2.0 && (self.h0 + self.h1).abs() < beta / 2.0
    }
}

/// Which part of `L_Λ` to return from [`log_mgf_mixed`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Want {
    Value,
    Gradient,
    Hessian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MixedValue {
    Value(f64),
    Gradient([f64; 2]),
    Hessian([[f64; 2]; 2]),
}

/// Below this `|h₀|` the closed forms cancel badly and quadrature is used.
const CLOSED_FORM_MIN: f64 = 0.2;

/// `L_Λ(H) = ∫_0^1 𝔏(u h₀ + h₁) du` with its gradient and Hessian.
///
/// For `|h₀|` away from zero everything is integrated exactly through the
/// dilogarithm (`d/dh Li₂(xe^h) = −log(1 − xe^h)`), which stays accurate when
/// `h₀ + h₁` approaches `β/2`; near `h₀ = 0` the integrand is tame and
/// Gauss–Legendre quadrature is used.
#[derive(Clone, Debug)]
pub struct MixedLogMgf {
    pub params: ModelParams,
    gl: GaussLegendre,
}

impl MixedLogMgf {
    pub fn new(beta: f64) -> Result<Self> {
        Self::with_nodes(beta, 64)
    }

    pub fn with_nodes(beta: f64, nodes: usize) -> Result<Self> {
        Ok(Self {
            params: ModelParams::new(beta)?,
            gl: GaussLegendre::new(nodes),
        })
    }

    fn check(&self, h0: f64, h1: f64) -> Result<()> {
        if Tilt::new(h0, h1).in_domain(self.params.beta) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "tilt ({h0}, {h1}) outside the domain for beta = {}",
                self.params.beta
            )))
        }
    }

    pub fn value(&self, h0: f64, h1: f64) -> Result<f64> {
        self.check(h0, h1)?;
        if h0.abs() < CLOSED_FORM_MIN {
            return Ok(self.quadrature_value(h0, h1));
        }
        let x = self.params.x;
        let e = h0 + h1;
        let d = dilog(x * e.exp()) - dilog(x * h1.exp()) - dilog(x * (-e).exp())
            + dilog(x * (-h1).exp());
        Ok(2.0 * (-x).ln_1p() + d / h0)
    }

    pub fn gradient(&self, h0: f64, h1: f64) -> Result<[f64; 2]> {
        self.check(h0, h1)?;
        if h0.abs() < CLOSED_FORM_MIN {
            return Ok(self.quadrature_gradient(h0, h1));
        }
        let x = self.params.x;
        let le = log_mgf_unchecked(x, h0 + h1, 0);
        let i0 = (le - log_mgf_unchecked(x, h1, 0)) / h0;
        let i1 = (le - self.value(h0, h1)?) / h0;
        Ok([i1, i0])
    }

    pub fn hessian(&self, h0: f64, h1: f64) -> Result<[[f64; 2]; 2]> {
        self.check(h0, h1)?;
        if h0.abs() < CLOSED_FORM_MIN {
            return Ok(self.quadrature_hessian(h0, h1));
        }
        let x = self.params.x;
        let de = log_mgf_unchecked(x, h0 + h1, 1);
        let [i1, i0] = self.gradient(h0, h1)?;
        let j0 = (de - log_mgf_unchecked(x, h1, 1)) / h0;
        let j1 = (de - i0) / h0;
        let j2 = (de - 2.0 * i1) / h0;
        Ok([[j2, j1], [j1, j0]])
    }

    pub fn quadrature_value(&self, h0: f64, h1: f64) -> f64 {
        let x = self.params.x;
        self.gl.integrate(0.0, 1.0, |u| log_mgf_unchecked(x, u * h0 + h1, 0))
    }

    pub fn quadrature_gradient(&self, h0: f64, h1: f64) -> [f64; 2] {
        let x = self.params.x;
        let mut g = [0.0; 2];
        for (&u, &w) in self.gl.nodes.iter().zip(&self.gl.weights) {
            let d = w * log_mgf_unchecked(x, u * h0 + h1, 1);
            g[0] += u * d;
            g[1] += d;
        }
        g
    }

    pub fn quadrature_hessian(&self, h0: f64, h1: f64) -> [[f64; 2]; 2] {
        let x = self.params.x;
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for (&u, &w) in self.gl.nodes.iter().zip(&self.gl.weights) {
            let d = w * log_mgf_unchecked(x, u * h0 + h1, 2);
            a += u * u * d;
            b += u * d;
            c += d;
        }
        [[a, b], [b, c]]
    }
}

pub fn log_mgf_mixed(beta: f64, tilt: &Tilt, want: Want) -> Result<MixedValue> {
    let m = MixedLogMgf::new(beta)?;
    Ok(match want {
        Want::Value => MixedValue::Value(m.value(tilt.h0, tilt.h1)?),
        Want::Gradient => MixedValue::Gradient(m.gradient(tilt.h0, tilt.h1)?),
        Want::Hessian => MixedValue::Hessian(m.hessian(tilt.h0, tilt.h1)?),
    })
}

/// Value, gradient and Hessian of a smooth convex function of the tilt.
type Objective<'a> = dyn Fn(f64, f64) -> Option<(f64, [f64; 2], [[f64; 2]; 2])> + 'a;

const MAX_NEWTON: usize = 200;
const TARGET: f64 = 1e-13;
const ACCEPT: f64 = 1e-10;

/// Damped Newton for `∇F(H) = (q, 0)`, i.e. minimisation of `F(H) − q h₀`.
/// `f` returns `None` outside the (shrunken) domain.
fn newton(f: &Objective, q: f64) -> Result<Tilt> {
    let (mut h0, mut h1) = (0.0, 0.0);
    let (val, grad, mut hess) = f(h0, h1).expect("origin is admissible");
    let mut phi = val - q * h0;
    let mut g = [grad[0] - q, grad[1]];
    let mut res = g[0].hypot(g[1]);
    for it in 0..MAX_NEWTON {
        if res < TARGET {
            return Ok(Tilt {
                h0,
                h1,
                residual: res,
                iterations: it,
            });
        }
        let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
        let d0 = -(hess[1][1] * g[0] - hess[0][1] * g[1]) / det;
        let d1 = -(-hess[1][0] * g[0] + hess[0][0] * g[1]) / det;
        let slope = g[0] * d0 + g[1] * d1;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let (n0, n1) = (h0 + t * d0, h1 + t * d1);
            if let Some((v, gr, he)) = f(n0, n1) {
                let p = v - q * n0;
                let ng = [gr[0] - q, gr[1]];
                let nres = ng[0].hypot(ng[1]);
                if p <= phi + 1e-4 * t * slope || nres < res {
                    h0 = n0;
                    h1 = n1;
                    hess = he;
                    phi = p;
                    g = ng;
                    res = nres;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res < ACCEPT {
        Ok(Tilt {
            h0,
            h1,
            residual: res,
            iterations: MAX_NEWTON,
        })
    } else {
        Err(Error::NoConvergence {
            iterations: MAX_NEWTON,
            residual: res,
        })
    }
}

fn margin(beta: f64) -> f64 {
    1e-6 * beta
}

/// Solves `∇L_Λ(H) = (q, 0)` for the continuum tilt `H̃(q, 0)`.
pub fn solve_tilt(beta: f64, q: f64) -> Result<Tilt> {
    let m = MixedLogMgf::new(beta)?;
    solve_tilt_with(&m, q)
}

pub fn solve_tilt_with(m: &MixedLogMgf, q: f64) -> Result<Tilt> {
    if !q.is_finite() {
        return Err(Error::InvalidParameter(format!("area target {q} is not finite")));
    }
    let bound = m.params.beta / 2.0 - margin(m.params.beta);
    let f = |h0: f64, h1: f64| {
        if h1.abs() >= bound || (h0 + h1).abs() >= bound {
            return None;
        }
        Some((
            m.value(h0, h1).ok()?,
            m.gradient(h0, h1).ok()?,
            m.hessian(h0, h1).ok()?,
        ))
    };
    newton(&f, q)
}

/// Solves the finite-`n` equation `∇[(1/n) Σ_{i=1}^n 𝔏((1−i/n)h₀ + h₁)] = (q, 0)`.
pub fn solve_tilt_discrete(beta: f64, n: usize, q: f64) -> Result<Tilt> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    if !q.is_finite() {
        return Err(Error::InvalidParameter(format!("area target {q} is not finite")));
    }
    let p = ModelParams::new(beta)?;
    let bound = beta / 2.0 - margin(beta);
    let nf = n as f64;
    let f = |h0: f64, h1: f64| {
        let hi = (1.0 - 1.0 / nf) * h0 + h1;
        if h1.abs() >= bound || hi.abs() >= bound {
            return None;
        }
        Some(discrete_derivatives(p.x, n, h0, h1))
    };
    newton(&f, q)
}

/// `(1/n) L_{Λ_n}` with its gradient and Hessian.
pub fn discrete_derivatives(x: f64, n: usize, h0: f64, h1: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let nf = n as f64;
    let (mut v, mut g0, mut g1, mut a, mut b, mut c) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 1..=n {
        let s = 1.0 - i as f64 / nf;
        let h = s * h0 + h1;
        v += log_mgf_unchecked(x, h, 0);
        let d1 = log_mgf_unchecked(x, h, 1);
        let d2 = log_mgf_unchecked(x, h, 2);
        g0 += s * d1;
        g1 += d1;
        a += s * s * d2;
        b += s * d2;
        c += d2;
    }
    (v / nf, [g0 / nf, g1 / nf], [[a / nf, b / nf], [b / nf, c / nf]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin() {
        let t = Tilt::new(0.0, 0.0);
        assert_eq!(log_mgf_mixed(2.0, &t, Want::Value).unwrap(), MixedValue::Value(0.0));
        assert_eq!(
            log_mgf_mixed(2.0, &t, Want::Gradient).unwrap(),
            MixedValue::Gradient([0.0, 0.0])
        );
        let s = solve_tilt(2.0, 0.0).unwrap();
        assert_eq!((s.h0, s.h1), (0.0, 0.0));
        let s = solve_tilt_discrete(2.0, 50, 0.0).unwrap();
        assert_eq!((s.h0, s.h1), (0.0, 0.0));
    }

    #[test]
    fn quadrature_refinement() {
        for beta in [1.0, 2.0, 3.0] {
            let m64 = MixedLogMgf::with_nodes(beta, 64).unwrap();
            let m128 = MixedLogMgf::with_nodes(beta, 128).unwrap();
            for i in -4..=4 {
                for j in -4..=4 {
                    let h1 = 0.9 * beta / 2.0 * i as f64 / 4.0;
                    let h0 = 0.9 * beta / 2.0 * j as f64 / 4.0 - h1;
                    if !Tilt::new(h0, h1).in_domain(beta) {
                        continue;
                    }
                    let d = (m64.quadrature_value(h0, h1) - m128.quadrature_value(h0, h1)).abs();
                    assert!(d < 1e-12, "{beta} {h0} {h1} {d}");
                    let g64 = m64.quadrature_gradient(h0, h1);
                    let g128 = m128.quadrature_gradient(h0, h1);
                    assert!((g64[0] - g128[0]).abs() < 1e-12 && (g64[1] - g128[1]).abs() < 1e-12);
                    // exact forms agree with the quadrature
                    assert!((m64.value(h0, h1).unwrap() - m128.quadrature_value(h0, h1)).abs() < 1e-12);
                    let g = m64.gradient(h0, h1).unwrap();
                    assert!((g[0] - g128[0]).abs() < 1e-11 && (g[1] - g128[1]).abs() < 1e-11);
                    let he = m64.hessian(h0, h1).unwrap();
                    let hq = m128.quadrature_hessian(h0, h1);
                    for r in 0..2 {
                        for c in 0..2 {
                            assert!((he[r][c] - hq[r][c]).abs() < 1e-9 * hq[r][c].abs().max(1.0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hessian_is_positive_definite() {
        let m = MixedLogMgf::new(2.0).unwrap();
        let h = m.hessian(0.7, -0.2).unwrap();
        assert_eq!(h[0][1], h[1][0]);
        assert!(h[0][0] > 0.0 && h[0][0] * h[1][1] - h[0][1] * h[1][0] > 0.0);
    }

    #[test]
    fn antisymmetric_solution() {
        for q in [0.2, 0.5, 1.0] {
            let t = solve_tilt(2.0, q).unwrap();
            assert!(t.residual < 1e-10);
            assert!((t.h1 + t.h0 / 2.0).abs() < 1e-9);
            assert!(t.h0 > 0.0 && t.h0 < 2.0);
        }
        let t = solve_tilt(2.0, -0.5).unwrap();
        assert!(t.h0 < 0.0);
    }

    #[test]
    fn discrete_converges_to_continuum() {
        let cont = solve_tilt(2.0, 0.5).unwrap();
        let mut prev = f64::INFINITY;
        for n in [50, 100, 200, 400] {
            let d = solve_tilt_discrete(2.0, n, 0.5).unwrap();
            let dist = (d.h0 - cont.h0).hypot(d.h1 - cont.h1);
            assert!(dist < prev);
            prev = dist;
            let x = ModelParams::new(2.0).unwrap().x;
            // per-step means reproduce the targets
            let nf = n as f64;
            let (mut area, mut end) = (0.0, 0.0);
            for i in 1..=n {
                let s = 1.0 - i as f64 / nf;
                let m = log_mgf_unchecked(x, s * d.h0 + d.h1, 1);
                area += s * m / nf;
                end += m / nf;
            }
            assert!((area - 0.5).abs() < 1e-10 && end.abs() < 1e-10);
        }
    }
}
