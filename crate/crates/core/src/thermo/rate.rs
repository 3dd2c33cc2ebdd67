use super::tilt::{solve_tilt_with, MixedLogMgf};
use super::{beta_c, ModelParams};
use crate::error::{Error, Result};
use crate::numerics::brent;

/// Cost of confining an `n`-step walk to algebraic area `q n²` (with a
/// closed endpoint), on the `n` scale: `ρ_β(q) = q h̃₀ − L_Λ(H̃(q, 0))`.
pub fn rho(beta: f64, q: f64) -> Result<f64> {
    let m = MixedLogMgf::new(beta)?;
    rho_with(&m, q)
}

fn rho_with(m: &MixedLogMgf, q: f64) -> Result<f64> {
    let t = solve_tilt_with(m, q)?;
    Ok(q * t.h0 - m.value(t.h0, t.h1)?)
}

/// `G̃(a) = a (log Γ_β − ρ_β(1/a²))`: exponential rate on the `√L` scale of
/// configurations with extension `a√L`.
pub fn g_tilde(beta: f64, a: f64) -> Result<f64> {
    let m = MixedLogMgf::new(beta)?;
    g_tilde_with(&m, a)
}

fn check_a(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("a must be positive, got {a}")))
    }
}

fn g_tilde_with(m: &MixedLogMgf, a: f64) -> Result<f64> {
    check_a(a)?;
    Ok(a * (m.params.log_gamma() - rho_with(m, 1.0 / (a * a))?))
}

/// `G̃(a) = a log Γ_β − h̃₀/a + a L_Λ(H̃)`, written directly in terms of the tilt.
pub fn g_tilde_expanded(beta: f64, a: f64) -> Result<f64> {
    check_a(a)?;
    let m = MixedLogMgf::new(beta)?;
    let t = solve_tilt_with(&m, 1.0 / (a * a))?;
    Ok(a * m.params.log_gamma() - t.h0 / a + a * m.value(t.h0, t.h1)?)
}

/// `G̃′(a) = log Γ_β + q h̃₀ + L_Λ(H̃)` with `q = 1/a²` (envelope theorem).
pub fn g_tilde_prime(beta: f64, a: f64) -> Result<f64> {
    let m = MixedLogMgf::new(beta)?;
    g_tilde_prime_with(&m, a)
}

fn g_tilde_prime_with(m: &MixedLogMgf, a: f64) -> Result<f64> {
    check_a(a)?;
    let q = 1.0 / (a * a);
    let t = solve_tilt_with(m, q)?;
    Ok(m.params.log_gamma() + q * t.h0 + m.value(t.h0, t.h1)?)
}

/// Maximiser of `G̃` on `(0, ∞)`; exists only in the collapsed phase.
pub fn a_beta(beta: f64) -> Result<f64> {
    let p = ModelParams::new(beta)?;
    if beta <= beta_c() {
        return Err(Error::Domain(format!(
            "a(beta) needs beta > beta_c = {}, got {beta}",
            beta_c()
        )));
    }
    let m = MixedLogMgf::new(p.beta)?;
    let f = |a: f64| g_tilde_prime_with(&m, a);
    let (mut lo, mut hi) = (0.05, 20.0);
    // very small a means areas too large for the tilt to be representable
    let mut flo = loop {
        match f(lo) {
            Ok(v) => break v,
            Err(_) if lo < hi => lo *= 1.5,
            Err(e) => return Err(e),
        }
    };
    let mut fhi = f(hi)?;
    let mut expansions = 0;
    while flo.signum() == fhi.signum() {
        expansions += 1;
        if expansions > 60 {
            return Err(Error::NoConvergence {
                iterations: expansions,
                residual: fhi.abs().min(flo.abs()),
            });
        }
        if flo < 0.0 {
            lo /= 2.0;
            flo = f(lo)?;
        } else {
            hi *= 2.0;
            fhi = f(hi)?;
        }
    }
    brent(f, lo, hi, 1e-13, 200)
}
