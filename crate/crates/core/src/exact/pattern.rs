use super::area::{AreaDp, AreaMode, AREA_DP_LIMIT};
use super::partition::excess_partitions;
use super::table::{stream, Columns, Constraint};
use crate::error::{Error, Result};
use crate::numerics::{bisect, log_sum_exp};
use crate::thermo::{beta_c, ModelParams};

/// `log Ẑ^c_t` for `t = 0..=t_max` (entry 0 is `−∞`), from the table of
/// walks that avoid 0 before their return.
pub fn pattern_partitions(beta: f64, t_max: usize) -> Result<Vec<f64>> {
    if t_max == 0 || t_max > super::ENGINE_LIMIT {
        return Err(Error::Guard(format!(
            "pattern length must lie in 1..={}",
            super::ENGINE_LIMIT
        )));
    }
    let p = ModelParams::new(beta)?;
    let lg = p.log_gamma();
    let mut out = vec![f64::NEG_INFINITY; t_max + 1];
    // the single zero stretch: V_1 = 0
    out[1] = lg - p.c_beta.ln();
    let mut cols = Columns::default();
    let lead = -p.c_beta.ln();
    let n_max = t_max.saturating_sub(2);
    stream(
        beta,
        n_max,
        |n| t_max.saturating_sub(n + 1),
        Constraint::NonzeroUntilReturn,
        |n, layer| {
            if n == 0 {
                return Ok(());
            }
            // return to 0 at step n + 1: G_{n+1} = G_n
            layer.closings(p.x, &mut cols, |g, t| {
                let s = n + 1 + g;
                out[s] = crate::numerics::log_add_exp(out[s], (n + 1) as f64 * lg + lead + t);
            });
            Ok(())
        },
    )?;
    Ok(out)
}

/// `log Ẑ^c_t`.
pub fn pattern_partition(beta: f64, t: usize) -> Result<f64> {
    Ok(AreaDp::new(beta, t, AreaMode::Pattern)?.log_weight[t])
}

/// `log Z̃^c_L` for `L = 0..=l` (walks closed by `V_N = 0`), with
/// `Z̃^c_0 = 1`.
pub fn constrained_partitions(beta: f64, l: usize) -> Result<Vec<f64>> {
    let mut z = excess_partitions(beta, l.max(1))?;
    z[0] = 0.0;
    let mut out: Vec<f64> = z.iter().map(|lz| lz - beta).collect();
    out.insert(0, 0.0);
    out.truncate(l + 1);
    Ok(out)
}

/// Constants of the regenerative description of the extended phase.
#[derive(Clone, Debug, serde::Serialize)]
pub struct RegenerativeConstants {
    pub beta: f64,
    /// Excess free energy: the root of `φ(α) = Σ_t Ẑ^c_t e^{−αt} = 1`.
    pub f_tilde: f64,
    /// Exponential growth rate of `Ẑ^c_t` (estimated from the computed range).
    pub f_hat: f64,
    /// `1/𝔈σ₁`.
    pub c_renewal: f64,
    /// `𝔈ν₁/𝔈σ₁`.
    pub e_beta: f64,
    /// `√(𝔈y₁²/𝔈ν₁)`.
    pub sigma_beta: f64,
    pub mean_sigma: f64,
    pub mean_nu: f64,
    pub mean_y2: f64,
    pub t_max: usize,
    /// Estimated mass of `𝔓_β` beyond `t_max`.
    pub tail_bound: f64,
}

impl RegenerativeConstants {
    /// `φ(α)` over the computed range.
    pub fn phi(&self, log_w: &[f64], alpha: f64) -> f64 {
        phi(log_w, alpha)
    }
}

fn phi(log_w: &[f64], alpha: f64) -> f64 {
    let terms: Vec<f64> = log_w
        .iter()
        .enumerate()
        .map(|(t, lw)| lw - alpha * t as f64)
        .collect();
    log_sum_exp(&terms).exp()
}

/// Largest tolerated truncation tail.
pub const TAIL_TOLERANCE: f64 = 1e-9;

/// Solves the renewal equation of the pattern law and its moments.
pub fn extended_constants(beta: f64, t_max: usize) -> Result<RegenerativeConstants> {
    if beta >= beta_c() {
        return Err(Error::Domain(format!(
            "extended constants need beta < beta_c = {}, got {beta}",
            beta_c()
        )));
    }
    if !(16..=AREA_DP_LIMIT).contains(&t_max) {
        return Err(Error::Guard(format!("pattern range must lie in 16..={AREA_DP_LIMIT}")));
    }
    let dp = AreaDp::new(beta, t_max, AreaMode::Pattern)?;
    let lw = &dp.log_weight;
    if phi(lw, 0.0) <= 1.0 {
        return Err(Error::Degenerate("φ(0) ≤ 1: no positive root".into()));
    }
    let mut hi = 1.0;
    while phi(lw, hi) >= 1.0 {
        hi *= 2.0;
    }
    let f_tilde = bisect(|a| phi(lw, a).ln(), 0.0, hi, 1e-15);

    // growth rate of Ẑ^c_t from the last half of the range
    let (t1, t2) = (t_max / 2, t_max);
    let f_hat = (lw[t2] - lw[t1]) / (t2 - t1) as f64;
    let r = (f_hat - f_tilde).exp();
    let last = (lw[t2] - f_tilde * t2 as f64).exp();
    let tail_bound = if r < 1.0 { last * r / (1.0 - r) } else { f64::INFINITY };

    let (mut ms, mut mn, mut my) = (0.0, 0.0, 0.0);
    for t in 1..=t_max {
        let p = (lw[t] - f_tilde * t as f64).exp();
        ms += t as f64 * p;
        mn += dp.mean_extension[t] * p;
        my += dp.mean_disp2[t] * p;
    }
    let out = RegenerativeConstants {
        beta,
        f_tilde,
        f_hat,
        c_renewal: 1.0 / ms,
        e_beta: mn / ms,
        sigma_beta: (my / mn).sqrt(),
        mean_sigma: ms,
        mean_nu: mn,
        mean_y2: my,
        t_max,
        tail_bound,
    };
    if !(tail_bound <= TAIL_TOLERANCE) {
        return Err(Error::Guard(format!(
            "truncation tail {tail_bound:e} at t_max = {t_max} exceeds {TAIL_TOLERANCE:e}"
        )));
    }
    Ok(out)
}

/// [`extended_constants`] with `t_max` doubled from 256 until the tail is
/// negligible.
pub fn extended_constants_auto(beta: f64) -> Result<RegenerativeConstants> {
    let mut t = 256;
    loop {
        match extended_constants(beta, t) {
            Err(Error::Guard(_)) if 2 * t <= 4096 => t *= 2,
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_and_area_patterns_agree() {
        for beta in [0.7, 1.5, 3.0] {
            let a = AreaDp::new(beta, 90, AreaMode::Pattern).unwrap();
            let b = pattern_partitions(beta, 90).unwrap();
            for t in 1..=90 {
                if a.log_weight[t].is_finite() || b[t].is_finite() {
                    assert!((a.log_weight[t] - b[t]).abs() < 1e-11, "beta={beta} t={t}");
                }
            }
        }
    }

    #[test]
    fn renewal_convolution_identity() {
        for beta in [0.6, 1.9] {
            let zc = constrained_partitions(beta, 40).unwrap();
            let zp = pattern_partitions(beta, 40).unwrap();
            for l in 1..=40 {
                let terms: Vec<f64> = (1..=l).map(|t| zp[t] + zc[l - t]).collect();
                let rhs = log_sum_exp(&terms);
                assert!((zc[l] - rhs).abs() < 1e-10, "L={l}");
            }
        }
    }

    #[test]
    fn renewal_equation_is_solved() {
        let k = extended_constants_auto(0.8).unwrap();
        let dp = AreaDp::new(0.8, k.t_max, AreaMode::Pattern).unwrap();
        assert!((k.phi(&dp.log_weight, k.f_tilde) - 1.0).abs() < 1e-10);
        assert!(k.e_beta > 0.0 && k.e_beta < 1.0);
        assert!(k.f_tilde > k.f_hat && k.f_hat > 0.0);
        assert!(extended_constants(1.5, 256).is_err());
    }
}
