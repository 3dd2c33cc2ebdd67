use std::io::Write;

use super::area::{AreaDp, AreaMode, AREA_DP_LIMIT};
use super::table::{stream, Columns, Constraint};
use crate::error::{Error, Result};
use crate::numerics::log_sum_exp;
use crate::thermo::ModelParams;

/// Largest length handled by the `O(L³)` extension-law program.
pub const ENGINE_LIMIT: usize = 2048;

/// Law of the horizontal extension `N_l` under the polymer measure.
#[derive(Clone, Debug)]
pub struct ExtensionLaw {
    pub length: usize,
    pub beta: f64,
    /// `log Z̃_L`.
    pub log_z: f64,
    /// `probs[N]`, with `probs[0] = 0`.
    pub probs: Vec<f64>,
    /// Per-`N` contribution to `log Z̃_L`.
    pub log_contrib: Vec<f64>,
}

impl ExtensionLaw {
    fn from_contributions(length: usize, beta: f64, log_contrib: Vec<f64>) -> Self {
        let log_z = log_sum_exp(&log_contrib);
        let probs = log_contrib.iter().map(|&l| (l - log_z).exp()).collect();
        Self {
            length,
            beta,
            log_z,
            probs,
            log_contrib,
        }
    }

    /// Most likely extension; the smallest one on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 1;
        for n in 1..self.probs.len() {
            if self.probs[n] > self.probs[best] {
                best = n;
            }
        }
        best
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> Result<()> {
        if header {
            writeln!(w, "L,beta,N,prob,log_contrib")?;
        }
        for n in 1..self.probs.len() {
            writeln!(
                w,
                "{},{},{},{:e},{}",
                self.length, self.beta, n, self.probs[n], self.log_contrib[n]
            )?;
        }
        Ok(())
    }
}

fn check_length(l: usize, limit: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidParameter("length must be positive".into()));
    }
    if l > limit {
        return Err(Error::Guard(format!("length {l} exceeds engine limit {limit}")));
    }
    Ok(())
}

/// Extension laws for every `L′ ≤ l_max` from one pass of the walk table.
///
/// The law of `L′` weights `N` by `c_β Γ_β^N P_β(G_N = L′ − N, V_{N+1} = 0)`.
pub fn extension_laws(beta: f64, l_max: usize) -> Result<Vec<ExtensionLaw>> {
    check_length(l_max, ENGINE_LIMIT)?;
    let p = ModelParams::new(beta)?;
    let lg = p.log_gamma();
    let mut contrib: Vec<Vec<f64>> = (0..=l_max).map(|l| vec![f64::NEG_INFINITY; l + 1]).collect();
    let mut cols = Columns::default();
    stream(beta, l_max, |n| l_max - n, Constraint::Free, |n, layer| {
        if n > 0 {
            // the closing step's 1/c cancels the prefactor c
            layer.closings(p.x, &mut cols, |g, t| contrib[n + g][n] = n as f64 * lg + t);
        }
        Ok(())
    })?;
    Ok(contrib
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(l, c)| ExtensionLaw::from_contributions(l, beta, c))
        .collect())
}

/// Law of `N_l` under `P_{L,β}`.
pub fn extension_law(beta: f64, l: usize) -> Result<ExtensionLaw> {
    let mut all = extension_laws(beta, l)?;
    Ok(all.pop().expect("nonempty"))
}

/// `log Z̃_{L,β}`.
pub fn excess_partition(beta: f64, l: usize) -> Result<f64> {
    check_length(l, AREA_DP_LIMIT)?;
    Ok(AreaDp::new(beta, l, AreaMode::Free)?.log_weight[l])
}

/// `log Z̃_{L′,β}` for `L′ = 0..=l` (entry 0 is `−∞`).
pub fn excess_partitions(beta: f64, l: usize) -> Result<Vec<f64>> {
    check_length(l, AREA_DP_LIMIT)?;
    Ok(AreaDp::new(beta, l, AreaMode::Free)?.log_weight)
}
