use std::f64::consts::LN_2;

use super::kernel::{closing_sum, exponent_of, geo_conv_split, scale2, Ext};
use crate::error::{Error, Result};
use crate::thermo::ModelParams;

/// What the area dynamic program sums over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AreaMode {
    /// All walks, closed by `V_{N+1} = 0`: yields `Z̃_L`.
    Free,
    /// Walks that stay nonzero until their first return to 0 at step `N`:
    /// yields the single-pattern partition functions `Ẑ^c_t`.
    Pattern,
}

/// Largest `L` the area program accepts.
pub const AREA_DP_LIMIT: usize = 8192;

/// Dynamic program over `(s, v)` with `s = n + G_n` and `v = V_n`, weighting
/// each step by `Γ_β`. Since `s` strictly increases, every state is reached
/// from a unique earlier row, and a full sweep costs `O(s_max²)`.
#[derive(Clone, Debug)]
pub struct AreaDp {
    pub beta: f64,
    pub mode: AreaMode,
    pub s_max: usize,
    /// `log Z̃_s` (free) or `log Ẑ^c_s` (pattern); entry 0 is `−∞`.
    pub log_weight: Vec<f64>,
    /// Mean horizontal extension given the length.
    pub mean_extension: Vec<f64>,
    /// Mean squared vertical displacement given the length (pattern mode).
    pub mean_disp2: Vec<f64>,
}

struct Rows {
    m0: Vec<f64>,
    nm: Vec<f64>,
    y1: Vec<f64>,
    y2: Vec<f64>,
    exp: Vec<i32>,
}

#[inline]
fn offset(r: usize) -> usize {
    if r == 0 {
        0
    } else {
        1 + (r - 1) * (r - 1)
    }
}

#[inline]
fn width(r: usize) -> usize {
    if r == 0 {
        1
    } else {
        2 * r - 1
    }
}

impl AreaDp {
    pub fn new(beta: f64, s_max: usize, mode: AreaMode) -> Result<Self> {
        let p = ModelParams::new(beta)?;
        if s_max == 0 {
            return Err(Error::InvalidParameter("length must be positive".into()));
        }
        if s_max > AREA_DP_LIMIT {
            return Err(Error::Guard(format!(
                "area program limited to L <= {AREA_DP_LIMIT}, got {s_max}"
            )));
        }
        let x = p.x;
        let x2 = x * x;
        let pattern = mode == AreaMode::Pattern;
        // rows needed: terminal weight at s is read from row s (free) or s−1 (pattern)
        let rmax = if pattern { s_max - 1 } else { s_max };
        let cells = offset(rmax) + width(rmax);
        let mut rows = Rows {
            m0: vec![0.0; cells],
            nm: vec![0.0; cells],
            y1: if pattern { vec![0.0; cells] } else { Vec::new() },
            y2: if pattern { vec![0.0; cells] } else { Vec::new() },
            exp: vec![0; cells],
        };
        rows.m0[0] = 1.0;

        let mut log_weight = vec![f64::NEG_INFINITY; s_max + 1];
        let mut mean_extension = vec![0.0; s_max + 1];
        let mut mean_disp2 = vec![0.0; s_max + 1];

        let kmax = rmax;
        let mut c0 = vec![0.0; 2 * kmax + 1];
        let mut cn = vec![0.0; 2 * kmax + 1];
        let mut c1 = vec![0.0; 2 * kmax + 1];
        let mut c2 = vec![0.0; 2 * kmax + 1];
        let mut e0 = vec![0; 2 * kmax + 1];
        let mut ex = vec![0; 2 * kmax + 1];

        for r in 0..=rmax {
            let (o, w) = (offset(r), width(r));
            let row_exp = finalise(&mut rows, o, w, pattern);
            let half = (w / 2) as i64;

            // terminal weights read off this row
            let row = o..o + w;
            let t0 = closing_sum(&rows.m0[row.clone()], -half, x);
            let tn = closing_sum(&rows.nm[row.clone()], -half, x);
            let ratio = |t: Ext| (t.ln() - t0.ln()).exp();
            if pattern {
                // closing step to 0: one more column, no extra area
                let s = r + 1;
                if !t0.is_zero() {
                    log_weight[s] = t0.ln() + 2.0 * x.ln() + row_exp as f64 * LN_2;
                    mean_extension[s] = ratio(tn) + 1.0;
                    mean_disp2[s] = ratio(closing_sum(&rows.y2[row], -half, x));
                }
            } else if r >= 1 && !t0.is_zero() {
                log_weight[r] = t0.ln() + row_exp as f64 * LN_2;
                mean_extension[r] = ratio(tn);
            }

            // push to later rows: target s′ = r + 1 + |v′| ≤ rmax
            if r + 1 > rmax {
                continue;
            }
            let k = (rmax - r - 1) as i64;
            let len = (2 * k + 1) as usize;
            let src = o..o + w;
            geo_conv_split(&rows.m0[src.clone()], -half, &mut c0[..len], &mut e0[..len], -k, x);
            let mut aligned = |arr: &[f64], out: &mut [f64]| {
                geo_conv_split(arr, -half, &mut out[..len], &mut ex[..len], -k, x);
                for j in 0..len {
                    out[j] = scale2(out[j], ex[j] - e0[j]);
                }
            };
            aligned(&rows.nm[src.clone()], &mut cn);
            if pattern {
                aligned(&rows.y1[src.clone()], &mut c1);
                aligned(&rows.y2[src], &mut c2);
            }
            for j in 0..len {
                let vp = j as i64 - k;
                if pattern && vp == 0 {
                    continue;
                }
                let s = r + 1 + vp.unsigned_abs() as usize;
                let idx = offset(s) + (vp + s as i64 - 1) as usize;
                let a0 = x2 * c0[j];
                rows.m0[idx] = a0;
                rows.nm[idx] = x2 * cn[j] + a0;
                if pattern {
                    let v = vp as f64;
                    // Z_{n+1} = −Z_n − V_{n+1} tracks ±Y_n without a parity bit
                    rows.y1[idx] = -x2 * c1[j] - v * a0;
                    rows.y2[idx] = x2 * c2[j] + 2.0 * v * x2 * c1[j] + v * v * a0;
                }
                rows.exp[idx] = row_exp + e0[j];
            }
        }
        Ok(Self {
            beta,
            mode,
            s_max,
            log_weight,
            mean_extension,
            mean_disp2,
        })
    }

    pub fn weight(&self, s: usize) -> f64 {
        self.log_weight[s].exp()
    }
}

/// Brings the cells of one row to a common binary exponent and returns it.
fn finalise(rows: &mut Rows, o: usize, w: usize, pattern: bool) -> i32 {
    let mut e_max = i32::MIN;
    for i in o..o + w {
        if let Some(e) = exponent_of(rows.m0[i]) {
            e_max = e_max.max(e + rows.exp[i]);
        }
    }
    if e_max == i32::MIN {
        return 0;
    }
    for i in o..o + w {
        let shift = rows.exp[i] - e_max;
        rows.m0[i] = scale2(rows.m0[i], shift);
        rows.nm[i] = scale2(rows.nm[i], shift);
        if pattern {
            rows.y1[i] = scale2(rows.y1[i], shift);
            rows.y2[i] = scale2(rows.y2[i], shift);
        }
    }
    e_max
}
