use super::kernel::geo_conv;
use crate::error::{Error, Result};
use crate::thermo::{beta_c, ModelParams};

/// Where the underlying walk starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkStart {
    Zero,
    Mu,
}

/// Exact renewal description of the critical walk up to `l_max`.
#[derive(Clone, Debug)]
pub struct CriticalRenewal {
    pub beta: f64,
    pub l_max: usize,
    /// `P_μ(X = n)`: law of a generic inter-arrival `X = 𝔄 + 𝔑`.
    pub excursion_law: Vec<f64>,
    /// `P(X_1 = n)` when the walk starts at 0.
    pub first_law: Vec<f64>,
    /// `P(n ∈ 𝔛)` for the walk started at 0.
    pub renewal_mass: Vec<f64>,
    /// `Z̃_L` reassembled from the renewal masses.
    pub z_tilde: Vec<f64>,
}

/// Largest horizon for the quadratic-memory excursion program.
pub const RENEWAL_LIMIT: usize = 16384;

#[inline]
fn offset(r: usize) -> usize {
    if r == 0 {
        0
    } else {
        1 + (r - 1) * (r - 1)
    }
}

/// Law of `X = Σ_{i<τ} (|V_i| + 1)` up to `n_max` from the given start.
pub fn excursion_law(beta: f64, n_max: usize, start: WalkStart) -> Result<Vec<f64>> {
    let p = ModelParams::new(beta)?;
    if n_max > RENEWAL_LIMIT {
        return Err(Error::Guard(format!(
            "excursion program limited to n <= {RENEWAL_LIMIT}, got {n_max}"
        )));
    }
    let (x, c) = (p.x, p.c_beta);
    let stop = 1.0 / (c * (1.0 - x));
    // row s holds v with |v| + 1 <= s
    let cells = offset(n_max) + 2 * n_max.max(1);
    let mut w = vec![0.0; cells];
    let idx = |s: usize, v: i64| offset(s) + (v + s as i64 - 1) as usize;
    match start {
        WalkStart::Zero => {
            if n_max >= 1 {
                w[idx(1, 0)] = 1.0;
            }
        }
        WalkStart::Mu => {
            for v in -(n_max as i64 - 1)..n_max as i64 {
                let s = v.unsigned_abs() as usize + 1;
                w[idx(s, v)] = if v == 0 {
                    1.0 - x
                } else {
                    0.5 * (1.0 - x) * x.powi(v.unsigned_abs() as i32)
                };
            }
        }
    }
    let mut law = vec![0.0; n_max + 1];
    let mut pos = vec![0.0; n_max];
    let mut neg = vec![0.0; n_max];
    for s in 1..=n_max {
        let o = offset(s);
        let h = s as i64 - 1;
        let row = &w[o..o + 2 * s - 1];
        let mut absorbed = 0.0;
        for (i, m) in row.iter().enumerate() {
            let v = i as i64 - h;
            if v != 0 {
                absorbed += m * x.powi(v.unsigned_abs() as i32);
            }
        }
        law[s] = absorbed * stop;
        if s == n_max {
            break;
        }
        let k = n_max - s - 1;
        let zero = row[h as usize];
        // positive side to positive targets 1..=k, negative to negative
        let (lo, hi) = (&row[..h as usize], &row[h as usize + 1..]);
        geo_conv(hi, 1, &mut pos[..k], 1, x);
        let mut neg_src: Vec<f64> = lo.to_vec();
        neg_src.reverse();
        geo_conv(&neg_src, 1, &mut neg[..k], 1, x);
        let row_vals: Vec<(i64, f64)> = (1..=k as i64)
            .flat_map(|v| {
                let z = zero * x.powi(v as i32);
                [(v, pos[v as usize - 1] + z), (-v, neg[v as usize - 1] + z)]
            })
            .collect();
        for (v, m) in row_vals {
            let t = s + v.unsigned_abs() as usize + 1;
            w[idx(t, v)] += m / c;
        }
        if s < n_max {
            w[idx(s + 1, 0)] += zero / c;
        }
    }
    Ok(law)
}

/// `P(τ = n)` for `n ≤ n_max`, with values truncated at `|v| ≤ v_max`.
pub fn tau_law(beta: f64, n_max: usize, start: WalkStart) -> Result<Vec<f64>> {
    let p = ModelParams::new(beta)?;
    let (x, c) = (p.x, p.c_beta);
    let v_max = (10.0 * (p.var_increment() * n_max as f64).sqrt()) as usize + 64;
    let stop = 1.0 / (c * (1.0 - x));
    let mut pos = vec![0.0; v_max];
    let mut neg = vec![0.0; v_max];
    let mut zero;
    match start {
        WalkStart::Zero => zero = 1.0,
        WalkStart::Mu => {
            zero = 1.0 - x;
            for v in 1..=v_max {
                let m = 0.5 * (1.0 - x) * x.powi(v as i32);
                pos[v - 1] = m;
                neg[v - 1] = m;
            }
        }
    }
    let mut law = vec![0.0; n_max + 1];
    let mut np = vec![0.0; v_max];
    let mut nn = vec![0.0; v_max];
    for n in 1..=n_max {
        let mut hit = 0.0;
        for (i, (a, b)) in pos.iter().zip(&neg).enumerate() {
            hit += (a + b) * x.powi(i as i32 + 1);
        }
        law[n] = hit * stop;
        geo_conv(&pos, 1, &mut np, 1, x);
        geo_conv(&neg, 1, &mut nn, 1, x);
        for v in 1..=v_max {
            let z = zero * x.powi(v as i32);
            np[v - 1] = (np[v - 1] + z) / c;
            nn[v - 1] = (nn[v - 1] + z) / c;
        }
        zero /= c;
        std::mem::swap(&mut pos, &mut np);
        std::mem::swap(&mut neg, &mut nn);
    }
    Ok(law)
}

/// Builds the critical renewal structure and reassembles `Z̃_L` from it.
pub fn crit_renewal(l_max: usize) -> Result<CriticalRenewal> {
    let beta = beta_c();
    let p = ModelParams::new(beta)?;
    let (x, c) = (p.x, p.c_beta);
    let n_max = l_max + 1;
    let f = excursion_law(beta, n_max, WalkStart::Mu)?;
    let f0 = excursion_law(beta, n_max, WalkStart::Zero)?;
    let mut u = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        u[n] = f[n] + (1..n).map(|m| f[m] * u[n - m]).sum::<f64>();
    }
    let mut mass = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        mass[n] = f0[n] + (1..n).map(|m| f0[m] * u[n - m]).sum::<f64>();
    }
    let mut z = vec![0.0; l_max + 1];
    for l in 1..=l_max {
        let mut acc = 0.0;
        let mut cr = 1.0;
        for r in 0..l {
            acc += cr * mass[l - r + 1];
            cr /= c;
        }
        z[l] = c * (c.powi(-(l as i32) - 1) + (1.0 - x) * acc);
    }
    Ok(CriticalRenewal {
        beta,
        l_max,
        excursion_law: f,
        first_law: f0,
        renewal_mass: mass,
        z_tilde: z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{AreaDp, AreaMode};

    #[test]
    fn reassembly_matches_area_program() {
        let r = crit_renewal(200).unwrap();
        let dp = AreaDp::new(beta_c(), 200, AreaMode::Free).unwrap();
        for l in 1..=200 {
            let rel = (r.z_tilde[l] / dp.weight(l) - 1.0).abs();
            assert!(rel < 1e-10, "L={l} rel={rel}");
        }
    }

    #[test]
    fn laws_are_subprobabilities() {
        let f = excursion_law(beta_c(), 400, WalkStart::Mu).unwrap();
        let s: f64 = f.iter().sum();
        assert!(s < 1.0 && s > 0.5, "{s}");
        let t = tau_law(beta_c(), 400, WalkStart::Mu).unwrap();
        let s: f64 = t.iter().sum();
        assert!(s < 1.0 && s > 0.5, "{s}");
    }
}
