use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// A statistic with its standard error, when one is available.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: Option<f64>,
}

fn need(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        Err(Error::Degenerate(format!("{what} needs at least {min} values, got {n}")))
    } else {
        Ok(())
    }
}

/// Sample mean with its standard error.
pub fn mean_se(xs: &[f64]) -> Result<Estimate> {
    need(xs.len(), 2, "mean")?;
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    Ok(Estimate {
        value: m,
        se: Some((v / n).sqrt()),
    })
}

/// Kolmogorov–Smirnov distance between two weighted discrete laws given as
/// `(point, weight)` pairs; weights are normalised separately.
pub fn ks_weighted(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<f64> {
    need(a.len(), 1, "ks")?;
    need(b.len(), 1, "ks")?;
    let (wa, wb): (f64, f64) = (a.iter().map(|p| p.1).sum(), b.iter().map(|p| p.1).sum());
    if !(wa > 0.0 && wb > 0.0) {
        return Err(Error::Degenerate("ks needs positive total weight".into()));
    }
    let mut pts: Vec<(f64, f64)> = a
        .iter()
        .map(|&(x, w)| (x, w / wa))
        .chain(b.iter().map(|&(x, w)| (x, -w / wb)))
        .collect();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (mut d, mut cum) = (0.0f64, 0.0);
    let mut i = 0;
    while i < pts.len() {
        let x = pts[i].0;
        while i < pts.len() && pts[i].0 == x {
            cum += pts[i].1;
            i += 1;
        }
        d = d.max(cum.abs());
    }
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks(a: &[f64], b: &[f64]) -> Result<f64> {
    need(a.len(), 2, "ks")?;
    need(b.len(), 2, "ks")?;
    let pa: Vec<(f64, f64)> = a.iter().map(|&x| (x, 1.0)).collect();
    let pb: Vec<(f64, f64)> = b.iter().map(|&x| (x, 1.0)).collect();
    ks_weighted(&pa, &pb)
}

/// Total variation distance between two probability vectors on the same
/// support (missing entries count as zero).
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| (p.get(i).unwrap_or(&0.0) - q.get(i).unwrap_or(&0.0)).abs())
        .sum::<f64>()
        / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `counts` against cell probabilities `probs`.
/// Adjacent cells are pooled until each expected count reaches
/// `min_expected`; the mass outside the listed cells forms a last cell.
pub fn chi2(counts: &[f64], probs: &[f64], total: f64, min_expected: f64) -> Result<ChiSquare> {
    if counts.len() != probs.len() {
        return Err(Error::InvalidParameter("counts and probabilities differ in length".into()));
    }
    need(counts.len(), 2, "chi2")?;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        o += c;
        e += p * total;
        if e >= min_expected {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    let rest_o = total - counts.iter().sum::<f64>() + o;
    let rest_e = total * (1.0 - probs.iter().sum::<f64>()) + e;
    if rest_e > 0.0 {
        if rest_e >= min_expected || cells.is_empty() {
            cells.push((rest_o, rest_e));
        } else {
            let last = cells.last_mut().unwrap();
            last.0 += rest_o;
            last.1 += rest_e;
        }
    } else if rest_o > 0.0 {
        return Err(Error::Degenerate("observations outside the support".into()));
    }
    need(cells.len(), 2, "chi2 cells")?;
    let statistic = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Degenerate(e.to_string()))?;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}

/// Least-squares line `y = intercept + slope·x` with the slope's standard
/// error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter("x and y differ in length".into()));
    }
    need(x.len(), 2, "linear fit")?;
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all x values coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if x.len() > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        slope_se,
        intercept,
    })
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::Degenerate("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

/// Empirical covariance with entrywise standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct CovEstimate {
    pub mean: Vec<f64>,
    pub cov: DMatrix<f64>,
    pub se: DMatrix<f64>,
}

/// Covariance of the rows of `samples`, each of dimension `d`.
pub fn emp_cov(samples: &[Vec<f64>]) -> Result<CovEstimate> {
    need(samples.len(), 2, "covariance")?;
    let d = samples[0].len();
    if samples.iter().any(|s| s.len() != d) {
        return Err(Error::InvalidParameter("samples of unequal dimension".into()));
    }
    let mut c = cross_cov(samples, samples)?;
    c.mean.truncate(d);
    Ok(c)
}

/// Cross-covariance between paired samples `a_k`, `b_k`; `mean` holds the
/// means of `a` followed by those of `b`.
pub fn cross_cov(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<CovEstimate> {
    need(a.len(), 2, "covariance")?;
    if a.len() != b.len() {
        return Err(Error::InvalidParameter("unpaired samples".into()));
    }
    let n = a.len() as f64;
    let (da, db) = (a[0].len(), b[0].len());
    let ma: Vec<f64> = (0..da).map(|i| a.iter().map(|s| s[i]).sum::<f64>() / n).collect();
    let mb: Vec<f64> = (0..db).map(|j| b.iter().map(|s| s[j]).sum::<f64>() / n).collect();
    let mut s1 = DMatrix::<f64>::zeros(da, db);
    let mut s2 = DMatrix::<f64>::zeros(da, db);
    for (x, y) in a.iter().zip(b) {
        for i in 0..da {
            let xi = x[i] - ma[i];
            for j in 0..db {
                let p = xi * (y[j] - mb[j]);
                s1[(i, j)] += p;
                s2[(i, j)] += p * p;
            }
        }
    }
    let cov = &s1 / (n - 1.0);
    let se = DMatrix::from_fn(da, db, |i, j| {
        let m = s1[(i, j)] / n;
        ((s2[(i, j)] / n - m * m).max(0.0) / n).sqrt()
    });
    let mut mean = ma;
    mean.extend(mb);
    Ok(CovEstimate { mean, cov, se })
}

/// `sup_i |f_i − g_i|`.
pub fn sup_dist(f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::InvalidParameter("curves differ in length".into()));
    }
    need(f.len(), 1, "sup distance")?;
    Ok(f.iter().zip(g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::RngStream;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn ks_identical_and_disjoint() {
        let a = [0.3, 1.0, 2.5, 2.5, 7.0];
        assert_eq!(ks(&a, &a).unwrap(), 0.0);
        assert_eq!(ks(&[0.0, 1.0], &[2.0, 3.0]).unwrap(), 1.0);
        assert!((ks(&[0.0, 2.0], &[1.0, 3.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(ks(&[1.0], &a).is_err());
    }

    #[test]
    fn exact_power_law_slope() {
        let x: Vec<f64> = (1..=20).map(|i| 10.0 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v.powf(-4.0 / 3.0)).collect();
        let f = loglog_slope(&x, &y).unwrap();
        assert!((f.slope + 4.0 / 3.0).abs() < 1e-10);
        assert!(f.slope_se < 1e-10);
    }

    #[test]
    fn normal_pairs_have_identity_covariance() {
        let mut rng = RngStream::new(17, 0);
        let s: Vec<Vec<f64>> = (0..1_000_000)
            .map(|_| vec![rng.sample(StandardNormal), rng.sample(StandardNormal)])
            .collect();
        let c = emp_cov(&s).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = (i == j) as u8 as f64;
                assert!((c.cov[(i, j)] - want).abs() < 3.0 * c.se[(i, j)], "{i}{j} {}", c.cov[(i, j)]);
            }
        }
        assert_eq!(c.mean.len(), 2);
    }

    #[test]
    fn chi2_pools_small_cells() {
        let probs = [0.5, 0.3, 0.15, 0.04, 0.01];
        let counts = [500.0, 300.0, 150.0, 40.0, 10.0];
        let r = chi2(&counts, &probs, 1000.0, 5.0).unwrap();
        assert!(r.statistic < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let skew = [600.0, 250.0, 100.0, 40.0, 10.0];
        assert!(chi2(&skew, &probs, 1000.0, 5.0).unwrap().p_value < 1e-6);
    }

    #[test]
    fn weighted_ks_and_tv() {
        let a = [(0.0, 1.0), (1.0, 1.0)];
        let b = [(0.0, 3.0), (1.0, 1.0)];
        assert!((ks_weighted(&a, &b).unwrap() - 0.25).abs() < 1e-15);
        assert!((total_variation(&[0.5, 0.5], &[0.75, 0.25]) - 0.25).abs() < 1e-15);
        assert_eq!(sup_dist(&[1.0, 2.0], &[1.5, 1.0]).unwrap(), 1.0);
    }
}
