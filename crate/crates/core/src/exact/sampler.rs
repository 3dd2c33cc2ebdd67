use std::path::Path;

use rand::Rng;

use super::cache::{cache_file_name, cached};
use super::partition::{extension_laws, ExtensionLaw, ENGINE_LIMIT};
use super::table::{Columns, Constraint, DpTable, DEFAULT_CELL_BUDGET};
use crate::error::{Error, Result};
use crate::polymer::{from_aux_walk, AuxWalk, PolymerPath};
use crate::thermo::ModelParams;

/// Exact sampler for `P_{L,β}`, `L ≤ l_max`, by backward sampling through a
/// stored walk table.
#[derive(Clone, Debug)]
pub struct ExactSampler {
    pub beta: f64,
    pub l_max: usize,
    x: f64,
    table: DpTable,
    laws: Vec<ExtensionLaw>,
    cdfs: Vec<Vec<f64>>,
}

fn draw_index<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let total = *cdf.last().expect("nonempty");
    let u = rng.random::<f64>() * total;
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Cumulative weights from log-weights (shifted by their maximum).
fn log_cdf(lw: &[f64]) -> Vec<f64> {
    let m = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = 0.0;
    lw.iter()
        .map(|&l| {
            acc += (l - m).exp();
            acc
        })
        .collect()
}

fn check_sampler_length(l_max: usize) -> Result<()> {
    if l_max == 0 || l_max > ENGINE_LIMIT {
        return Err(Error::Guard(format!("sampler length must lie in 1..={ENGINE_LIMIT}")));
    }
    Ok(())
}

impl ExactSampler {
    pub fn new(beta: f64, l_max: usize) -> Result<Self> {
        Self::with_budget(beta, l_max, DEFAULT_CELL_BUDGET)
    }

    pub fn with_budget(beta: f64, l_max: usize, budget: u64) -> Result<Self> {
        check_sampler_length(l_max)?;
        let table = DpTable::build_with(beta, l_max, l_max, |n| l_max - n, Constraint::Free, budget)?;
        Self::from_table(beta, l_max, table)
    }

    /// Like [`ExactSampler::new`], but keeps the walk table in `dir` and
    /// reuses it on later calls with the same `(β, l_max)`.
    pub fn cached(beta: f64, l_max: usize, dir: &Path) -> Result<Self> {
        check_sampler_length(l_max)?;
        let name = format!("sampler-{}", cache_file_name(beta, l_max, l_max, Constraint::Free));
        let table = cached(&dir.join(name), beta, l_max, l_max, |n| l_max - n, || {
            DpTable::build_with(beta, l_max, l_max, |n| l_max - n, Constraint::Free, DEFAULT_CELL_BUDGET)
        })?;
        Self::from_table(beta, l_max, table)
    }

    fn from_table(beta: f64, l_max: usize, table: DpTable) -> Result<Self> {
        let p = ModelParams::new(beta)?;
        let laws = extension_laws(beta, l_max)?;
        let cdfs = laws.iter().map(|l| l.cdf()).collect();
        Ok(Self {
            beta,
            l_max,
            x: p.x,
            table,
            laws,
            cdfs,
        })
    }

    pub fn law(&self, l: usize) -> &ExtensionLaw {
        &self.laws[l - 1]
    }

    /// Log-weights over `v ∈ [−g, g]` of column `g` at step `n`, times
    /// `x^{|target − v|}`.
    fn step_weights(&self, n: usize, g: usize, target: i64, cols: &mut Columns) -> Vec<f64> {
        let layer = self.table.layer(n);
        let lx = self.x.ln();
        match layer.gather(g, cols) {
            None => vec![f64::NEG_INFINITY; 2 * g + 1],
            Some(_) => cols.vals[0]
                .iter()
                .zip(-(g as i64)..)
                .map(|(&m, v)| {
                    if m > 0.0 {
                        m.ln() + (target - v).abs() as f64 * lx
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect(),
        }
    }

    /// One exact draw from `P_{L,β}`.
    pub fn sample<R: Rng + ?Sized>(&self, l: usize, rng: &mut R) -> Result<PolymerPath> {
        if l == 0 || l > self.l_max {
            return Err(Error::InvalidParameter(format!(
                "length {l} outside 1..={}",
                self.l_max
            )));
        }
        let n = draw_index(&self.cdfs[l - 1], rng);
        let mut cols = Columns::default();
        let mut values = vec![0i64; n + 2];
        // V_N given G_N = L − N and V_{N+1} = 0, then backwards
        let mut g = l - n;
        let mut target = 0i64;
        for k in (1..=n).rev() {
            let lw = self.step_weights(k, g, target, &mut cols);
            let v = draw_index(&log_cdf(&lw), rng) as i64 - g as i64;
            values[k] = v;
            g -= v.unsigned_abs() as usize;
            target = v;
        }
        debug_assert_eq!(g, 0);
        from_aux_walk(&AuxWalk::from_values(values)?, n)
    }

    /// Probability that [`ExactSampler::sample`] returns `path`, computed
    /// from the table along the backward chain.
    pub fn path_probability(&self, path: &PolymerPath) -> f64 {
        let l = path.total_length();
        if l == 0 || l > self.l_max {
            return 0.0;
        }
        let walk = crate::polymer::to_aux_walk(path);
        let vals = walk.values();
        let n = path.extension();
        let mut prob = self.law(l).probs[n];
        let mut cols = Columns::default();
        let mut g = l - n;
        let mut target = 0i64;
        for k in (1..=n).rev() {
            let lw = self.step_weights(k, g, target, &mut cols);
            let cdf = log_cdf(&lw);
            let v = vals[k];
            let i = (v + g as i64) as usize;
            let w = cdf[i] - if i > 0 { cdf[i - 1] } else { 0.0 };
            prob *= w / cdf.last().unwrap();
            g -= v.unsigned_abs() as usize;
            target = v;
        }
        prob
    }
}

/// One exact draw from `P_{L,β}` (builds a sampler; reuse [`ExactSampler`]
/// for repeated draws).
pub fn exact_sampler<R: Rng + ?Sized>(beta: f64, l: usize, rng: &mut R) -> Result<PolymerPath> {
    ExactSampler::new(beta, l)?.sample(l, rng)
}

/// Draws the length from the window `K_L` with weights `∝ Z̃_{L′}` and then
/// samples exactly at that length.
#[derive(Clone, Debug)]
pub struct MixtureSampler {
    pub length: usize,
    /// Half-width of the window after clamping.
    pub epsilon: usize,
    /// `(log L)^6` before clamping.
    pub epsilon_raw: f64,
    pub window: Vec<usize>,
    pub weights: Vec<f64>,
    cdf: Vec<f64>,
    inner: ExactSampler,
}

/// Half-width of the mixture window: `min(⌊(ln L)^6⌋, ⌊L/4⌋, limit − L)`.
pub fn mixture_epsilon(l: usize, limit: usize) -> usize {
    let raw = (l as f64).ln().powi(6).floor();
    let raw = if raw.is_finite() { raw as usize } else { 0 };
    raw.min(l / 4).min(limit.saturating_sub(l))
}

impl MixtureSampler {
    pub fn new(beta: f64, l: usize, limit: usize) -> Result<Self> {
        let limit = limit.min(ENGINE_LIMIT);
        if l == 0 || l > limit {
            return Err(Error::Guard(format!("window centre {l} exceeds limit {limit}")));
        }
        let eps = mixture_epsilon(l, limit);
        let inner = ExactSampler::new(beta, l + eps)?;
        let window: Vec<usize> = (l - eps..=l + eps).collect();
        let lz: Vec<f64> = window.iter().map(|&k| inner.law(k).log_z).collect();
        let cdf = log_cdf(&lz);
        let total = *cdf.last().unwrap();
        let mut prev = 0.0;
        let weights = cdf
            .iter()
            .map(|&c| {
                let w = (c - prev) / total;
                prev = c;
                w
            })
            .collect();
        Ok(Self {
            length: l,
            epsilon: eps,
            epsilon_raw: (l as f64).ln().powi(6),
            window,
            weights,
            cdf,
            inner,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, PolymerPath)> {
        let l = self.window[draw_index(&self.cdf, rng)];
        Ok((l, self.inner.sample(l, rng)?))
    }

    /// `max/min` of the window weights.
    pub fn weight_spread(&self) -> f64 {
        let (lo, hi) = self
            .weights
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &w| (lo.min(w), hi.max(w)));
        hi / lo
    }
}

/// One draw of `(L′, path)` from the mixture over `K_L`.
pub fn mixture_sampler<R: Rng + ?Sized>(
    beta: f64,
    l: usize,
    limit: usize,
    rng: &mut R,
) -> Result<(usize, PolymerPath)> {
    MixtureSampler::new(beta, l, limit)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymer::enumerate_z;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    #[test]
    fn path_probabilities_match_enumeration() {
        for beta in [0.4, 1.0, 2.5] {
            let s = ExactSampler::new(beta, 8).unwrap();
            for l in 1..=8 {
                let e = enumerate_z(l, beta).unwrap();
                for (path, p) in e.law() {
                    let path = PolymerPath::new(path).unwrap();
                    let q = s.path_probability(&path);
                    assert!((q - p).abs() < 1e-12 * p.max(1e-300) + 1e-15, "{path:?}");
                }
            }
        }
    }

    fn tv<K: std::hash::Hash + Eq>(law: &HashMap<K, f64>, counts: &HashMap<K, usize>, n: usize) -> f64 {
        law.iter()
            .map(|(k, p)| (counts.get(k).copied().unwrap_or(0) as f64 / n as f64 - p).abs())
            .sum::<f64>()
            / 2.0
    }

    #[test]
    fn empirical_law_matches_enumeration() {
        let beta = 1.0;
        let s = ExactSampler::new(beta, 8).unwrap();
        let e = enumerate_z(8, beta).unwrap();
        let law = e.law();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let mut paths: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut ext: HashMap<usize, usize> = HashMap::new();
        let mut energy: HashMap<u64, usize> = HashMap::new();
        for _ in 0..draws {
            let p = s.sample(8, &mut rng).unwrap();
            assert_eq!(p.total_length(), 8);
            *ext.entry(p.extension()).or_default() += 1;
            *energy.entry(p.interaction()).or_default() += 1;
            *paths.entry(p.stretches().to_vec()).or_default() += 1;
        }
        let ext_law: HashMap<usize, f64> = e.extension_law().into_iter().enumerate().collect();
        assert!(tv(&ext_law, &ext, draws) < 0.01);
        let energy_law: HashMap<u64, f64> = e
            .energy_law()
            .into_iter()
            .enumerate()
            .map(|(k, p)| (k as u64, p))
            .collect();
        assert!(tv(&energy_law, &energy, draws) < 0.01);

        // over ~10³ paths the multinomial noise floor of the TV is ~0.03, so
        // compare with an exact multinomial sample of the same size
        let keys: Vec<&Vec<i64>> = law.keys().collect();
        let cdf: Vec<f64> = keys
            .iter()
            .scan(0.0, |acc, k| {
                *acc += law[*k];
                Some(*acc)
            })
            .collect();
        let mut reference: HashMap<Vec<i64>, usize> = HashMap::new();
        for _ in 0..draws {
            let i = draw_index(&cdf, &mut rng);
            *reference.entry(keys[i].clone()).or_default() += 1;
        }
        let (got, floor) = (tv(&law, &paths, draws), tv(&law, &reference, draws));
        assert!(got < 1.2 * floor, "tv {got} vs noise floor {floor}");
    }

    #[test]
    fn mixture_window_is_clamped() {
        assert_eq!(mixture_epsilon(40, 2048), 10);
        assert_eq!(mixture_epsilon(100, 110), 10);
        let m = MixtureSampler::new(2.0, 60, 2048).unwrap();
        let s: f64 = m.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(m.window.len(), 2 * 15 + 1);
        let degenerate = MixtureSampler::new(2.0, 30, 30).unwrap();
        assert_eq!(degenerate.window, vec![30]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (l, p) = degenerate.sample(&mut rng).unwrap();
        assert_eq!(l, 30);
        assert_eq!(p.total_length(), 30);
    }

    #[test]
    fn cached_sampler_draws_the_same_paths() {
        let dir = std::env::temp_dir().join(format!("ipdw-sampler-{}", std::process::id()));
        let fresh = ExactSampler::new(1.1, 12).unwrap();
        for _ in 0..2 {
            let s = ExactSampler::cached(1.1, 12, &dir).unwrap();
            let mut a = ChaCha8Rng::seed_from_u64(3);
            let mut b = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..50 {
                assert_eq!(s.sample(12, &mut a).unwrap(), fresh.sample(12, &mut b).unwrap());
            }
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
