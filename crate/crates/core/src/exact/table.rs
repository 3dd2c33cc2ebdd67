use std::f64::consts::LN_2;

use super::kernel::{closing_sum, exponent_of, geo_conv_split, scale2};
use crate::error::{Error, Result};
use crate::thermo::ModelParams;

/// Which walks a [`DpTable`] keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    Free,
    /// `V_i > 0` for every `1 ≤ i ≤ n`.
    PositiveUntilReturn,
    /// `V_i ≠ 0` for every `1 ≤ i ≤ n`; the walk may change sign by jumping
    /// over 0.
    NonzeroUntilReturn,
}

impl Constraint {
    pub(crate) fn code(self) -> u8 {
        match self {
            Constraint::Free => 0,
            Constraint::PositiveUntilReturn => 1,
            Constraint::NonzeroUntilReturn => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Constraint::Free),
            1 => Ok(Constraint::PositiveUntilReturn),
            2 => Ok(Constraint::NonzeroUntilReturn),
            other => Err(Error::Format(format!("unknown constraint code {other}"))),
        }
    }
}

/// Default cap on the number of stored cells (8 bytes each).
pub const DEFAULT_CELL_BUDGET: u64 = 60_000_000;

/// One step `n` of the walk: masses of `(V_n = v, G_n = g)` for `g ≤ cap`.
///
/// Cells are laid out by rows of constant `d = g − |v|` (the area before the
/// last value), `v ∈ [−(cap − d), cap − d]`, and each cell carries its own
/// binary exponent: the value is `mant · 2^exp`. Every cell of row `d` of
/// step `n + 1` comes from column `g = d` of step `n`, so the recursion
/// writes rows contiguously and reads columns along diagonals.
#[derive(Clone, Debug)]
pub struct Layer {
    pub(crate) cap: usize,
    pub(crate) mant: Vec<f64>,
    pub(crate) exp: Vec<i32>,
    offsets: Vec<usize>,
}

impl Layer {
    pub(crate) fn cells(cap: usize) -> usize {
        (cap + 1) * (cap + 1)
    }

    fn zeroed(cap: usize) -> Self {
        let mut l = Layer {
            cap: 0,
            mant: Vec::new(),
            exp: Vec::new(),
            offsets: Vec::new(),
        };
        l.reset(cap);
        l
    }

    /// Clears the layer and resizes it for `cap`, reusing its storage.
    fn reset(&mut self, cap: usize) {
        let cells = Self::cells(cap);
        self.cap = cap;
        self.mant.clear();
        self.mant.resize(cells, 0.0);
        self.exp.clear();
        self.exp.resize(cells, 0);
        self.offsets.clear();
        self.offsets
            .extend((0..=cap).map(|d| d * (2 * cap + 1) - d * d.saturating_sub(1)));
    }

    fn origin(cap: usize) -> Self {
        let mut l = Self::zeroed(cap);
        let i = l.index(0, 0);
        l.mant[i] = 1.0;
        l
    }

    #[inline]
    fn index(&self, d: usize, v: i64) -> usize {
        self.offsets[d] + (v + (self.cap - d) as i64) as usize
    }

    /// Copies columns `g0..g0 + count` (each `v ∈ [−g, g]`, indexed by
    /// `v + g`) into `cols`, each rescaled to its own common exponent. Rows
    /// of constant `d` are read in contiguous runs.
    pub(crate) fn gather_block(&self, g0: usize, count: usize, cols: &mut Columns) {
        cols.prepare(g0, count);
        let g1 = g0 + count - 1;
        for d in 0..=g1 {
            let base = self.offsets[d] + self.cap - d;
            let lo = g0.max(d);
            for g in lo..=g1 {
                let j = g - g0;
                let v = g - d;
                let (vals, exps) = (&mut cols.vals[j], &mut cols.exps[j]);
                let i = base + v;
                vals[g + v] = self.mant[i];
                exps[g + v] = self.exp[i];
                if v > 0 {
                    let i = base - v;
                    vals[g - v] = self.mant[i];
                    exps[g - v] = self.exp[i];
                }
            }
        }
        for j in 0..count {
            let (vals, exps) = (&mut cols.vals[j], &cols.exps[j]);
            let mut e_max = i32::MIN;
            for (&m, &e) in vals.iter().zip(exps) {
                if m != 0.0 {
                    e_max = e_max.max(exponent_of(m).unwrap_or(0) + e);
                }
            }
            if e_max == i32::MIN {
                cols.scale[j] = None;
                continue;
            }
            for (m, &e) in vals.iter_mut().zip(exps) {
                if *m != 0.0 && e != e_max {
                    *m = scale2(*m, e - e_max);
                }
            }
            cols.scale[j] = Some(e_max);
        }
    }

    /// Column `g` with a common exponent (see [`Layer::gather_block`]).
    pub(crate) fn gather(&self, g: usize, cols: &mut Columns) -> Option<i32> {
        self.gather_block(g, 1, cols);
        cols.scale[0]
    }

    /// Layer with `log_mass(v, g)` given for every cell.
    pub(crate) fn from_log_mass(cap: usize, f: impl Fn(i64, usize) -> f64) -> Self {
        let mut l = Self::zeroed(cap);
        for g in 0..=cap {
            for v in -(g as i64)..=g as i64 {
                let lm = f(v, g);
                if lm == f64::NEG_INFINITY {
                    continue;
                }
                let e = (lm / LN_2).floor() as i32 + 1;
                let i = l.index(g - v.unsigned_abs() as usize, v);
                l.mant[i] = (lm - e as f64 * LN_2).exp();
                l.exp[i] = e;
            }
        }
        l
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn log_mass(&self, v: i64, g: usize) -> f64 {
        if g > self.cap || v.unsigned_abs() as usize > g {
            return f64::NEG_INFINITY;
        }
        let i = self.index(g - v.unsigned_abs() as usize, v);
        let m = self.mant[i];
        if m > 0.0 {
            m.ln() + self.exp[i] as f64 * LN_2
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Calls `f(g, log Σ_v mass(v, g) · x^{|v|})` for every nonempty column.
    pub(crate) fn closings(&self, x: f64, cols: &mut Columns, mut f: impl FnMut(usize, f64)) {
        for g0 in (0..=self.cap).step_by(BLOCK) {
            let count = BLOCK.min(self.cap + 1 - g0);
            self.gather_block(g0, count, cols);
            for j in 0..count {
                if let Some(e) = cols.scale[j] {
                    let g = g0 + j;
                    let s = closing_sum(&cols.vals[j], -(g as i64), x);
                    if !s.is_zero() {
                        f(g, s.ln() + e as f64 * LN_2);
                    }
                }
            }
        }
    }
}

const BLOCK: usize = 16;

/// Reusable buffers for blocks of gathered columns.
#[derive(Default)]
pub(crate) struct Columns {
    pub vals: Vec<Vec<f64>>,
    exps: Vec<Vec<i32>>,
    pub scale: Vec<Option<i32>>,
}

impl Columns {
    fn prepare(&mut self, g0: usize, count: usize) {
        if self.vals.len() < count {
            self.vals.resize_with(count, Vec::new);
            self.exps.resize_with(count, Vec::new);
            self.scale.resize(count, None);
        }
        for j in 0..count {
            let w = 2 * (g0 + j) + 1;
            self.vals[j].clear();
            self.vals[j].resize(w, 0.0);
            self.exps[j].clear();
            self.exps[j].resize(w, 0);
        }
    }
}

/// Advances the walk one step.
pub(crate) fn step(
    prev: &Layer,
    next: &mut Layer,
    next_cap: usize,
    x: f64,
    c: f64,
    constraint: Constraint,
    first: bool,
    cols: &mut Columns,
) {
    next.reset(next_cap);
    let inv_c = 1.0 / c;
    let positive = constraint == Constraint::PositiveUntilReturn;
    let g_hi = prev.cap.min(next_cap);
    for g0 in (0..=g_hi).step_by(BLOCK) {
        let count = BLOCK.min(g_hi + 1 - g0);
        prev.gather_block(g0, count, cols);
        for j in 0..count {
            let Some(e) = cols.scale[j] else {
                continue;
            };
            let g = g0 + j;
            let src = &cols.vals[j];
            let k = next_cap - g;
            let row = next.offsets[g];
            let (mant, exps) = (
                &mut next.mant[row..row + 2 * k + 1],
                &mut next.exp[row..row + 2 * k + 1],
            );
            if positive {
                if k == 0 {
                    continue;
                }
                let (m, ex) = (&mut mant[k + 1..], &mut exps[k + 1..]);
                if first {
                    geo_conv_split(&src[g..g + 1], 0, m, ex, 1, x);
                } else {
                    geo_conv_split(&src[g + 1..], 1, m, ex, 1, x);
                }
            } else {
                geo_conv_split(src, -(g as i64), mant, exps, -(k as i64), x);
                if constraint == Constraint::NonzeroUntilReturn {
                    mant[k] = 0.0;
                }
            }
            for (m, ex) in mant.iter_mut().zip(exps.iter_mut()) {
                *m *= inv_c;
                *ex += e;
            }
        }
    }
}

/// Runs the recursion for `n = 0..=n_max`, handing each layer to `visit`.
/// Only two layers are alive at any time.
pub(crate) fn stream<F>(
    beta: f64,
    n_max: usize,
    cap: impl Fn(usize) -> usize,
    constraint: Constraint,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, &Layer) -> Result<()>,
{
    let p = ModelParams::new(beta)?;
    let mut layer = Layer::origin(cap(0));
    let mut next = Layer::zeroed(0);
    let mut cols = Columns::default();
    visit(0, &layer)?;
    for n in 1..=n_max {
        step(&layer, &mut next, cap(n), p.x, p.c_beta, constraint, n == 1, &mut cols);
        std::mem::swap(&mut layer, &mut next);
        visit(n, &layer)?;
    }
    Ok(())
}

/// Law of `(V_n, G_n)` under `P_β` for all `n ≤ n_max`, possibly restricted
/// to walks that stay positive.
#[derive(Clone, Debug)]
pub struct DpTable {
    pub beta: f64,
    pub n_max: usize,
    pub g_max: usize,
    pub constraint: Constraint,
    pub(crate) layers: Vec<Layer>,
}

pub(crate) fn check_budget(needed: u64, budget: u64) -> Result<()> {
    if needed > budget {
        Err(Error::MemoryBudget { needed, budget })
    } else {
        Ok(())
    }
}

impl DpTable {
    /// Builds the table with columns `g ≤ cap(n)` at step `n`.
    pub(crate) fn build_with(
        beta: f64,
        n_max: usize,
        g_max: usize,
        cap: impl Fn(usize) -> usize,
        constraint: Constraint,
        budget: u64,
    ) -> Result<Self> {
        let needed: u64 = (0..=n_max).map(|n| Layer::cells(cap(n)) as u64).sum();
        check_budget(needed, budget)?;
        let mut layers = Vec::with_capacity(n_max + 1);
        stream(beta, n_max, cap, constraint, |_, l| {
            layers.push(l.clone());
            Ok(())
        })?;
        Ok(Self {
            beta,
            n_max,
            g_max,
            constraint,
            layers,
        })
    }

    pub fn layer(&self, n: usize) -> &Layer {
        &self.layers[n]
    }

    /// `log P_β(V_n = v, G_n = g, constraint)`.
    pub fn log_mass(&self, n: usize, v: i64, g: usize) -> f64 {
        match self.layers.get(n) {
            Some(l) => l.log_mass(v, g),
            None => f64::NEG_INFINITY,
        }
    }

    /// Marginal law of `V_n` (summed over the stored areas).
    pub fn value_marginal(&self, n: usize) -> Vec<(i64, f64)> {
        let l = &self.layers[n];
        let mut out = Vec::new();
        for v in -(l.cap as i64)..=l.cap as i64 {
            let s: f64 = (v.unsigned_abs() as usize..=l.cap)
                .map(|g| l.log_mass(v, g).exp())
                .sum();
            out.push((v, s));
        }
        out
    }

    pub fn stored_cells(&self) -> usize {
        self.layers.iter().map(|l| l.mant.len()).sum()
    }
}

/// Table of `P_β(V_n = v, G_n = g)` for `n ≤ n_max` and `|v| ≤ g ≤ g_max`.
pub fn walk_area_table(
    beta: f64,
    n_max: usize,
    g_max: usize,
    constraint: Constraint,
) -> Result<DpTable> {
    walk_area_table_with_budget(beta, n_max, g_max, constraint, DEFAULT_CELL_BUDGET)
}

pub fn walk_area_table_with_budget(
    beta: f64,
    n_max: usize,
    g_max: usize,
    constraint: Constraint,
    budget: u64,
) -> Result<DpTable> {
    DpTable::build_with(beta, n_max, g_max, |_| g_max, constraint, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn direct_law(beta: f64, n: usize) -> HashMap<(i64, i64), f64> {
        let p = ModelParams::new(beta).unwrap();
        let mut law = HashMap::from([((0i64, 0i64), 1.0)]);
        for _ in 0..n {
            let mut next = HashMap::new();
            for (&(v, g), &m) in &law {
                for w in -40i64..=40 {
                    let q = m * p.x.powi((w - v).abs() as i32) / p.c_beta;
                    *next.entry((w, g + w.abs())).or_insert(0.0) += q;
                }
            }
            law = next;
        }
        law
    }

    #[test]
    fn first_step_is_geometric() {
        let beta = 1.4;
        let p = ModelParams::new(beta).unwrap();
        let t = walk_area_table(beta, 2, 10, Constraint::Free).unwrap();
        for k in -10i64..=10 {
            let want = p.x.powi(k.abs() as i32) / p.c_beta;
            let got = t.log_mass(1, k, k.unsigned_abs() as usize).exp();
            assert!((got / want - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_direct_convolution() {
        for beta in [0.7, 2.5] {
            let t = walk_area_table(beta, 6, 30, Constraint::Free).unwrap();
            for n in 1..=6 {
                let law = direct_law(beta, n);
                let mut total = 0.0;
                for g in 0..=30usize {
                    for v in -(g as i64)..=g as i64 {
                        let want = law.get(&(v, g as i64)).copied().unwrap_or(0.0);
                        let got = t.log_mass(n, v, g).exp();
                        total += got;
                        assert!(
                            (got - want).abs() <= 1e-12 * want.max(1e-300),
                            "n={n} v={v} g={g} {got} {want}"
                        );
                    }
                }
                assert!(total <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn positive_constraint_has_no_mass_below_one() {
        let t = walk_area_table(1.0, 8, 25, Constraint::PositiveUntilReturn).unwrap();
        for n in 1..=8 {
            for g in 0..=25usize {
                for v in -(g as i64)..=0 {
                    assert_eq!(t.log_mass(n, v, g), f64::NEG_INFINITY);
                }
            }
        }
        assert!(t.log_mass(3, 2, 5).is_finite());
    }

    #[test]
    fn nonzero_constraint_allows_jumps_over_zero() {
        let t = walk_area_table(1.0, 4, 12, Constraint::NonzeroUntilReturn).unwrap();
        for n in 1..=4 {
            for g in 0..=12 {
                assert_eq!(t.log_mass(n, 0, g), f64::NEG_INFINITY);
            }
        }
        let p = ModelParams::new(1.0).unwrap();
        // (1, −1) jumps over 0; (−1, −1) stays put
        let want = (p.x / p.c_beta) * (p.x.powi(2) / p.c_beta) + (p.x / p.c_beta) / p.c_beta;
        assert!((t.log_mass(2, -1, 2).exp() / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn budget_is_enforced() {
        let e = walk_area_table_with_budget(1.0, 100, 100, Constraint::Free, 1000).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn deep_columns_do_not_underflow() {
        // masses near e^{−1500} are far below the double range
        let t = walk_area_table(2.0, 3, 1500, Constraint::Free).unwrap();
        let lm = t.log_mass(1, 1500, 1500);
        let p = ModelParams::new(2.0).unwrap();
        let want = 1500.0 * p.x.ln() - p.c_beta.ln();
        assert!((lm - want).abs() < 1e-9);
    }
}
