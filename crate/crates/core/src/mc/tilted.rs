use rand::Rng;
use serde::{Deserialize, Serialize};

use super::increments::TwoSidedGeometric;
use crate::error::{Error, Result};
use crate::polymer::AuxWalk;
use crate::thermo::{solve_tilt_discrete, ModelParams, Tilt};

/// Walk of `n` independent increments, the `i`-th drawn from `ν_{h_i}` with
/// `h_i = (1 − i/n)h₀ + h₁`, where `(h₀, h₁)` makes `A_n ≈ qn²` and
/// `V_n ≈ 0` typical.
#[derive(Clone, Debug)]
pub struct TiltedWalk {
    pub beta: f64,
    pub n: usize,
    pub q: f64,
    pub tilt: Tilt,
    laws: Vec<TwoSidedGeometric>,
}

impl TiltedWalk {
    pub fn new(beta: f64, n: usize, q: f64) -> Result<Self> {
        let p = ModelParams::new(beta)?;
        let tilt = solve_tilt_discrete(beta, n, q)?;
        let laws = (1..=n)
            .map(|i| TwoSidedGeometric::tilted(p.x, tilt.at(i as f64 / n as f64)))
            .collect();
        Ok(Self {
            beta,
            n,
            q,
            tilt,
            laws,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> AuxWalk {
        let incs: Vec<i64> = self.laws.iter().map(|l| l.sample(rng)).collect();
        AuxWalk::from_increments(&incs)
    }
}

pub fn tilted_walk_sample<R: Rng + ?Sized>(beta: f64, n: usize, q: f64, rng: &mut R) -> Result<AuxWalk> {
    Ok(TiltedWalk::new(beta, n, q)?.sample(rng))
}

/// Acceptance window `|A_n − qn²| ≤ w`, `|V_n| ≤ w′`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeadWindow {
    pub w: f64,
    pub w_prime: f64,
}

impl BeadWindow {
    /// `w = n^{3/4}`, `w′ = n^{1/4}`.
    pub fn default_for(n: usize) -> Self {
        let n = n as f64;
        Self {
            w: n.powf(0.75),
            w_prime: n.powf(0.25),
        }
    }

    pub fn unbounded() -> Self {
        Self {
            w: f64::INFINITY,
            w_prime: f64::INFINITY,
        }
    }

    pub fn contains(&self, walk: &AuxWalk, q: f64) -> bool {
        let n = walk.steps() as f64;
        (walk.alg_area() as f64 - q * n * n).abs() <= self.w && (walk.last() as f64).abs() <= self.w_prime
    }
}

/// A tilted walk accepted in a [`BeadWindow`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionedWalk {
    pub walk: AuxWalk,
    pub trials: u64,
}

/// Tilted walks conditioned by rejection on a [`BeadWindow`].
#[derive(Clone, Debug)]
pub struct ConditionedBead {
    pub walk: TiltedWalk,
    pub window: BeadWindow,
}

impl ConditionedBead {
    pub fn new(beta: f64, n: usize, q: f64, window: BeadWindow) -> Result<Self> {
        if !(window.w >= 0.0 && window.w_prime >= 0.0) {
            return Err(Error::InvalidParameter(format!("bad window {window:?}")));
        }
        Ok(Self {
            walk: TiltedWalk::new(beta, n, q)?,
            window,
        })
    }

    /// `None` once `budget` proposals have been rejected.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, budget: u64) -> Option<ConditionedWalk> {
        for trials in 1..=budget {
            let w = self.walk.sample(rng);
            if self.window.contains(&w, self.walk.q) {
                return Some(ConditionedWalk { walk: w, trials });
            }
        }
        None
    }
}

pub fn conditioned_bead_sample<R: Rng + ?Sized>(
    beta: f64,
    n: usize,
    q: f64,
    window: BeadWindow,
    rng: &mut R,
    budget: u64,
) -> Result<Option<ConditionedWalk>> {
    Ok(ConditionedBead::new(beta, n, q, window)?.sample(rng, budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{replicate, RngStream};

    #[test]
    fn area_and_endpoint_targets() {
        let (beta, n, q) = (2.0, 200, 0.5);
        let tw = TiltedWalk::new(beta, n, q).unwrap();
        let reps = 10_000;
        let walks = replicate(8, 0, reps, |_, r| {
            let w = tw.sample(r);
            (w.alg_area() as f64 / (n * n) as f64, w.last() as f64)
        });
        let mean = |f: &dyn Fn(&(f64, f64)) -> f64| {
            let m = walks.iter().map(f).sum::<f64>() / reps as f64;
            let v = walks.iter().map(|w| (f(w) - m).powi(2)).sum::<f64>() / (reps - 1) as f64;
            (m, (v / reps as f64).sqrt())
        };
        let (a, se_a) = mean(&|w| w.0);
        assert!((a - q).abs() < 3.0 * se_a, "{a} {se_a}");
        let (v, se_v) = mean(&|w| w.1);
        assert!(v.abs() < 3.0 * se_v, "{v} {se_v}");
    }

    #[test]
    fn accepted_walks_lie_in_window() {
        let (beta, n, q) = (2.0, 100, 0.4);
        let win = BeadWindow::default_for(n);
        let bead = ConditionedBead::new(beta, n, q, win).unwrap();
        let mut rng = RngStream::new(3, 0);
        for _ in 0..50 {
            let s = bead.sample(&mut rng, 100_000).unwrap();
            assert!(win.contains(&s.walk, q));
            assert_eq!(s.walk.steps(), n);
        }
    }

    #[test]
    fn unbounded_window_is_the_tilted_walk() {
        let (beta, n, q) = (2.0, 50, 0.3);
        let bead = ConditionedBead::new(beta, n, q, BeadWindow::unbounded()).unwrap();
        let mut a = RngStream::new(5, 2);
        let mut b = RngStream::new(5, 2);
        let s = bead.sample(&mut a, 1).unwrap();
        assert_eq!(s.trials, 1);
        assert_eq!(s.walk, bead.walk.sample(&mut b));
    }

    #[test]
    fn budget_gives_none() {
        let win = BeadWindow { w: 0.0, w_prime: 0.0 };
        let mut rng = RngStream::new(1, 1);
        let r = conditioned_bead_sample(2.0, 300, 0.5, win, &mut rng, 5).unwrap();
        assert!(r.is_none());
    }
}
