use rand::Rng;

use super::increments::TwoSidedGeometric;
use crate::error::{Error, Result};
use crate::polymer::PolymerPath;
use crate::thermo::{beta_c, ModelParams};

/// An exact draw from the polymer measure with the number of walks it cost.
#[derive(Clone, Debug, PartialEq)]
pub struct PerfectSample {
    pub path: PolymerPath,
    pub trials: u64,
}

/// One acceptance-reject trial. Runs the walk until `G_n + n` reaches or
/// passes `length`, killing it after each step with probability
/// `1 − survival`. Returns the stretches on acceptance.
fn trial<R: Rng + ?Sized>(
    length: usize,
    law: &TwoSidedGeometric,
    survival: Option<f64>,
    values: &mut Vec<i64>,
    rng: &mut R,
) -> bool {
    values.clear();
    let target = length as i64;
    let (mut v, mut s) = (0i64, 0i64);
    loop {
        if let Some(p) = survival {
            if rng.random::<f64>() >= p {
                return false;
            }
        }
        v += law.sample(rng);
        let next = s + v.abs() + 1;
        debug_assert!(next > s);
        s = next;
        values.push(v);
        if s > target {
            return false;
        }
        if s == target {
            return v + law.sample(rng) == 0;
        }
    }
}

fn to_path(values: &[i64], length: usize) -> PolymerPath {
    let stretches = values
        .iter()
        .enumerate()
        .map(|(i, &v)| if i % 2 == 0 { v } else { -v })
        .collect();
    PolymerPath::with_length(stretches, length).expect("accepted walks have the requested length")
}

fn check_length(length: usize) -> Result<()> {
    if length == 0 {
        Err(Error::InvalidParameter("L must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Exact sample of the critical polymer of length `length`.
///
/// Each trial costs at most `length` increments; the expected number of
/// trials is `c_β/Z̃_L`, which grows like `L^{2/3}`.
pub fn perfect_critical_sample<R: Rng + ?Sized>(
    length: usize,
    rng: &mut R,
    max_trials: u64,
) -> Result<PerfectSample> {
    check_length(length)?;
    let p = ModelParams::new(beta_c())?;
    let law = TwoSidedGeometric::symmetric(p.x);
    let mut values = Vec::with_capacity(length);
    for trials in 1..=max_trials {
        if trial(length, &law, None, &mut values, rng) {
            return Ok(PerfectSample {
                path: to_path(&values, length),
                trials,
            });
        }
    }
    Err(Error::BudgetExhausted { trials: max_trials })
}

/// Exact sample in the collapsed phase, where `Γ_β < 1` is used as the
/// survival probability of a geometric lifetime.
///
/// Returns `Ok(None)` once `budget` trials have been rejected. The
/// acceptance probability decays like `e^{G̃(a(β))√L}`, so only small
/// lengths are practical.
pub fn lifetime_sample<R: Rng + ?Sized>(
    beta: f64,
    length: usize,
    rng: &mut R,
    budget: u64,
) -> Result<Option<PerfectSample>> {
    check_length(length)?;
    let p = ModelParams::new(beta)?;
    if !(p.gamma_beta < 1.0) {
        return Err(Error::Domain(format!(
            "lifetime sampling needs Gamma_beta < 1 (beta > {}), got beta = {beta}",
            beta_c()
        )));
    }
    let law = TwoSidedGeometric::symmetric(p.x);
    let mut values = Vec::with_capacity(length);
    for trials in 1..=budget {
        if trial(length, &law, Some(p.gamma_beta), &mut values, rng) {
            return Ok(Some(PerfectSample {
                path: to_path(&values, length),
                trials,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{replicate, RngStream};
    use crate::polymer::enumerate_z;
    use std::collections::HashMap;

    fn tv(a: &HashMap<Vec<i64>, f64>, b: &HashMap<Vec<i64>, f64>) -> f64 {
        let mut d = 0.0;
        for (k, p) in a {
            d += (p - b.get(k).unwrap_or(&0.0)).abs();
        }
        for (k, q) in b {
            if !a.contains_key(k) {
                d += q;
            }
        }
        d / 2.0
    }

    #[test]
    fn perfect_paths_are_valid() {
        let mut rng = RngStream::new(9, 0);
        for l in [1, 2, 5, 17, 40] {
            let s = perfect_critical_sample(l, &mut rng, 1_000_000).unwrap();
            assert_eq!(s.path.total_length(), l);
            assert!(s.trials >= 1);
        }
    }

    #[test]
    fn budget_is_reported() {
        let mut rng = RngStream::new(9, 1);
        let e = perfect_critical_sample(400, &mut rng, 1).err();
        if let Some(e) = e {
            assert!(matches!(e, Error::BudgetExhausted { trials: 1 }));
            assert_eq!(e.exit_code(), 3);
        }
    }

    #[test]
    fn perfect_law_matches_enumeration() {
        let l = 8;
        let e = enumerate_z(l, beta_c()).unwrap();
        let want = e.law();
        let n = 100_000;
        let draws = replicate(21, 0, n, |_, r| {
            perfect_critical_sample(l, r, 1 << 30).unwrap().path.stretches().to_vec()
        });
        let mut got = HashMap::new();
        for d in draws {
            *got.entry(d).or_insert(0.0) += 1.0 / n as f64;
        }
        // an exact multinomial sample of this size sits near 0.03
        assert!(tv(&got, &want) < 0.05, "{}", tv(&got, &want));
    }

    #[test]
    fn lifetime_law_matches_enumeration() {
        let (beta, l) = (1.5, 12);
        let e = enumerate_z(l, beta).unwrap();
        let n = 10_000;
        let draws = replicate(4, 0, n, |_, r| {
            lifetime_sample(beta, l, r, 1 << 30).unwrap().unwrap().path
        });
        let (ext, energy) = (e.extension_law(), e.energy_law());
        let mut emp_ext = vec![0.0; ext.len()];
        let mut emp_energy = vec![0.0; energy.len()];
        for p in &draws {
            emp_ext[p.extension()] += 1.0 / n as f64;
            emp_energy[p.interaction() as usize] += 1.0 / n as f64;
        }
        let tv = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0;
        assert!(tv(&ext, &emp_ext) < 0.03, "{}", tv(&ext, &emp_ext));
        assert!(tv(&energy, &emp_energy) < 0.03, "{}", tv(&energy, &emp_energy));
    }

    #[test]
    fn lifetime_guards() {
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(lifetime_sample(1.0, 5, &mut rng, 10), Err(Error::Domain(_))));
        assert_eq!(lifetime_sample(3.0, 200, &mut rng, 3).unwrap(), None);
    }
}
