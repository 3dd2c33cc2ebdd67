use std::collections::HashMap;

use super::PolymerPath;
use crate::error::{Error, Result};

/// Longest polymer the brute-force enumeration accepts.
pub const MAX_ENUMERATION_LENGTH: usize = 14;

/// Calls `f` once for every configuration of length `L`, ordered by `N`.
pub fn for_each_path<F: FnMut(&[i64])>(length: usize, mut f: F) {
    let mut buf = Vec::with_capacity(length);
    for n in 1..=length {
        buf.clear();
        compositions(n, length - n, &mut buf, &mut f);
    }
}

fn compositions<F: FnMut(&[i64])>(parts: usize, rest: usize, buf: &mut Vec<i64>, f: &mut F) {
    if parts == 1 {
        let r = rest as i64;
        buf.push(r);
        f(buf);
        buf.pop();
        if r != 0 {
            buf.push(-r);
            f(buf);
            buf.pop();
        }
        return;
    }
    for k in 0..=rest {
        let k = k as i64;
        buf.push(k);
        compositions(parts - 1, rest - k as usize, buf, f);
        buf.pop();
        if k != 0 {
            buf.push(-k);
            compositions(parts - 1, rest - k as usize, buf, f);
            buf.pop();
        }
    }
}

/// Every configuration of a given length with its Boltzmann weight.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub length: usize,
    pub beta: f64,
    pub paths: Vec<PolymerPath>,
    pub weights: Vec<f64>,
    /// `Z_{L,β}`.
    pub z: f64,
}

pub fn enumerate_z(length: usize, beta: f64) -> Result<Enumeration> {
    if length == 0 {
        return Err(Error::InvalidParameter("L must be positive".into()));
    }
    if length > MAX_ENUMERATION_LENGTH {
        return Err(Error::Guard(format!(
            "enumeration limited to L <= {MAX_ENUMERATION_LENGTH}, got {length}"
        )));
    }
    let mut paths = Vec::new();
    let mut weights = Vec::new();
    for_each_path(length, |l| {
        let p = PolymerPath::new(l.to_vec()).expect("enumerated paths are nonempty");
        weights.push((beta * p.interaction() as f64).exp());
        paths.push(p);
    });
    let z = weights.iter().sum();
    Ok(Enumeration {
        length,
        beta,
        paths,
        weights,
        z,
    })
}

impl Enumeration {
    /// `Z_{L,β} e^{−βL}`.
    pub fn excess(&self) -> f64 {
        self.z * (-self.beta * self.length as f64).exp()
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.weights[i] / self.z
    }

    /// Law of `N_l`, indexed by `N` (entry 0 is always 0).
    pub fn extension_law(&self) -> Vec<f64> {
        let mut law = vec![0.0; self.length + 1];
        for (p, w) in self.paths.iter().zip(&self.weights) {
            law[p.extension()] += w / self.z;
        }
        law
    }

    /// Law of the interaction count `H/β`.
    pub fn energy_law(&self) -> Vec<f64> {
        let mut law = Vec::new();
        for (p, w) in self.paths.iter().zip(&self.weights) {
            let e = p.interaction() as usize;
            if law.len() <= e {
                law.resize(e + 1, 0.0);
            }
            law[e] += w / self.z;
        }
        law
    }

    pub fn law(&self) -> HashMap<Vec<i64>, f64> {
        self.paths
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| (p.stretches().to_vec(), w / self.z))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_partition_functions() {
        for beta in [0.3, 1.0, 2.5] {
            assert_eq!(enumerate_z(1, beta).unwrap().z, 1.0);
            assert_eq!(enumerate_z(2, beta).unwrap().z, 3.0);
            let z4 = enumerate_z(4, beta).unwrap().z;
            assert!((z4 - (15.0 + 2.0 * beta.exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn path_count() {
        // Σ_N Σ_{compositions} 2^{#nonzero parts} satisfies a_L = 2a_{L-1} + a_{L-2}
        let counts: Vec<usize> = (1..=8)
            .map(|l| {
                let mut c = 0;
                for_each_path(l, |_| c += 1);
                c
            })
            .collect();
        for i in 2..counts.len() {
            assert_eq!(counts[i], 2 * counts[i - 1] + counts[i - 2]);
        }
    }

    #[test]
    fn guard() {
        assert!(matches!(enumerate_z(15, 1.0), Err(Error::Guard(_))));
    }

    #[test]
    fn laws_are_normalised() {
        let e = enumerate_z(9, 1.3).unwrap();
        let s: f64 = e.extension_law().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(e.extension_law()[9], e.probability(e.paths.len() - 1));
    }
}
