use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interaction between two neighbouring stretches: `|x| ∧ |y|` when they
/// point in opposite directions, zero otherwise.
#[inline]
pub fn wedge(x: i64, y: i64) -> u64 {
    if (x < 0 && y > 0) || (x > 0 && y < 0) {
        x.unsigned_abs().min(y.unsigned_abs())
    } else {
        0
    }
}

/// A configuration `l ∈ L_{N,L}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct PolymerPath {
    stretches: Vec<i64>,
    total_length: usize,
}

impl PolymerPath {
    /// Builds a path from its stretches; the total length is implied.
    pub fn new(stretches: Vec<i64>) -> Result<Self> {
        if stretches.is_empty() {
            return Err(Error::InvalidPath("a path has at least one stretch".into()));
        }
        let total_length =
            stretches.len() + stretches.iter().map(|l| l.unsigned_abs() as usize).sum::<usize>();
        Ok(Self {
            stretches,
            total_length,
        })
    }

    /// Builds a path and checks that it has the announced total length.
    pub fn with_length(stretches: Vec<i64>, total_length: usize) -> Result<Self> {
        let path = Self::new(stretches)?;
        if path.total_length != total_length {
            return Err(Error::InvalidPath(format!(
                "stretches have total length {} but {} was announced",
                path.total_length, total_length
            )));
        }
        Ok(path)
    }

    pub fn stretches(&self) -> &[i64] {
        &self.stretches
    }

    /// Horizontal extension `N`.
    pub fn extension(&self) -> usize {
        self.stretches.len()
    }

    /// Number of monomers `L`.
    pub fn total_length(&self) -> usize {
        self.total_length
    }

    /// `Σ_n l_n ∧̃ l_{n+1}`, the Hamiltonian divided by β.
    pub fn interaction(&self) -> u64 {
        self.stretches.windows(2).map(|w| wedge(w[0], w[1])).sum()
    }

    pub fn hamiltonian(&self, beta: f64) -> f64 {
        hamiltonian(self, beta)
    }

    /// Vertical displacement `l_1 + … + l_N`.
    pub fn displacement(&self) -> i64 {
        self.stretches.iter().sum()
    }
}

impl TryFrom<Vec<i64>> for PolymerPath {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PolymerPath> for Vec<i64> {
    fn from(p: PolymerPath) -> Self {
        p.stretches
    }
}

pub fn hamiltonian(path: &PolymerPath, beta: f64) -> f64 {
    beta * path.interaction() as f64
}

/// Same Hamiltonian written as `β Σ|l_n| − (β/2) Σ_{n=0}^{N} |l_n + l_{n+1}|`
/// with `l_0 = l_{N+1} = 0`.
pub fn hamiltonian_via_moduli(path: &PolymerPath, beta: f64) -> f64 {
    let l = path.stretches();
    let moduli: i64 = l.iter().map(|v| v.abs()).sum();
    let mut pairs = l[0].abs() + l[l.len() - 1].abs();
    pairs += l.windows(2).map(|w| (w[0] + w[1]).abs()).sum::<i64>();
    // twice the integer interaction, kept exact before scaling
    let twice = 2 * moduli - pairs;
    beta * (twice as f64) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge(2, -3), 2);
        assert_eq!(wedge(2, 3), 0);
        assert_eq!(wedge(0, 5), 0);
        assert_eq!(wedge(-4, 1), 1);
    }

    #[test]
    fn wedge_matches_modulus_identity() {
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                let twice = x.abs() + y.abs() - (x + y).abs();
                assert_eq!(2 * wedge(x, y) as i64, twice);
            }
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let beta = 1.7;
        let p = PolymerPath::new(vec![2, -3]).unwrap();
        assert_eq!(p.hamiltonian(beta), 2.0 * beta);
        let p = PolymerPath::new(vec![1, 0, -1]).unwrap();
        assert_eq!(p.hamiltonian(beta), 0.0);
        let p = PolymerPath::new(vec![3, -2, 2, -1]).unwrap();
        assert_eq!(p.interaction(), 5);
    }

    #[test]
    fn length_is_validated() {
        assert!(PolymerPath::with_length(vec![2, -3], 7).is_ok());
        assert!(PolymerPath::with_length(vec![2, -3], 8).is_err());
        assert!(PolymerPath::new(vec![]).is_err());
    }
}
