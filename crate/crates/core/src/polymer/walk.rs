use serde::{Deserialize, Serialize};

use super::PolymerPath;
use crate::error::{Error, Result};

/// Trajectory `V_0 = 0, V_1, …` of the auxiliary walk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxWalk {
    values: Vec<i64>,
}

impl AuxWalk {
    pub fn from_values(values: Vec<i64>) -> Result<Self> {
        match values.first() {
            Some(0) => Ok(Self { values }),
            Some(v) => Err(Error::MalformedWalk(format!("V_0 = {v}, expected 0"))),
            None => Err(Error::MalformedWalk("empty walk".into())),
        }
    }

    pub fn from_increments(increments: &[i64]) -> Self {
        let mut values = Vec::with_capacity(increments.len() + 1);
        values.push(0);
        let mut v = 0;
        for &u in increments {
            v += u;
            values.push(v);
        }
        Self { values }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Number of steps taken (the last index).
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn last(&self) -> i64 {
        *self.values.last().unwrap()
    }

    pub fn increments(&self) -> Vec<i64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `G_n = Σ_{i=1}^n |V_i|`.
    pub fn geo_area_to(&self, n: usize) -> u64 {
        self.values[1..=n].iter().map(|v| v.unsigned_abs()).sum()
    }

    /// `A_n = Σ_{i=1}^n V_i`.
    pub fn alg_area_to(&self, n: usize) -> i64 {
        self.values[1..=n].iter().sum()
    }

    pub fn geo_area(&self) -> u64 {
        self.geo_area_to(self.steps())
    }

    pub fn alg_area(&self) -> i64 {
        self.alg_area_to(self.steps())
    }
}

/// `V_i = (−1)^{i−1} l_i`, completed by `V_{N+1} = 0`.
pub fn to_aux_walk(path: &PolymerPath) -> AuxWalk {
    let mut values = Vec::with_capacity(path.extension() + 2);
    values.push(0);
    for (i, &l) in path.stretches().iter().enumerate() {
        values.push(if i % 2 == 0 { l } else { -l });
    }
    values.push(0);
    AuxWalk { values }
}

/// Inverse of [`to_aux_walk`]: reads `V_1..V_N` and checks that the walk is
/// closed at `N + 1` when that value is present.
pub fn from_aux_walk(walk: &AuxWalk, n: usize) -> Result<PolymerPath> {
    let values = walk.values();
    if values[0] != 0 {
        return Err(Error::MalformedWalk("V_0 must be 0".into()));
    }
    if n == 0 || values.len() < n + 1 {
        return Err(Error::MalformedWalk(format!(
            "walk with {} steps cannot give {} stretches",
            walk.steps(),
            n
        )));
    }
    if let Some(&closing) = values.get(n + 1) {
        if closing != 0 {
            return Err(Error::MalformedWalk(format!("V_{} = {closing}, expected 0", n + 1)));
        }
    }
    let stretches = values[1..=n]
        .iter()
        .enumerate()
        .map(|(i, &v)| if i % 2 == 0 { v } else { -v })
        .collect();
    PolymerPath::new(stretches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymer::hamiltonian_via_moduli;

    #[test]
    fn figure_example() {
        let p = PolymerPath::new(vec![2, -3, 0, -4]).unwrap();
        let w = to_aux_walk(&p);
        assert_eq!(w.values(), &[0, 2, 3, 0, 4, 0]);
        let q = PolymerPath::new(vec![2, -3, 0, 4]).unwrap();
        assert_eq!(to_aux_walk(&q).values()[4], -4);
        assert_eq!(from_aux_walk(&w, 4).unwrap(), p);
        assert_eq!(w.geo_area(), 9);
        assert_eq!(w.geo_area_to(4) as usize, p.total_length() - p.extension());
    }

    #[test]
    fn zero_path() {
        let p = PolymerPath::new(vec![0, 0, 0]).unwrap();
        assert!(to_aux_walk(&p).values().iter().all(|&v| v == 0));
    }

    #[test]
    fn rejects_malformed() {
        assert!(AuxWalk::from_values(vec![1, 0]).is_err());
        let w = AuxWalk::from_values(vec![0, 2, 1]).unwrap();
        assert!(from_aux_walk(&w, 1).is_err());
        assert!(from_aux_walk(&w, 2).is_ok());
        assert!(from_aux_walk(&w, 3).is_err());
    }

    #[test]
    fn increments_round_trip() {
        let w = AuxWalk::from_increments(&[1, -3, 2, 0]);
        assert_eq!(w.values(), &[0, 1, -2, 0, 0]);
        assert_eq!(w.increments(), vec![1, -3, 2, 0]);
        assert_eq!(w.alg_area(), -1);
        assert_eq!(w.geo_area(), 3);
    }

    proptest::proptest! {
        #[test]
        fn transform_round_trips(l in proptest::collection::vec(-20i64..=20, 1..40)) {
            let p = PolymerPath::new(l).unwrap();
            let w = to_aux_walk(&p);
            proptest::prop_assert_eq!(from_aux_walk(&w, p.extension()).unwrap(), p.clone());
            proptest::prop_assert_eq!(w.geo_area_to(p.extension()) as usize + p.extension(), p.total_length());
            proptest::prop_assert_eq!(hamiltonian_via_moduli(&p, 1.0), p.hamiltonian(1.0));
        }
    }
}
