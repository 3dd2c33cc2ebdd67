use super::PolymerPath;

/// Envelopes, middle line and profile of a path.
///
/// Every coordinate is stored doubled so that the half-integer middle line
/// stays exact; the accessors return the true values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathGeometry {
    pub upper2: Vec<i64>,
    pub lower2: Vec<i64>,
    pub middle2: Vec<i64>,
    pub profile: Vec<i64>,
}

pub fn geometry(path: &PolymerPath) -> PathGeometry {
    let l = path.stretches();
    let n = l.len();
    let mut upper2 = vec![0; n + 2];
    let mut lower2 = vec![0; n + 2];
    let mut middle2 = vec![0; n + 2];
    let mut profile = vec![0; n + 2];
    let mut s = 0i64;
    for i in 1..=n {
        let prev = s;
        s += l[i - 1];
        upper2[i] = 2 * prev.max(s);
        lower2[i] = 2 * prev.min(s);
        middle2[i] = 2 * prev + l[i - 1];
        profile[i] = l[i - 1].abs();
    }
    upper2[n + 1] = 2 * s;
    lower2[n + 1] = 2 * s;
    middle2[n + 1] = 2 * s;
    PathGeometry {
        upper2,
        lower2,
        middle2,
        profile,
    }
}

impl PathGeometry {
    pub fn len(&self) -> usize {
        self.profile.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profile.is_empty()
    }

    pub fn upper(&self, i: usize) -> f64 {
        self.upper2[i] as f64 / 2.0
    }

    pub fn lower(&self, i: usize) -> f64 {
        self.lower2[i] as f64 / 2.0
    }

    pub fn middle(&self, i: usize) -> f64 {
        self.middle2[i] as f64 / 2.0
    }

    /// Checks `ε± = M ± |l|/2` in doubled coordinates.
    pub fn is_consistent(&self) -> bool {
        (0..self.len()).all(|i| {
            self.upper2[i] == self.middle2[i] + self.profile[i]
                && self.lower2[i] == self.middle2[i] - self.profile[i]
                && self.upper2[i] >= self.lower2[i]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_stretches() {
        let g = geometry(&PolymerPath::new(vec![2, -3]).unwrap());
        let up: Vec<f64> = (0..4).map(|i| g.upper(i)).collect();
        let lo: Vec<f64> = (0..4).map(|i| g.lower(i)).collect();
        let mid: Vec<f64> = (0..4).map(|i| g.middle(i)).collect();
        assert_eq!(up, vec![0.0, 2.0, 2.0, -1.0]);
        assert_eq!(lo, vec![0.0, 0.0, -1.0, -1.0]);
        assert_eq!(mid, vec![0.0, 1.0, 0.5, -1.0]);
        assert!(g.is_consistent());
    }

    #[test]
    fn single_stretch() {
        let g = geometry(&PolymerPath::new(vec![5]).unwrap());
        assert_eq!(g.upper2, vec![0, 10, 10]);
        assert_eq!(g.lower2, vec![0, 0, 10]);
    }
}
