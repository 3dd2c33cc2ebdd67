use std::ops::Range;

use super::PolymerPath;

/// One regenerative piece of a path: a run of stretches closed by its first
/// zero stretch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    /// Stretch indices (0-based) covered by the pattern.
    pub range: Range<usize>,
    /// Number of stretches 𝔑.
    pub extension: usize,
    /// Number of monomers S.
    pub length: usize,
    /// Vertical displacement 𝔍.
    pub displacement: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternDecomposition {
    pub patterns: Vec<Pattern>,
    /// Unfinished suffix when the last stretch is nonzero.
    pub remainder: Option<Pattern>,
}

impl PatternDecomposition {
    pub fn has_remainder(&self) -> bool {
        self.remainder.is_some()
    }
}

fn pattern(l: &[i64], range: Range<usize>) -> Pattern {
    let slice = &l[range.clone()];
    Pattern {
        extension: slice.len(),
        length: slice.len() + slice.iter().map(|v| v.unsigned_abs() as usize).sum::<usize>(),
        displacement: slice.iter().sum(),
        range,
    }
}

pub fn decompose_patterns(path: &PolymerPath) -> PatternDecomposition {
    let l = path.stretches();
    let mut patterns = Vec::new();
    let mut start = 0;
    for (j, &v) in l.iter().enumerate() {
        if v == 0 {
            patterns.push(pattern(l, start..j + 1));
            start = j + 1;
        }
    }
    let remainder = (start < l.len()).then(|| pattern(l, start..l.len()));
    PatternDecomposition {
        patterns,
        remainder,
    }
}

/// Maximal runs of nonzero stretches with alternating signs.
pub fn decompose_beads(path: &PolymerPath) -> Vec<Range<usize>> {
    let l = path.stretches();
    let mut beads = Vec::new();
    let mut start: Option<usize> = None;
    for j in 0..l.len() {
        if l[j] == 0 {
            if let Some(s) = start.take() {
                beads.push(s..j);
            }
            continue;
        }
        match start {
            None => start = Some(j),
            Some(s) => {
                if (l[j] > 0) == (l[j - 1] > 0) {
                    beads.push(s..j);
                    start = Some(j);
                }
            }
        }
    }
    if let Some(s) = start {
        beads.push(s..l.len());
    }
    beads
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(p: &Pattern) -> (usize, usize, i64) {
        (p.length, p.extension, p.displacement)
    }

    #[test]
    fn patterns() {
        let d = decompose_patterns(&PolymerPath::new(vec![1, 0, -2, 0]).unwrap());
        let t: Vec<_> = d.patterns.iter().map(triple).collect();
        assert_eq!(t, vec![(2 + 1, 2, 1), (2 + 2, 2, -2)]);
        assert!(!d.has_remainder());

        let d = decompose_patterns(&PolymerPath::new(vec![0, 0, 0]).unwrap());
        assert_eq!(d.patterns.len(), 3);
        assert!(d.patterns.iter().all(|p| triple(p) == (1, 1, 0)));

        let d = decompose_patterns(&PolymerPath::new(vec![3, 0, 1, -1]).unwrap());
        assert_eq!(d.patterns.len(), 1);
        assert_eq!(triple(d.remainder.as_ref().unwrap()), (4, 2, 0));
    }

    #[test]
    fn beads() {
        let b = |v: Vec<i64>| decompose_beads(&PolymerPath::new(v).unwrap());
        assert_eq!(b(vec![2, -3, 4, -1]), vec![0..4]);
        assert_eq!(b(vec![2, 3]), vec![0..1, 1..2]);
        assert_eq!(b(vec![2, -1, 0, 4]), vec![0..2, 3..4]);
        assert!(b(vec![0, 0]).is_empty());
    }
}
