use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent partition of a finite abelian p-group.
///
/// `(3, 1)` at the prime `p` denotes `Z/p^3 ⊕ Z/p`. Parts are kept strictly
/// positive and non-increasing; the empty partition is the trivial group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Builds a partition from arbitrary exponents, dropping zeros and sorting.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the parts, i.e. the exponent of `p` in the group order.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// The `k`-th part (0-based), or zero past the end.
    pub fn part(&self, k: usize) -> u32 {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn largest(&self) -> u32 {
        self.part(0)
    }

    /// Parts capped at `v`: the type of `G ⊗ Z/p^v`.
    pub fn truncate_exponents(&self, v: u32) -> Partition {
        Partition::new(self.0.iter().map(|&x| x.min(v)).collect())
    }

    pub fn conjugate(&self) -> Partition {
        let largest = self.largest() as usize;
        let parts = (1..=largest)
            .map(|k| self.0.iter().filter(|&&x| x as usize >= k).count() as u32)
            .collect();
        Partition(parts)
    }

    /// Componentwise domination `self_k >= other_k` for every `k`.
    pub fn dominates(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.0.iter().zip(&self.0).all(|(g, h)| g <= h)
    }

    /// All partitions of `n`, in reverse lexicographic order.
    pub fn all_of_size(n: u32) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        fill_partitions(n, n, &mut current, &mut out);
        out
    }
}

fn fill_partitions(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition(current.clone()));
        return;
    }
    for part in (1..=remaining.min(max_part)).rev() {
        current.push(part);
        fill_partitions(remaining - part, part, current, out);
        current.pop();
    }
}

impl From<Vec<u32>> for Partition {
    fn from(parts: Vec<u32>) -> Self {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes() {
        assert_eq!(Partition::new(vec![1, 0, 3, 1]).parts(), &[3, 1, 1]);
        assert!(Partition::new(vec![0, 0]).is_empty());
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=8).map(|n| Partition::all_of_size(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(
            Partition::all_of_size(3),
            vec![Partition::new(vec![3]), Partition::new(vec![2, 1]), Partition::new(vec![1, 1, 1])]
        );
    }

    #[test]
    fn conjugate_is_involution() {
        for n in 0..=7 {
            for p in Partition::all_of_size(n) {
                assert_eq!(p.conjugate().conjugate(), p);
                assert_eq!(p.conjugate().size(), n);
            }
        }
        assert_eq!(Partition::new(vec![3, 1]).conjugate().parts(), &[2, 1, 1]);
    }

    #[test]
    fn domination() {
        let h = Partition::new(vec![2, 1]);
        assert!(h.dominates(&Partition::new(vec![1, 1])));
        assert!(!Partition::new(vec![2]).dominates(&Partition::new(vec![1, 1])));
        assert!(h.dominates(&Partition::empty()));
    }
}
