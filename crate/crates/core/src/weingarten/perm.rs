use std::fmt;

use crate::error::{input, Result};

/// Permutation of `{0, .., t-1}` (displayed 1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(t: usize) -> Self {
        Self { images: (0..t).collect() }
    }

    /// From 1-based images, `images[i - 1] = P(i)`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let zero: Vec<usize> = images.iter().map(|&i| i.wrapping_sub(1)).collect();
        Self::from_zero_based(zero)
    }

    pub fn from_zero_based(images: Vec<usize>) -> Result<Self> {
        let t = images.len();
        let mut seen = vec![false; t];
        for &i in &images {
            if i >= t || seen[i] {
                return input(format!("{images:?} is not a permutation"));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// Canonical element of a conjugacy class: consecutive cycles of the given lengths.
    pub fn representative(cycle_type: &CycleType) -> Self {
        let mut images = Vec::with_capacity(cycle_type.total());
        let mut start = 0;
        for &len in cycle_type.parts() {
            for k in 0..len {
                images.push(start + (k + 1) % len);
            }
            start += len;
        }
        Self { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p] = i;
        }
        Self { images: inv }
    }

    /// `(self o other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.images.len()];
        let mut lengths = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            lengths.push(len);
        }
        lengths
    }

    pub fn cycle_count(&self) -> usize {
        self.cycle_lengths().len()
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.cycle_lengths())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one: Vec<String> = self.images.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", one.join(" "))
    }
}

/// Integer partition, parts sorted in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn cycle_count(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// All partitions of `t`, from `[t]` down to `[1, .., 1]`.
pub fn partitions(t: usize) -> Vec<CycleType> {
    fn go(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<CycleType>) {
        if remaining == 0 {
            out.push(CycleType(prefix.clone()));
            return;
        }
        for part in (1..=remaining.min(max)).rev() {
            prefix.push(part);
            go(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(t, t, &mut Vec::new(), &mut out);
    out
}

/// All `t!` permutations in lexicographic order of their images.
pub fn permutations(t: usize) -> Vec<Permutation> {
    let mut current: Vec<usize> = (0..t).collect();
    let mut out = vec![Permutation { images: current.clone() }];
    // next-permutation iteration
    loop {
        let Some(i) = (1..t).rev().find(|&i| current[i - 1] < current[i]) else { break };
        let j = (i..t).rev().find(|&j| current[j] > current[i - 1]).expect("pivot exists");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(Permutation { images: current.clone() });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cycle_types_in_s3() {
        let id = Permutation::identity(3);
        assert_eq!(id.cycle_type().parts(), &[1, 1, 1]);
        let swap = Permutation::from_one_based(&[2, 1, 3]).unwrap();
        assert_eq!(swap.cycle_type().parts(), &[2, 1]);
        let three = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        assert_eq!(three.cycle_type().parts(), &[3]);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_one_based(&[1, 1, 2]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Permutation::from_one_based(&[1, 4, 2]).is_err());
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=7).map(|t| partitions(t).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15]);
        assert_eq!(partitions(3).first().unwrap().parts(), &[3]);
        assert_eq!(partitions(3).last().unwrap().parts(), &[1, 1, 1]);
    }

    #[test]
    fn permutation_counts_and_class_sizes() {
        let all = permutations(4);
        assert_eq!(all.len(), 24);
        assert_eq!(all[0], Permutation::identity(4));
        let transpositions = all.iter().filter(|p| p.cycle_type().parts() == [2, 1, 1]).count();
        assert_eq!(transpositions, 6);
        for c in partitions(5) {
            assert_eq!(Permutation::representative(&c).cycle_type(), c);
        }
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(seed in 0usize..720) {
            let p = permutations(6)[seed].clone();
            prop_assert_eq!(p.compose(&p.inverse()), Permutation::identity(6));
            prop_assert_eq!(p.inverse().cycle_type(), p.cycle_type());
            prop_assert_eq!(p.cycle_type().total(), 6);
        }
    }
}
