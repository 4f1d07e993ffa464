use crate::error::{Error, Result};

use super::{Label, PairPartition, Word};

/// Largest number of positions enumerated by default; `23!! ≈ 3.2·10^11`.
pub const DEFAULT_MAX_POSITIONS: usize = 24;

const UNPAIRED: usize = usize::MAX;

/// Lazy enumeration of pair partitions of `0..n`, optionally restricted to
/// blocks joining equal letters.
///
/// The smallest unpaired position is always matched first, trying partners
/// in increasing order, so the stream order is canonical.
#[derive(Debug, Clone)]
pub struct PairPartitions {
    letters: Option<Vec<Label>>,
    mate: Vec<usize>,
    stack: Vec<(usize, usize)>,
    started: bool,
    done: bool,
}

impl PairPartitions {
    fn build(n: usize, letters: Option<Vec<Label>>) -> Self {
        Self {
            letters,
            mate: vec![UNPAIRED; n],
            stack: Vec::with_capacity(n / 2),
            started: false,
            done: n % 2 == 1,
        }
    }

    fn admissible(&self, a: usize, b: usize) -> bool {
        self.mate[b] == UNPAIRED && self.letters.as_ref().is_none_or(|w| w[a] == w[b])
    }

    fn partner_after(&self, first: usize, after: usize) -> Option<usize> {
        (after + 1..self.mate.len()).find(|&b| self.admissible(first, b))
    }

    fn push(&mut self, a: usize, b: usize) {
        self.mate[a] = b;
        self.mate[b] = a;
        self.stack.push((a, b));
    }

    /// Pops until some block can move to a later partner.
    fn backtrack(&mut self) -> bool {
        while let Some((a, b)) = self.stack.pop() {
            self.mate[a] = UNPAIRED;
            self.mate[b] = UNPAIRED;
            if let Some(next) = self.partner_after(a, b) {
                self.push(a, next);
                return true;
            }
        }
        false
    }

    /// Completes the current prefix to a full matching, backtracking as needed.
    fn fill(&mut self) -> bool {
        loop {
            let Some(first) = self.mate.iter().position(|&m| m == UNPAIRED) else {
                return true;
            };
            match self.partner_after(first, first) {
                Some(b) => self.push(first, b),
                None => {
                    if !self.backtrack() {
                        return false;
                    }
                }
            }
        }
    }

    fn current(&self) -> PairPartition {
        PairPartition::from_sorted_unchecked(self.stack.clone())
    }
}

impl Iterator for PairPartitions {
    type Item = PairPartition;

    fn next(&mut self) -> Option<PairPartition> {
        if self.done {
            return None;
        }
        let ok = if self.started {
            self.backtrack() && self.fill()
        } else {
            self.started = true;
            self.fill()
        };
        if ok {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

/// All `(n-1)!!` pair partitions of `n` positions.
pub fn enumerate_pair_partitions(n: usize) -> Result<PairPartitions> {
    if n % 2 == 1 {
        return Err(Error::Domain(format!("cannot pair an odd number ({n}) of positions")));
    }
    if n > DEFAULT_MAX_POSITIONS {
        return Err(Error::cap("pair-partition size", n as u64, DEFAULT_MAX_POSITIONS as u64));
    }
    Ok(PairPartitions::build(n, None))
}

/// Pair partitions `π ≤ ker w`; empty for odd-length words.
pub fn pair_partitions_below_kernel(w: &Word) -> PairPartitions {
    PairPartitions::build(w.len(), Some(w.0.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_based(p: &PairPartition) -> Vec<(usize, usize)> {
        p.pairs().iter().map(|&(a, b)| (a + 1, b + 1)).collect()
    }

    fn double_factorial(n: usize) -> usize {
        (1..=n).rev().step_by(2).product()
    }

    #[test]
    fn counts_are_double_factorials() {
        for n in (0..=12).step_by(2) {
            let all: Vec<_> = enumerate_pair_partitions(n).unwrap().collect();
            assert_eq!(all.len(), double_factorial(n.saturating_sub(1)).max(1), "n = {n}");
            let distinct: std::collections::HashSet<_> = all.iter().cloned().collect();
            assert_eq!(distinct.len(), all.len());
        }
        assert_eq!(enumerate_pair_partitions(8).unwrap().count(), 105);
    }

    #[test]
    fn small_cases() {
        let two: Vec<_> = enumerate_pair_partitions(2).unwrap().map(|p| one_based(&p)).collect();
        assert_eq!(two, vec![vec![(1, 2)]]);
        let four: Vec<_> = enumerate_pair_partitions(4).unwrap().map(|p| one_based(&p)).collect();
        assert_eq!(
            four,
            vec![vec![(1, 2), (3, 4)], vec![(1, 3), (2, 4)], vec![(1, 4), (2, 3)]]
        );
    }

    #[test]
    fn errors() {
        assert!(enumerate_pair_partitions(3).is_err());
        assert!(enumerate_pair_partitions(26).unwrap_err().is_resource_cap());
    }

    #[test]
    fn kernel_restriction() {
        let collect = |w: [Label; 4]| -> Vec<Vec<(usize, usize)>> {
            pair_partitions_below_kernel(&Word::from(w)).map(|p| one_based(&p)).collect()
        };
        assert_eq!(collect([1, 1, 2, 2]), vec![vec![(1, 2), (3, 4)]]);
        assert_eq!(collect([1, 2, 1, 2]), vec![vec![(1, 3), (2, 4)]]);
        assert_eq!(collect([1, 1, 1, 1]).len(), 3);
        assert_eq!(pair_partitions_below_kernel(&Word::from([1, 1, 1])).count(), 0);
        assert_eq!(pair_partitions_below_kernel(&Word::from([1, 2])).count(), 0);
    }
}
