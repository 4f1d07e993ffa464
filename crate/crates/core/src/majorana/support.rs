use std::fmt;

use smallvec::SmallVec;

/// A finite set of positive Majorana indices stored as a bitset.
///
/// Index `i` lives at bit `i - 1`. Trailing zero words are always trimmed so
/// that equal sets have equal representations (and equal hashes).
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support {
    words: SmallVec<[u64; 2]>,
}

impl Support {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a support from arbitrary indices; duplicates collapse.
    ///
    /// Panics on index 0, since Majorana indices are 1-based.
    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        let mut s = Self::empty();
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, index: u32) {
        assert!(index >= 1, "Majorana indices are 1-based");
        let bit = (index - 1) as usize;
        let (w, b) = (bit / 64, bit % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1u64 << b;
    }

    pub fn contains(&self, index: u32) -> bool {
        if index == 0 {
            return false;
        }
        let bit = (index - 1) as usize;
        self.words
            .get(bit / 64)
            .is_some_and(|w| w >> (bit % 64) & 1 == 1)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Largest index in the set, if any.
    pub fn max_index(&self) -> Option<u32> {
        let last = *self.words.last()?;
        let bit = (self.words.len() - 1) * 64 + 63 - last.leading_zeros() as usize;
        Some(bit as u32 + 1)
    }

    /// Indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some((wi * 64) as u32 + b + 1)
            })
        })
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(short.words.iter()) {
            *w ^= s;
        }
        let mut out = Self { words };
        out.trim();
        out
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Parity of `#{(x, y) : x in self, y in other, x > y}`.
    ///
    /// This is the number of transpositions needed to merge `Ψ_self Ψ_other`
    /// into increasing order. Words are scanned from the top down, carrying
    /// the count of `self` indices in higher words; within a word a
    /// prefix-xor of `self >> 1` gives, at each bit, the parity of `self`
    /// bits strictly above it.
    pub fn merge_inversion_parity(&self, other: &Self) -> u32 {
        let n = self.words.len().min(other.words.len());
        let mut above = 0u32;
        for w in self.words.iter().skip(n) {
            above += w.count_ones();
        }
        let mut parity = 0u32;
        for wi in (0..n).rev() {
            let a = self.words[wi];
            let b = other.words[wi];
            let mut x = a >> 1;
            x ^= x >> 1;
            x ^= x >> 2;
            x ^= x >> 4;
            x ^= x >> 8;
            x ^= x >> 16;
            x ^= x >> 32;
            parity ^= (x & b).count_ones() & 1;
            parity ^= (above & 1) & (b.count_ones() & 1);
            above += a.count_ones();
        }
        parity
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl FromIterator<u32> for Support {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        Self::from_indices(iter)
    }
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_inversions(a: &[u32], b: &[u32]) -> u32 {
        let mut n = 0;
        for &x in a {
            for &y in b {
                if x > y {
                    n += 1;
                }
            }
        }
        n & 1
    }

    #[test]
    fn iter_is_sorted_and_roundtrips() {
        let s = Support::from_indices([70, 3, 64, 65, 1, 3]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 3, 64, 65, 70]);
        assert_eq!(s.len(), 5);
        assert_eq!(s.max_index(), Some(70));
        assert!(s.contains(64) && !s.contains(2) && !s.contains(0));
    }

    #[test]
    fn symmetric_difference_trims() {
        let a = Support::from_indices([2, 100]);
        let b = Support::from_indices([100]);
        let c = a.symmetric_difference(&b);
        assert_eq!(c, Support::from_indices([2]));
        assert_eq!(a.symmetric_difference(&a), Support::empty());
    }

    #[test]
    fn inversion_parity_matches_naive_across_word_boundaries() {
        let sets: Vec<Vec<u32>> = vec![
            vec![],
            vec![1],
            vec![64],
            vec![65],
            vec![1, 2, 3],
            vec![5, 63, 64, 65, 129],
            vec![2, 70, 128, 130],
            vec![1, 64, 200],
        ];
        for a in &sets {
            for b in &sets {
                let sa = Support::from_indices(a.iter().copied());
                let sb = Support::from_indices(b.iter().copied());
                assert_eq!(
                    sa.merge_inversion_parity(&sb),
                    naive_inversions(a, b),
                    "{a:?} {b:?}"
                );
            }
        }
    }
}
