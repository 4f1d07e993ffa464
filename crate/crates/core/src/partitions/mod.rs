//! Pair partitions, crossing statistics and the mixed q-Gaussian moment formula.
//!
//! The vacuum moment of `s_{ε(1)} ⋯ s_{ε(d)}` is a sum over pair partitions
//! `π ≤ ker ε` of `∏ q_{i,j}^{cr(π,ε;i,j)}`, where `cr` counts crossing block
//! pairs whose earlier block carries letter `i` and later block letter `j`.

mod enumerate;
mod expansion;
mod moments;
mod polynomial;
mod qmatrix;

pub use enumerate::{
    enumerate_pair_partitions, pair_partitions_below_kernel, PairPartitions, DEFAULT_MAX_POSITIONS,
};
pub use expansion::{
    mixed_partition_weight, mixed_partitions_below_kernel, wick_vector_expansion,
    wick_vector_expansion_with_depth, MixedPartition,
};
pub use moments::{crossing_counts, qgaussian_moment, qgaussian_moment_with_cap};
pub use polynomial::{polynomial_word_moment, MomentCache, Polynomial, MAX_POLYNOMIAL_DEGREE};
pub use qmatrix::QMatrix;

use std::fmt;

/// Identifier of a model / variable. Any integer works; `1, 2, …` is typical.
pub type Label = u32;

/// A word `ε: [d] → labels`, read left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Label>);

impl Word {
    pub fn new(letters: impl Into<Vec<Label>>) -> Self {
        Self(letters.into())
    }

    pub fn letters(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distinct letters in order of first appearance.
    pub fn alphabet(&self) -> Vec<Label> {
        let mut seen = Vec::new();
        for &l in &self.0 {
            if !seen.contains(&l) {
                seen.push(l);
            }
        }
        seen
    }
}

impl From<&[Label]> for Word {
    fn from(v: &[Label]) -> Self {
        Self(v.to_vec())
    }
}

impl<const N: usize> From<[Label; N]> for Word {
    fn from(v: [Label; N]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// A perfect matching of positions `0..2d`, blocks `(e, z)` with `e < z`,
/// sorted by opener.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairPartition {
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    /// Validates and normalizes a list of 0-based pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> crate::Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        pairs.sort_unstable();
        let n = 2 * pairs.len();
        let mut seen = vec![false; n];
        for &(a, b) in &pairs {
            for x in [a, b] {
                if x >= n || seen[x] {
                    return Err(crate::Error::Domain(format!(
                        "pairs do not partition 0..{n}"
                    )));
                }
                seen[x] = true;
            }
        }
        Ok(Self { pairs })
    }

    /// Same as [`from_pairs`](Self::from_pairs) with 1-based positions.
    pub fn from_one_based(pairs: &[(usize, usize)]) -> crate::Result<Self> {
        if pairs.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err(crate::Error::Domain("positions are 1-based".into()));
        }
        Self::from_pairs(pairs.iter().map(|&(a, b)| (a - 1, b - 1)))
    }

    pub(crate) fn from_sorted_unchecked(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of positions, `2d`.
    pub fn size(&self) -> usize {
        2 * self.pairs.len()
    }

    /// Indices `(a, b)`, `a < b`, of blocks that cross: `e_a < e_b < z_a < z_b`.
    pub fn crossing_blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let p = &self.pairs;
        (0..p.len()).flat_map(move |a| {
            (a + 1..p.len()).filter_map(move |b| {
                let ((e1, z1), (e2, z2)) = (p[a], p[b]);
                (e1 < e2 && e2 < z1 && z1 < z2).then_some((a, b))
            })
        })
    }

    /// Label-blind crossing number.
    pub fn crossing_number(&self) -> usize {
        self.crossing_blocks().count()
    }

    /// `π ≤ ker ε`: every block joins equal letters.
    pub fn is_below_kernel(&self, w: &Word) -> bool {
        self.size() == w.len() && self.pairs.iter().all(|&(a, b)| w.0[a] == w.0[b])
    }
}
