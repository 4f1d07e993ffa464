use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{Label, PairPartition, QMatrix, Word, DEFAULT_MAX_POSITIONS};

/// `cr(π, ε; i, j)` for every ordered label pair with a nonzero count.
///
/// Keys are `(label of the earlier block, label of the later block)`.
pub fn crossing_counts(p: &PairPartition, w: &Word) -> Result<BTreeMap<(Label, Label), u32>> {
    if p.size() != w.len() {
        return Err(Error::Domain(format!(
            "partition of {} positions applied to a word of length {}",
            p.size(),
            w.len()
        )));
    }
    if let Some(&(a, b)) = p.pairs().iter().find(|&&(a, b)| w.0[a] != w.0[b]) {
        return Err(Error::KernelViolation(a, b));
    }
    let mut counts = BTreeMap::new();
    for (a, b) in p.crossing_blocks() {
        let key = (w.0[p.pairs()[a].0], w.0[p.pairs()[b].0]);
        *counts.entry(key).or_insert(0) += 1;
    }
    Ok(counts)
}

/// `τ(s_{ε(1)} ⋯ s_{ε(d)}) = Σ_{π ≤ ker ε} ∏ q_{i,j}^{cr(π,ε;i,j)}`.
///
/// Enumerates pair partitions recursively, multiplying in the crossing
/// factors as each block is placed; subtrees whose weight is already zero
/// are skipped.
pub fn qgaussian_moment(w: &Word, q: &QMatrix) -> Result<f64> {
    qgaussian_moment_with_cap(w, q, DEFAULT_MAX_POSITIONS)
}

pub fn qgaussian_moment_with_cap(w: &Word, q: &QMatrix, max_len: usize) -> Result<f64> {
    let letters = q.positions(&w.0)?;
    if w.len() % 2 == 1 {
        return Ok(0.0);
    }
    if w.len() > max_len {
        return Err(Error::cap("word length", w.len() as u64, max_len as u64));
    }
    let mut search = Search {
        letters: &letters,
        q,
        mate: vec![None; w.len()],
        blocks: Vec::with_capacity(w.len() / 2),
    };
    Ok(search.sum(1.0))
}

struct Search<'a> {
    letters: &'a [usize],
    q: &'a QMatrix,
    mate: Vec<Option<usize>>,
    blocks: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn sum(&mut self, weight: f64) -> f64 {
        let Some(first) = self.mate.iter().position(Option::is_none) else {
            return weight;
        };
        let mut total = 0.0;
        for second in first + 1..self.mate.len() {
            if self.mate[second].is_some() || self.letters[first] != self.letters[second] {
                continue;
            }
            // Every placed block opens before `first`; it crosses the new one
            // when it closes strictly between `first` and `second`.
            let mut w = weight;
            for &(e, z) in &self.blocks {
                if first < z && z < second {
                    w *= self.q.at(self.letters[e], self.letters[first]);
                }
            }
            if w == 0.0 {
                continue;
            }
            self.mate[first] = Some(second);
            self.mate[second] = Some(first);
            self.blocks.push((first, second));
            total += self.sum(w);
            self.blocks.pop();
            self.mate[first] = None;
            self.mate[second] = None;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::pair_partitions_below_kernel;

    fn qm(labels: Vec<Label>, entries: Vec<f64>) -> QMatrix {
        QMatrix::new(labels, entries).unwrap()
    }

    #[test]
    fn crossing_count_examples() {
        let p = PairPartition::from_one_based(&[(1, 3), (2, 4)]).unwrap();
        let c = crossing_counts(&p, &Word::from([1, 2, 1, 2])).unwrap();
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec![((1, 2), 1)]);

        let p = PairPartition::from_one_based(&[(1, 2), (3, 4)]).unwrap();
        assert!(crossing_counts(&p, &Word::from([5, 5, 6, 6])).unwrap().is_empty());

        // (1,4)×(2,6) and (1,4)×(3,5) cross; (2,6) nests (3,5).
        let p = PairPartition::from_one_based(&[(1, 4), (2, 6), (3, 5)]).unwrap();
        let c = crossing_counts(&p, &Word::from([1; 6])).unwrap();
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec![((1, 1), 2)]);
    }

    #[test]
    fn kernel_violation_is_reported() {
        let p = PairPartition::from_one_based(&[(1, 2), (3, 4)]).unwrap();
        assert_eq!(
            crossing_counts(&p, &Word::from([1, 2, 1, 2])),
            Err(Error::KernelViolation(0, 1))
        );
    }

    #[test]
    fn moment_examples() {
        let q = qm(vec![1, 2], vec![0.3, -0.6, -0.6, 0.7]);
        assert_eq!(qgaussian_moment(&Word::from([1, 1]), &q).unwrap(), 1.0);
        assert!((qgaussian_moment(&Word::from([1, 1, 1, 1]), &q).unwrap() - 2.3).abs() < 1e-15);
        assert_eq!(qgaussian_moment(&Word::from([1, 2, 1, 2]), &q).unwrap(), -0.6);
        assert_eq!(qgaussian_moment(&Word::from([1, 2, 1]), &q).unwrap(), 0.0);
        assert_eq!(qgaussian_moment(&Word::from([1, 3]), &q), Err(Error::UnknownLabel(3)));
    }

    #[test]
    fn pruned_search_matches_plain_enumeration() {
        let q = qm(vec![1, 2, 3], vec![0.5, 0.0, -0.3, 0.0, 1.0, 0.8, -0.3, 0.8, -1.0]);
        let words: [&[Label]; 5] = [
            &[1, 2, 1, 2, 3, 3],
            &[1, 1, 1, 1, 1, 1],
            &[2, 3, 2, 3, 1, 1, 2, 2],
            &[1, 2, 3, 1, 2, 3],
            &[3, 3, 3, 1, 3, 1],
        ];
        for letters in words {
            let w = Word::from(letters);
            let mut direct = 0.0;
            for p in pair_partitions_below_kernel(&w) {
                let mut term = 1.0;
                for ((i, j), c) in crossing_counts(&p, &w).unwrap() {
                    term *= q.get(i, j).unwrap().powi(c as i32);
                }
                direct += term;
            }
            let fast = qgaussian_moment(&w, &q).unwrap();
            assert!((fast - direct).abs() < 1e-12, "{w}: {fast} vs {direct}");
        }
    }
}
