use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::rng::{sample_stream, standard_normal};

/// Largest number of `r`-subsets a Hamiltonian may enumerate by default.
pub const DEFAULT_SUBSET_CAP: u128 = 1_000_000;

/// Stream words reserved per coupling, so coupling `ρ` of a label starts at a
/// fixed position whatever law is used.
const WORDS_PER_COUPLING: u128 = 4;

/// Distribution of the couplings `J_R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingLaw {
    Gaussian,
    Rademacher,
    /// Every coupling equal to `+1`. Not centered; for deterministic tests.
    AllOnes,
}

impl CouplingLaw {
    /// `E[J^m]`.
    pub fn moment(self, m: usize) -> f64 {
        match self {
            CouplingLaw::AllOnes => 1.0,
            _ if m % 2 == 1 => 0.0,
            CouplingLaw::Rademacher => 1.0,
            CouplingLaw::Gaussian => (1..m).step_by(2).map(|k| k as f64).product(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CouplingLaw::Gaussian => "gaussian",
            CouplingLaw::Rademacher => "rademacher",
            CouplingLaw::AllOnes => "all-ones",
        }
    }

    pub(crate) fn draw(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            CouplingLaw::Gaussian => standard_normal(rng),
            CouplingLaw::Rademacher => {
                if rng.random::<u64>() >> 63 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            CouplingLaw::AllOnes => 1.0,
        }
    }
}

impl FromStr for CouplingLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "gaussian" => Ok(CouplingLaw::Gaussian),
            "rademacher" => Ok(CouplingLaw::Rademacher),
            "all-ones" => Ok(CouplingLaw::AllOnes),
            other => Err(Error::Domain(format!("unknown coupling law {other:?}"))),
        }
    }
}

/// Generator positioned at the first coupling of `label` in draw `sample`.
pub(crate) fn label_stream(key: u64, sample: u64, label: u32, first_rank: u128) -> ChaCha8Rng {
    let mut rng = sample_stream(key, sample);
    rng.set_word_pos(((label as u128) << 64) + first_rank * WORDS_PER_COUPLING);
    rng
}

/// Draws the couplings of one label in rank order, each starting at its
/// reserved stream position.
pub(crate) struct CouplingStream {
    rng: ChaCha8Rng,
    law: CouplingLaw,
    base: u128,
    next: u128,
}

impl CouplingStream {
    pub(crate) fn new(key: u64, sample: u64, label: u32, law: CouplingLaw) -> Self {
        let rng = label_stream(key, sample, label, 0);
        let base = rng.get_word_pos();
        Self { rng, law, base, next: 0 }
    }

    pub(crate) fn next_coupling(&mut self) -> f64 {
        let pos = self.base + self.next * WORDS_PER_COUPLING;
        if self.rng.get_word_pos() != pos {
            self.rng.set_word_pos(pos);
        }
        self.next += 1;
        self.law.draw(&mut self.rng)
    }
}

/// Coupling of subset rank `rank` for `label` in draw `sample`, by direct seek.
pub fn coupling_at(key: u64, sample: u64, label: u32, rank: u128, law: CouplingLaw) -> f64 {
    let mut rng = label_stream(key, sample, label, rank);
    law.draw(&mut rng)
}

/// All `r`-subsets of `0..n` in colexicographic order.
pub fn colex_subsets(n: usize, r: usize) -> ColexSubsets {
    ColexSubsets {
        n,
        current: (0..r).collect(),
        done: r > n,
    }
}

pub struct ColexSubsets {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Iterator for ColexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let r = self.current.len();
        let mut j = 0;
        while j < r {
            let limit = if j + 1 < r { self.current[j + 1] } else { self.n };
            if self.current[j] + 1 < limit {
                break;
            }
            j += 1;
        }
        if j == r {
            self.done = true;
        } else {
            self.current[j] += 1;
            for (k, c) in self.current[..j].iter_mut().enumerate() {
                *c = k;
            }
        }
        Some(out)
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Subset of colex rank `rank` among the `r`-subsets of `0..n`.
pub fn colex_unrank(mut rank: u128, n: usize, r: usize) -> Vec<usize> {
    let mut out = vec![0; r];
    let mut top = n;
    for k in (1..=r).rev() {
        let mut c = top - 1;
        while binomial(c, k) > rank {
            c -= 1;
        }
        out[k - 1] = c;
        rank -= binomial(c, k);
        top = c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colex_order_and_unrank() {
        let all: Vec<_> = colex_subsets(5, 3).collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[1], vec![0, 1, 3]);
        assert_eq!(all[2], vec![0, 2, 3]);
        assert_eq!(all[9], vec![2, 3, 4]);
        for (rank, s) in all.iter().enumerate() {
            assert_eq!(&colex_unrank(rank as u128, 5, 3), s);
        }
        assert_eq!(colex_subsets(3, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(colex_subsets(2, 3).count(), 0);
        assert_eq!(binomial(24, 2), 276);
    }

    #[test]
    fn sequential_and_seeked_couplings_agree() {
        for law in [CouplingLaw::Gaussian, CouplingLaw::Rademacher] {
            let mut s = CouplingStream::new(99, 5, 3, law);
            for rank in 0..50 {
                assert_eq!(s.next_coupling(), coupling_at(99, 5, 3, rank, law));
            }
        }
        assert_ne!(coupling_at(99, 5, 3, 0, CouplingLaw::Gaussian), coupling_at(99, 5, 4, 0, CouplingLaw::Gaussian));
    }

    #[test]
    fn law_moments() {
        assert_eq!(CouplingLaw::Gaussian.moment(4), 3.0);
        assert_eq!(CouplingLaw::Gaussian.moment(6), 15.0);
        assert_eq!(CouplingLaw::Gaussian.moment(3), 0.0);
        assert_eq!(CouplingLaw::Rademacher.moment(8), 1.0);
        assert_eq!("rademacher".parse::<CouplingLaw>().unwrap(), CouplingLaw::Rademacher);
        assert!("cauchy".parse::<CouplingLaw>().is_err());
    }
}
