use crate::error::{Error, Result};
use crate::fock::{FockVector, DEFAULT_DEPTH};

use super::{QMatrix, Word};

/// Pair blocks over an even subset `V` of positions plus singletons on the
/// complement. Positions are 0-based; pairs are sorted by opener.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedPartition {
    pub pairs: Vec<(usize, usize)>,
    pub singletons: Vec<usize>,
}

/// Every mixed partition whose pairs join equal letters, including the one
/// with no pairs at all.
pub fn mixed_partitions_below_kernel(w: &Word) -> Vec<MixedPartition> {
    let mut out = Vec::new();
    let mut used = vec![false; w.len()];
    let mut pairs = Vec::new();
    let mut singletons = Vec::new();
    mixed_rec(w, 0, &mut used, &mut pairs, &mut singletons, &mut out);
    out
}

fn mixed_rec(
    w: &Word,
    pos: usize,
    used: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
    singletons: &mut Vec<usize>,
    out: &mut Vec<MixedPartition>,
) {
    let Some(first) = (pos..w.len()).find(|&k| !used[k]) else {
        out.push(MixedPartition {
            pairs: pairs.clone(),
            singletons: singletons.clone(),
        });
        return;
    };
    used[first] = true;
    singletons.push(first);
    mixed_rec(w, first + 1, used, pairs, singletons, out);
    singletons.pop();
    for second in first + 1..w.len() {
        if used[second] || w.0[second] != w.0[first] {
            continue;
        }
        used[second] = true;
        pairs.push((first, second));
        mixed_rec(w, first + 1, used, pairs, singletons, out);
        pairs.pop();
        used[second] = false;
    }
    used[first] = false;
}

/// `∏ q_{i,j}^{C₁ + C₂}`: one factor per crossing pair of blocks and one per
/// singleton lying strictly inside a pair.
pub fn mixed_partition_weight(sigma: &MixedPartition, w: &Word, q: &QMatrix) -> Result<f64> {
    let letters = q.positions(&w.0)?;
    let mut weight = 1.0;
    for (a, &(e1, z1)) in sigma.pairs.iter().enumerate() {
        for &(e2, z2) in &sigma.pairs[a + 1..] {
            if e1 < e2 && e2 < z1 && z1 < z2 {
                weight *= q.at(letters[e1], letters[e2]);
            }
        }
        for &s in &sigma.singletons {
            if e1 < s && s < z1 {
                weight *= q.at(letters[e1], letters[s]);
            }
        }
    }
    Ok(weight)
}

/// `s_{w_1} ⋯ s_{w_d} Ω` as a combination of basis tensors: each mixed
/// partition contributes its weight to the tensor of its singleton letters.
pub fn wick_vector_expansion(w: &Word, q: &QMatrix) -> Result<FockVector> {
    wick_vector_expansion_with_depth(w, q, DEFAULT_DEPTH)
}

pub fn wick_vector_expansion_with_depth(w: &Word, q: &QMatrix, depth: usize) -> Result<FockVector> {
    if w.len() > depth {
        return Err(Error::cap("word length", w.len() as u64, depth as u64));
    }
    let mut v = FockVector::zero(depth);
    for sigma in mixed_partitions_below_kernel(w) {
        let c = mixed_partition_weight(&sigma, w, q)?;
        v.add_term(sigma.singletons.iter().map(|&s| w.0[s]).collect(), c);
    }
    Ok(v)
}
