use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimate::{Method, MomentEstimate};
use crate::majorana::{trace_of_sum_word, trace_of_word, MajoranaMonomial, MajoranaSum, Support};
use crate::overlap_stats::{sign_expectation, OverlapConfig};
use crate::partitions::{pair_partitions_below_kernel, qgaussian_moment, Label, Word};
use crate::rng::{derive_key, try_map_samples};

use super::couplings::{binomial, colex_subsets};
use super::hamiltonian::{for_each_term, HAMILTONIAN_TAG};
use super::{sweep_parities, SykFamily, SykModelSpec};

/// Largest number of subset tuples summed by [`exact_joint_moment_small`].
pub const DEFAULT_EXACT_TERM_CAP: u128 = 10_000_000;

/// Largest number of terms allowed in either half-word product of
/// [`mc_joint_moment`].
pub const DEFAULT_PRODUCT_TERM_CAP: u128 = 4_000_000;

/// Tuple budget for exact sign expectations inside [`finite_n_pair_moment`].
pub const DEFAULT_PAIR_BRUTE_FORCE_CAP: u128 = 1_000_000;

/// Imaginary part tolerated in a single trace sample.
const IMAGINARY_TOLERANCE: f64 = 1e-8;

fn word_specs<'a>(family: &'a SykFamily, word: &Word) -> Result<Vec<&'a SykModelSpec>> {
    word.letters().iter().map(|&l| family.spec(l)).collect()
}

/// Monte Carlo estimate of `E[tr(H_{ε(1)} ⋯ H_{ε(d)})]`.
///
/// Each draw samples every Hamiltonian in full and takes the exact normalized
/// trace of their product. The product is evaluated on Majorana sums (each
/// half of the word is expanded, then the two halves are paired by support),
/// which equals the trace of the dense matrix product without forming
/// `2^{n/2}`-dimensional matrices. Draw `s` uses the same couplings as
/// `sample_hamiltonian(spec, seed, s)`.
pub fn mc_joint_moment(family: &SykFamily, word: &Word, samples: usize, seed: u64) -> Result<MomentEstimate> {
    let specs = word_specs(family, word)?;
    if specs.is_empty() {
        return Ok(MomentEstimate::exact(1.0, Method::DenseMc));
    }
    // Order-preserving relabeling onto 1..=U keeps supports in one or two words.
    let mut universe: Vec<u32> = specs.iter().flat_map(|s| s.domain().iter().copied()).collect();
    universe.sort_unstable();
    universe.dedup();
    let relabel = |x: u32| universe.binary_search(&x).map(|p| p as u32 + 1).unwrap_or(0);

    let half = specs.len() / 2;
    let bound = |part: &[&SykModelSpec]| {
        let product = part
            .iter()
            .map(|s| binomial(s.size(), s.interaction_length()))
            .fold(1u128, |a, b| a.saturating_mul(b));
        let supports = if universe.len() >= 127 { u128::MAX } else { 1u128 << universe.len() };
        product.min(supports)
    };
    let worst = bound(&specs[..half]).max(bound(&specs[half..]));
    if worst > DEFAULT_PRODUCT_TERM_CAP {
        return Err(Error::cap("half-word product terms", worst, DEFAULT_PRODUCT_TERM_CAP));
    }
    let mut distinct: Vec<&SykModelSpec> = Vec::new();
    for s in &specs {
        if !distinct.iter().any(|t| t.label() == s.label()) {
            distinct.push(s);
        }
    }
    let key = derive_key(seed, HAMILTONIAN_TAG);
    let values = try_map_samples(
        samples,
        || (),
        |sample, _| -> Result<f64> {
            let mut sums: BTreeMap<Label, MajoranaSum> = BTreeMap::new();
            for s in &distinct {
                let mut h = MajoranaSum::with_capacity(binomial(s.size(), s.interaction_length()) as usize);
                for_each_term(s, key, sample, relabel, |c, sup| {
                    h.add_monomial(c, &MajoranaMonomial::new(sup, 0));
                })?;
                sums.insert(s.label(), h);
            }
            let ops: Vec<&MajoranaSum> = word.letters().iter().map(|l| &sums[l]).collect();
            let t = trace_word_sharing_halves(&ops, word.letters());
            if t.im.abs() > IMAGINARY_TOLERANCE {
                return Err(Error::ImaginaryResidue(t.im));
            }
            Ok(t.re)
        },
    )?;
    Ok(MomentEstimate::from_samples(&values, Method::DenseMc))
}

/// [`trace_of_sum_word`], expanding a repeated half only once.
fn trace_word_sharing_halves(ops: &[&MajoranaSum], letters: &[Label]) -> Complex64 {
    let n = ops.len();
    let half = n / 2;
    if n >= 2 && n.is_multiple_of(2) && letters[..half] == letters[half..] {
        let mut acc = ops[0].clone();
        for x in &ops[1..half] {
            acc = acc.mul(x);
        }
        return acc.trace_of_product(&acc);
    }
    trace_of_sum_word(ops)
}

/// Exact `E[tr(H_{ε(1)} ⋯ H_{ε(d)})]` for tiny models.
///
/// Positions carrying the same coupling form the blocks of a set partition
/// below `ker ε`; each block contributes `E[J^{|V|}]`, and distinct blocks of
/// one label take distinct subsets. All such assignments are summed.
pub fn exact_joint_moment_small(family: &SykFamily, word: &Word) -> Result<MomentEstimate> {
    let specs = word_specs(family, word)?;
    for s in &specs {
        if s.interaction_length() == 0 {
            return Err(Error::InvalidModel {
                label: s.label(),
                reason: "interaction length 0".into(),
            });
        }
    }
    let d = specs.len();
    let letters = word.letters();
    let partitions = set_partitions_below_kernel(letters);

    let mut subsets: BTreeMap<Label, Vec<MajoranaMonomial>> = BTreeMap::new();
    for s in &specs {
        subsets.entry(s.label()).or_insert_with(|| {
            colex_subsets(s.size(), s.interaction_length())
                .map(|sub| MajoranaMonomial::new(Support::from_indices(sub.iter().map(|&p| s.domain()[p])), 0))
                .collect()
        });
    }

    // Budget check before any summation.
    let mut total: u128 = 0;
    let mut useful = Vec::new();
    for blocks in partitions {
        let weight: f64 = blocks
            .iter()
            .map(|b| family.spec(letters[b[0]]).map(|s| s.law().moment(b.len())))
            .product::<Result<f64>>()?;
        if weight == 0.0 {
            continue;
        }
        let mut per_label: BTreeMap<Label, usize> = BTreeMap::new();
        for b in &blocks {
            *per_label.entry(letters[b[0]]).or_default() += 1;
        }
        let mut count: u128 = 1;
        for (l, k) in per_label {
            let m = subsets[&l].len() as u128;
            for i in 0..k as u128 {
                count = count.saturating_mul(m.saturating_sub(i));
            }
        }
        total = total.saturating_add(count);
        if total > DEFAULT_EXACT_TERM_CAP {
            return Err(Error::cap("exact moment terms", total, DEFAULT_EXACT_TERM_CAP));
        }
        useful.push((blocks, weight));
    }

    let prefactor: Complex64 = specs
        .iter()
        .map(|s| {
            let r = s.interaction_length();
            crate::majorana::i_pow((r / 2) as u32) / (binomial(s.size(), r) as f64).sqrt()
        })
        .product();

    let mut acc = Complex64::default();
    for (blocks, weight) in useful {
        let mut block_of = vec![0usize; d];
        for (k, b) in blocks.iter().enumerate() {
            for &p in b {
                block_of[p] = k;
            }
        }
        let block_labels: Vec<Label> = blocks.iter().map(|b| letters[b[0]]).collect();
        let mut chosen = vec![usize::MAX; blocks.len()];
        let mut sum = Complex64::default();
        assign_rec(&block_labels, &subsets, &block_of, 0, &mut chosen, &mut sum);
        acc += sum * weight;
    }
    let value = acc * prefactor;
    if value.im.abs() > IMAGINARY_TOLERANCE {
        return Err(Error::ImaginaryResidue(value.im));
    }
    Ok(MomentEstimate::exact(value.re, Method::ExactSmall))
}

fn assign_rec(
    block_labels: &[Label],
    subsets: &BTreeMap<Label, Vec<MajoranaMonomial>>,
    block_of: &[usize],
    k: usize,
    chosen: &mut [usize],
    sum: &mut Complex64,
) {
    if k == block_labels.len() {
        let word: Vec<MajoranaMonomial> = block_of
            .iter()
            .map(|&b| subsets[&block_labels[b]][chosen[b]].clone())
            .collect();
        *sum += trace_of_word(&word);
        return;
    }
    let label = block_labels[k];
    for idx in 0..subsets[&label].len() {
        if (0..k).any(|j| block_labels[j] == label && chosen[j] == idx) {
            continue;
        }
        chosen[k] = idx;
        assign_rec(block_labels, subsets, block_of, k + 1, chosen, sum);
    }
    chosen[k] = usize::MAX;
}

/// Set partitions of positions whose blocks join equal letters.
fn set_partitions_below_kernel(letters: &[Label]) -> Vec<Vec<Vec<usize>>> {
    fn rec(letters: &[Label], p: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if p == letters.len() {
            out.push(blocks.clone());
            return;
        }
        for k in 0..blocks.len() {
            if letters[blocks[k][0]] == letters[p] {
                blocks[k].push(p);
                rec(letters, p + 1, blocks, out);
                blocks[k].pop();
            }
        }
        blocks.push(vec![p]);
        rec(letters, p + 1, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    rec(letters, 0, &mut Vec::new(), &mut out);
    out
}

/// Pair-partition part of `E[tr(H_{ε(1)} ⋯ H_{ε(d)})]`:
/// `Σ_{π ≤ ker ε} (−1)^{Σ_E r_i r_j} E[(−1)^{Σ_E |R_i ∩ R_j|}]`, where `E` is
/// the set of crossing block pairs of `π` and every block draws its own
/// uniform subset.
///
/// No matrices are built. Sign expectations are exact whenever the crossing
/// graph splits into single edges or tiny components; the rest falls back to
/// Monte Carlo with `samples` draws.
pub fn finite_n_pair_moment(family: &SykFamily, word: &Word, samples: usize, seed: u64) -> Result<MomentEstimate> {
    let specs = word_specs(family, word)?;
    let mut value = 0.0;
    let mut variance = 0.0;
    let mut mc_samples = 0u64;
    let mut exact = true;
    for (k, p) in pair_partitions_below_kernel(word).enumerate() {
        let blocks: Vec<&SykModelSpec> = p.pairs().iter().map(|&(e, _)| specs[e]).collect();
        let edges: Vec<(usize, usize)> = p.crossing_blocks().collect();
        let sign_exp: usize = edges
            .iter()
            .map(|&(a, b)| blocks[a].interaction_length() * blocks[b].interaction_length())
            .sum();
        let sign = if sign_exp.is_multiple_of(2) { 1.0 } else { -1.0 };
        let cfg = OverlapConfig::new(
            blocks.iter().map(|s| s.domain().to_vec()).collect(),
            blocks.iter().map(|s| s.interaction_length()).collect(),
            edges,
        )?;
        let est = sign_expectation(&cfg, samples, derive_key(seed, k as u64), DEFAULT_PAIR_BRUTE_FORCE_CAP)?;
        value += sign * est.value;
        if est.stderr > 0.0 || est.samples > 0 {
            exact = false;
            variance += est.stderr * est.stderr;
            mc_samples = mc_samples.max(est.samples);
        }
    }
    Ok(if exact {
        MomentEstimate::exact(value, Method::FiniteNFormula)
    } else {
        MomentEstimate {
            value,
            stderr: variance.sqrt(),
            samples: mc_samples,
            method: Method::ReducedMc,
        }
    })
}

/// Mixed q-Gaussian limit `τ(s_{ε(1)} ⋯ s_{ε(d)})` with
/// `q_{i,j} = (−1)^{r_i r_j} e^{−2λ_{i,j}}`.
pub fn limit_moment(family: &SykFamily, word: &Word) -> Result<f64> {
    qgaussian_moment(word, &family.q_matrix()?)
}

/// Limit for a sweep of families: refuses labels whose `r` changes parity,
/// then evaluates with the last family's (declared or finite-size) `λ`.
pub fn sweep_limit_moment(families: &[SykFamily], word: &Word) -> Result<f64> {
    sweep_parities(families)?;
    let last = families
        .last()
        .ok_or_else(|| Error::Domain("empty family sweep".into()))?;
    limit_moment(last, word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorana::DenseOperator;
    use crate::syk::{sample_hamiltonian_on, CouplingLaw};

    fn spec(label: Label, lo: u32, hi: u32, r: usize, law: CouplingLaw) -> SykModelSpec {
        SykModelSpec::new(label, (lo..=hi).collect(), r, law).unwrap()
    }

    #[test]
    fn set_partition_counts() {
        // Bell numbers for a single letter.
        for (d, bell) in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52)] {
            assert_eq!(set_partitions_below_kernel(&vec![1; d]).len(), bell);
        }
        assert_eq!(set_partitions_below_kernel(&[1, 2, 1, 2]).len(), 4);
    }

    #[test]
    fn exact_small_examples() {
        let f = SykFamily::new(vec![
            spec(1, 1, 6, 2, CouplingLaw::Gaussian),
            spec(2, 7, 12, 3, CouplingLaw::Rademacher),
            spec(3, 4, 9, 2, CouplingLaw::Gaussian),
        ])
        .unwrap();
        for l in [1, 2, 3] {
            let v = exact_joint_moment_small(&f, &Word::from([l, l])).unwrap();
            assert!((v.value - 1.0).abs() < 1e-12);
            assert_eq!(v.stderr, 0.0);
            assert_eq!(exact_joint_moment_small(&f, &Word::from([l, l, l])).unwrap().value, 0.0);
        }
        assert_eq!(exact_joint_moment_small(&f, &Word::from([1, 2])).unwrap().value, 0.0);
        assert_eq!(exact_joint_moment_small(&f, &Word::from([1, 3])).unwrap().value, 0.0);
    }

    #[test]
    fn exact_small_matches_dense_average_for_all_ones() {
        // Deterministic couplings: the "expectation" is one dense product.
        let f = SykFamily::new(vec![
            spec(1, 1, 5, 2, CouplingLaw::AllOnes),
            spec(2, 3, 6, 3, CouplingLaw::AllOnes),
        ])
        .unwrap();
        let word = Word::from([1, 2, 2, 1, 2]);
        let exact = exact_joint_moment_small(&f, &word).unwrap().value;
        let mut prod = DenseOperator::identity(3);
        for &l in word.letters() {
            prod = prod.mul(&sample_hamiltonian_on(f.spec(l).unwrap(), 3, 0, 0).unwrap());
        }
        assert!((prod.normalized_trace().re - exact).abs() < 1e-12);
    }

    #[test]
    fn mc_matches_dense_per_sample() {
        let f = SykFamily::new(vec![
            spec(1, 1, 8, 2, CouplingLaw::Gaussian),
            spec(2, 3, 10, 3, CouplingLaw::Gaussian),
        ])
        .unwrap();
        let word = Word::from([1, 2, 1, 1, 2, 2]);
        let est = mc_joint_moment(&f, &word, 3, 77).unwrap();
        let mut dense_values = Vec::new();
        for s in 0..3 {
            let mut prod = DenseOperator::identity(5);
            for &l in word.letters() {
                prod = prod.mul(&sample_hamiltonian_on(f.spec(l).unwrap(), 5, 77, s).unwrap());
            }
            dense_values.push(prod.normalized_trace().re);
        }
        let dense = MomentEstimate::from_samples(&dense_values, Method::DenseMc);
        assert!((dense.value - est.value).abs() < 1e-12);
        assert!((dense.stderr - est.stderr).abs() < 1e-12);
    }

    #[test]
    fn finite_n_examples() {
        let f = SykFamily::new(vec![
            spec(1, 1, 10, 3, CouplingLaw::Gaussian),
            spec(2, 1, 10, 3, CouplingLaw::Gaussian),
            spec(3, 21, 30, 3, CouplingLaw::Gaussian),
        ])
        .unwrap();
        let v = finite_n_pair_moment(&f, &Word::from([1, 1, 2, 2]), 0, 0).unwrap();
        assert_eq!((v.value, v.stderr, v.method), (1.0, 0.0, Method::FiniteNFormula));
        let v = finite_n_pair_moment(&f, &Word::from([1, 3, 1, 3]), 0, 0).unwrap();
        assert_eq!(v.value, -1.0);
        let v = finite_n_pair_moment(&f, &Word::from([1, 2, 1, 2]), 0, 0).unwrap();
        let f333 = crate::overlap_stats::f_value(3, 3, 10).unwrap();
        assert!((v.value + f333).abs() < 1e-15);
        // No non-pair partitions exist for this word, so it is the full moment.
        let exact = exact_joint_moment_small(&f, &Word::from([1, 2, 1, 2])).unwrap();
        assert!((exact.value - v.value).abs() < 1e-12);
    }

    #[test]
    fn limit_examples() {
        let mut f = SykFamily::new(vec![
            spec(1, 1, 10, 2, CouplingLaw::Gaussian),
            spec(2, 11, 20, 2, CouplingLaw::Gaussian),
        ])
        .unwrap();
        assert_eq!(limit_moment(&f, &Word::from([1, 2, 1, 2])).unwrap(), 1.0);
        f.declare_lambda(1, 2, f64::INFINITY).unwrap();
        assert_eq!(limit_moment(&f, &Word::from([1, 2, 1, 2])).unwrap(), 0.0);
        assert_eq!(limit_moment(&f, &Word::from([1, 1])).unwrap(), 1.0);
    }
}
