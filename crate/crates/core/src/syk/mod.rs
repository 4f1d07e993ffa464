//! SYK Hamiltonians on partially overlapping index sets.
//!
//! Model `k` is `H_k = i^{⌊r/2⌋} C(n, r)^{-1/2} Σ_R J_R Ψ_R`, summed over the
//! `r`-subsets `R` of its domain `A_k` (`n = |A_k|`). Joint moments
//! `E[tr(H_{ε(1)} ⋯ H_{ε(d)})]` are computed exactly for tiny models,
//! estimated by Monte Carlo, reduced to pair-partition sign expectations, or
//! replaced by their mixed q-Gaussian limit.

mod couplings;
mod hamiltonian;
mod moments;

pub use couplings::{colex_subsets, colex_unrank, coupling_at, CouplingLaw, DEFAULT_SUBSET_CAP};
pub use hamiltonian::{hamiltonian_sum, sample_hamiltonian, sample_hamiltonian_on, HAMILTONIAN_TAG};
pub use moments::{
    exact_joint_moment_small, finite_n_pair_moment, limit_moment, mc_joint_moment, sweep_limit_moment,
    DEFAULT_EXACT_TERM_CAP, DEFAULT_PAIR_BRUTE_FORCE_CAP, DEFAULT_PRODUCT_TERM_CAP,
};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::overlap_stats::sorted_intersection_len;
use crate::partitions::{Label, QMatrix};

/// One model: label, domain `A_k`, interaction length `r_k` and coupling law.
#[derive(Debug, Clone, PartialEq)]
pub struct SykModelSpec {
    label: Label,
    domain: Vec<u32>,
    interaction_length: usize,
    law: CouplingLaw,
}

impl SykModelSpec {
    /// The domain is sorted; it must consist of distinct positive indices and
    /// hold at least `r` of them.
    pub fn new(label: Label, domain: Vec<u32>, interaction_length: usize, law: CouplingLaw) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidModel { label, reason };
        let mut domain = domain;
        domain.sort_unstable();
        if domain.first() == Some(&0) {
            return Err(invalid("domain indices must be positive".into()));
        }
        if domain.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("domain has repeated indices".into()));
        }
        if interaction_length > domain.len() {
            return Err(invalid(format!(
                "interaction length {interaction_length} exceeds domain size {}",
                domain.len()
            )));
        }
        Ok(Self {
            label,
            domain,
            interaction_length,
            law,
        })
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn domain(&self) -> &[u32] {
        &self.domain
    }

    /// `n = |A_k|`.
    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn interaction_length(&self) -> usize {
        self.interaction_length
    }

    pub fn law(&self) -> CouplingLaw {
        self.law
    }

    pub fn max_index(&self) -> u32 {
        self.domain.last().copied().unwrap_or(0)
    }
}

/// A set of models on a common index space, optionally carrying declared
/// asymptotic `λ_{i,j}` that override the finite-size `λ̂_{i,j}` in limits.
#[derive(Debug, Clone, PartialEq)]
pub struct SykFamily {
    specs: Vec<SykModelSpec>,
    declared: BTreeMap<(Label, Label), f64>,
}

impl SykFamily {
    pub fn new(specs: Vec<SykModelSpec>) -> Result<Self> {
        for (k, s) in specs.iter().enumerate() {
            if specs[..k].iter().any(|t| t.label == s.label) {
                return Err(Error::InvalidModel {
                    label: s.label,
                    reason: "label declared twice".into(),
                });
            }
        }
        Ok(Self {
            specs,
            declared: BTreeMap::new(),
        })
    }

    /// Declares `λ_{i,j} = λ_{j,i}` (may be `+∞`) for limit computations.
    pub fn declare_lambda(&mut self, i: Label, j: Label, lambda: f64) -> Result<()> {
        self.spec(i)?;
        self.spec(j)?;
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::Domain(format!("λ({i},{j}) = {lambda} must be ≥ 0")));
        }
        self.declared.insert((i.min(j), i.max(j)), lambda);
        Ok(())
    }

    pub fn specs(&self) -> &[SykModelSpec] {
        &self.specs
    }

    pub fn labels(&self) -> Vec<Label> {
        self.specs.iter().map(|s| s.label).collect()
    }

    pub fn spec(&self, label: Label) -> Result<&SykModelSpec> {
        self.specs
            .iter()
            .find(|s| s.label == label)
            .ok_or(Error::UnknownLabel(label))
    }

    /// `a_{i,j} = |A_i ∩ A_j|`.
    pub fn overlap(&self, i: Label, j: Label) -> Result<usize> {
        Ok(sorted_intersection_len(self.spec(i)?.domain(), self.spec(j)?.domain()))
    }

    /// `λ̂_{i,j} = r_i r_j a_{i,j} / (n_i n_j)`; with equal domain sizes this
    /// is `(r_i r_j / n)(a_{i,j} / n)`.
    pub fn lambda_hat(&self, i: Label, j: Label) -> Result<f64> {
        let (a, b) = (self.spec(i)?, self.spec(j)?);
        if a.size() == 0 || b.size() == 0 {
            return Ok(0.0);
        }
        let overlap = self.overlap(i, j)? as f64;
        Ok(a.interaction_length as f64 * b.interaction_length as f64 * overlap / (a.size() as f64 * b.size() as f64))
    }

    /// Declared `λ_{i,j}` if any, else `λ̂_{i,j}`.
    pub fn lambda(&self, i: Label, j: Label) -> Result<f64> {
        match self.declared.get(&(i.min(j), i.max(j))) {
            Some(&l) => Ok(l),
            None => self.lambda_hat(i, j),
        }
    }

    pub fn declared_lambda(&self, i: Label, j: Label) -> Option<f64> {
        self.declared.get(&(i.min(j), i.max(j))).copied()
    }

    /// `r_k mod 2` per label.
    pub fn parities(&self) -> BTreeMap<Label, u32> {
        self.specs
            .iter()
            .map(|s| (s.label, (s.interaction_length % 2) as u32))
            .collect()
    }

    /// Limit matrix `q_{i,j} = (−1)^{r_i r_j} e^{−2λ_{i,j}}`, `e^{−∞} = 0`.
    pub fn q_matrix(&self) -> Result<QMatrix> {
        let labels = self.labels();
        let n = labels.len();
        let mut entries = vec![0.0; n * n];
        for (a, &i) in labels.iter().enumerate() {
            for (b, &j) in labels.iter().enumerate() {
                let sign = if (self.specs[a].interaction_length * self.specs[b].interaction_length).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                let lambda = self.lambda(i, j)?;
                entries[a * n + b] = if lambda.is_infinite() { 0.0 } else { sign * (-2.0 * lambda).exp() };
            }
        }
        QMatrix::new(labels, entries)
    }
}

/// Checks that every label keeps one parity of `r_k` along a sweep of
/// families and returns it.
pub fn sweep_parities(families: &[SykFamily]) -> Result<BTreeMap<Label, u32>> {
    let mut seen: BTreeMap<Label, u32> = BTreeMap::new();
    for f in families {
        for (l, p) in f.parities() {
            if *seen.entry(l).or_insert(p) != p {
                return Err(Error::MixedParity(l));
            }
        }
    }
    Ok(seen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(label: Label, lo: u32, hi: u32, r: usize) -> SykModelSpec {
        SykModelSpec::new(label, (lo..=hi).collect(), r, CouplingLaw::Gaussian).unwrap()
    }

    #[test]
    fn spec_validation() {
        let err = SykModelSpec::new(3, vec![1, 2], 3, CouplingLaw::Gaussian).unwrap_err();
        assert!(matches!(err, Error::InvalidModel { label: 3, .. }));
        assert!(SykModelSpec::new(1, vec![0, 1], 1, CouplingLaw::Gaussian).is_err());
        assert!(SykModelSpec::new(1, vec![2, 2], 1, CouplingLaw::Gaussian).is_err());
        assert!(SykFamily::new(vec![spec(1, 1, 4, 2), spec(1, 1, 4, 2)]).is_err());
    }

    #[test]
    fn lambda_and_q() {
        let mut f = SykFamily::new(vec![spec(1, 1, 100, 10), spec(2, 51, 150, 5)]).unwrap();
        assert_eq!(f.overlap(1, 2).unwrap(), 50);
        assert!((f.lambda_hat(1, 2).unwrap() - 0.25).abs() < 1e-15);
        assert!((f.lambda_hat(1, 1).unwrap() - 1.0).abs() < 1e-15);
        let q = f.q_matrix().unwrap();
        assert!((q.get(1, 2).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert!((q.get(2, 2).unwrap() + (-0.5f64).exp()).abs() < 1e-15);
        f.declare_lambda(2, 1, f64::INFINITY).unwrap();
        assert_eq!(f.q_matrix().unwrap().get(1, 2).unwrap(), 0.0);
        assert!(f.declare_lambda(1, 9, 0.0).is_err());
    }

    #[test]
    fn parity_sweep() {
        let a = SykFamily::new(vec![spec(1, 1, 10, 2), spec(2, 1, 10, 3)]).unwrap();
        let b = SykFamily::new(vec![spec(1, 1, 20, 4), spec(2, 1, 20, 5)]).unwrap();
        let c = SykFamily::new(vec![spec(1, 1, 20, 4), spec(2, 1, 20, 4)]).unwrap();
        assert_eq!(sweep_parities(&[a.clone(), b]).unwrap().into_iter().collect::<Vec<_>>(), vec![(1, 0), (2, 1)]);
        assert_eq!(sweep_parities(&[a, c]), Err(Error::MixedParity(2)));
    }
}
