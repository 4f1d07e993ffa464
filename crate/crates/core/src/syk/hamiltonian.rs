use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::majorana::{i_pow, qubits_for, DenseLimits, DenseOperator, MajoranaMonomial, MajoranaSum, Support};
use crate::rng::derive_key;

use super::couplings::{binomial, colex_subsets, CouplingStream, DEFAULT_SUBSET_CAP};
use super::SykModelSpec;

/// Purpose tag mixed into the seed for coupling streams.
pub const HAMILTONIAN_TAG: u64 = 0x5A4B;

fn check_spec(spec: &SykModelSpec) -> Result<()> {
    if spec.interaction_length() == 0 {
        return Err(Error::InvalidModel {
            label: spec.label(),
            reason: "interaction length 0 gives a constant, not an SYK model".into(),
        });
    }
    let terms = binomial(spec.size(), spec.interaction_length());
    if terms > DEFAULT_SUBSET_CAP {
        return Err(Error::cap("Hamiltonian terms", terms, DEFAULT_SUBSET_CAP));
    }
    Ok(())
}

/// `i^{⌊r/2⌋} / sqrt(C(n, r))`.
fn prefactor(spec: &SykModelSpec) -> Complex64 {
    let r = spec.interaction_length();
    i_pow((r / 2) as u32) / (binomial(spec.size(), r) as f64).sqrt()
}

/// Calls `f(coefficient, support)` for every term of one Hamiltonian draw,
/// with domain indices passed through `relabel`.
pub(crate) fn for_each_term(
    spec: &SykModelSpec,
    key: u64,
    sample: u64,
    relabel: impl Fn(u32) -> u32,
    mut f: impl FnMut(Complex64, Support),
) -> Result<()> {
    check_spec(spec)?;
    let c = prefactor(spec);
    let mut couplings = CouplingStream::new(key, sample, spec.label(), spec.law());
    let domain: Vec<u32> = spec.domain().iter().map(|&x| relabel(x)).collect();
    for subset in colex_subsets(spec.size(), spec.interaction_length()) {
        let j = couplings.next_coupling();
        f(c * j, Support::from_indices(subset.iter().map(|&p| domain[p])));
    }
    Ok(())
}

/// Symbolic form of draw `sample` of model `spec` under `seed`.
pub fn hamiltonian_sum(spec: &SykModelSpec, seed: u64, sample: u64) -> Result<MajoranaSum> {
    let mut h = MajoranaSum::with_capacity(binomial(spec.size(), spec.interaction_length()).min(1 << 20) as usize);
    for_each_term(spec, derive_key(seed, HAMILTONIAN_TAG), sample, |x| x, |c, s| {
        h.add_monomial(c, &MajoranaMonomial::new(s, 0));
    })?;
    Ok(h)
}

/// Dense form of draw `sample` on the fewest qubits that hold the domain.
pub fn sample_hamiltonian(spec: &SykModelSpec, seed: u64, sample: u64) -> Result<DenseOperator> {
    sample_hamiltonian_on(spec, qubits_for(spec.max_index()), seed, sample)
}

/// Dense form of draw `sample` on `n_qubits` qubits, so that several models
/// of one family act on the same space.
pub fn sample_hamiltonian_on(spec: &SykModelSpec, n_qubits: u32, seed: u64, sample: u64) -> Result<DenseOperator> {
    DenseLimits::default().check(n_qubits)?;
    if spec.max_index() > 2 * n_qubits {
        return Err(Error::Domain(format!(
            "label {} uses index {} beyond {n_qubits} qubits",
            spec.label(),
            spec.max_index()
        )));
    }
    check_spec(spec)?;
    let mut h = DenseOperator::zeros(n_qubits);
    for_each_term(spec, derive_key(seed, HAMILTONIAN_TAG), sample, |x| x, |c, s| {
        h.add_monomial(c, &MajoranaMonomial::new(s, 0));
    })?;
    debug_assert!(h.hermiticity_defect() <= 1e-10);
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syk::CouplingLaw;

    fn spec(n: u32, r: usize, law: CouplingLaw) -> SykModelSpec {
        SykModelSpec::new(1, (1..=n).collect(), r, law).unwrap()
    }

    #[test]
    fn all_ones_is_hermitian_and_traceless() {
        for r in 1..=4 {
            let h = sample_hamiltonian(&spec(4, r, CouplingLaw::AllOnes), 0, 0).unwrap();
            assert!(h.hermiticity_defect() <= 1e-10);
            assert!(h.normalized_trace().norm() < 1e-15);
        }
    }

    #[test]
    fn random_draws_are_hermitian_and_reproducible() {
        for (n, r) in [(5, 3), (6, 2), (7, 4), (8, 5)] {
            let s = spec(n, r, CouplingLaw::Gaussian);
            let a = sample_hamiltonian(&s, 17, 3).unwrap();
            assert!(a.hermiticity_defect() <= 1e-10, "n={n} r={r}");
            let b = sample_hamiltonian(&s, 17, 3).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, sample_hamiltonian(&s, 17, 4).unwrap());
        }
    }

    #[test]
    fn symbolic_matches_dense() {
        let s = spec(7, 3, CouplingLaw::Gaussian);
        let dense = sample_hamiltonian(&s, 5, 1).unwrap();
        let sym = hamiltonian_sum(&s, 5, 1).unwrap();
        let mut rebuilt = DenseOperator::zeros(dense.n_qubits());
        for (sup, c) in sym.iter() {
            rebuilt.add_monomial(*c, &MajoranaMonomial::new(sup.clone(), 0));
        }
        assert!(rebuilt.max_abs_diff(&dense) < 1e-14);
        // tr(H²) = Σ J² / C(n, r) for the same draw.
        let h2 = sym.trace_of_product(&sym);
        let dense_h2 = dense.mul(&dense).normalized_trace();
        assert!((h2 - dense_h2).norm() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            sample_hamiltonian(&spec(4, 0, CouplingLaw::Gaussian), 0, 0),
            Err(Error::InvalidModel { label: 1, .. })
        ));
        assert!(sample_hamiltonian(&spec(30, 2, CouplingLaw::Gaussian), 0, 0).unwrap_err().is_resource_cap());
        let big = SykModelSpec::new(1, (1..=28).collect(), 14, CouplingLaw::Gaussian).unwrap();
        assert!(hamiltonian_sum(&big, 0, 0).unwrap_err().is_resource_cap());
        assert!(sample_hamiltonian_on(&spec(6, 2, CouplingLaw::Gaussian), 2, 0, 0).is_err());
    }
}
