use std::fmt;

use num_complex::Complex64;

use super::Support;

/// `i^phase · ψ_{i1} ψ_{i2} ⋯ ψ_{ir}` with `i1 < i2 < ⋯ < ir`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MajoranaMonomial {
    support: Support,
    phase: u8,
}

/// `i^k` for `k` taken mod 4.
pub fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl MajoranaMonomial {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(support: Support, phase: u32) -> Self {
        Self {
            support,
            phase: (phase % 4) as u8,
        }
    }

    /// `Ψ_R` for the increasing tuple formed by `indices`.
    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        Self::new(Support::from_indices(indices), 0)
    }

    /// The ordered product `ψ_{w1} ψ_{w2} ⋯` for an arbitrary index sequence,
    /// with repeats and any order allowed.
    pub fn from_word(word: &[u32]) -> Self {
        word.iter().fold(Self::identity(), |acc, &i| {
            acc.multiply(&Self::from_indices([i]))
        })
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn phase(&self) -> u32 {
        self.phase as u32
    }

    pub fn degree(&self) -> usize {
        self.support.len()
    }

    pub fn with_phase(mut self, extra: u32) -> Self {
        self.phase = ((self.phase as u32 + extra) % 4) as u8;
        self
    }

    /// Product `self · other`, reduced to increasing order.
    ///
    /// The support is the symmetric difference; each transposition while
    /// merging contributes `-1` and each `ψ_k ψ_k = 1` cancels.
    pub fn multiply(&self, other: &Self) -> Self {
        let inv = self.support.merge_inversion_parity(&other.support);
        let phase = self.phase as u32 + other.phase as u32 + 2 * inv;
        Self::new(self.support.symmetric_difference(&other.support), phase)
    }

    /// Hermitian adjoint. Reversing `r` anticommuting generators costs
    /// `(-1)^{r(r-1)/2}`.
    pub fn adjoint(&self) -> Self {
        let r = self.degree() as u32;
        let reversal = 2 * ((r * r.saturating_sub(1) / 2) % 2);
        Self::new(self.support.clone(), 4 - self.phase as u32 + reversal)
    }

    /// Normalized trace: `i^phase` on the identity, zero otherwise.
    pub fn normalized_trace(&self) -> Complex64 {
        if self.support.is_empty() {
            i_pow(self.phase as u32)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Sign relating `AB` to `BA`: `(-1)^{|A||B| + |A∩B|}`.
    pub fn commutation_sign(&self, other: &Self) -> i32 {
        let e = self.degree() * other.degree() + self.support.intersection_len(&other.support);
        if e.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Folds a word of monomials by multiplication and takes the normalized trace.
pub fn trace_of_word(ms: &[MajoranaMonomial]) -> Complex64 {
    ms.iter()
        .fold(MajoranaMonomial::identity(), |acc, m| acc.multiply(m))
        .normalized_trace()
}

impl fmt::Debug for MajoranaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = ["", "i·", "-", "-i·"][self.phase as usize];
        write!(f, "{unit}Ψ{:?}", self.support)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(ix: &[u32]) -> MajoranaMonomial {
        MajoranaMonomial::from_indices(ix.iter().copied())
    }

    #[test]
    fn adjacent_cancellation() {
        assert_eq!(m(&[1, 2]).multiply(&m(&[2, 3])), m(&[1, 3]));
        assert_eq!(m(&[1]).multiply(&m(&[1])), MajoranaMonomial::identity());
    }

    #[test]
    fn swap_costs_a_sign() {
        // ψ2 ψ1 = -ψ1 ψ2
        assert_eq!(m(&[2]).multiply(&m(&[1])), m(&[1, 2]).with_phase(2));
        // ψ1ψ2 ψ1ψ2 = -ψ1ψ1ψ2ψ2 = -1
        let sq = m(&[1, 2]).multiply(&m(&[1, 2]));
        assert_eq!(sq, MajoranaMonomial::identity().with_phase(2));
    }

    #[test]
    fn traces() {
        assert_eq!(MajoranaMonomial::identity().normalized_trace(), Complex64::new(1.0, 0.0));
        assert_eq!(m(&[1, 2]).normalized_trace(), Complex64::new(0.0, 0.0));
        for r in 1..=6u32 {
            let psi = MajoranaMonomial::from_indices(1..=r);
            let t = psi.multiply(&psi).normalized_trace() * i_pow(2 * (r / 2));
            assert_eq!(t, Complex64::new(1.0, 0.0), "r = {r}");
        }
    }

    #[test]
    fn word_traces() {
        let t = trace_of_word(&[m(&[1, 2]), m(&[1, 2])]);
        assert_eq!(t.norm(), 1.0);
        assert_eq!(trace_of_word(&[m(&[1]), m(&[2]), m(&[3])]).norm(), 0.0);
    }

    #[test]
    fn adjoint_inverts() {
        for r in 0..=7u32 {
            for p in 0..4 {
                let a = MajoranaMonomial::from_indices((1..=r).map(|k| 2 * k)).with_phase(p);
                assert_eq!(
                    a.multiply(&a.adjoint()).normalized_trace(),
                    Complex64::new(1.0, 0.0)
                );
            }
        }
    }

    #[test]
    fn from_word_reorders() {
        assert_eq!(MajoranaMonomial::from_word(&[3, 1, 2]), m(&[1, 2, 3]));
        assert_eq!(MajoranaMonomial::from_word(&[2, 1]), m(&[1, 2]).with_phase(2));
    }
}
