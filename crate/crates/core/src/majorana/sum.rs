use num_complex::Complex64;
use rustc_hash::FxHashMap;

use super::{i_pow, MajoranaMonomial, Support};

/// A finite complex linear combination of `Ψ_S` over supports `S`.
///
/// This is the symbolic stand-in for a dense operator: products and traces
/// only touch the nonzero coefficients, never a `2^n`-dimensional matrix.
#[derive(Debug, Clone, Default)]
pub struct MajoranaSum {
    terms: FxHashMap<Support, Complex64>,
}

impl MajoranaSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            terms: FxHashMap::with_capacity_and_hasher(n, Default::default()),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self += coef · m`
    pub fn add_monomial(&mut self, coef: Complex64, m: &MajoranaMonomial) {
        *self.terms.entry(m.support().clone()).or_default() += coef * i_pow(m.phase());
    }

    pub fn coefficient(&self, s: &Support) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Support, &Complex64)> {
        self.terms.iter()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::with_capacity(self.len() * rhs.len());
        for (a, ca) in &self.terms {
            let ma = MajoranaMonomial::new(a.clone(), 0);
            for (b, cb) in &rhs.terms {
                let prod = ma.multiply(&MajoranaMonomial::new(b.clone(), 0));
                out.add_monomial(ca * cb, &prod);
            }
        }
        out
    }

    /// Normalized trace: the identity coefficient.
    pub fn trace(&self) -> Complex64 {
        self.coefficient(&Support::empty())
    }

    /// `tr(self · rhs)` without forming the product.
    ///
    /// Only matching supports survive, and `Ψ_S Ψ_S = (-1)^{|S|(|S|-1)/2}`.
    pub fn trace_of_product(&self, rhs: &Self) -> Complex64 {
        let (small, large) = if self.len() <= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut acc = Complex64::default();
        for (s, c) in &small.terms {
            if let Some(d) = large.terms.get(s) {
                let r = s.len();
                let sign = if (r * r.saturating_sub(1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                acc += c * d * sign;
            }
        }
        acc
    }
}

/// Normalized trace of `ops[0] · ops[1] ⋯`, split in the middle so the
/// expensive expansion only runs on each half.
pub fn trace_of_sum_word(ops: &[&MajoranaSum]) -> Complex64 {
    match ops.len() {
        0 => Complex64::new(1.0, 0.0),
        1 => ops[0].trace(),
        n => {
            let half = n / 2;
            let fold = |xs: &[&MajoranaSum]| {
                let mut acc = xs[0].clone();
                for x in &xs[1..] {
                    acc = acc.mul(x);
                }
                acc
            };
            fold(&ops[..half]).trace_of_product(&fold(&ops[half..]))
        }
    }
}
