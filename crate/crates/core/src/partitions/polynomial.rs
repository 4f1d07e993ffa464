use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

use super::{qgaussian_moment, Label, QMatrix, Word};

pub const MAX_POLYNOMIAL_DEGREE: usize = 8;

/// Real polynomial in one variable, `coeffs[k]` multiplying `x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

/// Moment evaluator that memoizes plain-word moments for one `Q`.
#[derive(Debug, Clone)]
pub struct MomentCache {
    q: QMatrix,
    memo: FxHashMap<Vec<Label>, f64>,
}

impl MomentCache {
    pub fn new(q: QMatrix) -> Self {
        Self {
            q,
            memo: FxHashMap::default(),
        }
    }

    pub fn q(&self) -> &QMatrix {
        &self.q
    }

    pub fn moment(&mut self, letters: &[Label]) -> Result<f64> {
        if letters.len() % 2 == 1 {
            for &l in letters {
                self.q.index_of(l)?;
            }
            return Ok(0.0);
        }
        if let Some(&v) = self.memo.get(letters) {
            return Ok(v);
        }
        let v = qgaussian_moment(&Word::from(letters), &self.q)?;
        self.memo.insert(letters.to_vec(), v);
        Ok(v)
    }

    /// `τ(p_1(s_{l_1}) ⋯ p_k(s_{l_k}))` by multilinear expansion.
    pub fn polynomial_word_moment(&mut self, factors: &[(Label, Polynomial)]) -> Result<f64> {
        for (l, p) in factors {
            self.q.index_of(*l)?;
            if p.degree() > MAX_POLYNOMIAL_DEGREE {
                return Err(Error::cap(
                    "polynomial degree",
                    p.degree() as u64,
                    MAX_POLYNOMIAL_DEGREE as u64,
                ));
            }
        }
        let mut letters = Vec::new();
        self.expand(factors, &mut letters, 1.0)
    }

    fn expand(&mut self, factors: &[(Label, Polynomial)], letters: &mut Vec<Label>, coef: f64) -> Result<f64> {
        let Some(((label, p), rest)) = factors.split_first() else {
            return Ok(coef * self.moment(letters)?);
        };
        let mut total = 0.0;
        for (k, &c) in p.coeffs().iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            letters.extend(std::iter::repeat_n(*label, k));
            total += self.expand(rest, letters, coef * c)?;
            letters.truncate(letters.len() - k);
        }
        Ok(total)
    }
}

/// One-shot form of [`MomentCache::polynomial_word_moment`].
pub fn polynomial_word_moment(factors: &[(Label, Polynomial)], q: &QMatrix) -> Result<f64> {
    MomentCache::new(q.clone()).polynomial_word_moment(factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let q = QMatrix::new(vec![1, 2], vec![0.5, 0.0, 0.0, -0.2]).unwrap();
        let x = Polynomial::new(vec![0.0, 1.0]);
        let centered_sq = Polynomial::new(vec![-1.0, 0.0, 1.0]);
        assert_eq!(polynomial_word_moment(&[(1, x)], &q).unwrap(), 0.0);
        assert_eq!(polynomial_word_moment(&[(1, centered_sq.clone())], &q).unwrap(), 0.0);
        let v = polynomial_word_moment(&[(1, centered_sq.clone()), (2, centered_sq)], &q).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn caps_and_labels() {
        let q = QMatrix::uniform(vec![1], 0.0).unwrap();
        let err = polynomial_word_moment(&[(1, Polynomial::monomial(9))], &q).unwrap_err();
        assert!(err.is_resource_cap());
        assert_eq!(
            polynomial_word_moment(&[(4, Polynomial::monomial(1))], &q),
            Err(Error::UnknownLabel(4))
        );
        assert_eq!(Polynomial::new(vec![1.0, 0.0, 0.0]).degree(), 0);
    }

    #[test]
    fn semicircle_fourth_moment() {
        // q = 0 on one letter: τ(s⁴) = 2, so τ((s²−1)²) = 2 − 2 + 1 = 1.
        let q = QMatrix::uniform(vec![1], 0.0).unwrap();
        let p = Polynomial::new(vec![-1.0, 0.0, 1.0]);
        let v = polynomial_word_moment(&[(1, p.clone()), (1, p)], &q).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }
}
