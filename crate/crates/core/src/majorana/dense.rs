//! Dense matrix realization of Majorana generators via Pauli tensor products.
//!
//! On `r` qubits the first `r` generators are `σ3 ⊗ ⋯ ⊗ σ3 ⊗ σ1 ⊗ I ⊗ ⋯`
//! and the next `r` swap `σ1` for `σ2`. Qubit 0 is the leftmost tensor
//! factor, i.e. the most significant bit of a basis-state index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{i_pow, MajoranaMonomial};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_QUBITS: u32 = 14;

/// Size limits for the dense backend.
#[derive(Debug, Clone, Copy)]
pub struct DenseLimits {
    pub max_qubits: u32,
}

impl Default for DenseLimits {
    fn default() -> Self {
        Self {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl DenseLimits {
    pub fn check(&self, n_qubits: u32) -> Result<()> {
        if n_qubits > self.max_qubits {
            return Err(Error::cap("dense qubit count", n_qubits, self.max_qubits));
        }
        Ok(())
    }
}

/// Qubits needed to host generators `ψ_1 … ψ_max_index`.
pub fn qubits_for(max_index: u32) -> u32 {
    max_index.div_ceil(2)
}

/// A matrix with exactly one nonzero per column: column `c` maps to
/// `value[c] · |target[c]⟩`. Products of Majorana generators stay in this form.
#[derive(Debug, Clone)]
struct MonomialMatrix {
    target: Vec<usize>,
    value: Vec<Complex64>,
}

impl MonomialMatrix {
    fn identity(dim: usize) -> Self {
        Self {
            target: (0..dim).collect(),
            value: vec![Complex64::new(1.0, 0.0); dim],
        }
    }

    fn generator(index: u32, n_qubits: u32) -> Self {
        let dim = 1usize << n_qubits;
        let slot = (index - 1) % n_qubits;
        let second_half = index > n_qubits;
        let bit = |q: u32| 1usize << (n_qubits - 1 - q);
        let string_mask: usize = (0..slot).map(bit).sum();
        let flip = bit(slot);
        let mut target = Vec::with_capacity(dim);
        let mut value = Vec::with_capacity(dim);
        for col in 0..dim {
            let sign = if (col & string_mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            let local = if !second_half {
                Complex64::new(1.0, 0.0)
            } else if col & flip == 0 {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(0.0, -1.0)
            };
            target.push(col ^ flip);
            value.push(local * sign);
        }
        Self { target, value }
    }

    /// Matrix product `self · rhs`.
    fn times(&self, rhs: &Self) -> Self {
        let (target, value) = rhs
            .target
            .iter()
            .zip(&rhs.value)
            .map(|(&mid, &v)| (self.target[mid], self.value[mid] * v))
            .unzip();
        Self { target, value }
    }

    fn for_monomial(m: &MajoranaMonomial, n_qubits: u32) -> Self {
        let dim = 1usize << n_qubits;
        let mut acc = Self::identity(dim);
        for k in m.support().iter() {
            acc = acc.times(&Self::generator(k, n_qubits));
        }
        let phase = i_pow(m.phase());
        acc.value.iter_mut().for_each(|v| *v *= phase);
        acc
    }
}

/// A `2^n × 2^n` complex matrix acting on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n_qubits: u32,
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn zeros(n_qubits: u32) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(n_qubits: u32) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `self += coef · m`, in `O(dim)`.
    pub fn add_monomial(&mut self, coef: Complex64, m: &MajoranaMonomial) {
        let mm = MonomialMatrix::for_monomial(m, self.n_qubits);
        for (col, (&row, &v)) in mm.target.iter().zip(&mm.value).enumerate() {
            self.matrix[(row, col)] += coef * v;
        }
    }

    /// `Tr / 2^n`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.matrix.trace() / self.dim() as f64
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |H - H†|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n_qubits, rhs.n_qubits, "operand qubit counts differ");
        Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// Dense matrix of a monomial on `n_qubits` qubits, with the default cap.
pub fn dense_monomial(m: &MajoranaMonomial, n_qubits: u32) -> Result<DenseOperator> {
    dense_monomial_with(m, n_qubits, &DenseLimits::default())
}

pub fn dense_monomial_with(
    m: &MajoranaMonomial,
    n_qubits: u32,
    limits: &DenseLimits,
) -> Result<DenseOperator> {
    limits.check(n_qubits)?;
    if let Some(max) = m.support().max_index() {
        if max > 2 * n_qubits {
            return Err(Error::Domain(format!(
                "index {max} needs more than {n_qubits} qubits"
            )));
        }
    }
    let mut op = DenseOperator::zeros(n_qubits);
    op.add_monomial(Complex64::new(1.0, 0.0), m);
    Ok(op)
}

/// Dense product of a word of monomials, then its normalized trace.
pub fn dense_trace_of_word(ms: &[MajoranaMonomial], n_qubits: u32) -> Result<Complex64> {
    let mut acc = DenseOperator::identity(n_qubits);
    for m in ms {
        acc = acc.mul(&dense_monomial(m, n_qubits)?);
    }
    Ok(acc.normalized_trace())
}
