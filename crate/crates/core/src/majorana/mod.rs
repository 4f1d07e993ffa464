//! Majorana monomials: exact symbolic algebra and a dense Pauli realization.
//!
//! A monomial `i^p Ψ_R` is stored as a support bitset plus a phase exponent,
//! so products and traces are exact. The dense backend builds the same
//! operators as explicit matrices and is used as an independent check.

mod dense;
mod monomial;
mod sum;
mod support;

pub use dense::{
    dense_monomial, dense_monomial_with, dense_trace_of_word, qubits_for, DenseLimits,
    DenseOperator, DEFAULT_MAX_QUBITS,
};
pub use monomial::{i_pow, trace_of_word, MajoranaMonomial};
pub use sum::{trace_of_sum_word, MajoranaSum};
pub use support::Support;
