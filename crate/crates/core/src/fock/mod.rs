//! Algebraic full Fock space with the Q-twisted pre-inner product.
//!
//! Vectors live in the formal span of basis words; the pre-inner product can
//! be degenerate (some `q = ±1`), so equality of vectors in the quotient must
//! be tested through inner products, not coefficients.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::partitions::{Label, QMatrix, Word};

/// Default truncation depth.
pub const DEFAULT_DEPTH: usize = 8;

/// Finite linear combination of basis tensors `e_{j1} ⊗ ⋯ ⊗ e_{jk}`; the
/// empty word is the vacuum `Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    terms: BTreeMap<Vec<Label>, f64>,
    depth: usize,
    truncated: bool,
}

impl FockVector {
    pub fn zero(depth: usize) -> Self {
        Self {
            terms: BTreeMap::new(),
            depth,
            truncated: false,
        }
    }

    pub fn vacuum(depth: usize) -> Self {
        Self::basis(Vec::new(), depth)
    }

    /// A single basis tensor. Words longer than `depth` give the zero vector
    /// with the truncation flag set.
    pub fn basis(word: Vec<Label>, depth: usize) -> Self {
        let mut v = Self::zero(depth);
        v.add_term(word, 1.0);
        v
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Vec<Label>, f64)>, depth: usize) -> Self {
        let mut v = Self::zero(depth);
        for (w, c) in terms {
            v.add_term(w, c);
        }
        v
    }

    /// Adds `c · e_word`, dropping (and flagging) words beyond the depth.
    pub fn add_term(&mut self, word: Vec<Label>, c: f64) {
        if word.len() > self.depth {
            self.truncated = true;
            return;
        }
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(word);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = *e.get() + c;
                if s == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &FockVector, c: f64) {
        self.truncated |= other.truncated;
        for (w, &v) in &other.terms {
            self.add_term(w.clone(), c * v);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Label>, f64> {
        &self.terms
    }

    pub fn coefficient(&self, word: &[Label]) -> f64 {
        self.terms.get(word).copied().unwrap_or(0.0)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Whether some operation dropped a term that would exceed the depth.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        let mut m: f64 = 0.0;
        for (w, &c) in &self.terms {
            m = m.max((c - other.coefficient(w)).abs());
        }
        for (w, &c) in &other.terms {
            if !self.terms.contains_key(w) {
                m = m.max(c.abs());
            }
        }
        m
    }
}

/// `l_i`: prepends `i` to every term.
pub fn apply_creation(i: Label, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero(v.depth);
    out.truncated = v.truncated;
    for (w, &c) in &v.terms {
        let mut nw = Vec::with_capacity(w.len() + 1);
        nw.push(i);
        nw.extend_from_slice(w);
        out.add_term(nw, c);
    }
    out
}

/// `l_i*`: removes an occurrence of `i` at position `k`, weighted by
/// `q_{i,j_1} ⋯ q_{i,j_{k-1}}`.
pub fn apply_annihilation(i: Label, v: &FockVector, q: &QMatrix) -> Result<FockVector> {
    let ii = q.index_of(i)?;
    let mut out = FockVector::zero(v.depth);
    out.truncated = v.truncated;
    for (w, &c) in &v.terms {
        annihilate_into(ii, w, c, q, &mut out)?;
    }
    Ok(out)
}

fn annihilate_into(ii: usize, w: &[Label], c: f64, q: &QMatrix, out: &mut FockVector) -> Result<()> {
    let i = q.labels()[ii];
    let mut weight = c;
    for (k, &j) in w.iter().enumerate() {
        if j == i {
            let mut nw = Vec::with_capacity(w.len() - 1);
            nw.extend_from_slice(&w[..k]);
            nw.extend_from_slice(&w[k + 1..]);
            out.add_term(nw, weight);
        }
        weight *= q.at(ii, q.index_of(j)?);
        if weight == 0.0 {
            break;
        }
    }
    Ok(())
}

/// `⟨u, v⟩_Q`, bilinear extension of the recursive basis product.
pub fn twisted_inner_product(u: &FockVector, v: &FockVector, q: &QMatrix) -> Result<f64> {
    let mut total = 0.0;
    for (a, &ca) in &u.terms {
        for (b, &cb) in &v.terms {
            if a.len() == b.len() {
                total += ca * cb * basis_inner_product(a, b, q)?;
            }
        }
    }
    Ok(total)
}

/// `⟨e_a, e_b⟩_Q = ⟨e_{a[1..]}, l_{a[0]}* e_b⟩_Q`.
pub fn basis_inner_product(a: &[Label], b: &[Label], q: &QMatrix) -> Result<f64> {
    if a.len() != b.len() {
        return Ok(0.0);
    }
    let Some((&first, rest)) = a.split_first() else {
        return Ok(1.0);
    };
    let fi = q.index_of(first)?;
    let mut total = 0.0;
    let mut weight = 1.0;
    for (k, &j) in b.iter().enumerate() {
        if j == first {
            let mut nb = Vec::with_capacity(b.len() - 1);
            nb.extend_from_slice(&b[..k]);
            nb.extend_from_slice(&b[k + 1..]);
            total += weight * basis_inner_product(rest, &nb, q)?;
        }
        weight *= q.at(fi, q.index_of(j)?);
        if weight == 0.0 {
            break;
        }
    }
    Ok(total)
}

/// `⟨s_{w_1} ⋯ s_{w_d} Ω, Ω⟩_Q` by direct operator application, right to left.
///
/// Terms longer than the number of operators still to be applied can never
/// return to `Ω` and are dropped early, so intermediate vectors never exceed
/// length `d/2`.
pub fn vacuum_moment(w: &Word, q: &QMatrix) -> Result<f64> {
    vacuum_moment_with_depth(w, q, DEFAULT_DEPTH)
}

pub fn vacuum_moment_with_depth(w: &Word, q: &QMatrix, depth: usize) -> Result<f64> {
    if w.len() > 2 * depth {
        return Err(Error::cap("word length", w.len() as u64, 2 * depth as u64));
    }
    for &l in w.letters() {
        q.index_of(l)?;
    }
    let mut v = FockVector::vacuum(depth);
    for (done, &l) in w.letters().iter().rev().enumerate() {
        let remaining = w.len() - done - 1;
        let mut next = apply_creation(l, &v);
        next.add_scaled(&apply_annihilation(l, &v, q)?, 1.0);
        next.terms.retain(|t, _| t.len() <= remaining);
        v = next;
    }
    Ok(v.coefficient(&[]))
}
