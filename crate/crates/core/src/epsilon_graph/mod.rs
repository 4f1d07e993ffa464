//! Overlap families whose SYK limits are ε-free, and formula-level checks of
//! ε-freeness for mixed q-Gaussian systems with `q_{i,j} ∈ {0, 1}`.

use crate::error::{Error, Result};
use crate::partitions::{Label, MomentCache, Polynomial, QMatrix, Word};
use crate::syk::{CouplingLaw, SykFamily, SykModelSpec};

/// Longest words accepted by [`admissible_words`] and the checks.
pub const MAX_WORD_LEN: usize = 8;

/// Tolerance for the vanishing and swap-invariance checks.
pub const CHECK_TOLERANCE: f64 = 1e-10;

/// Simple graph on vertices `1..=d`; `ε_{i,j} = 1` marks commuting labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    d: usize,
    adjacency: Vec<bool>,
}

impl Graph {
    pub fn empty(d: usize) -> Self {
        Self {
            d,
            adjacency: vec![false; d * d],
        }
    }

    pub fn complete(d: usize) -> Self {
        let mut g = Self::empty(d);
        for i in 1..=d {
            for j in i + 1..=d {
                g.set(i, j, true);
            }
        }
        g
    }

    /// Path `1 − 2 − ⋯ − d`.
    pub fn path(d: usize) -> Self {
        let mut g = Self::empty(d);
        for i in 1..d {
            g.set(i, i + 1, true);
        }
        g
    }

    /// Graph with the given 1-based edges.
    pub fn from_edges(d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(d);
        for &(i, j) in edges {
            if i == j || i == 0 || j == 0 || i > d || j > d {
                return Err(Error::Domain(format!("edge ({i}, {j}) is not between distinct vertices of 1..={d}")));
            }
            g.set(i, j, true);
        }
        Ok(g)
    }

    /// Every labeled graph on `d` vertices.
    pub fn all(d: usize) -> Vec<Graph> {
        let pairs: Vec<(usize, usize)> = (1..=d).flat_map(|i| (i + 1..=d).map(move |j| (i, j))).collect();
        (0u64..1 << pairs.len())
            .map(|mask| {
                let mut g = Self::empty(d);
                for (b, &(i, j)) in pairs.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        g.set(i, j, true);
                    }
                }
                g
            })
            .collect()
    }

    fn set(&mut self, i: usize, j: usize, v: bool) {
        self.adjacency[(i - 1) * self.d + (j - 1)] = v;
        self.adjacency[(j - 1) * self.d + (i - 1)] = v;
    }

    pub fn vertices(&self) -> usize {
        self.d
    }

    /// `ε_{i,j}` for 1-based vertices; the diagonal is 0.
    pub fn epsilon(&self, i: usize, j: usize) -> bool {
        self.adjacency[(i - 1) * self.d + (j - 1)]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (1..=self.d)
            .flat_map(|i| (i + 1..=self.d).map(move |j| (i, j)))
            .filter(|&(i, j)| self.epsilon(i, j))
            .collect()
    }

    /// `Q` with `q_{i,j} = ε_{i,j}` off the diagonal and `q_diag` on it.
    pub fn q_matrix(&self, q_diag: &[f64]) -> Result<QMatrix> {
        if q_diag.len() != self.d {
            return Err(Error::Domain(format!("{} diagonal values for {} vertices", q_diag.len(), self.d)));
        }
        let mut entries = vec![0.0; self.d * self.d];
        for i in 0..self.d {
            for j in 0..self.d {
                entries[i * self.d + j] = if i == j {
                    q_diag[i]
                } else if self.adjacency[i * self.d + j] {
                    1.0
                } else {
                    0.0
                };
            }
        }
        QMatrix::new((1..=self.d as Label).collect(), entries)
    }
}

/// `r(n) = 2⌊n^{2/3}/4⌋`, computed in integers as `2·max{t : 64t³ ≤ n²}`.
pub fn interaction_length_for(n: usize) -> usize {
    let n2 = (n as u128) * (n as u128);
    let mut t = ((n as f64).powf(2.0 / 3.0) / 4.0) as u128;
    while 64 * (t + 1).pow(3) <= n2 {
        t += 1;
    }
    while t > 0 && 64 * t.pow(3) > n2 {
        t -= 1;
    }
    2 * t as usize
}

/// Overlap family for graph `g` at scale `m` with Gaussian couplings.
pub fn build_overlap_sets(g: &Graph, m: usize) -> Result<SykFamily> {
    build_overlap_sets_with(g, m, CouplingLaw::Gaussian)
}

/// `n = d²m` and blocks `B_{i,j} = {(i−1)dm + (j−1)m + k : 1 ≤ k ≤ m}`.
/// Model `i` owns `B_{i,j} ∪ B_{j,i}` for every `j` with target `q_{i,j} = 0`
/// (non-adjacent `j`, and `j = i`), padded to `n` with the first free indices
/// of `{in + 1, …, (i+1)n}`.
///
/// The declared limits are `λ = 0` on edges and `λ = ∞` elsewhere (including
/// the diagonal), giving `q_{i,j} = ε_{i,j}` and `q_{i,i} = 0`.
pub fn build_overlap_sets_with(g: &Graph, m: usize, law: CouplingLaw) -> Result<SykFamily> {
    let d = g.vertices();
    if d == 0 || m == 0 {
        return Err(Error::Domain("need at least one vertex and m ≥ 1".into()));
    }
    let n = d * d * m;
    if (d + 1) * n > u32::MAX as usize {
        return Err(Error::cap("overlap-set index range", ((d + 1) * n) as u64, u32::MAX as u64));
    }
    let block = |i: usize, j: usize| {
        let start = ((i - 1) * d * m + (j - 1) * m) as u32;
        (1..=m as u32).map(move |k| start + k)
    };
    let r = interaction_length_for(n);
    let mut specs = Vec::with_capacity(d);
    for i in 1..=d {
        let mut domain: Vec<u32> = Vec::with_capacity(n);
        for j in 1..=d {
            if !g.epsilon(i, j) {
                domain.extend(block(i, j));
                if j != i {
                    domain.extend(block(j, i));
                }
            }
        }
        let pad = n - domain.len();
        let base = (i * n) as u32;
        domain.extend((1..=pad as u32).map(|k| base + k));
        specs.push(SykModelSpec::new(i as Label, domain, r, law)?);
    }
    let mut family = SykFamily::new(specs)?;
    for i in 1..=d {
        for j in i..=d {
            let lambda = if i != j && g.epsilon(i, j) { 0.0 } else { f64::INFINITY };
            family.declare_lambda(i as Label, j as Label, lambda)?;
        }
    }
    Ok(family)
}

/// Whether every repeated letter is separated by a non-commuting letter:
/// for `k < l` with `w_k = w_l` some `k < p < l` has `ε_{w_k, w_p} = 0`.
pub fn is_admissible(g: &Graph, w: &[Label]) -> bool {
    (0..w.len()).all(|k| {
        (k + 1..w.len())
            .filter(|&l| w[l] == w[k])
            .all(|l| (k + 1..l).any(|p| !g.epsilon(w[k] as usize, w[p] as usize)))
    })
}

/// All nonempty words over `1..=d` of length at most `max_len`.
fn all_words(d: usize, max_len: usize) -> Vec<Vec<Label>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Label>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * d);
        for w in &layer {
            for l in 1..=d as Label {
                let mut nw = w.clone();
                nw.push(l);
                next.push(nw);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Admissible words of length `1..=max_len`, shortest first.
pub fn admissible_words(g: &Graph, max_len: usize) -> Result<Vec<Word>> {
    if max_len > MAX_WORD_LEN {
        return Err(Error::cap("admissible word length", max_len as u64, MAX_WORD_LEN as u64));
    }
    Ok(all_words(g.vertices(), max_len)
        .into_iter()
        .filter(|w| is_admissible(g, w))
        .map(Word::new)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Swapping adjacent commuting letters changed a moment.
    Commutation,
    /// A product of centered polynomials along an admissible word is nonzero.
    CenteredVanishing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckFailure {
    pub kind: CheckKind,
    pub word: Word,
    /// Degrees of the centered polynomials (0 for commutation failures).
    pub degrees: Vec<usize>,
    /// Offending moment difference or value.
    pub value: f64,
}

/// Outcome of [`check_epsilon_freeness`]. Only the first
/// [`EpsilonReport::MAX_RECORDED`] failures are kept verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonReport {
    pub commutation_checks: usize,
    pub centered_checks: usize,
    pub failure_count: usize,
    pub failures: Vec<CheckFailure>,
}

impl EpsilonReport {
    pub const MAX_RECORDED: usize = 16;

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    fn record(&mut self, f: CheckFailure) {
        self.failure_count += 1;
        if self.failures.len() < Self::MAX_RECORDED {
            self.failures.push(f);
        }
    }
}

/// Centered test polynomials for a letter with `q_{k,k} = q`:
/// `x`, `x² − 1` and, for patterns no longer than four letters,
/// `x³ − (2 + q)x`.
pub fn centered_basis(q_diag: f64, with_cubic: bool) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::new(vec![0.0, 1.0]), Polynomial::new(vec![-1.0, 0.0, 1.0])];
    if with_cubic {
        out.push(Polynomial::new(vec![0.0, -(2.0 + q_diag), 0.0, 1.0]));
    }
    out
}

/// Longest pattern that still uses the cubic test polynomial.
pub const CUBIC_PATTERN_LEN: usize = 4;

/// Checks ε-freeness of the `Q`-Gaussian system with `q_{i,j} = ε_{i,j}` and
/// diagonal `q_diag`.
pub fn check_epsilon_freeness(g: &Graph, q_diag: &[f64], max_len: usize) -> Result<EpsilonReport> {
    check_epsilon_freeness_with_q(g, &g.q_matrix(q_diag)?, max_len)
}

/// Same checks against an arbitrary `Q` on labels `1..=d`; the graph only
/// decides which swaps and patterns are tested.
///
/// (i) every moment is unchanged when adjacent letters with `ε = 1` are
/// swapped; (ii) along every admissible pattern, every product of centered
/// test polynomials has zero moment. The second check covers a finite family
/// of centered elements only.
pub fn check_epsilon_freeness_with_q(g: &Graph, q: &QMatrix, max_len: usize) -> Result<EpsilonReport> {
    if max_len > MAX_WORD_LEN {
        return Err(Error::cap("check word length", max_len as u64, MAX_WORD_LEN as u64));
    }
    let d = g.vertices();
    for l in 1..=d as Label {
        q.index_of(l)?;
    }
    let mut cache = MomentCache::new(q.clone());
    let mut report = EpsilonReport {
        commutation_checks: 0,
        centered_checks: 0,
        failure_count: 0,
        failures: Vec::new(),
    };

    for w in all_words(d, max_len) {
        if w.len() % 2 == 1 {
            continue;
        }
        let base = cache.moment(&w)?;
        for p in 0..w.len() - 1 {
            let (a, b) = (w[p] as usize, w[p + 1] as usize);
            if a == b || !g.epsilon(a, b) {
                continue;
            }
            let mut swapped = w.clone();
            swapped.swap(p, p + 1);
            let diff = cache.moment(&swapped)? - base;
            report.commutation_checks += 1;
            if diff.abs() > CHECK_TOLERANCE {
                report.record(CheckFailure {
                    kind: CheckKind::Commutation,
                    word: Word::new(w.clone()),
                    degrees: Vec::new(),
                    value: diff,
                });
            }
        }
    }

    let bases: Vec<(Vec<Polynomial>, Vec<Polynomial>)> = (0..d)
        .map(|k| (centered_basis(q.at(k, k), false), centered_basis(q.at(k, k), true)))
        .collect();
    for w in admissible_words(g, max_len)? {
        let letters = w.letters();
        let per_letter: Vec<&[Polynomial]> = letters
            .iter()
            .map(|&l| {
                let (short, long) = &bases[q.index_of(l).expect("checked above")];
                if letters.len() <= CUBIC_PATTERN_LEN {
                    long.as_slice()
                } else {
                    short.as_slice()
                }
            })
            .collect();
        let mut choice = vec![0usize; letters.len()];
        loop {
            let factors: Vec<(Label, Polynomial)> = letters
                .iter()
                .zip(&choice)
                .zip(&per_letter)
                .map(|((&l, &c), basis)| (l, basis[c].clone()))
                .collect();
            let v = cache.polynomial_word_moment(&factors)?;
            report.centered_checks += 1;
            if v.abs() > CHECK_TOLERANCE {
                report.record(CheckFailure {
                    kind: CheckKind::CenteredVanishing,
                    word: w.clone(),
                    degrees: factors.iter().map(|(_, p)| p.degree()).collect(),
                    value: v,
                });
            }
            // Odometer over the basis choices.
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < per_letter[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interaction_length_rule() {
        for n in 1..5000usize {
            let t = interaction_length_for(n) / 2;
            assert!(64 * t.pow(3) <= n * n && 64 * (t + 1).pow(3) > n * n, "n = {n}");
        }
        assert_eq!(interaction_length_for(7), 0);
        assert_eq!(interaction_length_for(8), 2);
        assert_eq!(interaction_length_for(16), 2);
        assert_eq!(interaction_length_for(4000), 2 * 62);
    }

    #[test]
    fn construction_examples() {
        let f = build_overlap_sets(&Graph::complete(3), 4).unwrap();
        for i in 1..=3 {
            for j in i + 1..=3 {
                assert_eq!(f.overlap(i, j).unwrap(), 0);
            }
        }
        let f = build_overlap_sets(&Graph::empty(2), 5).unwrap();
        assert_eq!(f.overlap(1, 2).unwrap(), 10);
        for s in f.specs() {
            assert_eq!(s.size(), 20);
            assert_eq!(s.interaction_length() % 2, 0);
        }
        let q = f.q_matrix().unwrap();
        assert_eq!((q.get(1, 2).unwrap(), q.get(1, 1).unwrap()), (0.0, 0.0));
    }

    #[test]
    fn padding_is_disjoint_from_blocks() {
        let g = Graph::path(4);
        let m = 3;
        let n = 16 * m as u32;
        let f = build_overlap_sets(&g, m).unwrap();
        for s in f.specs() {
            let k = s.label();
            for &x in s.domain() {
                assert!(x <= n || (k * n < x && x <= (k + 1) * n));
            }
        }
    }

    #[test]
    fn admissibility_examples() {
        let free = Graph::empty(2);
        let commuting = Graph::complete(2);
        assert!(is_admissible(&free, &[1, 2, 1]));
        assert!(!is_admissible(&free, &[1, 1]));
        assert!(!is_admissible(&commuting, &[1, 2, 1]));
        assert!(is_admissible(&commuting, &[1, 2]));
        let words = admissible_words(&free, 3).unwrap();
        assert_eq!(words.len(), 2 + 2 + 2);
        assert!(admissible_words(&free, 9).unwrap_err().is_resource_cap());
    }

    #[test]
    fn examples_pass_and_mutation_fails() {
        let r = check_epsilon_freeness(&Graph::complete(3), &[0.4, -0.7, 1.0], 4).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let r = check_epsilon_freeness(&Graph::empty(3), &[0.0; 3], 4).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let g = Graph::path(3);
        let r = check_epsilon_freeness(&g, &[0.0; 3], 4).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.commutation_checks > 0 && r.centered_checks > 0);
        let mut q = g.q_matrix(&[0.0; 3]).unwrap();
        q.set(1, 2, 0.5).unwrap();
        let r = check_epsilon_freeness_with_q(&g, &q, 4).unwrap();
        assert!(!r.passed());
    }
}
