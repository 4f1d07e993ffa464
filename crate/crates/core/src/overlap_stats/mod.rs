//! Intersections of independent uniform random subsets drawn from overlapping
//! domains: sign expectations `E[(−1)^{Σ_E |R_i ∩ R_j|}]`, the alternating
//! hypergeometric sum `F`, and binomial moments of the total intersection.

mod hypergeom;

pub use hypergeom::{
    exact_pair_sign_expectation, exact_pair_sign_expectation_rational, f_bound, f_exact, f_value,
    hypergeometric_pmf, hypergeometric_pmf_exact, EXACT_LIMIT,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::estimate::{Method, MomentEstimate};
use crate::rng::{derive_key, map_samples, sample_stream};

/// Domain element; usually positive, but any value is accepted.
pub type Index = u32;

/// Largest binomial order accepted by [`falling_factorial_moment_mc`].
pub const MAX_FACTORIAL_ORDER: usize = 12;

/// Default limit on the number of subset tuples enumerated by brute force.
pub const DEFAULT_BRUTE_FORCE_CAP: u128 = 10_000_000;

const SIGN_TAG: u64 = 0x5167;
const DISJOINT_TAG: u64 = 0xD15;

/// Domains `A_i`, subset sizes `r_i` and the edge set `E` over domain indices.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapConfig {
    domains: Vec<Vec<Index>>,
    sizes: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl OverlapConfig {
    /// Domains are sorted on input; duplicates inside a domain are rejected.
    pub fn new(domains: Vec<Vec<Index>>, sizes: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if domains.len() != sizes.len() {
            return Err(Error::Domain("one subset size per domain is required".into()));
        }
        let mut domains = domains;
        for (k, d) in domains.iter_mut().enumerate() {
            d.sort_unstable();
            if d.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Domain(format!("domain {k} has repeated indices")));
            }
            if sizes[k] > d.len() {
                return Err(Error::Domain(format!(
                    "subset size {} exceeds domain {k} of size {}",
                    sizes[k],
                    d.len()
                )));
            }
        }
        let mut edges = edges;
        for e in &mut edges {
            if e.0 == e.1 || e.0.max(e.1) >= domains.len() {
                return Err(Error::Domain(format!("edge {e:?} is not a pair of distinct domains")));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        Ok(Self { domains, sizes, edges })
    }

    /// Two domains `{0..n1}` and `{n1−a .. n1−a+n2}` with one edge.
    pub fn pair(n1: usize, n2: usize, a: usize, r1: usize, r2: usize) -> Result<Self> {
        if a > n1.min(n2) {
            return Err(Error::Domain(format!("overlap {a} exceeds a domain size")));
        }
        let d1 = (0..n1 as Index).collect();
        let start = (n1 - a) as Index;
        let d2 = (start..start + n2 as Index).collect();
        Self::new(vec![d1, d2], vec![r1, r2], vec![(0, 1)])
    }

    pub fn domains(&self) -> &[Vec<Index>] {
        &self.domains
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `|A_i ∩ A_j|`.
    pub fn overlap(&self, i: usize, j: usize) -> usize {
        sorted_intersection_len(&self.domains[i], &self.domains[j])
    }

    /// Same domains and sizes with a different edge set.
    pub fn with_edges(&self, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(self.domains.clone(), self.sizes.clone(), edges)
    }
}

pub(crate) fn sorted_intersection_len(a: &[Index], b: &[Index]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Uniform `r`-subset of `domain` (partial Fisher–Yates), returned sorted.
pub fn sample_uniform_subset<R: Rng + ?Sized>(domain: &[Index], r: usize, rng: &mut R) -> Result<Vec<Index>> {
    if r > domain.len() {
        return Err(Error::Domain(format!(
            "cannot draw {r} elements from a domain of size {}",
            domain.len()
        )));
    }
    let mut pool = domain.to_vec();
    partial_shuffle(&mut pool, r, rng);
    pool.truncate(r);
    pool.sort_unstable();
    Ok(pool)
}

fn partial_shuffle<T, R: Rng + ?Sized>(pool: &mut [T], r: usize, rng: &mut R) {
    for k in 0..r {
        let j = rng.random_range(k..pool.len());
        pool.swap(k, j);
    }
}

/// Per-batch scratch for repeated draws from one configuration. Domains are
/// relabeled into a compact universe so membership is an array lookup.
struct Sampler {
    pools: Vec<Vec<u32>>,
    sizes: Vec<usize>,
    marks: Vec<u32>,
    stamp: u32,
}

impl Sampler {
    fn new(cfg: &OverlapConfig) -> Self {
        let mut ids: FxHashMap<Index, u32> = FxHashMap::default();
        let pools = cfg
            .domains
            .iter()
            .map(|d| {
                d.iter()
                    .map(|x| {
                        let next = ids.len() as u32;
                        *ids.entry(*x).or_insert(next)
                    })
                    .collect()
            })
            .collect();
        Self {
            pools,
            sizes: cfg.sizes.clone(),
            marks: vec![0; ids.len()],
            stamp: 0,
        }
    }

    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for (pool, &r) in self.pools.iter_mut().zip(&self.sizes) {
            partial_shuffle(pool, r, rng);
        }
    }

    fn subset(&self, i: usize) -> &[u32] {
        &self.pools[i][..self.sizes[i]]
    }

    fn next_stamp(&mut self) -> u32 {
        if self.stamp == u32::MAX {
            self.marks.fill(0);
            self.stamp = 0;
        }
        self.stamp += 1;
        self.stamp
    }

    /// `|R_i ∩ R_j|` for the current draw.
    fn intersection(&mut self, i: usize, j: usize) -> u64 {
        let s = self.next_stamp();
        for &x in &self.pools[i][..self.sizes[i]] {
            self.marks[x as usize] = s;
        }
        self.subset(j).iter().filter(|&&x| self.marks[x as usize] == s).count() as u64
    }

    /// Whether `R_{l_1} ∩ ⋯ ∩ R_{l_k}` is nonempty (labels distinct).
    fn common_point(&mut self, labels: &[usize]) -> bool {
        let Some((&first, rest)) = labels.split_first() else {
            return false;
        };
        let mut alive: Vec<u32> = self.subset(first).to_vec();
        for &l in rest {
            let s = self.next_stamp();
            for &x in &self.pools[l][..self.sizes[l]] {
                self.marks[x as usize] = s;
            }
            alive.retain(|&x| self.marks[x as usize] == s);
            if alive.is_empty() {
                return false;
            }
        }
        true
    }
}

/// `X = Σ_{(i,j)∈E} |R_i ∩ R_j|` for each of `samples` independent draws.
/// Draw `s` uses stream `s` of a key derived from `seed`.
pub fn sample_edge_totals(cfg: &OverlapConfig, samples: usize, seed: u64) -> Vec<u64> {
    let key = derive_key(seed, SIGN_TAG);
    map_samples(
        samples,
        || Sampler::new(cfg),
        |s, sampler| {
            let mut rng = sample_stream(key, s);
            sampler.draw(&mut rng);
            cfg.edges.iter().map(|&(i, j)| sampler.intersection(i, j)).sum::<u64>() as f64
        },
    )
    .into_iter()
    .map(|x| x as u64)
    .collect()
}

/// Monte Carlo estimate of `E[(−1)^X]`.
pub fn sign_expectation_mc(cfg: &OverlapConfig, samples: usize, seed: u64) -> MomentEstimate {
    if cfg.edges.is_empty() {
        return MomentEstimate::exact(1.0, Method::ReducedMc);
    }
    let values: Vec<f64> = sample_edge_totals(cfg, samples, seed)
        .into_iter()
        .map(|x| if x % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    MomentEstimate::from_samples(&values, Method::ReducedMc)
}

/// `C(x, k)` as a float.
pub fn binomial_f64(x: u64, k: usize) -> f64 {
    if (k as u64) > x {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (x - i as u64) as f64 / (i + 1) as f64)
}

/// Monte Carlo estimate of `E[C(X, k)] = E[(X)_k] / k!`.
pub fn falling_factorial_moment_mc(cfg: &OverlapConfig, k: usize, samples: usize, seed: u64) -> Result<MomentEstimate> {
    if k > MAX_FACTORIAL_ORDER {
        return Err(Error::cap("falling-factorial order", k as u64, MAX_FACTORIAL_ORDER as u64));
    }
    if k == 0 {
        return Ok(MomentEstimate::exact(1.0, Method::ReducedMc));
    }
    let values: Vec<f64> = sample_edge_totals(cfg, samples, seed)
        .into_iter()
        .map(|x| binomial_f64(x, k))
        .collect();
    Ok(MomentEstimate::from_samples(&values, Method::ReducedMc))
}

/// Limit of `E[C(X, k)]` when edge `e` has asymptotic `λ_e`:
/// `Σ_{Σk_e = k} ∏ λ_e^{k_e}/k_e! = (Σλ_e)^k / k!`.
pub fn poisson_limit(lambdas: &[f64], k: usize) -> f64 {
    let total: f64 = lambdas.iter().sum();
    (1..=k).fold(1.0, |acc, i| acc * total / i as f64)
}

/// Monte Carlo estimate of `P(X_{e₁} ∩ X_{e₂} ≠ ∅)` with `X_{ij} = R_i ∩ R_j`.
/// The edges need not belong to the configuration's edge set.
pub fn pair_disjointness_probability_mc(
    cfg: &OverlapConfig,
    edge_pair: ((usize, usize), (usize, usize)),
    samples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    let (e1, e2) = edge_pair;
    let norm = |(a, b): (usize, usize)| (a.min(b), a.max(b));
    let (e1, e2) = (norm(e1), norm(e2));
    let n = cfg.domains.len();
    if e1 == e2 || e1.0 == e1.1 || e2.0 == e2.1 || e1.1 >= n || e2.1 >= n {
        return Err(Error::Domain("need two distinct edges between distinct domains".into()));
    }
    let mut labels = vec![e1.0, e1.1, e2.0, e2.1];
    labels.sort_unstable();
    labels.dedup();
    // Shortcut: no common domain point means no common sampled point.
    let mut common: Vec<Index> = cfg.domains[labels[0]].clone();
    for &l in &labels[1..] {
        let d = &cfg.domains[l];
        common.retain(|x| d.binary_search(x).is_ok());
    }
    if common.is_empty() {
        return Ok(MomentEstimate::exact(0.0, Method::ReducedMc));
    }
    let key = derive_key(seed, DISJOINT_TAG);
    let values = map_samples(
        samples,
        || Sampler::new(cfg),
        |s, sampler| {
            let mut rng = sample_stream(key, s);
            sampler.draw(&mut rng);
            if sampler.common_point(&labels) {
                1.0
            } else {
                0.0
            }
        },
    );
    Ok(MomentEstimate::from_samples(&values, Method::ReducedMc))
}

/// Exact `E[(−1)^X]` by enumerating every tuple of subsets.
///
/// Needs at most 128 distinct domain points and at most `cap` tuples.
pub fn brute_force_sign_expectation(cfg: &OverlapConfig, cap: u128) -> Result<BigRational> {
    let mut ids: FxHashMap<Index, u32> = FxHashMap::default();
    for d in &cfg.domains {
        for &x in d {
            let next = ids.len() as u32;
            ids.entry(x).or_insert(next);
        }
    }
    if ids.len() > 128 {
        return Err(Error::cap("brute-force universe", ids.len() as u64, 128u64));
    }
    let mut tuples: u128 = 1;
    let mut choices: Vec<Vec<u128>> = Vec::new();
    for (d, &r) in cfg.domains.iter().zip(&cfg.sizes) {
        let bits: Vec<u32> = d.iter().map(|x| ids[x]).collect();
        let subsets = subsets_of_size(&bits, r);
        tuples = tuples.saturating_mul(subsets.len() as u128);
        if tuples > cap {
            return Err(Error::cap("brute-force tuples", tuples, cap));
        }
        choices.push(subsets);
    }
    let mut current = vec![0u128; choices.len()];
    let (mut even, mut odd) = (0u128, 0u128);
    brute_rec(cfg, &choices, 0, &mut current, &mut even, &mut odd);
    Ok(BigRational::new(
        BigInt::from(even) - BigInt::from(odd),
        BigInt::from(even + odd),
    ))
}

fn subsets_of_size(bits: &[u32], r: usize) -> Vec<u128> {
    fn rec(bits: &[u32], r: usize, start: usize, acc: u128, out: &mut Vec<u128>) {
        if r == 0 {
            out.push(acc);
            return;
        }
        for k in start..=bits.len() - r {
            rec(bits, r - 1, k + 1, acc | (1u128 << bits[k]), out);
        }
    }
    let mut out = Vec::new();
    rec(bits, r, 0, 0, &mut out);
    out
}

fn brute_rec(cfg: &OverlapConfig, choices: &[Vec<u128>], k: usize, current: &mut [u128], even: &mut u128, odd: &mut u128) {
    if k == choices.len() {
        let x: u32 = cfg
            .edges
            .iter()
            .map(|&(i, j)| (current[i] & current[j]).count_ones())
            .sum();
        if x.is_multiple_of(2) {
            *even += 1;
        } else {
            *odd += 1;
        }
        return;
    }
    for &s in &choices[k] {
        current[k] = s;
        brute_rec(cfg, choices, k + 1, current, even, odd);
    }
}

/// `E[(−1)^X]` by the cheapest available route.
///
/// Edges are split into connected components, which are independent. A
/// component with one edge uses the exact pair formula; larger components are
/// enumerated when small enough (`brute_cap` tuples) and otherwise estimated
/// by Monte Carlo. The result is exact exactly when every component is.
pub fn sign_expectation(cfg: &OverlapConfig, samples: usize, seed: u64, brute_cap: u128) -> Result<MomentEstimate> {
    let mut exact_part = 1.0;
    let mut estimated: Vec<MomentEstimate> = Vec::new();
    for (c, component) in edge_components(cfg).into_iter().enumerate() {
        if let [(i, j)] = component[..] {
            exact_part *= exact_pair_sign_expectation(
                cfg.domains[i].len(),
                cfg.domains[j].len(),
                cfg.overlap(i, j),
                cfg.sizes[i],
                cfg.sizes[j],
            )?;
            continue;
        }
        let sub = cfg.with_edges(component)?;
        match brute_force_sign_expectation(&sub, brute_cap) {
            Ok(v) => exact_part *= hypergeom::to_f64(&v),
            Err(e) if e.is_resource_cap() => {
                estimated.push(sign_expectation_mc(&sub, samples, derive_key(seed, c as u64)));
            }
            Err(e) => return Err(e),
        }
    }
    if estimated.is_empty() {
        return Ok(MomentEstimate::exact(exact_part, Method::FiniteNFormula));
    }
    let value = exact_part * estimated.iter().map(|e| e.value).product::<f64>();
    // Delta method for a product of independent estimates.
    let var: f64 = (0..estimated.len())
        .map(|k| {
            let others: f64 = estimated
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != k)
                .map(|(_, e)| e.value)
                .product();
            (exact_part * others * estimated[k].stderr).powi(2)
        })
        .sum();
    Ok(MomentEstimate {
        value,
        stderr: var.sqrt(),
        samples: estimated.iter().map(|e| e.samples).max().unwrap_or(0),
        method: Method::ReducedMc,
    })
}

fn edge_components(cfg: &OverlapConfig) -> Vec<Vec<(usize, usize)>> {
    let n = cfg.domains.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &(i, j) in &cfg.edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        parent[a.max(b)] = a.min(b);
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
    for &(i, j) in &cfg.edges {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push((i, j));
    }
    groups.into_values().collect()
}
