use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest population size handled with exact rationals by default.
pub const EXACT_LIMIT: usize = 64;

fn binom_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn check_sizes(p: usize, q: usize, m: usize) -> Result<()> {
    if p > m || q > m {
        return Err(Error::Domain(format!("F({p}, {q}, {m}) needs p, q ≤ m")));
    }
    Ok(())
}

/// Hypergeometric law of `|V ∩ S|` for a uniform `draws`-subset `V` of a
/// `population`-set containing a fixed `successes`-set `S`, as exact rationals
/// indexed from `t = 0`.
pub fn hypergeometric_pmf_exact(population: usize, successes: usize, draws: usize) -> Result<Vec<BigRational>> {
    check_sizes(successes, draws, population)?;
    let total = binom_big(population, draws);
    Ok((0..=successes.min(draws))
        .map(|t| {
            let ways = binom_big(successes, t) * binom_big(population - successes, draws - t);
            BigRational::new(ways, total.clone())
        })
        .collect())
}

/// Floating-point hypergeometric pmf: returns the smallest support point and
/// the probabilities from there on.
///
/// Built from the term ratio outward from the mode and normalized with
/// compensated summation, so no factorials are formed.
pub fn hypergeometric_pmf(population: usize, successes: usize, draws: usize) -> Result<(usize, Vec<f64>)> {
    check_sizes(successes, draws, population)?;
    let (big_n, k, n) = (population as f64, successes as f64, draws as f64);
    let lo = (draws + successes).saturating_sub(population);
    let hi = successes.min(draws);
    let mode = (((n + 1.0) * (k + 1.0) / (big_n + 2.0)).floor() as usize).clamp(lo, hi);
    let mut w = vec![0.0; hi - lo + 1];
    w[mode - lo] = 1.0;
    for t in mode..hi {
        let tf = t as f64;
        let ratio = (k - tf) * (n - tf) / ((tf + 1.0) * (big_n - k - n + tf + 1.0));
        w[t + 1 - lo] = w[t - lo] * ratio;
    }
    for t in (lo + 1..=mode).rev() {
        let tf = t as f64;
        let ratio = tf * (big_n - k - n + tf) / ((k - tf + 1.0) * (n - tf + 1.0));
        w[t - 1 - lo] = w[t - lo] * ratio;
    }
    let total = neumaier_sum(w.iter().copied());
    for x in &mut w {
        *x /= total;
    }
    Ok((lo, w))
}

pub(crate) fn neumaier_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

/// `F(p, q, m) = Σ_k (−1)^k C(p,k) C(m−p,q−k) / C(m,q)`, exactly.
pub fn f_exact(p: usize, q: usize, m: usize) -> Result<BigRational> {
    let pmf = hypergeometric_pmf_exact(m, p, q)?;
    let mut acc = BigRational::zero();
    for (k, x) in pmf.into_iter().enumerate() {
        if k % 2 == 0 {
            acc += x;
        } else {
            acc -= x;
        }
    }
    Ok(acc)
}

/// `F(p, q, m)` as a float: exact rationals up to [`EXACT_LIMIT`], the
/// normalized pmf beyond.
pub fn f_value(p: usize, q: usize, m: usize) -> Result<f64> {
    if m <= EXACT_LIMIT {
        return Ok(to_f64(&f_exact(p, q, m)?));
    }
    let (lo, pmf) = hypergeometric_pmf(m, p, q)?;
    Ok(neumaier_sum(
        pmf.iter()
            .enumerate()
            .map(|(k, &x)| if (lo + k) % 2 == 0 { x } else { -x }),
    ))
}

/// Upper bound `exp(−a_p a_q / (2m))` with `a_x = min{x, m − x}`.
pub fn f_bound(p: usize, q: usize, m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let a = |x: usize| x.min(m - x) as f64;
    (-a(p) * a(q) / (2.0 * m as f64)).exp()
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn check_pair(n1: usize, n2: usize, a: usize, r1: usize, r2: usize) -> Result<()> {
    if a > n1.min(n2) || r1 > n1 || r2 > n2 {
        return Err(Error::Domain(format!(
            "pair sizes (n1={n1}, n2={n2}, a={a}, r1={r1}, r2={r2}) are inconsistent"
        )));
    }
    Ok(())
}

/// `E[(−1)^{|R₁∩R₂|}]` for uniform `R_i ⊂ A_i`, `|A_i| = n_i`, `|A₁∩A₂| = a`,
/// as an exact rational.
///
/// Conditioning on `t = |R₁ ∩ A₂|` (hypergeometric) leaves `|R₁∩R₂|`
/// hypergeometric in `A₂`, whose alternating mean is `F(t, r₂, n₂)`.
pub fn exact_pair_sign_expectation_rational(
    n1: usize,
    n2: usize,
    a: usize,
    r1: usize,
    r2: usize,
) -> Result<BigRational> {
    check_pair(n1, n2, a, r1, r2)?;
    let outer = hypergeometric_pmf_exact(n1, a, r1)?;
    let mut acc = BigRational::zero();
    for (t, w) in outer.into_iter().enumerate() {
        if !w.is_zero() {
            acc += w * f_exact(t, r2, n2)?;
        }
    }
    Ok(acc)
}

/// Floating-point form of [`exact_pair_sign_expectation_rational`]; exact
/// rationals are used while both domains have at most [`EXACT_LIMIT`] points.
pub fn exact_pair_sign_expectation(n1: usize, n2: usize, a: usize, r1: usize, r2: usize) -> Result<f64> {
    check_pair(n1, n2, a, r1, r2)?;
    if a == 0 {
        return Ok(1.0);
    }
    if n1.max(n2) <= EXACT_LIMIT {
        return Ok(to_f64(&exact_pair_sign_expectation_rational(n1, n2, a, r1, r2)?));
    }
    let (lo, outer) = hypergeometric_pmf(n1, a, r1)?;
    let mut terms = Vec::with_capacity(outer.len());
    for (k, &w) in outer.iter().enumerate() {
        if w > 0.0 {
            terms.push(w * f_value(lo + k, r2, n2)?);
        }
    }
    Ok(neumaier_sum(terms))
}
