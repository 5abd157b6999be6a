//! Closed-form counts and asymptotic estimates, evaluated in log2 space.
//!
//! All estimates are returned as `log2` of the count. Error terms carry
//! unknown constants, so they are reported alongside the value and never
//! folded into it.

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::combin::binomial;
use crate::error::{Error, Result};

/// Largest `n` for which the exact rational parameters fit in `u128`.
pub const MAX_ASYMPTOTIC_VARS: u32 = 63;
/// Largest `n` for the exact big-integer evaluation of the `k = 1` form.
pub const MAX_EXACT_K1_VARS: u32 = 16;
/// `ε` in the admissible range of `k`.
pub const KRANGE_EPSILON: f64 = 0.01;
/// Constant standing in for `ω(·)` in the admissible range of `q`.
pub const KBOUNDS_CONSTANT: u32 = 1;
/// `q^2 / 2^n` above which the small-`q` estimate is flagged.
pub const SMALL_Q_THRESHOLD: f64 = 0.1;

fn ratio_str<S: Serializer>(r: &Ratio<u128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// Exact and derived parameters of a triple `(n, k, q)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticParams {
    pub n: u32,
    pub k: u32,
    pub q: u64,
    /// `λ = 2^k q / 2^n`.
    #[serde(serialize_with = "ratio_str")]
    pub lambda: Ratio<u128>,
    /// `A = λ(1 - λ)`.
    #[serde(serialize_with = "ratio_str")]
    pub a: Ratio<u128>,
    pub m: u128,
    #[serde(rename = "Q")]
    pub big_q: u128,
    /// Relative error scale of the main estimate; `None` at `λ ∈ {0, 1}`.
    pub eta: Option<f64>,
    pub log2_eta: Option<f64>,
    pub in_kbounds: bool,
    pub in_krange: bool,
}

impl AsymptoticParams {
    pub fn lambda_f64(&self) -> f64 {
        ratio_f64(&self.lambda)
    }

    pub fn a_f64(&self) -> f64 {
        ratio_f64(&self.a)
    }

    /// `λ ∈ {0, 1}`, where the count is exactly 1.
    pub fn is_degenerate(&self) -> bool {
        self.lambda.is_zero() || self.lambda.is_one()
    }
}

fn ratio_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check_nk(n: u32, k: u32) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Range(format!(
            "need 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    if n > MAX_ASYMPTOTIC_VARS {
        return Err(Error::Range(format!(
            "n = {n} exceeds {MAX_ASYMPTOTIC_VARS}"
        )));
    }
    Ok(())
}

/// `M = Σ_{j=0}^k C(n,j)`.
pub fn m_count(n: u32, k: u32) -> u128 {
    (0..=k)
        .map(|j| binomial(u64::from(n), u64::from(j)).expect("C(63, j) fits"))
        .sum()
}

/// `Q = Σ_{j=1}^k j C(n,j)`.
pub fn q_sum(n: u32, k: u32) -> u128 {
    (1..=k)
        .map(|j| u128::from(j) * binomial(u64::from(n), u64::from(j)).expect("C(63, j) fits"))
        .sum()
}

/// `k <= (ln 2 / 6 - ε) n / ln n`; false for `n = 1` where `ln n = 0`.
pub fn in_krange(n: u32, k: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = f64::from(n);
    f64::from(k) <= (std::f64::consts::LN_2 / 6.0 - KRANGE_EPSILON) * n / n.ln()
}

/// `c · 2^{5k} n^{6k+3} M^3`.
fn kbounds_threshold(n: u32, k: u32, m: u128) -> BigUint {
    BigUint::from(KBOUNDS_CONSTANT)
        * (BigUint::one() << (5 * k))
        * BigUint::from(n).pow(6 * k + 3)
        * BigUint::from(m).pow(3)
}

/// `log2 η = -n/2 + 3k + (3k + 3/2) log2 n + (3/2) log2 M - (1/2) log2 A`,
/// with the `A` term dropped when `a` is `None`.
fn log2_error_scale(n: u32, k: u32, m: u128, a: Option<f64>) -> f64 {
    let (nf, kf) = (f64::from(n), f64::from(k));
    -nf / 2.0 + 3.0 * kf + (3.0 * kf + 1.5) * nf.log2() + 1.5 * (m as f64).log2()
        - a.map_or(0.0, |a| 0.5 * a.log2())
}

/// Computes every parameter of `(n, k, q)`.
pub fn params(n: u32, k: u32, q: u64) -> Result<AsymptoticParams> {
    check_nk(n, k)?;
    let slots = 1u128 << (n - k);
    if u128::from(q) > slots {
        return Err(Error::Range(format!("q = {q} exceeds 2^(n-k) = {slots}")));
    }
    let lambda = Ratio::new(u128::from(q), slots);
    let a = Ratio::new(u128::from(q) * (slots - u128::from(q)), slots * slots);
    let m = m_count(n, k);
    let big_q = q_sum(n, k);
    let log2_eta = (!a.is_zero()).then(|| log2_error_scale(n, k, m, Some(ratio_f64(&a))));
    let threshold = kbounds_threshold(n, k, m);
    let in_kbounds =
        BigUint::from(q) > threshold && BigUint::from(slots - u128::from(q)) > threshold;
    Ok(AsymptoticParams {
        n,
        k,
        q,
        lambda,
        a,
        m,
        big_q,
        eta: log2_eta.map(f64::exp2),
        log2_eta,
        in_kbounds,
        in_krange: in_krange(n, k),
    })
}

/// Formula behind an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Denisov,
    Main,
    Resilient,
    NkSum,
    K1ExactForm,
    SmallQ,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Denisov => "denisov",
            Method::Main => "main",
            Method::Resilient => "resilient",
            Method::NkSum => "nk_sum",
            Method::K1ExactForm => "k1_exact_form",
            Method::SmallQ => "small_q",
        }
    }
}

/// A formula value as `log2`, with validity diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Log2Estimate {
    pub method: Method,
    pub log2_value: f64,
    pub valid: bool,
    pub eta: Option<f64>,
    pub in_kbounds: Option<bool>,
    pub in_krange: Option<bool>,
    pub notes: Vec<String>,
}

impl Log2Estimate {
    fn new(method: Method, log2_value: f64) -> Self {
        Self {
            method,
            log2_value,
            valid: true,
            eta: None,
            in_kbounds: None,
            in_krange: None,
            notes: Vec::new(),
        }
    }
}

/// `log2` of the main estimate
/// `2^Q (λ^λ (1-λ)^{1-λ})^{-2^n} (π A 2^{n+1})^{-M/2}`.
pub fn estimate_main(p: &AsymptoticParams) -> Result<Log2Estimate> {
    if p.is_degenerate() {
        return Err(Error::Domain(format!(
            "λ = {}/{} is singular for the main estimate; the exact count is 1",
            p.lambda.numer(),
            p.lambda.denom()
        )));
    }
    let lambda = p.lambda_f64();
    let entropy = -(lambda * lambda.log2() + (1.0 - lambda) * (1.0 - lambda).log2());
    let n = f64::from(p.n);
    let value = p.big_q as f64 + n.exp2() * entropy
        - (p.m as f64 / 2.0) * (std::f64::consts::PI.log2() + p.a_f64().log2() + n + 1.0);
    let mut e = Log2Estimate::new(Method::Main, value);
    e.valid = p.in_kbounds;
    e.eta = p.eta;
    e.in_kbounds = Some(p.in_kbounds);
    e.in_krange = Some(p.in_krange);
    if !p.in_kbounds {
        e.notes.push(format!(
            "q outside the admissible range (constant c = {KBOUNDS_CONSTANT})"
        ));
    }
    if let Some(l) = p.log2_eta {
        e.notes
            .push(format!("relative error O(eta), log2 eta = {l:.6}"));
    }
    Ok(e)
}

fn log2_half_space_pi(n: u32) -> f64 {
    // log2(2^{n-1} π)
    f64::from(n) - 1.0 + std::f64::consts::PI.log2()
}

fn with_krange(mut e: Log2Estimate, n: u32, k: u32) -> Log2Estimate {
    let krange = in_krange(n, k);
    let log2_err = log2_error_scale(n, k, m_count(n, k), None);
    e.valid = krange;
    e.in_krange = Some(krange);
    e.eta = Some(log2_err.exp2());
    if !krange {
        e.notes.push(format!(
            "k outside the admissible range (epsilon = {KRANGE_EPSILON})"
        ));
    }
    e.notes.push(format!(
        "relative error O(2^(-n/2+3k) n^(3k+3/2) M^(3/2)), log2 = {log2_err:.6}"
    ));
    e
}

/// `log2` of the resilient count `2^{2^n+Q} (2^{n-1} π)^{-M/2}`.
pub fn estimate_resilient(n: u32, k: u32) -> Result<Log2Estimate> {
    check_nk(n, k)?;
    let value = f64::from(n).exp2() + q_sum(n, k) as f64
        - (m_count(n, k) as f64 / 2.0) * log2_half_space_pi(n);
    Ok(with_krange(
        Log2Estimate::new(Method::Resilient, value),
        n,
        k,
    ))
}

fn nk_formula(n: u32, k: u32) -> f64 {
    f64::from(n).exp2() + q_sum(n, k) as f64
        - f64::from(k)
        - ((m_count(n, k) - 1) as f64 / 2.0) * log2_half_space_pi(n)
}

/// `log2` of `N(n,k) ~ 2^{2^n+Q-k} (2^{n-1} π)^{-(M-1)/2}`.
pub fn estimate_nk(n: u32, k: u32) -> Result<Log2Estimate> {
    check_nk(n, k)?;
    Ok(with_krange(
        Log2Estimate::new(Method::NkSum, nk_formula(n, k)),
        n,
        k,
    ))
}

/// The constant-`k` estimate of `N(n,k)`; the same expression as
/// [`estimate_nk`], reported under its own tag.
pub fn estimate_denisov(n: u32, k: u32) -> Result<Log2Estimate> {
    check_nk(n, k)?;
    let mut e = with_krange(Log2Estimate::new(Method::Denisov, nk_formula(n, k)), n, k);
    e.notes.push("stated for constant k as n grows".into());
    Ok(e)
}

/// Evaluation route for formulas with an exact rational main factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    LogSpace,
}

fn primes_up_to(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            for j in (i * i..=limit).step_by(i) {
                composite[j] = true;
            }
        }
    }
    primes
}

/// Exponent of `p` in `m!`.
fn legendre(mut m: u64, p: u64) -> i64 {
    let mut e = 0;
    while m > 0 {
        m /= p;
        e += m as i64;
    }
    e
}

/// Exponent of `p` in `C(n, k)`.
fn binomial_exponent(n: u64, k: u64, p: u64) -> i64 {
    legendre(n, p) - legendre(k, p) - legendre(n - k, p)
}

fn product_tree(mut factors: Vec<BigUint>) -> BigUint {
    if factors.is_empty() {
        return BigUint::one();
    }
    while factors.len() > 1 {
        factors = factors
            .chunks(2)
            .map(|c| {
                if c.len() == 2 {
                    &c[0] * &c[1]
                } else {
                    c[0].clone()
                }
            })
            .collect();
    }
    factors.pop().unwrap()
}

/// `Π C(n_i, k_i)^{e_i}` as a reduced fraction, via prime exponents.
fn binomial_power_ratio(terms: &[(u64, u64, i64)]) -> BigRational {
    let limit = terms.iter().map(|t| t.0).max().unwrap_or(1);
    let (mut num, mut den) = (Vec::new(), Vec::new());
    for p in primes_up_to(limit) {
        let e: i64 = terms
            .iter()
            .map(|&(n, k, w)| w * binomial_exponent(n, k, p))
            .sum();
        match e.cmp(&0) {
            std::cmp::Ordering::Greater => num.push(BigUint::from(p).pow(e as u32)),
            std::cmp::Ordering::Less => den.push(BigUint::from(p).pow((-e) as u32)),
            std::cmp::Ordering::Equal => {}
        }
    }
    // coprime by construction
    BigRational::new_raw(product_tree(num).into(), product_tree(den).into())
}

/// `log2` of a positive big integer, accurate to a few ulps.
pub fn big_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits in u64") as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 leading bits");
    (top as f64).log2() + shift as f64
}

/// `log2` of a positive rational; `-inf` for zero.
pub fn rational_log2(r: &BigRational) -> f64 {
    let (num, den) = (r.numer().magnitude(), r.denom().magnitude());
    if num.is_zero() {
        return f64::NEG_INFINITY;
    }
    big_log2(num) - big_log2(den)
}

fn check_k1(n: u32, q: u64) -> Result<()> {
    check_nk(n, 1)?;
    if u128::from(q) > 1u128 << (n - 1) {
        return Err(Error::Range(format!("q = {q} exceeds 2^(n-1)")));
    }
    Ok(())
}

/// `C(2^n, 2q) (C(2^{n-1}, q)^2 / C(2^n, 2q))^n` as an exact rational.
pub fn k1_main_factor_exact(n: u32, q: u64) -> Result<BigRational> {
    check_k1(n, q)?;
    if n > MAX_EXACT_K1_VARS {
        return Err(Error::Capacity(format!(
            "exact k = 1 form limited to n <= {MAX_EXACT_K1_VARS}, got {n}"
        )));
    }
    Ok(binomial_power_ratio(&[
        (1 << (n - 1), q, 2 * i64::from(n)),
        (1 << n, 2 * q, -i64::from(n - 1)),
    ]))
}

/// The `k = 1` closed form, valid uniformly in `q`.
pub fn estimate_k1_exact_form(n: u32, q: u64, mode: EvalMode) -> Result<Log2Estimate> {
    check_k1(n, q)?;
    let value = match mode {
        EvalMode::Exact => rational_log2(&k1_main_factor_exact(n, q)?),
        EvalMode::LogSpace => {
            let half = ln_binomial(1 << (n - 1), q);
            let full = ln_binomial(1 << n, 2 * q);
            (2.0 * f64::from(n) * half - f64::from(n - 1) * full) / std::f64::consts::LN_2
        }
    };
    let mut e = Log2Estimate::new(Method::K1ExactForm, value);
    let nf = f64::from(n);
    e.notes.push(format!(
        "relative error o(n^5 2^(-n/5)), scale = {:.6e}",
        nf.powi(5) * (-nf / 5.0).exp2()
    ));
    Ok(e)
}

/// `C(2q, q)^n / (2q)!` as an exact rational.
pub fn small_q_main_factor_exact(n: u32, q: u64) -> Result<BigRational> {
    check_nk(n, 1)?;
    if q > 1 << 12 {
        return Err(Error::Capacity(format!(
            "exact small-q factor limited to q <= 4096, got {q}"
        )));
    }
    let num = binomial_power_ratio(&[(2 * q, q, i64::from(n))]);
    let den: BigUint = product_tree((1..=2 * q).map(BigUint::from).collect());
    Ok(num / BigRational::from_integer(den.into()))
}

/// `log2` of `C(2q, q)^n / (2q)!`, the small-`q` estimate of `N(n,1,q)`.
pub fn estimate_small_q(n: u32, q: u64) -> Result<Log2Estimate> {
    check_nk(n, 1)?;
    let value =
        (f64::from(n) * ln_binomial(2 * q, q) - ln_factorial(2 * q)) / std::f64::consts::LN_2;
    let mut e = Log2Estimate::new(Method::SmallQ, value);
    let ratio = (q as f64).powi(2) / f64::from(n).exp2();
    e.valid = ratio <= SMALL_Q_THRESHOLD;
    e.notes
        .push(format!("relative error O(q^2/2^n), q^2/2^n = {ratio:.6e}"));
    if !e.valid {
        e.notes.push(format!(
            "q^2/2^n exceeds {SMALL_Q_THRESHOLD}; q is not small for this n"
        ));
    }
    Ok(e)
}
