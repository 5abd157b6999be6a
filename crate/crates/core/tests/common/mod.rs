#![allow(dead_code)]

//! Independent oracles shared by the integration suites.

use astro_float::{BigFloat, Consts, RoundingMode};
use ci_count::BooleanFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_function(n: u32, rng: &mut impl Rng) -> BooleanFunction {
    BooleanFunction::from_fn(n, |_| rng.gen::<bool>()).unwrap()
}

/// `ĝ(w)` straight from the definition, `O(4^n)`.
pub fn naive_walsh(f: &BooleanFunction) -> Vec<i64> {
    let size = 1u32 << f.n();
    (0..size)
        .map(|w| {
            (0..size)
                .filter(|&y| f.get(y))
                .map(|y| if (w & y).count_ones() % 2 == 0 { 1 } else { -1 })
                .sum()
        })
        .collect()
}

/// Fixing any `k` inputs to any values leaves the same number of ones.
pub fn is_ci_by_definition(f: &BooleanFunction, k: u32) -> bool {
    let n = f.n();
    let size = 1u32 << n;
    let weight = (0..size).filter(|&y| f.get(y)).count() as u64;
    if !weight.is_multiple_of(1 << k) {
        return false;
    }
    let per_cell = weight >> k;
    (0u32..size).filter(|s| s.count_ones() == k).all(|mask| {
        let mut cells = std::collections::HashMap::new();
        for y in (0..size).filter(|&y| f.get(y)) {
            *cells.entry(y & mask).or_insert(0u64) += 1;
        }
        // every one of the 2^k patterns on the mask must appear equally
        (0..size)
            .filter(|p| p & !mask == 0)
            .all(|p| cells.get(&p).copied().unwrap_or(0) == per_cell)
    })
}

/// Largest `k` with [`is_ci_by_definition`]; `n` for constants.
pub fn ci_order_by_definition(f: &BooleanFunction) -> u32 {
    (1..=f.n())
        .take_while(|&k| is_ci_by_definition(f, k))
        .last()
        .unwrap_or(0)
}

/// `N(n,k,q)` for every `q`, by classifying all `2^(2^n)` functions.
pub fn census_by_filter(n: u32, k: u32) -> Vec<u64> {
    let mut counts = vec![0u64; (1usize << (n - k)) + 1];
    for bits in 0u64..1 << (1u64 << n) {
        let f = BooleanFunction::from_fn(n, |y| bits >> y & 1 == 1).unwrap();
        if ci_order_by_definition(&f) >= k {
            counts[(f.weight() >> k) as usize] += 1;
        }
    }
    counts
}

pub fn binom(n: u64, k: u64) -> u128 {
    let mut r = 1u128;
    for i in 0..k.min(n - k) {
        r = r * u128::from(n - i) / u128::from(i + 1);
    }
    r
}

/// `log2` arithmetic at 256 bits.
pub struct Hp {
    cc: Consts,
}

pub const PREC: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

impl Hp {
    pub fn new() -> Self {
        Self {
            cc: Consts::new().unwrap(),
        }
    }

    pub fn int(&self, v: u128) -> BigFloat {
        BigFloat::from_u128(v, PREC)
    }

    pub fn frac(&self, num: u128, den: u128) -> BigFloat {
        self.int(num).div(&self.int(den), PREC, RM)
    }

    pub fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(PREC, RM, &mut self.cc)
    }

    pub fn log2(&mut self, x: &BigFloat) -> BigFloat {
        x.log2(PREC, RM, &mut self.cc)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(PREC, RM)
    }

    /// `ln m!`: direct product below 2000, Stirling series above.
    pub fn ln_factorial(&mut self, m: u64) -> BigFloat {
        if m < 2000 {
            let mut acc = self.int(1);
            for i in 2..=m {
                acc = acc.mul(&self.int(u128::from(i)), PREC, RM);
            }
            return self.ln(&acc);
        }
        let x = self.int(u128::from(m));
        let ln_x = self.ln(&x);
        let two_pi_x = self.pi().mul(&x, PREC, RM).mul(&self.int(2), PREC, RM);
        let half = self.frac(1, 2);
        let mut r = x.mul(&ln_x, PREC, RM).sub(&x, PREC, RM).add(
            &half.mul(&self.ln(&two_pi_x), PREC, RM),
            PREC,
            RM,
        );
        // B_{2j} / (2j (2j-1) x^{2j-1})
        let series: [(i128, u128); 8] = [
            (1, 12),
            (-1, 360),
            (1, 1260),
            (-1, 1680),
            (1, 1188),
            (-691, 360360),
            (1, 156),
            (-3617, 122400),
        ];
        let x2 = x.mul(&x, PREC, RM);
        let mut xpow = x.clone();
        for (num, den) in series {
            let c = BigFloat::from_i128(num, PREC).div(&self.int(den), PREC, RM);
            r = r.add(&c.div(&xpow, PREC, RM), PREC, RM);
            xpow = xpow.mul(&x2, PREC, RM);
        }
        r
    }

    pub fn ln_binomial(&mut self, n: u64, k: u64) -> BigFloat {
        let a = self.ln_factorial(n);
        let b = self.ln_factorial(k);
        let c = self.ln_factorial(n - k);
        a.sub(&b, PREC, RM).sub(&c, PREC, RM)
    }

    pub fn ln2(&mut self) -> BigFloat {
        let two = self.int(2);
        self.ln(&two)
    }

    fn m_and_q(n: u32, k: u32) -> (u128, u128) {
        let m = (0..=k).map(|j| binom(u64::from(n), u64::from(j))).sum();
        let q = (1..=k)
            .map(|j| u128::from(j) * binom(u64::from(n), u64::from(j)))
            .sum();
        (m, q)
    }

    /// `log2(2^{n-1} π)`.
    fn log2_half_space_pi(&mut self, n: u32) -> BigFloat {
        let pi = self.pi();
        self.int(u128::from(n - 1)).add(&self.log2(&pi), PREC, RM)
    }

    pub fn main(&mut self, n: u32, k: u32, q: u64) -> BigFloat {
        let (m, big_q) = Self::m_and_q(n, k);
        let slots = 1u128 << (n - k);
        let lambda = self.frac(u128::from(q), slots);
        let mu = self.frac(slots - u128::from(q), slots);
        let a = lambda.mul(&mu, PREC, RM);
        let entropy = lambda
            .mul(&self.log2(&lambda), PREC, RM)
            .add(&mu.mul(&self.log2(&mu), PREC, RM), PREC, RM)
            .neg();
        let pi = self.pi();
        let bracket = self.log2(&pi).add(&self.log2(&a), PREC, RM).add(
            &self.int(u128::from(n) + 1),
            PREC,
            RM,
        );
        self.int(big_q)
            .add(&self.int(1u128 << n).mul(&entropy, PREC, RM), PREC, RM)
            .sub(&self.frac(m, 2).mul(&bracket, PREC, RM), PREC, RM)
    }

    pub fn resilient(&mut self, n: u32, k: u32) -> BigFloat {
        let (m, big_q) = Self::m_and_q(n, k);
        let h = self.log2_half_space_pi(n);
        self.int((1u128 << n) + big_q)
            .sub(&self.frac(m, 2).mul(&h, PREC, RM), PREC, RM)
    }

    pub fn nk(&mut self, n: u32, k: u32) -> BigFloat {
        let (m, big_q) = Self::m_and_q(n, k);
        let h = self.log2_half_space_pi(n);
        self.int((1u128 << n) + big_q - u128::from(k)).sub(
            &self.frac(m - 1, 2).mul(&h, PREC, RM),
            PREC,
            RM,
        )
    }

    pub fn k1(&mut self, n: u32, q: u64) -> BigFloat {
        let half = self.ln_binomial(1 << (n - 1), q);
        let full = self.ln_binomial(1 << n, 2 * q);
        let ln = half.mul(&self.int(2 * u128::from(n)), PREC, RM).sub(
            &full.mul(&self.int(u128::from(n - 1)), PREC, RM),
            PREC,
            RM,
        );
        ln.div(&self.ln2(), PREC, RM)
    }

    pub fn small_q(&mut self, n: u32, q: u64) -> BigFloat {
        let c = self
            .ln_binomial(2 * q, q)
            .mul(&self.int(u128::from(n)), PREC, RM);
        let ln = c.sub(&self.ln_factorial(2 * q), PREC, RM);
        ln.div(&self.ln2(), PREC, RM)
    }
}

/// `|value - oracle| <= tol · max(|oracle|, 1)`.
pub fn agrees(value: f64, oracle: &BigFloat, tol: f64) -> bool {
    let one = BigFloat::from_u128(1, PREC);
    let diff = BigFloat::from_f64(value, PREC).sub(oracle, PREC, RM).abs();
    let scale = if oracle.abs() > one {
        oracle.abs()
    } else {
        one
    };
    diff <= BigFloat::from_f64(tol, PREC).mul(&scale, PREC, RM)
}

/// 50 `(n, k, q)` triples with `n <= 30`, spread over `k` and `λ`.
pub fn precision_grid() -> Vec<(u32, u32, u64)> {
    let mut grid = Vec::new();
    let mut r = rng(0x5eed_0010);
    for n in [2u32, 3, 5, 8, 12, 16, 20, 24, 28, 30] {
        for _ in 0..5 {
            let k = r.gen_range(1..=(n - 1).min(4));
            let slots = 1u64 << (n - k);
            let q = if slots <= 1 { 1 } else { r.gen_range(1..slots) };
            grid.push((n, k, q));
        }
    }
    grid
}
