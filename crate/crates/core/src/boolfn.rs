//! Truth tables, the Walsh–Hadamard transform and spectral
//! correlation-immunity classification.
//!
//! Input `y = (y_1, ..., y_n)` is stored at table index `i` with bit `j` of
//! `i` holding `y_{j+1}`; the least-significant bit is `y_1`. Walsh masks use
//! the same convention.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest variable count whose spectrum is held in memory.
pub const MAX_VARS: u32 = 24;

fn check_vars(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Range(
            "a boolean function needs at least 1 variable".into(),
        ));
    }
    if n > MAX_VARS {
        return Err(Error::Capacity(format!(
            "n = {n} exceeds the in-memory limit of {MAX_VARS} variables"
        )));
    }
    Ok(())
}

/// A boolean function of `n` variables as a bit-packed truth table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: u32,
    words: Vec<u64>,
}

impl std::fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "BooleanFunction(n={}, 0x{})",
            self.n,
            self.to_hex_string()
        )
    }
}

impl BooleanFunction {
    /// The constant-zero function.
    pub fn zero(n: u32) -> Result<Self> {
        check_vars(n)?;
        let len = 1usize << n;
        Ok(Self {
            n,
            words: vec![0; len.div_ceil(64)],
        })
    }

    /// Builds the function from a predicate over table indices.
    pub fn from_fn(n: u32, mut g: impl FnMut(u32) -> bool) -> Result<Self> {
        let mut f = Self::zero(n)?;
        for y in 0..f.len() as u32 {
            if g(y) {
                f.set(y, true);
            }
        }
        Ok(f)
    }

    /// Builds a function of at most 6 variables from an integer truth table,
    /// bit `i` of `table` being the value at index `i`.
    pub fn from_u64(n: u32, table: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::Capacity(format!(
                "{n} variables do not fit in a u64 table"
            )));
        }
        let mut f = Self::zero(n)?;
        let len = f.len();
        if len < 64 && table >> len != 0 {
            return Err(Error::Shape(format!(
                "table 0x{table:x} has bits above index {}",
                len - 1
            )));
        }
        f.words[0] = table;
        Ok(f)
    }

    /// Parses a string of `2^n` characters from `{0,1}`, index 0 first.
    pub fn from_bit_string(n: u32, s: &str) -> Result<Self> {
        let mut f = Self::zero(n)?;
        let s = s.trim();
        if s.len() != f.len() {
            return Err(Error::Shape(format!(
                "bit string has {} characters, expected {}",
                s.len(),
                f.len()
            )));
        }
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => f.set(i as u32, true),
                _ => {
                    return Err(Error::Parse(format!(
                        "invalid bit character {:?}",
                        c as char
                    )))
                }
            }
        }
        Ok(f)
    }

    /// Parses a hex string whose most-significant nibble covers the highest
    /// indices. An optional `0x` prefix is accepted.
    pub fn from_hex_string(n: u32, s: &str) -> Result<Self> {
        let mut f = Self::zero(n)?;
        let s = s.trim();
        let s = s
            .strip_prefix("0x")
            .or_else(|| s.strip_prefix("0X"))
            .unwrap_or(s);
        let expected = (f.len() / 4).max(1);
        if s.len() != expected {
            return Err(Error::Shape(format!(
                "hex string has {} digits, expected {expected}",
                s.len()
            )));
        }
        for (pos, c) in s.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let idx = pos * 4 + b;
                    if idx >= f.len() {
                        return Err(Error::Shape(format!(
                            "hex digit {c:?} sets bits beyond 2^{n}"
                        )));
                    }
                    f.set(idx as u32, true);
                }
            }
        }
        Ok(f)
    }

    /// Accepts either text format. A string of exactly `2^n` binary digits is
    /// read as a bit string, anything else as hex.
    pub fn parse(n: u32, s: &str) -> Result<Self> {
        check_vars(n)?;
        let t = s.trim();
        if t.len() == 1usize << n && !t.starts_with("0x") {
            Self::from_bit_string(n, t)
        } else {
            Self::from_hex_string(n, t)
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Truth-table length `2^n`.
    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        self.weight() == 0
    }

    pub fn get(&self, y: u32) -> bool {
        self.words[(y >> 6) as usize] >> (y & 63) & 1 == 1
    }

    pub fn set(&mut self, y: u32, value: bool) {
        let word = &mut self.words[(y >> 6) as usize];
        if value {
            *word |= 1 << (y & 63);
        } else {
            *word &= !(1 << (y & 63));
        }
    }

    /// Number of inputs mapped to 1.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Support of the function in ascending index order.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len() as u32).filter(|&y| self.get(y))
    }

    /// The function `1 - g`.
    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if self.len() < 64 {
            words[0] &= (1u64 << self.len()) - 1;
        }
        Self { n: self.n, words }
    }

    /// `g'(y) = g(z)` with `z_j = y_{perm[j]}`: input `j` of `g` is read from
    /// position `perm[j]`.
    pub fn permute_inputs(&self, perm: &[u32]) -> Result<Self> {
        let n = self.n as usize;
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p as usize >= n || std::mem::replace(&mut seen[p as usize], true))
        {
            return Err(Error::Shape(format!(
                "{perm:?} is not a permutation of {n} inputs"
            )));
        }
        Self::from_fn(self.n, |y| {
            let mut src = 0u32;
            for (j, &p) in perm.iter().enumerate() {
                src |= (y >> p & 1) << j;
            }
            self.get(src)
        })
    }

    /// `g'(y) = g(y with input j negated)`, `j` zero-based.
    pub fn negate_input(&self, j: u32) -> Result<Self> {
        if j >= self.n {
            return Err(Error::Range(format!(
                "input {j} out of range for n = {}",
                self.n
            )));
        }
        Self::from_fn(self.n, |y| self.get(y ^ (1 << j)))
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len() as u32)
            .map(|y| if self.get(y) { '1' } else { '0' })
            .collect()
    }

    pub fn to_hex_string(&self) -> String {
        let digits = (self.len() / 4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let mut v = 0u32;
                for b in 0..4 {
                    let idx = d * 4 + b;
                    if idx < self.len() && self.get(idx as u32) {
                        v |= 1 << b;
                    }
                }
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }
}

/// Walsh coefficients `ĝ(w) = Σ_y g(y) (-1)^{w·y}` indexed by mask `w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalshSpectrum {
    n: u32,
    coeffs: Vec<i64>,
}

impl WalshSpectrum {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn get(&self, w: u32) -> i64 {
        self.coeffs[w as usize]
    }
}

/// Fast Walsh–Hadamard transform of the 0/1-valued truth table.
pub fn walsh_transform(f: &BooleanFunction) -> WalshSpectrum {
    let mut a: Vec<i64> = (0..f.len() as u32).map(|y| i64::from(f.get(y))).collect();
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h <<= 1;
    }
    WalshSpectrum { n: f.n, coeffs: a }
}

/// Weight and correlation-immunity data read off a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CiProfile {
    pub weight: u64,
    pub ci_order: u32,
    pub q_at_order: u64,
    /// `ci_order` for balanced functions, `-1` otherwise.
    pub resilient_order: i32,
}

/// Classifies the spectrum. The order is the largest `k` with `ĝ(w) = 0` for
/// every `1 <= popcount(w) <= k`; constant functions get order `n`.
pub fn ci_order(s: &WalshSpectrum) -> CiProfile {
    let weight = s.coeffs[0] as u64;
    let first_nonzero = s
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(_, &c)| c != 0)
        .map(|(w, _)| w.count_ones())
        .min();
    let ci_order = first_nonzero.map_or(s.n, |p| p - 1);
    let resilient_order = if weight == 1u64 << (s.n - 1) {
        ci_order as i32
    } else {
        -1
    };
    CiProfile {
        weight,
        ci_order,
        q_at_order: weight >> ci_order,
        resilient_order,
    }
}

/// Convenience wrapper: transform then classify.
pub fn classify(f: &BooleanFunction) -> CiProfile {
    ci_order(&walsh_transform(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_walsh(f: &BooleanFunction) -> Vec<i64> {
        (0..f.len() as u32)
            .map(|w| {
                f.support()
                    .map(|y| if (w & y).count_ones() % 2 == 0 { 1 } else { -1 })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn zero_function_has_zero_spectrum() {
        let f = BooleanFunction::zero(2).unwrap();
        assert_eq!(walsh_transform(&f).coeffs(), &[0, 0, 0, 0]);
    }

    #[test]
    fn and_gate_spectrum() {
        let f = BooleanFunction::from_u64(2, 0b1000).unwrap();
        assert_eq!(walsh_transform(&f).coeffs(), &[1, -1, -1, 1]);
    }

    #[test]
    fn parity3_spectrum_matches_naive() {
        let f = BooleanFunction::from_fn(3, |y| y.count_ones() % 2 == 1).unwrap();
        let s = walsh_transform(&f);
        assert_eq!(s.coeffs(), naive_walsh(&f).as_slice());
        assert_eq!(s.get(0), 4);
        assert_eq!(s.get(7), -4);
        assert!((1..7).all(|w| s.get(w) == 0));
    }

    #[test]
    fn constant_one_has_full_order() {
        let f = BooleanFunction::zero(3).unwrap().complement();
        let p = classify(&f);
        assert_eq!((p.weight, p.ci_order, p.resilient_order), (8, 3, -1));
    }

    #[test]
    fn dictator_has_order_zero() {
        let f = BooleanFunction::from_fn(3, |y| y & 1 == 1).unwrap();
        let s = walsh_transform(&f);
        assert_eq!(s.get(1), -4);
        let p = ci_order(&s);
        assert_eq!(p.ci_order, 0);
        assert_eq!(p.resilient_order, 0);
    }

    #[test]
    fn parity4_is_three_resilient() {
        let f = BooleanFunction::from_fn(4, |y| y.count_ones() % 2 == 1).unwrap();
        assert_eq!(walsh_transform(&f).coeffs(), naive_walsh(&f).as_slice());
        let p = classify(&f);
        assert_eq!((p.ci_order, p.resilient_order, p.q_at_order), (3, 3, 1));
    }

    #[test]
    fn text_formats_round_trip() {
        let f = BooleanFunction::from_bit_string(3, "01101001").unwrap();
        assert_eq!(f.to_hex_string(), "96");
        assert_eq!(BooleanFunction::from_hex_string(3, "0x96").unwrap(), f);
        assert_eq!(BooleanFunction::parse(3, "96").unwrap(), f);
        assert_eq!(BooleanFunction::parse(3, "01101001").unwrap(), f);
        assert_eq!(f.to_bit_string(), "01101001");
        let xor = BooleanFunction::from_hex_string(2, "6").unwrap();
        assert_eq!(xor.to_bit_string(), "0110");
        let one = BooleanFunction::from_hex_string(1, "2").unwrap();
        assert_eq!(one.to_bit_string(), "01");
    }

    #[test]
    fn malformed_tables_are_rejected() {
        assert!(matches!(
            BooleanFunction::from_bit_string(2, "011"),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            BooleanFunction::from_bit_string(2, "01a1"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            BooleanFunction::from_hex_string(2, "g"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            BooleanFunction::from_hex_string(1, "4"),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            BooleanFunction::from_u64(2, 0x10),
            Err(Error::Shape(_))
        ));
        assert!(matches!(BooleanFunction::zero(25), Err(Error::Capacity(_))));
        assert!(matches!(BooleanFunction::zero(0), Err(Error::Range(_))));
    }

    #[test]
    fn complement_keeps_table_length() {
        let f = BooleanFunction::from_u64(2, 0b0110).unwrap();
        assert_eq!(f.complement().to_bit_string(), "1001");
        assert_eq!(f.complement().complement(), f);
    }

    #[test]
    fn permutation_moves_inputs() {
        // g = y1: moving input 0 to position 2 gives g' = y3.
        let f = BooleanFunction::from_fn(3, |y| y & 1 == 1).unwrap();
        let g = f.permute_inputs(&[2, 0, 1]).unwrap();
        assert_eq!(g, BooleanFunction::from_fn(3, |y| y & 4 != 0).unwrap());
        assert!(f.permute_inputs(&[0, 0, 1]).is_err());
    }
}
