//! Hadamard matrices at tiny orders and their link to order-2 correlation
//! immunity: `H_n = 2^n n! N(n-1, 2, n/4)` for `n > 2`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::enumerate::{count_single, CensusOptions};
use crate::error::{Error, Result};

/// Largest order counted at all.
pub const MAX_ORDER: usize = 8;
/// Largest order counted without the long-running flag.
pub const DEFAULT_MAX_ORDER: usize = 4;

/// Square matrix over `{+1, -1}`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    order: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::Shape("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(order * order);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != order {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {order}",
                    r.len()
                )));
            }
            if let Some(v) = r.iter().find(|v| v.abs() != 1) {
                return Err(Error::Shape(format!("entry {v} in row {i} is not ±1")));
            }
            entries.extend_from_slice(r);
        }
        Ok(Self { order, entries })
    }

    /// Column `j` packed with bit `i` set when row `i` holds `-1`.
    fn column_mask(&self, j: usize) -> u64 {
        (0..self.order)
            .filter(|&i| self.get(i, j) < 0)
            .fold(0, |m, i| m | 1 << i)
    }

    fn from_column_masks(order: usize, cols: &[u64]) -> Self {
        let mut entries = vec![1i8; order * order];
        for (j, &c) in cols.iter().enumerate() {
            for i in 0..order {
                if c >> i & 1 == 1 {
                    entries[i * order + j] = -1;
                }
            }
        }
        Self { order, entries }
    }

    /// Rows of `+` and `-`, one per line.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.chars()
                    .map(|c| match c {
                        '+' => Ok(1),
                        '-' => Ok(-1),
                        _ => Err(Error::Parse(format!("invalid matrix symbol {c:?}"))),
                    })
                    .collect::<Result<Vec<i8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }

    pub fn to_text(&self) -> String {
        (0..self.order)
            .map(|i| {
                (0..self.order)
                    .map(|j| if self.get(i, j) > 0 { '+' } else { '-' })
                    .collect::<String>()
                    + "\n"
            })
            .collect()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.order + j]
    }

    pub fn negate_column(&mut self, j: usize) {
        for i in 0..self.order {
            self.entries[i * self.order + j] *= -1;
        }
    }

    /// Row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for &src in perm {
            entries.extend_from_slice(&self.entries[src * self.order..(src + 1) * self.order]);
        }
        Self {
            order: self.order,
            entries,
        }
    }
}

/// All column pairs have dot product zero.
pub fn is_hadamard(m: &SignMatrix) -> bool {
    let n = m.order;
    (0..n).all(|a| {
        (a + 1..n).all(|b| {
            (0..n)
                .map(|i| i32::from(m.get(i, a)) * i32::from(m.get(i, b)))
                .sum::<i32>()
                == 0
        })
    })
}

/// Validating wrapper over raw rows.
pub fn is_hadamard_rows(rows: &[Vec<i8>]) -> Result<bool> {
    SignMatrix::from_rows(rows).map(|m| is_hadamard(&m))
}

fn check_order(order: usize, allow_large: bool) -> Result<()> {
    if order == 0 {
        return Err(Error::Range("order must be positive".into()));
    }
    if order > MAX_ORDER {
        return Err(Error::Capacity(format!(
            "Hadamard counting limited to order <= {MAX_ORDER}"
        )));
    }
    if order > DEFAULT_MAX_ORDER && !allow_large {
        return Err(Error::Capacity(format!(
            "order {order} needs the long-running search flag (default limit {DEFAULT_MAX_ORDER})"
        )));
    }
    Ok(())
}

/// Every `±1` matrix of the order checked with [`is_hadamard`]; optionally
/// only those whose first column is all `+1`.
fn brute_force(order: usize, normalized: bool) -> u64 {
    let cells = order * order;
    (0u64..1 << cells)
        .filter(|bits| {
            let rows: Vec<Vec<i8>> = (0..order)
                .map(|i| {
                    (0..order)
                        .map(|j| {
                            if bits >> (i * order + j) & 1 == 1 {
                                -1
                            } else {
                                1
                            }
                        })
                        .collect()
                })
                .collect();
            let m = SignMatrix::from_rows(&rows).expect("generated matrix is square");
            (!normalized || m.column_mask(0) == 0) && is_hadamard(&m)
        })
        .count() as u64
}

/// Column-by-column search: each new column is drawn from the vectors
/// orthogonal to every column placed so far. Counts are memoized on the
/// remaining candidate set.
fn backtrack(order: usize) -> u128 {
    let vectors = 1usize << order;
    let words = vectors.div_ceil(64);
    let orth: Vec<Vec<u64>> = (0..vectors as u64)
        .map(|a| {
            let mut set = vec![0u64; words];
            for b in 0..vectors as u64 {
                if order.is_multiple_of(2) && (a ^ b).count_ones() as usize == order / 2 {
                    set[(b >> 6) as usize] |= 1 << (b & 63);
                }
            }
            set
        })
        .collect();
    let mut all = vec![u64::MAX; words];
    if vectors < 64 {
        all[0] = (1u64 << vectors) - 1;
    }
    fn go(
        cands: &[u64],
        left: usize,
        orth: &[Vec<u64>],
        memo: &mut HashMap<(Vec<u64>, usize), u128>,
    ) -> u128 {
        if left == 0 {
            return 1;
        }
        if left == 1 {
            return cands.iter().map(|w| u128::from(w.count_ones())).sum();
        }
        if let Some(&c) = memo.get(&(cands.to_vec(), left)) {
            return c;
        }
        let mut total = 0;
        for (wi, &w) in cands.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let v = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let next: Vec<u64> = cands.iter().zip(&orth[v]).map(|(a, b)| a & b).collect();
                total += go(&next, left - 1, orth, memo);
            }
        }
        memo.insert((cands.to_vec(), left), total);
        total
    }
    go(&all, order, &orth, &mut HashMap::new())
}

/// `H_order`: brute force up to order 4, backtracking beyond.
pub fn count_hadamard(order: usize, allow_large: bool) -> Result<u128> {
    check_order(order, allow_large)?;
    Ok(if order <= DEFAULT_MAX_ORDER {
        u128::from(brute_force(order, false))
    } else {
        backtrack(order)
    })
}

/// Backtracking count at any supported order, for cross-checks.
pub fn count_hadamard_backtracking(order: usize) -> Result<u128> {
    check_order(order, true)?;
    Ok(backtrack(order))
}

/// Hadamard matrices whose first column is all `+1`, by brute force.
pub fn count_normalized(order: usize) -> Result<u64> {
    check_order(order, false)?;
    Ok(brute_force(order, true))
}

/// The Sylvester matrix of order `2^m`, built from the column masks of the
/// parity characters.
pub fn sylvester(m: u32) -> SignMatrix {
    let order = 1usize << m;
    let cols: Vec<u64> = (0..order)
        .map(|w| {
            (0..order)
                .filter(|&y| (w & y).count_ones() % 2 == 1)
                .fold(0, |acc, y| acc | 1 << y)
        })
        .collect();
    SignMatrix::from_column_masks(order, &cols)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub order: usize,
    pub lhs: String,
    pub census_count: u64,
    pub rhs: String,
    pub holds: bool,
}

/// Checks `H_order = 2^order · order! · N(order-1, 2, order/4)` with the
/// census count supplied by `census`.
pub fn verify_identity_with(
    order: usize,
    allow_large: bool,
    census: impl FnOnce(u32, u32, u64) -> Result<u64>,
) -> Result<IdentityReport> {
    if order <= 2 || !order.is_multiple_of(4) {
        return Err(Error::Range(format!(
            "identity needs order > 2 divisible by 4, got {order}"
        )));
    }
    let lhs = BigUint::from(count_hadamard(order, allow_large)?);
    let census_count = census(order as u32 - 1, 2, order as u64 / 4)?;
    let factorial: BigUint = (1..=order as u64).map(BigUint::from).product();
    let rhs = (BigUint::one() << order) * factorial * census_count;
    Ok(IdentityReport {
        order,
        lhs: lhs.to_string(),
        census_count,
        rhs: rhs.to_string(),
        holds: lhs == rhs,
    })
}

/// [`verify_identity_with`] backed by the exhaustive census.
pub fn verify_identity(
    order: usize,
    allow_large: bool,
    opts: &CensusOptions,
) -> Result<IdentityReport> {
    verify_identity_with(order, allow_large, |n, k, q| {
        Ok(count_single(n, k, q, opts)?.count)
    })
}
