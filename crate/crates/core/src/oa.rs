//! Two-level orthogonal arrays as supports of boolean functions.
//!
//! A row is an `n`-vector over `{0,1}`; entry `j` is input `y_{j+1}`. In the
//! text format the leftmost character is column 1.

use std::collections::HashSet;
use std::path::Path;

use serde::Serialize;

use crate::boolfn::{classify, BooleanFunction};
use crate::error::{Error, Result};

pub type OaRow = Vec<u8>;

fn row_of_index(n: u32, y: u32) -> OaRow {
    (0..n).map(|j| (y >> j & 1) as u8).collect()
}

fn index_of_row(n: u32, row: &[u8]) -> Result<u32> {
    if row.len() != n as usize {
        return Err(Error::Shape(format!(
            "row has {} columns, expected {n}",
            row.len()
        )));
    }
    row.iter()
        .enumerate()
        .try_fold(0u32, |acc, (j, &b)| match b {
            0 => Ok(acc),
            1 => Ok(acc | 1 << j),
            _ => Err(Error::Shape(format!(
                "row entry {b} is not a two-level symbol"
            ))),
        })
}

/// Rows on which `f` is 1, sorted by table index.
pub fn to_orthogonal_array(f: &BooleanFunction) -> Vec<OaRow> {
    f.support().map(|y| row_of_index(f.n(), y)).collect()
}

/// Indicator function of a set of distinct rows.
pub fn from_orthogonal_array(n: u32, rows: &[OaRow]) -> Result<BooleanFunction> {
    let mut f = BooleanFunction::zero(n)?;
    for row in rows {
        let y = index_of_row(n, row)?;
        if f.get(y) {
            return Err(Error::DuplicateRow(format_row(row)));
        }
        f.set(y, true);
    }
    Ok(f)
}

pub fn format_row(row: &[u8]) -> String {
    row.iter()
        .map(|&b| if b == 1 { '1' } else { '0' })
        .collect()
}

/// Parses the line-oriented text format: one row of `0`/`1` characters per
/// line, `#` starts a comment, blank lines are skipped. Returns the column
/// count and the rows.
pub fn parse_rows(text: &str) -> Result<(u32, Vec<OaRow>)> {
    let mut width: Option<usize> = None;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(Error::Parse(format!(
                    "line {}: invalid symbol {c:?}",
                    lineno + 1
                ))),
            })
            .collect::<Result<OaRow>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Shape(format!(
                    "line {}: row has {} columns, expected {w}",
                    lineno + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        rows.push(row);
    }
    let n = width.ok_or_else(|| Error::Parse("no rows in orthogonal array".into()))?;
    Ok((n as u32, rows))
}

pub fn read_rows(path: &Path) -> Result<(u32, Vec<OaRow>)> {
    parse_rows(&std::fs::read_to_string(path)?)
}

pub fn write_rows(rows: &[OaRow]) -> String {
    rows.iter().map(|r| format_row(r) + "\n").collect()
}

/// Outcome of checking a row set for a requested strength.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OaReport {
    pub n: u32,
    pub runs: usize,
    pub strength: u32,
    /// `runs / 2^strength` when the strength holds.
    pub index: Option<u64>,
    pub holds: bool,
    /// Largest strength the array actually has.
    pub max_strength: u32,
}

/// Checks that every `k` columns carry each of the `2^k` patterns equally
/// often, by direct pattern counting over all column subsets.
pub fn check_strength(n: u32, rows: &[OaRow], k: u32) -> Result<OaReport> {
    if k > n {
        return Err(Error::Range(format!(
            "strength {k} exceeds column count {n}"
        )));
    }
    let f = from_orthogonal_array(n, rows)?;
    let indices: Vec<u32> = f.support().collect();
    let holds = has_strength(n, &indices, k);
    let max_strength = classify(&f).ci_order;
    Ok(OaReport {
        n,
        runs: rows.len(),
        strength: k,
        index: holds.then(|| rows.len() as u64 >> k),
        holds,
        max_strength,
    })
}

fn has_strength(n: u32, indices: &[u32], k: u32) -> bool {
    let runs = indices.len();
    if !runs.is_multiple_of(1 << k) {
        return false;
    }
    let target = runs >> k;
    (0u32..1 << n)
        .filter(|cols| cols.count_ones() == k)
        .all(|cols| {
            let mut counts = vec![0usize; 1 << k];
            for &y in indices {
                let mut pattern = 0usize;
                for (slot, j) in (0..n).filter(|j| cols >> j & 1 == 1).enumerate() {
                    pattern |= ((y >> j & 1) as usize) << slot;
                }
                counts[pattern] += 1;
            }
            counts.iter().all(|&c| c == target)
        })
}

/// Distinctness check used by callers holding raw rows.
pub fn all_distinct(rows: &[OaRow]) -> bool {
    let mut seen = HashSet::new();
    rows.iter().all(|r| seen.insert(r.clone()))
}
