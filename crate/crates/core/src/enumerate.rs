//! Exact census of `N(n,k,q)` by walking support sets of every admissible
//! weight in revolving-door order.
//!
//! Each step of the walk swaps one support point, so only the `M - 1`
//! tracked Walsh coefficients (masks of popcount `1..=k`) need an update of
//! `±1` each. A function is counted when all tracked coefficients vanish.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combin::{binomial, unrank_revolving, BinomialTable, RevolvingDoor};
use crate::error::{Error, Result};

/// Largest `n` accepted without `allow_large`.
pub const DEFAULT_MAX_VARS: u32 = 5;
/// Largest `n` accepted at all.
pub const HARD_MAX_VARS: u32 = 6;

const CHUNK: u64 = 1 << 22;
const TIME_CHECK_MASK: u64 = (1 << 20) - 1;

/// Resource limits for a census.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Upper bound on the number of support sets visited.
    pub max_combinations: u128,
    pub max_duration: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_combinations: 1 << 33,
            max_duration: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    pub workers: usize,
    pub budget: Budget,
    /// Raises the variable cap from 5 to 6.
    pub allow_large: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            budget: Budget::default(),
            allow_large: false,
        }
    }
}

impl CensusOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers,
            ..Self::default()
        }
    }
}

/// Exact count of order-`k` correlation-immune functions of weight `2^k q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub n: u32,
    pub k: u32,
    pub q: u64,
    pub weight: u64,
    pub count: u64,
}

/// Counts for every `q` in `0..=2^(n-k)` at fixed `(n, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusTable {
    pub n: u32,
    pub k: u32,
    pub entries: Vec<CensusEntry>,
    pub total: u64,
}

impl CensusTable {
    pub fn count(&self, q: u64) -> u64 {
        self.entries[q as usize].count
    }

    /// `count(q) == count(2^(n-k) - q)` for every `q`.
    pub fn is_complement_symmetric(&self) -> bool {
        let e = &self.entries;
        e.iter()
            .zip(e.iter().rev())
            .all(|(a, b)| a.count == b.count)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for e in &self.entries {
            w.serialize(e).expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let entries = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<CensusEntry>, _>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        let first = entries
            .first()
            .ok_or_else(|| Error::Parse("empty census".into()))?;
        let (n, k) = (first.n, first.k);
        let total = entries.iter().map(|e| e.count).sum();
        Ok(Self {
            n,
            k,
            entries,
            total,
        })
    }
}

fn validate(n: u32, k: u32, opts: &CensusOptions) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Range(format!(
            "need 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    let cap = if opts.allow_large {
        HARD_MAX_VARS
    } else {
        DEFAULT_MAX_VARS
    };
    if n > cap {
        return Err(Error::Range(format!(
            "census supports n <= {cap}{}, got n = {n}",
            if opts.allow_large {
                ""
            } else {
                " (use allow_large for n = 6)"
            }
        )));
    }
    if n == HARD_MAX_VARS {
        log::warn!("census at n = 6 visits up to 2^64 support sets");
    }
    if opts.workers == 0 {
        return Err(Error::Range("workers must be at least 1".into()));
    }
    Ok(())
}

/// Precomputed `(-1)^{w·y}` for every point `y` and tracked mask `w`.
struct SignTable {
    tracked: usize,
    signs: Vec<i32>,
}

impl SignTable {
    fn new(n: u32, k: u32) -> Self {
        let masks: Vec<u32> = (1u32..1 << n).filter(|w| w.count_ones() <= k).collect();
        let mut signs = Vec::with_capacity(masks.len() << n);
        for y in 0u32..1 << n {
            signs.extend(
                masks
                    .iter()
                    .map(|&w| if (w & y).count_ones() % 2 == 0 { 1 } else { -1 }),
            );
        }
        Self {
            tracked: masks.len(),
            signs,
        }
    }

    fn row(&self, y: u32) -> &[i32] {
        let m = self.tracked;
        &self.signs[y as usize * m..(y as usize + 1) * m]
    }
}

#[derive(Debug, Clone, Copy)]
struct Chunk {
    slot: usize,
    weight: usize,
    start: u64,
    len: u64,
}

struct Walk<'a> {
    points: usize,
    signs: &'a SignTable,
    binom: &'a BinomialTable,
    started: Instant,
    budget: Budget,
    cancelled: &'a AtomicBool,
}

impl Walk<'_> {
    fn out_of_time(&self) -> bool {
        self.budget
            .max_duration
            .is_some_and(|d| self.started.elapsed() > d)
    }

    fn run(&self, c: Chunk) -> Result<u64> {
        if self.cancelled.load(Ordering::Relaxed) {
            return Err(Error::BudgetExceeded("census cancelled".into()));
        }
        let subset = unrank_revolving(self.binom, self.points, c.weight, c.start);
        let m = self.signs.tracked;
        let mut coeffs = vec![0i32; m];
        for &y in &subset {
            for (a, s) in coeffs.iter_mut().zip(self.signs.row(y)) {
                *a += s;
            }
        }
        let mut nonzero = coeffs.iter().filter(|&&a| a != 0).count();
        let mut found = u64::from(nonzero == 0);
        let mut door = RevolvingDoor::from_subset(self.points, &subset);
        for step in 1..c.len {
            if step & TIME_CHECK_MASK == 0
                && (self.cancelled.load(Ordering::Relaxed) || self.out_of_time())
            {
                self.cancelled.store(true, Ordering::Relaxed);
                return Err(Error::BudgetExceeded(
                    "census exceeded its time budget".into(),
                ));
            }
            let (out, inn) = door
                .advance()
                .expect("chunk lies inside the combination list");
            let (so, si) = (self.signs.row(out), self.signs.row(inn));
            for ((a, o), i) in coeffs.iter_mut().zip(so).zip(si) {
                let d = i - o;
                if d != 0 {
                    let was = *a != 0;
                    *a += d;
                    let now = *a != 0;
                    nonzero = nonzero + usize::from(now) - usize::from(was);
                }
            }
            found += u64::from(nonzero == 0);
        }
        Ok(found)
    }
}

fn run_slices(n: u32, k: u32, qs: &[u64], opts: &CensusOptions) -> Result<Vec<CensusEntry>> {
    validate(n, k, opts)?;
    let points = 1usize << n;
    let max_q = 1u64 << (n - k);
    if let Some(&q) = qs.iter().find(|&&q| q > max_q) {
        return Err(Error::Range(format!("q = {q} exceeds 2^(n-k) = {max_q}")));
    }
    let work: u128 = qs
        .iter()
        .map(|&q| binomial(points as u64, q << k).expect("C(64, t) fits in u128"))
        .sum();
    if work > opts.budget.max_combinations {
        return Err(Error::BudgetExceeded(format!(
            "census of n = {n}, k = {k} visits {work} support sets, budget is {}",
            opts.budget.max_combinations
        )));
    }

    let binom = BinomialTable::new(points);
    let signs = SignTable::new(n, k);
    let mut chunks = Vec::new();
    for (slot, &q) in qs.iter().enumerate() {
        let weight = (q << k) as usize;
        let total = binom.get(points, weight);
        let mut start = 0;
        while start < total {
            let len = CHUNK.min(total - start);
            chunks.push(Chunk {
                slot,
                weight,
                start,
                len,
            });
            start += len;
        }
    }

    let cancelled = AtomicBool::new(false);
    let walk = Walk {
        points,
        signs: &signs,
        binom: &binom,
        started: Instant::now(),
        budget: opts.budget,
        cancelled: &cancelled,
    };
    let done = AtomicU64::new(0);
    let last_report = Mutex::new(Instant::now());
    let report = |len: u64| {
        let visited = done.fetch_add(len, Ordering::Relaxed) + len;
        let mut last = last_report.lock().expect("progress lock");
        if last.elapsed() >= Duration::from_secs(5) {
            *last = Instant::now();
            log::info!(
                "census n={n} k={k}: {visited}/{work} support sets ({:.1}%)",
                visited as f64 * 100.0 / work as f64
            );
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Capacity(format!("cannot start worker pool: {e}")))?;
    let partials: Vec<u64> = pool.install(|| {
        chunks
            .par_iter()
            .map(|&c| {
                let r = walk.run(c);
                report(c.len);
                r
            })
            .collect::<Result<Vec<u64>>>()
    })?;

    let mut counts = vec![0u64; qs.len()];
    for (c, found) in chunks.iter().zip(partials) {
        counts[c.slot] += found;
    }
    Ok(qs
        .iter()
        .zip(counts)
        .map(|(&q, count)| CensusEntry {
            n,
            k,
            q,
            weight: q << k,
            count,
        })
        .collect())
}

/// Exact table `q -> N(n,k,q)` for `0 <= q <= 2^(n-k)`.
pub fn census(n: u32, k: u32, opts: &CensusOptions) -> Result<CensusTable> {
    validate(n, k, opts)?;
    let qs: Vec<u64> = (0..=1u64 << (n - k)).collect();
    let entries = run_slices(n, k, &qs, opts)?;
    let total = entries.iter().map(|e| e.count).sum();
    Ok(CensusTable {
        n,
        k,
        entries,
        total,
    })
}

/// `N(n,k,q)` for a single weight slice.
pub fn count_single(n: u32, k: u32, q: u64, opts: &CensusOptions) -> Result<CensusEntry> {
    Ok(run_slices(n, k, &[q], opts)?[0])
}
