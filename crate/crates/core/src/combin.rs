//! Binomial coefficients and the revolving-door combination order.
//!
//! The revolving-door list `R(N, t)` of `t`-subsets of `{0, ..., N-1}` is
//! `R(N-1, t)` followed by the reversal of `R(N-1, t-1)` with `N-1` added to
//! every member. Consecutive subsets differ by one element swapped out and one
//! swapped in.

/// `C(n, k)` in `u128`, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is always integral
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Binomial table for exact-fit `u64` lookups up to `max_n`.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    rows: Vec<Vec<u64>>,
}

impl BinomialTable {
    pub fn new(max_n: usize) -> Self {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![1u64; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1].saturating_add(rows[n - 1][k]);
            }
            rows.push(row);
        }
        Self { rows }
    }

    pub fn get(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.rows[n][k]
        }
    }
}

/// The subset of rank `rank` in `R(universe, t)`, ascending.
pub fn unrank_revolving(
    table: &BinomialTable,
    universe: usize,
    t: usize,
    mut rank: u64,
) -> Vec<u32> {
    debug_assert!(rank < table.get(universe, t));
    let mut out = Vec::with_capacity(t);
    let (mut n, mut t) = (universe, t);
    while t > 0 && t < n {
        let head = table.get(n - 1, t);
        if rank >= head {
            rank = table.get(n - 1, t - 1) - 1 - (rank - head);
            out.push((n - 1) as u32);
            t -= 1;
        }
        n -= 1;
    }
    out.extend((0..t as u32).rev());
    out.reverse();
    out
}

/// Current subset in revolving-door order with constant-time successor.
#[derive(Debug, Clone)]
pub struct RevolvingDoor {
    // c[1..=t] ascending, c[t+1] = universe sentinel
    c: Vec<u32>,
    t: usize,
}

impl RevolvingDoor {
    pub fn from_subset(universe: usize, subset: &[u32]) -> Self {
        let mut c = Vec::with_capacity(subset.len() + 2);
        c.push(0);
        c.extend_from_slice(subset);
        c.push(universe as u32);
        Self { c, t: subset.len() }
    }

    pub fn subset(&self) -> &[u32] {
        &self.c[1..=self.t]
    }

    /// Advances to the next subset; returns `(removed, added)` or `None` at
    /// the end of the list.
    pub fn advance(&mut self) -> Option<(u32, u32)> {
        let t = self.t;
        let c = &mut self.c;
        if t == 0 || t as u32 == c[t + 1] {
            return None;
        }
        let mut j;
        let mut increase;
        if t % 2 == 1 {
            if c[1] + 1 < c[2] {
                let old = c[1];
                c[1] += 1;
                return Some((old, c[1]));
            }
            j = 2;
            increase = false;
        } else {
            if c[1] > 0 {
                let old = c[1];
                c[1] -= 1;
                return Some((old, c[1]));
            }
            j = 2;
            increase = true;
        }
        loop {
            if j > t {
                return None;
            }
            if !increase {
                // c[j] == c[j-1] + 1
                if c[j] as usize >= j {
                    let removed = c[j];
                    c[j] = c[j - 1];
                    c[j - 1] = j as u32 - 2;
                    return Some((removed, j as u32 - 2));
                }
                j += 1;
                increase = true;
            } else {
                // c[j-1] == j - 2
                if c[j] + 1 < c[j + 1] {
                    let removed = c[j - 1];
                    c[j - 1] = c[j];
                    c[j] += 1;
                    return Some((removed, c[j]));
                }
                j += 1;
                increase = false;
            }
        }
    }
}
