//! Independent checks of the two structural counting facts behind the
//! asymptotic estimate:
//!
//! * `N(n,k,q)` is the coefficient of `x_∅^{2^k q}` in
//!   `F(x) = Π_{α ∈ {±1}^n} (1 + D Π_{S ∈ I_k} x_S^{α_S})`, divided by
//!   `D^{2^k q}`. The product is expanded symbolically with `D` kept as a
//!   formal variable.
//! * The torus points where the integrand `|G(θ)| = 1` form a lattice of
//!   `2^Q` points, `Q = Σ_{j=1}^k j C(n,j)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};

/// All `S ⊆ [n]` with `|S| <= k`, ordered by cardinality then
/// lexicographically. Subsets are bitmasks with element `j` at bit `j - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetFamily {
    pub n: u32,
    pub k: u32,
    members: Vec<u32>,
}

fn elements(mask: u32) -> Vec<u32> {
    (0..32).filter(|j| mask >> j & 1 == 1).collect()
}

impl SubsetFamily {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if k == 0 || k > n || n > 16 {
            return Err(Error::Range(format!(
                "subset family needs 1 <= k <= n <= 16, got n = {n}, k = {k}"
            )));
        }
        let mut members: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() <= k).collect();
        members.sort_by(|&a, &b| {
            a.count_ones()
                .cmp(&b.count_ones())
                .then_with(|| elements(a).cmp(&elements(b)))
        });
        Ok(Self { n, k, members })
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    /// `M = Σ_{j=0}^k C(n,j)`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `α_S = Π_{j ∈ S} α_j` for the sign vector whose `-1` entries are the
    /// set bits of `flips`.
    fn character(flips: u32, s: u32) -> i32 {
        if (flips & s).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Integer polynomial in the formal variable `D`, coefficient of `D^i` at
/// index `i`, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DPoly(pub Vec<i64>);

impl DPoly {
    fn trim(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&self, other: &DPoly) -> DPoly {
        let len = self.0.len().max(other.0.len());
        let v = (0..len)
            .map(|i| self.0.get(i).copied().unwrap_or(0) + other.0.get(i).copied().unwrap_or(0))
            .collect();
        DPoly(v).trim()
    }

    fn mul(&self, other: &DPoly) -> DPoly {
        if self.is_zero() || other.is_zero() {
            return DPoly::default();
        }
        let mut v = vec![0i64; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        DPoly(v).trim()
    }

    /// `Some(c)` when the polynomial is `c D^degree` (including `c = 0`).
    pub fn as_monomial(&self, degree: usize) -> Option<i64> {
        let clean = self
            .0
            .iter()
            .enumerate()
            .all(|(i, &c)| i == degree || c == 0);
        clean.then(|| self.0.get(degree).copied().unwrap_or(0))
    }
}

/// Laurent polynomial in `M` variables with `D`-polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePolynomial {
    vars: usize,
    terms: BTreeMap<Vec<i32>, DPoly>,
}

impl SparsePolynomial {
    pub fn one(vars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; vars], DPoly(vec![1]));
        Self { vars, terms }
    }

    pub fn from_terms(
        vars: usize,
        terms: impl IntoIterator<Item = (Vec<i32>, DPoly)>,
    ) -> Result<Self> {
        let mut p = Self {
            vars,
            terms: BTreeMap::new(),
        };
        for (e, c) in terms {
            if e.len() != vars {
                return Err(Error::Shape(format!(
                    "exponent vector of length {}, expected {vars}",
                    e.len()
                )));
            }
            p.add_term(e, &c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Vec<i32>, coeff: &DPoly) {
        let slot = self.terms.entry(exps).or_default();
        *slot = slot.add(coeff);
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &DPoly)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exps: &[i32]) -> Option<&DPoly> {
        self.terms.get(exps)
    }

    pub fn mul(&self, other: &SparsePolynomial) -> SparsePolynomial {
        assert_eq!(
            self.vars, other.vars,
            "multiplying polynomials over different variable sets"
        );
        let mut out = SparsePolynomial {
            vars: self.vars,
            terms: BTreeMap::new(),
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, &ca.mul(cb));
            }
        }
        out
    }
}

/// Largest `n` for which the product is expanded.
pub const MAX_GF_VARS: u32 = 3;

/// Expands `F(x)` by `2^n` successive sparse multiplications.
pub fn generating_function(n: u32, k: u32) -> Result<(SubsetFamily, SparsePolynomial)> {
    if n > MAX_GF_VARS {
        return Err(Error::Range(format!(
            "generating function limited to n <= {MAX_GF_VARS}, got {n}"
        )));
    }
    let family = SubsetFamily::new(n, k)?;
    let m = family.len();
    let mut f = SparsePolynomial::one(m);
    for flips in 0u32..1 << n {
        let exps: Vec<i32> = family
            .members()
            .iter()
            .map(|&s| SubsetFamily::character(flips, s))
            .collect();
        let factor = SparsePolynomial::from_terms(
            m,
            [(vec![0; m], DPoly(vec![1])), (exps, DPoly(vec![0, 1]))],
        )?;
        f = f.mul(&factor);
    }
    Ok((family, f))
}

/// Reads `N` off the coefficient of `x_∅^weight`, requiring that coefficient
/// to be exactly `N · D^weight`.
pub fn extract_constant_term(f: &SparsePolynomial, weight: u64) -> Result<u64> {
    let mut exps = vec![0i32; f.vars];
    exps[0] = weight as i32;
    let Some(coeff) = f.coefficient(&exps) else {
        return Ok(0);
    };
    let value = coeff.as_monomial(weight as usize).ok_or_else(|| {
        Error::Structure(format!(
            "coefficient of x_∅^{weight} is {:?}, not a multiple of D^{weight}",
            coeff.0
        ))
    })?;
    u64::try_from(value)
        .map_err(|_| Error::Structure(format!("negative count {value} at weight {weight}")))
}

/// Every term of `F` pairs `D^m` with `x_∅^m`.
pub fn is_graded(f: &SparsePolynomial) -> bool {
    f.terms()
        .all(|(e, c)| e[0] >= 0 && c.as_monomial(e[0] as usize).is_some())
}

/// `N(n,k,q)` via the generating function, `n <= 3`.
pub fn constant_term_count(n: u32, k: u32, q: u64) -> Result<u64> {
    if k == 0 || k > n {
        return Err(Error::Range(format!(
            "need 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    if q > 1 << (n - k) {
        return Err(Error::Range(format!("q = {q} exceeds 2^(n-k)")));
    }
    let (_, f) = generating_function(n, k)?;
    extract_constant_term(&f, q << k)
}

/// A point of the critical lattice: `θ_S = 2π t_S / 2^k`, `t_S` stored per
/// family member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticePoint {
    pub residues: Vec<u32>,
}

/// Equation data for `2^{|S|} Σ_{T ⊇ S, T ∈ I_k} t_T ≡ 0 (mod 2^k)`.
struct LatticeSystem {
    modulus: u64,
    sizes: Vec<u32>,
    // strict supersets of each member, as family indices
    supersets: Vec<Vec<usize>>,
}

impl LatticeSystem {
    fn new(family: &SubsetFamily) -> Self {
        let ms = family.members();
        let supersets = ms
            .iter()
            .map(|&s| {
                (0..ms.len())
                    .filter(|&j| ms[j] != s && ms[j] & s == s)
                    .collect()
            })
            .collect();
        Self {
            modulus: 1 << family.k,
            sizes: ms.iter().map(|s| s.count_ones()).collect(),
            supersets,
        }
    }

    fn residual(&self, i: usize, t_self: u64, t: &[u32]) -> u64 {
        let sum: u64 = t_self
            + self.supersets[i]
                .iter()
                .map(|&j| u64::from(t[j]))
                .sum::<u64>();
        (sum << self.sizes[i]) % self.modulus
    }

    fn satisfied(&self, t: &[u32]) -> bool {
        (0..t.len()).all(|i| self.residual(i, u64::from(t[i]), t) == 0)
    }

    /// Number of admissible `t_S` given superset sum `c`, if the same for
    /// every `c`.
    fn uniform_fiber(&self, i: usize) -> Option<u64> {
        let m = self.modulus;
        let count_for = |c: u64| {
            (0..m)
                .filter(|&t| ((t + c) << self.sizes[i]).is_multiple_of(m))
                .count() as u64
        };
        let first = count_for(0);
        (1..m).all(|c| count_for(c) == first).then_some(first)
    }
}

/// The lattice points satisfy every equation.
pub fn is_lattice_point(family: &SubsetFamily, p: &LatticePoint) -> bool {
    p.residues.len() == family.len() && LatticeSystem::new(family).satisfied(&p.residues)
}

/// `|G(θ)| = 1` holds iff `f_α(θ) = Σ_S α_S θ_S ≡ 0` for every sign vector.
pub fn on_unit_modulus_set(family: &SubsetFamily, p: &LatticePoint) -> bool {
    let m = 1u64 << family.k;
    (0u32..1 << family.n).all(|flips| {
        let s: i64 = family
            .members()
            .iter()
            .zip(&p.residues)
            .map(|(&set, &t)| i64::from(SubsetFamily::character(flips, set)) * i64::from(t))
            .sum();
        s.rem_euclid(m as i64) == 0
    })
}

/// `Q = Σ_{j=1}^k j C(n,j)`.
pub fn q_exponent(n: u32, k: u32) -> u64 {
    (1..=k)
        .map(|j| u64::from(j) * crate::combin::binomial(u64::from(n), u64::from(j)).unwrap() as u64)
        .sum()
}

/// Result of counting the critical lattice two ways.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeCount {
    pub n: u32,
    pub k: u32,
    pub q_exponent: u64,
    /// Back-substitution count.
    #[serde(serialize_with = "decimal")]
    pub count: BigUint,
    /// Full residue-grid filter, when within `GRID_LIMIT`.
    #[serde(serialize_with = "decimal_opt")]
    pub grid_count: Option<BigUint>,
    /// `2^Q`.
    #[serde(serialize_with = "decimal")]
    pub expected: BigUint,
}

fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn decimal_opt<S: serde::Serializer>(
    v: &Option<BigUint>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl LatticeCount {
    pub fn agrees(&self) -> bool {
        self.count == self.expected && self.grid_count.as_ref().is_none_or(|g| *g == self.count)
    }
}

/// Largest residue grid `(2^k)^M` filtered exhaustively.
pub const GRID_LIMIT: u64 = 1 << 24;
/// Largest `n` for the back-substitution count.
pub const MAX_LATTICE_VARS: u32 = 8;

/// Solves the triangular system in order of decreasing `|S|`. When the
/// number of admissible `t_S` does not depend on the already-fixed supersets
/// the count is a product of fiber sizes; otherwise the solutions are
/// enumerated.
pub fn back_substitution_count(family: &SubsetFamily) -> Result<BigUint> {
    let sys = LatticeSystem::new(family);
    let mut count = BigUint::one();
    for i in (0..family.len()).rev() {
        match sys.uniform_fiber(i) {
            Some(f) => count *= f,
            None => {
                let points = lattice_points(family, GRID_LIMIT)?;
                return Ok(BigUint::from(points.len()));
            }
        }
    }
    Ok(count)
}

/// Enumerates every lattice point by depth-first back-substitution; fails
/// once more than `limit` points are found.
pub fn lattice_points(family: &SubsetFamily, limit: u64) -> Result<Vec<LatticePoint>> {
    let sys = LatticeSystem::new(family);
    let m = family.len();
    let mut t = vec![0u32; m];
    let mut out = Vec::new();
    fn dfs(
        sys: &LatticeSystem,
        level: usize,
        t: &mut Vec<u32>,
        out: &mut Vec<LatticePoint>,
        limit: u64,
    ) -> Result<()> {
        // levels run over members from last (largest |S|) to first
        if level == t.len() {
            if out.len() as u64 >= limit {
                return Err(Error::BudgetExceeded(format!(
                    "more than {limit} lattice points"
                )));
            }
            out.push(LatticePoint {
                residues: t.clone(),
            });
            return Ok(());
        }
        let i = t.len() - 1 - level;
        for v in 0..sys.modulus {
            if sys.residual(i, v, t) == 0 {
                t[i] = v as u32;
                dfs(sys, level + 1, t, out, limit)?;
            }
        }
        t[i] = 0;
        Ok(())
    }
    dfs(&sys, 0, &mut t, &mut out, limit)?;
    Ok(out)
}

/// Filters the whole grid `(Z / 2^k)^M`.
pub fn grid_count(family: &SubsetFamily) -> Result<u64> {
    let sys = LatticeSystem::new(family);
    let m = family.len();
    let size = sys
        .modulus
        .checked_pow(m as u32)
        .filter(|&s| s <= GRID_LIMIT)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "residue grid (2^{})^{m} exceeds {GRID_LIMIT}",
                family.k
            ))
        })?;
    let mut t = vec![0u32; m];
    let mut found = 0u64;
    for _ in 0..size {
        if sys.satisfied(&t) {
            found += 1;
        }
        for d in t.iter_mut() {
            *d += 1;
            if u64::from(*d) < sys.modulus {
                break;
            }
            *d = 0;
        }
    }
    Ok(found)
}

/// Counts the critical lattice by back-substitution and, where the grid is
/// small enough, by exhaustive filtering.
pub fn lattice_count(n: u32, k: u32) -> Result<LatticeCount> {
    if n > MAX_LATTICE_VARS {
        return Err(Error::Range(format!(
            "lattice count limited to n <= {MAX_LATTICE_VARS}, got {n}"
        )));
    }
    let family = SubsetFamily::new(n, k)?;
    let count = back_substitution_count(&family)?;
    let grid = match grid_count(&family) {
        Ok(c) => Some(BigUint::from(c)),
        Err(Error::BudgetExceeded(_)) => None,
        Err(e) => return Err(e),
    };
    let q = q_exponent(n, k);
    Ok(LatticeCount {
        n,
        k,
        q_exponent: q,
        count,
        grid_count: grid,
        expected: BigUint::one() << q,
    })
}
