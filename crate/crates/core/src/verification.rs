//! Brute-force oracles for the distance claims.
//!
//! [`exhaustive_max_dt`] enumerates every square matrix of a given size and
//! base; [`check_theorem12`] audits one member of the `M_k(N)` family.

use std::cmp::Reverse;
use std::fmt;

use rayon::prelude::*;

use crate::construction::{build_mk, build_mk_unchecked};
use crate::error::{Error, Result};
use crate::matrix::{BasePrime, CodingMatrix, Symbol, MAX_BASE};
use crate::metrics::{distance_report, multiplicity_unchecked, validate_ecoc_properties, DistanceMetric};

/// Default ceiling on the number of candidates [`exhaustive_max_dt`] visits.
pub const DEFAULT_BUDGET: u128 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveOptions {
    pub budget: u128,
    /// Restrict the first row to canonical form; see [`exhaustive_max_dt`].
    pub pruning: bool,
    /// Only consider matrices without constant or mutually complementary columns.
    pub ecoc_only: bool,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        ExhaustiveOptions {
            budget: DEFAULT_BUDGET,
            pruning: false,
            ecoc_only: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveResult {
    pub n: usize,
    pub base: u32,
    pub max_d_t: u64,
    pub witness: CodingMatrix,
    pub enumerated: u128,
}

impl ExhaustiveResult {
    /// The claimed maximum for this size, if there is one.
    pub fn bound(&self) -> Option<u64> {
        claimed_max_dt(self.base, self.n)
    }

    pub fn matches_bound(&self) -> Option<bool> {
        self.bound().map(|b| b == self.max_d_t)
    }
}

/// The claimed largest `d_T` of an `n x n` matrix over base `N`. These are
/// hypotheses for the oracle to test, not facts.
///
/// Binary, `n >= 3`: `n` for even `n`, `n + 1` for odd `n`.
/// Prime `N >= 3` and `n = N^k`: `2 (N - 1) n / N`, the value `M_k(N)` attains.
/// Exhaustive search already refutes the latter at `N = n = 3`, where the
/// maximum is 6 (5 when restricted to ECOC-valid matrices).
pub fn claimed_max_dt(base: u32, n: usize) -> Option<u64> {
    let n64 = n as u64;
    if base == 2 {
        return (n >= 3).then_some(if n % 2 == 0 { n64 } else { n64 + 1 });
    }
    if !crate::matrix::is_prime(base as u64) || n < 2 {
        return None;
    }
    let mut dim = 1;
    while dim < n {
        dim *= base as usize;
    }
    (dim == n).then(|| 2 * (base as u64 - 1) * n64 / base as u64)
}

/// Exact maximum of `d_T` (Kronecker) over all `n x n` matrices with entries
/// in `0..base`, together with the first maximizer in enumeration order.
///
/// Candidates are enumerated as base-`N` numbers whose most significant digit
/// is entry `(0, 0)`, row-major. With pruning enabled the first row is fixed
/// to a non-decreasing restricted-growth string (`0` first, each step equal or
/// one larger). This loses nothing: reordering columns permutes the column
/// set and changes no row distance, and applying one alphabet permutation to
/// every entry preserves every Kronecker distance. Sorting the first row and
/// then renaming symbols by first appearance brings any matrix to that form.
/// Both moves also preserve constant columns and column complement pairs, so
/// pruning composes with `ecoc_only`.
pub fn exhaustive_max_dt(base: u32, n: usize, options: ExhaustiveOptions) -> Result<ExhaustiveResult> {
    if !(2..=MAX_BASE).contains(&base) {
        return Err(Error::UnsupportedBase(base as u64));
    }
    if n < 2 {
        return Err(Error::DegenerateDimensions { rows: n, cols: n });
    }
    let prefixes: Vec<Vec<Symbol>> = if options.pruning {
        canonical_first_rows(base, n)
    } else {
        vec![Vec::new()]
    };
    let free = if options.pruning { n * (n - 1) } else { n * n };
    let per_prefix = (base as u128)
        .checked_pow(free as u32)
        .filter(|&v| v <= options.budget);
    let total = per_prefix.and_then(|v| v.checked_mul(prefixes.len() as u128));
    let total = match total {
        Some(t) if t <= options.budget => t,
        _ => {
            let needed = (base as f64).powi(free as i32) * prefixes.len() as f64;
            return Err(Error::BudgetExceeded {
                needed: if needed >= u128::MAX as f64 { u128::MAX } else { needed as u128 },
                budget: options.budget,
            });
        }
    };
    let per_prefix = per_prefix.unwrap() as u64;
    let chunk = per_prefix.min(1 << 14);
    let jobs: Vec<(usize, u64)> = (0..prefixes.len())
        .flat_map(|p| (0..per_prefix.div_ceil(chunk)).map(move |c| (p, c * chunk)))
        .collect();

    let best = jobs
        .par_iter()
        .filter_map(|&(p, start)| {
            let end = (start + chunk).min(per_prefix);
            scan_range(base, n, &prefixes[p], start, end, p, options.ecoc_only)
        })
        .max_by_key(|&(d, p, idx)| (d, Reverse((p, idx))));
    let Some((max_d_t, p, idx)) = best else {
        return Err(Error::InvalidArgument(format!(
            "no {n}x{n} matrix over base {base} satisfies the column properties"
        )));
    };
    let mut entries = prefixes[p].clone();
    entries.extend(decode(base, idx, free));
    let witness = CodingMatrix::new(base, n, n, entries)?;
    Ok(ExhaustiveResult {
        n,
        base,
        max_d_t,
        witness,
        enumerated: total,
    })
}

/// Scans candidates `start..end` of one prefix; returns the best `(d_T, prefix, index)`.
fn scan_range(
    base: u32,
    n: usize,
    prefix: &[Symbol],
    start: u64,
    end: u64,
    p: usize,
    ecoc_only: bool,
) -> Option<(u64, usize, u64)> {
    let free = n * n - prefix.len();
    let mut entries = prefix.to_vec();
    entries.extend(decode(base, start, free));
    let mut best: Option<(u64, usize, u64)> = None;
    for idx in start..end {
        let d = square_dt(&entries, n);
        if best.is_none_or(|b| d > b.0) && (!ecoc_only || ecoc_valid(&entries, n, base)) {
            best = Some((d, p, idx));
        }
        // odometer increment, least significant digit last
        for e in entries.iter_mut().rev().take(free) {
            *e += 1;
            if u32::from(*e) < base {
                break;
            }
            *e = 0;
        }
    }
    best
}

fn ecoc_valid(e: &[Symbol], n: usize, base: u32) -> bool {
    let m = CodingMatrix::new(base, n, n, e.to_vec()).expect("valid entries");
    let props = validate_ecoc_properties(&m);
    props.p3() && props.p4()
}

fn decode(base: u32, mut idx: u64, len: usize) -> Vec<Symbol> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (idx % base as u64) as Symbol;
        idx /= base as u64;
    }
    out
}

fn square_dt(e: &[Symbol], n: usize) -> u64 {
    let mut d_r = u64::MAX;
    let mut d_c = u64::MAX;
    for i in 0..n {
        for j in i + 1..n {
            let mut r = 0;
            let mut c = 0;
            for l in 0..n {
                r += u64::from(e[i * n + l] != e[j * n + l]);
                c += u64::from(e[l * n + i] != e[l * n + j]);
            }
            d_r = d_r.min(r);
            d_c = d_c.min(c);
        }
    }
    d_r + d_c
}

/// Non-decreasing restricted-growth strings of length `n` over `0..base`.
fn canonical_first_rows(base: u32, n: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![vec![0 as Symbol]];
    for _ in 1..n {
        out = out
            .into_iter()
            .flat_map(|row| {
                let last = *row.last().unwrap();
                let mut next = vec![];
                let mut same = row.clone();
                same.push(last);
                next.push(same);
                if u32::from(last) + 1 < base {
                    let mut up = row;
                    up.push(last + 1);
                    next.push(up);
                }
                next
            })
            .collect();
    }
    out
}

/// Outcome of auditing one `M_k(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem12Report {
    pub base: u32,
    pub k: u32,
    /// `(N - 1) N^(k-1)`.
    pub expected_distance: u64,
    pub d_r: u64,
    pub d_c: u64,
    pub d_t: u64,
    /// First pair of distinct rows whose difference vector is not a
    /// multi-permutation of multiplicity `N^(k-1)`.
    pub multiplicity_violation: Option<(usize, usize)>,
    pub complement_pair: Option<(usize, usize)>,
    pub constant_column: Option<usize>,
}

impl Theorem12Report {
    pub fn expected_total(&self) -> u64 {
        2 * self.expected_distance
    }

    pub fn passed(&self) -> bool {
        self.first_violation().is_none()
    }

    pub fn first_violation(&self) -> Option<String> {
        if self.d_r != self.expected_distance {
            return Some(format!("d_r = {}, expected {}", self.d_r, self.expected_distance));
        }
        if self.d_c != self.expected_distance {
            return Some(format!("d_c = {}, expected {}", self.d_c, self.expected_distance));
        }
        if let Some((i, j)) = self.multiplicity_violation {
            return Some(format!("rows {i} and {j} lack multiplicity {}", self.expected_distance / (self.base as u64 - 1)));
        }
        if let Some((i, j)) = self.complement_pair {
            return Some(format!("columns {i} and {j} are complements"));
        }
        if let Some(j) = self.constant_column {
            return Some(format!("column {j} is constant"));
        }
        None
    }
}

impl fmt::Display for Theorem12Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "base {} k {}", self.base, self.k)?;
        writeln!(f, "d_r {} d_c {} d_T {}", self.d_r, self.d_c, self.d_t)?;
        writeln!(f, "expected d_r {} d_T {}", self.expected_distance, self.expected_total())?;
        match self.first_violation() {
            None => write!(f, "pass"),
            Some(v) => write!(f, "FAIL: {v}"),
        }
    }
}

pub fn check_theorem12(base: BasePrime, k: u32) -> Result<Theorem12Report> {
    audit(build_mk(base, k)?, k)
}

/// The same audit on a possibly composite base.
pub fn check_theorem12_unchecked(base: u32, k: u32) -> Result<Theorem12Report> {
    audit(build_mk_unchecked(base, k)?, k)
}

fn audit(m: CodingMatrix, k: u32) -> Result<Theorem12Report> {
    let base = m.base();
    let p = (base as u64).pow(k - 1);
    let expected_distance = (base as u64 - 1) * p;
    let report = distance_report(&m, DistanceMetric::Kronecker)?;
    let scan = |i: usize| {
        (i + 1..m.rows())
            .find(|&j| multiplicity_unchecked(m.row(i), m.row(j), base) != Some(p as usize))
            .map(|j| (i, j))
    };
    let multiplicity_violation = (0..m.rows()).into_par_iter().filter_map(scan).min();
    let props = validate_ecoc_properties(&m);
    Ok(Theorem12Report {
        base,
        k,
        expected_distance,
        d_r: report.d_r,
        d_c: report.d_c,
        d_t: report.d_t,
        multiplicity_violation,
        complement_pair: props.complement_pair,
        constant_column: props.constant_column,
    })
}

/// Whether the Kronecker and absolute distance reports give the same
/// `(d_r, d_c, d_T)`.
pub fn check_hamming_absolute_agreement(m: &CodingMatrix) -> Result<bool> {
    let h = distance_report(m, DistanceMetric::Kronecker)?;
    let a = distance_report(m, DistanceMetric::Absolute)?;
    Ok((h.d_r, h.d_c, h.d_t) == (a.d_r, a.d_c, a.d_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_m1, build_walsh};
    use crate::metrics::distance_report;

    fn p(n: u64) -> BasePrime {
        BasePrime::new(n).unwrap()
    }

    #[test]
    fn canonical_rows() {
        let rows = canonical_first_rows(2, 3);
        assert_eq!(rows, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1]]);
        assert_eq!(canonical_first_rows(3, 4).len(), 7);
    }

    #[test]
    fn square_dt_matches_report() {
        for m in [build_m1(p(3)), build_walsh(2).unwrap(), build_m1(p(5))] {
            let r = distance_report(&m, DistanceMetric::Kronecker).unwrap();
            assert_eq!(square_dt(m.as_slice(), m.rows()), r.d_t);
        }
    }

    #[test]
    fn oracle_small_cases() {
        let r = exhaustive_max_dt(2, 3, ExhaustiveOptions::default()).unwrap();
        assert_eq!((r.max_d_t, r.enumerated), (4, 512));
        assert_eq!(square_dt(r.witness.as_slice(), 3), 4);
        assert_eq!(r.matches_bound(), Some(true));

        let r = exhaustive_max_dt(2, 4, ExhaustiveOptions::default()).unwrap();
        assert_eq!((r.max_d_t, r.enumerated), (4, 1 << 16));
    }

    #[test]
    fn pruning_agrees() {
        for (base, n) in [(2, 3), (2, 4), (3, 3)] {
            let full = exhaustive_max_dt(base, n, ExhaustiveOptions::default()).unwrap();
            let pruned = exhaustive_max_dt(base, n, ExhaustiveOptions { pruning: true, ..Default::default() }).unwrap();
            assert_eq!(full.max_d_t, pruned.max_d_t, "({base}, {n})");
            assert!(pruned.enumerated < full.enumerated);
        }
    }

    #[test]
    fn ternary_three_by_three_beats_the_claim() {
        let all = exhaustive_max_dt(3, 3, ExhaustiveOptions::default()).unwrap();
        assert_eq!(all.max_d_t, 6);
        assert_eq!(all.matches_bound(), Some(false));
        let valid = ExhaustiveOptions { ecoc_only: true, ..Default::default() };
        let r = exhaustive_max_dt(3, 3, valid).unwrap();
        assert_eq!(r.max_d_t, 5);
        let props = validate_ecoc_properties(&r.witness);
        assert!(props.p3() && props.p4());
        let pruned = exhaustive_max_dt(3, 3, ExhaustiveOptions { pruning: true, ..valid }).unwrap();
        assert_eq!(pruned.max_d_t, 5);
    }

    #[test]
    fn budget_refusal() {
        let err = exhaustive_max_dt(2, 6, ExhaustiveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { needed, .. } if needed == 1 << 36));
        let err = exhaustive_max_dt(3, 4, ExhaustiveOptions { budget: 1000, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn theorem12_examples() {
        assert!(check_theorem12(p(3), 2).unwrap().passed());
        let r = check_theorem12(p(7), 2).unwrap();
        assert!(r.passed());
        assert_eq!(r.d_r, 42);
        let r = check_theorem12_unchecked(4, 2).unwrap();
        assert!(!r.passed());
        assert_eq!((r.d_t, r.expected_total()), (16, 24));
    }

    #[test]
    fn known_bounds() {
        assert_eq!(claimed_max_dt(2, 3), Some(4));
        assert_eq!(claimed_max_dt(2, 4), Some(4));
        assert_eq!(claimed_max_dt(3, 3), Some(4));
        assert_eq!(claimed_max_dt(3, 9), Some(12));
        assert_eq!(claimed_max_dt(3, 4), None);
        assert_eq!(claimed_max_dt(4, 4), None);
    }

    #[test]
    fn metric_agreement() {
        assert!(check_hamming_absolute_agreement(&build_walsh(3).unwrap()).unwrap());
        let m1 = build_m1(p(3));
        let a = distance_report(&m1, DistanceMetric::Absolute).unwrap();
        // rows (0,0,2), (0,1,1), (2,1,2): absolute distances 2, 3, 3
        assert_eq!(a.d_r, 2);
        assert!(check_hamming_absolute_agreement(&m1).unwrap());
    }
}
