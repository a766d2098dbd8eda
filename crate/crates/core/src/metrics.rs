//! Codeword distances and matrix-level distance aggregates.
//!
//! Two per-codeword metrics are supported: the Kronecker count of differing
//! positions, and the absolute metric `sum |x_i - y_i|` over the integers.
//! Matrix aggregates (`d_r`, `d_c`, `d_T`) are exhaustive pairwise scans.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{CodingMatrix, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DistanceMetric {
    /// Number of positions where the codewords differ.
    #[default]
    Kronecker,
    /// Sum of absolute symbol differences, no modular reduction.
    Absolute,
}

impl DistanceMetric {
    pub fn name(self) -> &'static str {
        match self {
            DistanceMetric::Kronecker => "hamming",
            DistanceMetric::Absolute => "absolute",
        }
    }

    #[inline]
    pub(crate) fn eval(self, x: &[Symbol], y: &[Symbol]) -> u64 {
        match self {
            DistanceMetric::Kronecker => kronecker(x, y),
            DistanceMetric::Absolute => absolute(x, y),
        }
    }
}

impl fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamming" | "kronecker" => Ok(DistanceMetric::Kronecker),
            "absolute" => Ok(DistanceMetric::Absolute),
            other => Err(Error::InvalidArgument(format!("unknown metric {other:?}"))),
        }
    }
}

// Both kernels accumulate in u32 per 4096-wide chunk so the compiler can
// vectorize the inner loop.
#[inline]
fn kronecker(x: &[Symbol], y: &[Symbol]) -> u64 {
    x.chunks(4096)
        .zip(y.chunks(4096))
        .map(|(a, b)| {
            a.iter()
                .zip(b)
                .map(|(p, q)| u32::from(p != q))
                .sum::<u32>() as u64
        })
        .sum()
}

#[inline]
fn absolute(x: &[Symbol], y: &[Symbol]) -> u64 {
    x.iter()
        .zip(y)
        .map(|(&p, &q)| u64::from(p.abs_diff(q)))
        .sum()
}

fn check_pair(x: &[Symbol], y: &[Symbol], base: u32) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if let Some(&s) = x.iter().chain(y).find(|&&s| u32::from(s) >= base) {
        return Err(Error::SymbolOutOfRange {
            symbol: s.into(),
            base,
        });
    }
    Ok(())
}

/// Distance between two codewords over base `base`.
pub fn hamming(x: &[Symbol], y: &[Symbol], base: u32, metric: DistanceMetric) -> Result<u64> {
    check_pair(x, y, base)?;
    Ok(metric.eval(x, y))
}

/// Minimum row distance, minimum column distance and their sum, with the
/// lexicographically smallest index pairs realizing each minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceReport {
    pub d_r: u64,
    pub d_c: u64,
    pub d_t: u64,
    pub argmin_rows: (usize, usize),
    pub argmin_cols: (usize, usize),
    pub metric: DistanceMetric,
}

impl fmt::Display for DistanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.d_r, self.d_c, self.d_t)
    }
}

pub fn distance_report(m: &CodingMatrix, metric: DistanceMetric) -> Result<DistanceReport> {
    if m.rows() < 2 || m.cols() < 2 {
        return Err(Error::DegenerateDimensions {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let (d_r, argmin_rows) = min_pairwise(m, metric);
    let (d_c, argmin_cols) = min_pairwise(&m.transpose(), metric);
    Ok(DistanceReport {
        d_r,
        d_c,
        d_t: d_r + d_c,
        argmin_rows,
        argmin_cols,
        metric,
    })
}

/// Minimum row distance only; used by the random search when the objective
/// ignores columns.
pub fn row_distance(m: &CodingMatrix, metric: DistanceMetric) -> Result<(u64, (usize, usize))> {
    if m.rows() < 2 {
        return Err(Error::DegenerateDimensions {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(min_pairwise(m, metric))
}

// Rows are compared in (i, j) order with strict improvement, so ties keep the
// smallest pair. The parallel split is per `i` and reduced by (d, i, j).
fn min_pairwise(m: &CodingMatrix, metric: DistanceMetric) -> (u64, (usize, usize)) {
    let scan = |i: usize| -> (u64, usize, usize) {
        let xi = m.row(i);
        let mut best = (u64::MAX, i, i + 1);
        for j in i + 1..m.rows() {
            let d = metric.eval(xi, m.row(j));
            if d < best.0 {
                best = (d, i, j);
            }
        }
        best
    };
    let rows = m.rows() - 1;
    let best = if m.rows() * m.rows() * m.cols() > 1 << 22 {
        (0..rows).into_par_iter().map(scan).min().unwrap()
    } else {
        (0..rows).map(scan).min().unwrap()
    };
    (best.0, (best.1, best.2))
}

/// Positionwise `(x_i - y_i) mod N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceVector {
    base: u32,
    deltas: Vec<Symbol>,
}

impl DifferenceVector {
    pub fn deltas(&self) -> &[Symbol] {
        &self.deltas
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Equals the Kronecker distance between the two codewords.
    pub fn nonzero_count(&self) -> usize {
        self.deltas.iter().filter(|&&d| d != 0).count()
    }

    /// How often each residue `0..N` occurs.
    pub fn residue_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.base as usize];
        for &d in &self.deltas {
            counts[d as usize] += 1;
        }
        counts
    }

    /// True when the deltas are a rearrangement of `0..N`.
    pub fn is_permutation(&self) -> bool {
        self.deltas.len() == self.base as usize && self.residue_counts().iter().all(|&c| c == 1)
    }

    /// `Some(a)` when every delta equals `a`.
    pub fn constant_value(&self) -> Option<Symbol> {
        let first = *self.deltas.first()?;
        self.deltas.iter().all(|&d| d == first).then_some(first)
    }
}

pub fn difference_vector(x: &[Symbol], y: &[Symbol], base: u32) -> Result<DifferenceVector> {
    check_pair(x, y, base)?;
    Ok(DifferenceVector {
        base,
        deltas: modular_difference(x, y, base),
    })
}

fn modular_difference(x: &[Symbol], y: &[Symbol], base: u32) -> Vec<Symbol> {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| ((u32::from(a) + base - u32::from(b)) % base) as Symbol)
        .collect()
}

/// `Some(p)` when every residue occurs exactly `p = n / N` times in the
/// difference vector of `x` and `y`; such a pair is at Kronecker distance
/// `(N - 1) p`.
pub fn multiplicity(x: &[Symbol], y: &[Symbol], base: u32) -> Result<Option<usize>> {
    check_pair(x, y, base)?;
    if x.len() % base as usize != 0 {
        return Err(Error::MultiplicityLength { base, len: x.len() });
    }
    Ok(multiplicity_unchecked(x, y, base))
}

pub(crate) fn multiplicity_unchecked(x: &[Symbol], y: &[Symbol], base: u32) -> Option<usize> {
    let p = x.len() / base as usize;
    let mut counts = [0usize; 256];
    for (&a, &b) in x.iter().zip(y) {
        let d = if a >= b {
            a - b
        } else {
            (u32::from(a) + base - u32::from(b)) as Symbol
        };
        counts[d as usize] += 1;
    }
    counts[..base as usize]
        .iter()
        .all(|&c| c == p)
        .then_some(p)
}

/// Whether some alphabet permutation maps `x` onto `y` positionwise while
/// moving at least one symbol that occurs in `x`.
///
/// The positionwise map must be consistent and injective on the symbols that
/// occur; any such partial map extends to a permutation of the full alphabet.
pub fn are_nary_complements(x: &[Symbol], y: &[Symbol], base: u32) -> bool {
    if x.len() != y.len() || x.is_empty() {
        return false;
    }
    let mut forward = [u16::MAX; 256];
    let mut backward = [u16::MAX; 256];
    let mut moved = false;
    for (&a, &b) in x.iter().zip(y) {
        if u32::from(a) >= base || u32::from(b) >= base {
            return false;
        }
        let (a, b) = (a as usize, b as usize);
        if forward[a] == u16::MAX && backward[b] == u16::MAX {
            forward[a] = b as u16;
            backward[b] = a as u16;
        } else if forward[a] != b as u16 || backward[b] != a as u16 {
            return false;
        }
        moved |= a != b;
    }
    moved
}

/// Outcome of the data-independent column checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    /// First pair of columns (in lexicographic order) that are N-ary complements.
    pub complement_pair: Option<(usize, usize)>,
    /// First column whose entries are all equal.
    pub constant_column: Option<usize>,
}

impl PropertyReport {
    /// No two columns are complements.
    pub fn p3(&self) -> bool {
        self.complement_pair.is_none()
    }

    /// No column is constant.
    pub fn p4(&self) -> bool {
        self.constant_column.is_none()
    }
}

pub fn validate_ecoc_properties(m: &CodingMatrix) -> PropertyReport {
    let t = m.transpose();
    let constant_column = t
        .row_iter()
        .position(|col| col.iter().all(|&s| s == col[0]));
    let base = m.base();
    let first_partner = |i: usize| -> Option<(usize, usize)> {
        let ci = t.row(i);
        (i + 1..t.rows())
            .find(|&j| are_nary_complements(ci, t.row(j), base))
            .map(|j| (i, j))
    };
    let complement_pair = if t.rows() > 256 {
        (0..t.rows())
            .into_par_iter()
            .filter_map(first_partner)
            .min()
    } else {
        (0..t.rows()).find_map(first_partner)
    };
    PropertyReport {
        complement_pair,
        constant_column,
    }
}
