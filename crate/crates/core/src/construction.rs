//! Recursive construction of the N-ary matrices `M_k(N)` and of the binary
//! Walsh matrices.
//!
//! `M_1(N)` enumerates residues along its anti-diagonal bands; `M_{k+1}` is the
//! `N x N` block matrix whose block `(i, j)` is `M_k` shifted by `M_1(N)[i][j]`.
//! For prime `N` every pair of distinct rows (and columns) of `M_k` sits at
//! Kronecker distance `(N-1) N^(k-1)`.

use crate::error::{Error, Result};
use crate::matrix::{BasePrime, CodingMatrix, Symbol, MAX_BASE};

/// Largest side length the recursive builders will allocate by default.
pub const DEFAULT_CAPACITY: usize = 4096;

/// Entry `(i, j)` of `M_1(N)`, evaluated for arbitrary non-negative indices.
///
/// The band sum `sum_{l=1}^{|i-j|} (N - l + 1)` is accumulated exactly in
/// signed arithmetic (terms go negative once `l > N + 1`) and reduced modulo
/// `N` once at the end.
pub fn m1_entry(base: u64, i: u64, j: u64) -> u64 {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    let n = base as i128;
    let band: i128 = (1..=(hi - lo) as i128).map(|l| n - l + 1).sum();
    (lo as i128 + band).rem_euclid(n) as u64
}

/// `M_1(N)` for a prime base.
pub fn build_m1(base: BasePrime) -> CodingMatrix {
    m1_unchecked(base.get())
}

fn m1_unchecked(base: u32) -> CodingMatrix {
    let n = base as usize;
    CodingMatrix::from_fn(base, n, n, |i, j| {
        m1_entry(base as u64, i as u64, j as u64) as Symbol
    })
}

/// The `s`-shift: every entry becomes `(m + s) mod N`.
pub fn shift(m: &CodingMatrix, s: u64) -> CodingMatrix {
    let base = m.base();
    let s = (s % base as u64) as u32;
    CodingMatrix::from_fn(base, m.rows(), m.cols(), |i, j| {
        ((u32::from(m.get(i, j)) + s) % base) as Symbol
    })
}

/// `M_k(N)` with the default capacity ceiling.
pub fn build_mk(base: BasePrime, k: u32) -> Result<CodingMatrix> {
    build_mk_with_capacity(base, k, DEFAULT_CAPACITY)
}

pub fn build_mk_with_capacity(base: BasePrime, k: u32, capacity: usize) -> Result<CodingMatrix> {
    recursive(base.get(), k, capacity)
}

/// Same recursion without the primality check. Only meaningful for
/// demonstrating that the distance law breaks for composite bases.
pub fn build_mk_unchecked(base: u32, k: u32) -> Result<CodingMatrix> {
    if !(2..=MAX_BASE).contains(&base) {
        return Err(Error::UnsupportedBase(base as u64));
    }
    recursive(base, k, DEFAULT_CAPACITY)
}

fn check_dimension(base: u32, k: u32, capacity: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let dim = (base as u128).checked_pow(k).unwrap_or(u128::MAX);
    if dim > capacity as u128 {
        return Err(Error::Capacity {
            requested: dim,
            limit: capacity,
        });
    }
    Ok(dim as usize)
}

fn recursive(base: u32, k: u32, capacity: usize) -> Result<CodingMatrix> {
    check_dimension(base, k, capacity)?;
    let m1 = m1_unchecked(base);
    let mut current = m1.clone();
    for _ in 1..k {
        let n = current.rows();
        let prev = &current;
        current = CodingMatrix::from_fn(base, n * base as usize, n * base as usize, |i, j| {
            let s = u32::from(m1.get(i / n, j / n));
            ((u32::from(prev.get(i % n, j % n)) + s) % base) as Symbol
        });
    }
    Ok(current)
}

/// Walsh matrix `H_k` over `{0, 1}` by Sylvester doubling:
/// `H_k = [[H, H], [H, !H]]` with `H_1 = [[0, 0], [0, 1]]`.
pub fn build_walsh(k: u32) -> Result<CodingMatrix> {
    check_dimension(2, k, DEFAULT_CAPACITY)?;
    let mut h = CodingMatrix::from_rows(2, &[[0u8, 0], [0, 1]])?;
    for _ in 1..k {
        let n = h.rows();
        let prev = &h;
        h = CodingMatrix::from_fn(2, 2 * n, 2 * n, |i, j| {
            let v = prev.get(i % n, j % n);
            if i >= n && j >= n {
                1 - v
            } else {
                v
            }
        });
    }
    Ok(h)
}

/// `H_k` with its first row and first column removed.
pub fn build_punctured_walsh(k: u32) -> Result<CodingMatrix> {
    if k < 2 {
        return Err(Error::InvalidArgument(
            "punctured Walsh matrices need k >= 2".into(),
        ));
    }
    let h = build_walsh(k)?;
    let n = h.rows() - 1;
    Ok(CodingMatrix::from_fn(2, n, n, |i, j| h.get(i + 1, j + 1)))
}
