//! The coding matrix type, prime bases, and the plain-text matrix format.
//!
//! A matrix file is the header line `N c n` followed by `c` lines of `n`
//! space-separated symbols, each line terminated by `\n`. Nothing else is
//! permitted: no comments, no blank lines, no trailing spaces.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// One entry of a coding matrix. Always strictly below the matrix base.
pub type Symbol = u8;

/// Largest base representable with [`Symbol`] entries.
pub const MAX_BASE: u32 = 256;

/// A base that has passed a deterministic primality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasePrime(u32);

impl BasePrime {
    pub fn new(value: u64) -> Result<Self> {
        if !(2..=MAX_BASE as u64).contains(&value) {
            return Err(Error::UnsupportedBase(value));
        }
        if !is_prime(value) {
            return Err(Error::CompositeBase(value));
        }
        Ok(BasePrime(value as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for BasePrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Trial division; bases are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A `rows x cols` grid of symbols over `{0, .., base-1}`, stored row-major.
///
/// Equality compares the base as well as the entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CodingMatrix {
    base: u32,
    rows: usize,
    cols: usize,
    data: Vec<Symbol>,
}

impl CodingMatrix {
    pub fn new(base: u32, rows: usize, cols: usize, data: Vec<Symbol>) -> Result<Self> {
        if !(2..=MAX_BASE).contains(&base) {
            return Err(Error::UnsupportedBase(base as u64));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for {rows}x{cols}, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&s| u32::from(s) >= base) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad.into(),
                base,
            });
        }
        Ok(CodingMatrix {
            base,
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows<R: AsRef<[Symbol]>>(base: u32, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::LengthMismatch(cols, row.len()));
            }
            data.extend_from_slice(row);
        }
        Self::new(base, rows.len(), cols, data)
    }

    /// Builds a matrix from a closure; the closure must return symbols below `base`.
    pub(crate) fn from_fn(
        base: u32,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Symbol,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        debug_assert!(data.iter().all(|&s| u32::from(s) < base));
        CodingMatrix {
            base,
            rows,
            cols,
            data,
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Symbol {
        self.data[i * self.cols + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: Symbol) {
        debug_assert!(u32::from(value) < self.base);
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Symbol] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl ExactSizeIterator<Item = &[Symbol]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn column(&self, j: usize) -> Vec<Symbol> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.data
    }

    pub fn transpose(&self) -> CodingMatrix {
        CodingMatrix::from_fn(self.base, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.data.len() * 3 + 16);
        out.push_str(&format!("{} {} {}\n", self.base, self.rows, self.cols));
        for row in self.row_iter() {
            for (j, s) in row.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                out.push_str(&s.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Parses the strict text format. Line numbers in errors are 1-based.
    pub fn from_text(text: &str) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::parse(1, "empty input"));
        }
        if !text.ends_with('\n') {
            return Err(Error::parse(
                text.lines().count(),
                "missing trailing newline",
            ));
        }
        let mut lines = text[..text.len() - 1].split('\n');
        let header = lines.next().unwrap_or_default();
        let fields = parse_fields(header, 1)?;
        let [base, rows, cols] = fields[..] else {
            return Err(Error::parse(1, "header must be `N c n`"));
        };
        if !(2..=MAX_BASE as u64).contains(&base) {
            return Err(Error::parse(1, format!("base {base} outside 2..=256")));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::parse(1, "dimensions must be positive"));
        }
        let (base, rows, cols) = (base as u32, rows as usize, cols as usize);
        let mut data = Vec::with_capacity(rows * cols);
        let mut seen = 0;
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            if seen == rows {
                return Err(Error::parse(lineno, "more rows than declared"));
            }
            let values = parse_fields(line, lineno)?;
            if values.len() != cols {
                return Err(Error::parse(
                    lineno,
                    format!("expected {cols} symbols, found {}", values.len()),
                ));
            }
            for v in values {
                if v >= base as u64 {
                    return Err(Error::parse(
                        lineno,
                        format!("symbol {v} out of range for base {base}"),
                    ));
                }
                data.push(v as Symbol);
            }
            seen += 1;
        }
        if seen != rows {
            return Err(Error::parse(
                seen + 2,
                format!("expected {rows} rows, found {seen}"),
            ));
        }
        CodingMatrix::new(base, rows, cols, data)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

fn parse_fields(line: &str, lineno: usize) -> Result<Vec<u64>> {
    if line.is_empty() {
        return Err(Error::parse(lineno, "empty line"));
    }
    line.split(' ')
        .map(|tok| {
            if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::parse(lineno, format!("bad integer {tok:?}")));
            }
            tok.parse::<u64>()
                .map_err(|_| Error::parse(lineno, format!("bad integer {tok:?}")))
        })
        .collect()
}

impl fmt::Debug for CodingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CodingMatrix(base={}, {}x{})", self.base, self.rows, self.cols)?;
        for row in self.row_iter() {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl fmt::Display for CodingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
