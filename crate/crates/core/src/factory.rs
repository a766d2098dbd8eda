//! Experiment-ready `c x n` coding matrices.
//!
//! Two strategies: truncating `M_k(N)` (deterministic), and keeping the best of
//! a batch of uniformly random matrices (random search).

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::construction::build_mk;
use crate::error::{Error, Result};
use crate::matrix::{BasePrime, CodingMatrix, Symbol, MAX_BASE};
use crate::metrics::{distance_report, row_distance, DistanceMetric, DistanceReport};

/// How the codeword length `n` follows from the class count `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DimensionPolicy {
    /// `n = floor(c / 2)`, so 11 classes give the 11x5 matrix.
    Half,
    Square,
    Double,
    Explicit(usize),
}

impl DimensionPolicy {
    pub fn resolve(self, classes: usize) -> usize {
        match self {
            DimensionPolicy::Half => (classes / 2).max(1),
            DimensionPolicy::Square => classes,
            DimensionPolicy::Double => 2 * classes,
            DimensionPolicy::Explicit(n) => n,
        }
    }
}

impl fmt::Display for DimensionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimensionPolicy::Half => f.write_str("half"),
            DimensionPolicy::Square => f.write_str("square"),
            DimensionPolicy::Double => f.write_str("double"),
            DimensionPolicy::Explicit(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for DimensionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half" => Ok(DimensionPolicy::Half),
            "square" => Ok(DimensionPolicy::Square),
            "double" => Ok(DimensionPolicy::Double),
            other => match other.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(DimensionPolicy::Explicit(n)),
                _ => Err(Error::InvalidArgument(format!("unknown policy {other:?}"))),
            },
        }
    }
}

/// The `ceil(10 log2 c)` codeword-length rule of thumb. Not used as a policy.
pub fn heuristic_length(classes: usize) -> usize {
    if classes <= 1 {
        return 0;
    }
    (10.0 * (classes as f64).log2()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Objective {
    /// Maximize `d_r + d_c`.
    #[default]
    Total,
    /// Maximize `d_r` alone.
    Row,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Total => "total",
            Objective::Row => "row",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(Objective::Total),
            "row" => Ok(Objective::Row),
            other => Err(Error::InvalidArgument(format!("unknown objective {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub trials: usize,
    pub objective: Objective,
    pub metric: DistanceMetric,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            trials: 1000,
            objective: Objective::Total,
            metric: DistanceMetric::Kronecker,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Deterministic { base: u32, k: u32, repairs: usize },
    Random { base: u32, seed: u64, trial: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoryResult {
    pub matrix: CodingMatrix,
    pub report: DistanceReport,
    pub provenance: Provenance,
}

impl FactoryResult {
    /// `key=value` lines for the `.meta` sidecar.
    pub fn meta_text(&self) -> String {
        let m = &self.matrix;
        let mut out = String::new();
        match self.provenance {
            Provenance::Deterministic { base, k, repairs } => {
                out.push_str("strategy=deterministic\n");
                out.push_str(&format!("base={base}\nseed=none\ntrial=none\nk={k}\nrepairs={repairs}\n"));
            }
            Provenance::Random { base, seed, trial } => {
                out.push_str("strategy=random\n");
                out.push_str(&format!("base={base}\nseed={seed}\ntrial={trial}\nk=none\nrepairs=0\n"));
            }
        }
        out.push_str(&format!(
            "rows={}\ncols={}\nmetric={}\nd_r={}\nd_c={}\nd_T={}\n",
            m.rows(),
            m.cols(),
            self.report.metric,
            self.report.d_r,
            self.report.d_c,
            self.report.d_t
        ));
        out
    }
}

/// Smallest `k >= 1` with `N^k >= classes`.
pub fn choose_k(base: BasePrime, classes: usize) -> u32 {
    let n = base.get() as u128;
    let mut k = 1;
    let mut dim = n;
    while dim < classes as u128 {
        dim *= n;
        k += 1;
    }
    k
}

/// Keeps the bottom-right `rows x cols` block, i.e. deletes leading rows and
/// leading columns.
pub fn truncate(m: &CodingMatrix, rows: usize, cols: usize) -> Result<CodingMatrix> {
    if rows > m.rows() || cols > m.cols() || rows == 0 || cols == 0 {
        return Err(Error::TruncationTooLarge {
            rows,
            cols,
            src_rows: m.rows(),
            src_cols: m.cols(),
        });
    }
    let (dr, dc) = (m.rows() - rows, m.cols() - cols);
    Ok(CodingMatrix::from_fn(m.base(), rows, cols, |i, j| {
        m.get(i + dr, j + dc)
    }))
}

/// Makes all rows distinct. The first duplicate pair in `(i, j)` order has
/// entry 0 of row `j` bumped by one (mod `N`); repeat until no duplicates.
///
/// Should bumping entry 0 cycle through all `N` values without success, the
/// next entry is bumped as well, odometer style, so the loop always ends
/// whenever `N^cols >= rows`.
pub fn repair_duplicate_rows(m: &CodingMatrix) -> Result<(CodingMatrix, usize)> {
    let base = m.base();
    let (rows, cols) = (m.rows(), m.cols());
    let capacity = (base as u128).checked_pow(cols as u32);
    if capacity.is_some_and(|cap| (rows as u128) > cap) {
        return Err(Error::Unrepairable { rows, cols, base });
    }
    let mut out = m.clone();
    let original: Vec<Vec<Symbol>> = m.row_iter().map(<[Symbol]>::to_vec).collect();
    let mut bumps = vec![0u128; rows];
    let mut repairs = 0;
    while let Some((_, j)) = first_duplicate(&out) {
        bumps[j] += 1;
        repairs += 1;
        let mut carry = bumps[j];
        for (col, &orig) in original[j].iter().enumerate() {
            let digit = (carry % base as u128) as u32;
            carry /= base as u128;
            out.set(j, col, ((u32::from(orig) + digit) % base) as Symbol);
        }
    }
    Ok((out, repairs))
}

fn first_duplicate(m: &CodingMatrix) -> Option<(usize, usize)> {
    (0..m.rows()).find_map(|i| {
        (i + 1..m.rows())
            .find(|&j| m.row(i) == m.row(j))
            .map(|j| (i, j))
    })
}

/// Truncated and repaired `M_k(N)`; `k` is the smallest with `N^k >= max(c, n)`.
pub fn deterministic_matrix(
    base: BasePrime,
    classes: usize,
    policy: DimensionPolicy,
) -> Result<FactoryResult> {
    if classes < 2 {
        return Err(Error::InvalidArgument("need at least 2 classes".into()));
    }
    let cols = policy.resolve(classes);
    let k = choose_k(base, classes.max(cols));
    let full = build_mk(base, k)?;
    let (matrix, repairs) = repair_duplicate_rows(&truncate(&full, classes, cols)?)?;
    let report = distance_report(&matrix, DistanceMetric::Kronecker)?;
    Ok(FactoryResult {
        matrix,
        report,
        provenance: Provenance::Deterministic {
            base: base.get(),
            k,
            repairs,
        },
    })
}

/// Trial `trial` of the random stream rooted at `seed`: entries i.i.d.
/// uniform over `0..base`, drawn row-major from ChaCha8 stream `trial`.
pub fn trial_matrix(base: u32, rows: usize, cols: usize, seed: u64, trial: usize) -> CodingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    CodingMatrix::from_fn(base, rows, cols, |_, _| rng.random_range(0..base) as Symbol)
}

/// Objective value of one candidate.
pub fn objective_value(m: &CodingMatrix, objective: Objective, metric: DistanceMetric) -> Result<u64> {
    Ok(match objective {
        Objective::Total => distance_report(m, metric)?.d_t,
        Objective::Row => row_distance(m, metric)?.0,
    })
}

/// Best of `config.trials` random matrices. Ties go to the earliest trial.
pub fn random_matrix(
    base: u32,
    classes: usize,
    policy: DimensionPolicy,
    config: &SearchConfig,
) -> Result<FactoryResult> {
    if !(2..=MAX_BASE).contains(&base) {
        return Err(Error::UnsupportedBase(base as u64));
    }
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let cols = policy.resolve(classes);
    if classes < 2 || cols < 2 {
        return Err(Error::DegenerateDimensions {
            rows: classes,
            cols,
        });
    }
    let score = |t: usize| -> (u64, Reverse<usize>) {
        let m = trial_matrix(base, classes, cols, config.seed, t);
        let v = objective_value(&m, config.objective, config.metric)
            .expect("dimensions checked above");
        (v, Reverse(t))
    };
    let (_, Reverse(winner)) = (0..config.trials)
        .into_par_iter()
        .map(score)
        .max()
        .expect("at least one trial");
    let matrix = trial_matrix(base, classes, cols, config.seed, winner);
    let report = distance_report(&matrix, config.metric)?;
    Ok(FactoryResult {
        matrix,
        report,
        provenance: Provenance::Random {
            base,
            seed: config.seed,
            trial: winner,
        },
    })
}
