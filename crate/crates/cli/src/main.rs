mod tables;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use necoc_core::{
    build_mk, build_mk_unchecked, check_theorem12, distance_report, evaluate_cv, exhaustive_max_dt,
    deterministic_matrix, load_csv, random_matrix, BasePrime, CodebookSource, CodingMatrix, DimensionPolicy,
    DistanceMetric, Error, ExhaustiveOptions, FactoryResult, LabelColumn, LearnerSpec, Objective, Provenance,
    SearchConfig,
};

/// Deterministic N-ary ECOC matrices: construction, distances, search,
/// verification and cross-validated evaluation.
#[derive(Parser)]
#[command(name = "necoc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build `M_k(N)` or a truncated codebook for a class count.
    Gen(GenArgs),
    /// Print the minimum row, column and total distances of a matrix file.
    Dist(DistArgs),
    /// Best-of-T random codebook.
    Search(SearchArgs),
    /// Check the distance theorem, the exhaustive optimum, or the composite failure.
    Verify(VerifyArgs),
    /// Stratified cross-validation of an ECOC ensemble on a CSV dataset.
    Eval(EvalArgs),
    /// Distance or accuracy tables, one per dataset.
    Tables(tables::TablesArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("shape").required(true).args(["k", "classes"])))]
struct GenArgs {
    #[arg(long)]
    base: u64,
    /// Emit the full `N^k x N^k` matrix.
    #[arg(long)]
    k: Option<u32>,
    /// Truncate to this many rows.
    #[arg(long)]
    classes: Option<usize>,
    /// half, square, double, or an explicit column count.
    #[arg(long, requires = "classes", default_value = "square")]
    policy: DimensionPolicy,
    /// Matrix destination; the `.meta` sidecar goes next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::Hamming)]
    metric: MetricArg,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    base: u32,
    #[arg(long)]
    classes: usize,
    #[arg(long, default_value = "square")]
    policy: DimensionPolicy,
    #[command(flatten)]
    search: SearchFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
pub(crate) struct SearchFlags {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Total)]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = MetricArg::Hamming)]
    metric: MetricArg,
}

impl SearchFlags {
    fn config(self) -> SearchConfig {
        SearchConfig {
            trials: self.trials,
            objective: self.objective.into(),
            metric: self.metric.into(),
            seed: self.seed,
        }
    }
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["theorem12", "conjecture", "composite_demo"])))]
struct VerifyArgs {
    /// Audit `M_k(N)`: distances, multiplicities, no constant or complementary columns.
    #[arg(long, requires_all = ["base", "k"])]
    theorem12: bool,
    /// Exhaustively maximize d_T over all `n x n` matrices and compare with the claimed optimum.
    #[arg(long, requires_all = ["base", "n"])]
    conjecture: bool,
    /// Show the distance drop of the construction over the composite base 4.
    #[arg(long)]
    composite_demo: bool,
    #[arg(long)]
    base: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    /// Candidate ceiling for the exhaustive search.
    #[arg(long, default_value_t = necoc_core::verification::DEFAULT_BUDGET)]
    budget: u128,
    /// Fix the first row to canonical form, which cannot change the maximum.
    #[arg(long)]
    prune: bool,
    /// Ignore matrices with a constant column or a complementary column pair.
    #[arg(long)]
    ecoc_only: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// CSV with the label in the last column; a header row is detected automatically.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    base: u32,
    #[arg(long, default_value = "square")]
    policy: DimensionPolicy,
    #[arg(long, value_enum, default_value_t = Strategy::Det)]
    strategy: Strategy,
    #[arg(long, default_value = "dt")]
    learner: LearnerSpec,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[command(flatten)]
    search: SearchFlags,
    /// Also print one accuracy per fold.
    #[arg(long)]
    per_fold: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum MetricArg {
    Hamming,
    Absolute,
}

impl From<MetricArg> for DistanceMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Hamming => DistanceMetric::Kronecker,
            MetricArg::Absolute => DistanceMetric::Absolute,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Total,
    Row,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Total => Objective::Total,
            ObjectiveArg::Row => Objective::Row,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Strategy {
    Det,
    Rand,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Det => "det",
            Strategy::Rand => "rand",
        })
    }
}

/// Failure carrying the process exit code.
pub(crate) struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => 4,
            Error::CompositeBase(_)
            | Error::UnsupportedBase(_)
            | Error::Capacity { .. }
            | Error::DegenerateDimensions { .. }
            | Error::TruncationTooLarge { .. }
            | Error::Unrepairable { .. }
            | Error::MultiplicityLength { .. }
            | Error::ClassCountMismatch { .. }
            | Error::DuplicateCodewords(..) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

pub(crate) type CliResult = std::result::Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Dist(a) => dist(a),
        Command::Search(a) => search(a),
        Command::Verify(a) => verify(a),
        Command::Eval(a) => eval(a),
        Command::Tables(a) => tables::run(a),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn prime(base: u64) -> Result<BasePrime, Error> {
    BasePrime::new(base)
}

fn gen(a: GenArgs) -> CliResult {
    let base = prime(a.base)?;
    let result = match (a.k, a.classes) {
        (Some(k), _) => {
            let matrix = build_mk(base, k)?;
            let report = distance_report(&matrix, DistanceMetric::Kronecker)?;
            FactoryResult {
                matrix,
                report,
                provenance: Provenance::Deterministic {
                    base: base.get(),
                    k,
                    repairs: 0,
                },
            }
        }
        (None, Some(c)) => deterministic_matrix(base, c, a.policy)?,
        (None, None) => unreachable!("clap enforces the group"),
    };
    emit(&result, a.out.as_deref())
}

fn search(a: SearchArgs) -> CliResult {
    let result = random_matrix(a.base, a.classes, a.policy, &a.search.config())?;
    emit(&result, a.out.as_deref())
}

/// With a destination: matrix and sidecar to disk, report to stdout.
/// Without: matrix to stdout, report to stderr.
fn emit(result: &FactoryResult, out: Option<&Path>) -> CliResult {
    match out {
        Some(path) => {
            result.matrix.write(path)?;
            let meta = sidecar(path);
            fs::write(&meta, result.meta_text()).map_err(|e| Error::Io {
                path: meta.clone(),
                source: e,
            })?;
            println!("{}", result.report);
        }
        None => {
            io::stdout().write_all(result.matrix.to_text().as_bytes())?;
            eprintln!("{}", result.report);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn dist(a: DistArgs) -> CliResult {
    let m = CodingMatrix::read(&a.matrix)?;
    let r = distance_report(&m, a.metric.into())?;
    println!("{r}");
    println!("argmin_rows {} {}", r.argmin_rows.0, r.argmin_rows.1);
    println!("argmin_cols {} {}", r.argmin_cols.0, r.argmin_cols.1);
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> CliResult {
    if a.composite_demo {
        let m = build_mk_unchecked(4, 2)?;
        let r = distance_report(&m, DistanceMetric::Kronecker)?;
        let expected = 2 * 3 * 4;
        println!("unchecked M_2(4): d_r {} d_c {} d_T {}", r.d_r, r.d_c, r.d_t);
        println!("prime-base formula would give d_T = {expected}");
        println!("row pair ({}, {}) is at distance {}", r.argmin_rows.0, r.argmin_rows.1, r.d_r);
        return Ok(ExitCode::SUCCESS);
    }
    let base = a.base.expect("clap requires --base");
    if a.theorem12 {
        let report = check_theorem12(prime(base)?, a.k.expect("clap requires --k"))?;
        println!("{report}");
        return Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) });
    }
    let n = a.n.expect("clap requires --n");
    let base = u32::try_from(base).map_err(|_| Error::UnsupportedBase(base))?;
    let options = ExhaustiveOptions {
        budget: a.budget,
        pruning: a.prune,
        ecoc_only: a.ecoc_only,
    };
    let r = exhaustive_max_dt(base, n, options)?;
    println!("base {} n {} enumerated {}", r.base, r.n, r.enumerated);
    println!("max d_T {}", r.max_d_t);
    let verdict = match r.bound() {
        Some(b) if b == r.max_d_t => {
            println!("claimed {b}: matches");
            ExitCode::SUCCESS
        }
        Some(b) => {
            println!("claimed {b}: VIOLATED");
            ExitCode::from(1)
        }
        None => {
            println!("claimed none");
            ExitCode::SUCCESS
        }
    };
    println!("witness");
    print!("{}", r.witness.to_text());
    Ok(verdict)
}

/// Loads a label-last CSV, treating the first line as a header when any of
/// its feature fields is not a number.
pub(crate) fn load_dataset(path: &Path) -> Result<necoc_core::Dataset, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    let first = text.lines().next().unwrap_or("");
    let fields: Vec<&str> = first.split(',').collect();
    let header = fields[..fields.len().saturating_sub(1)]
        .iter()
        .any(|f| f.trim().parse::<f64>().is_err());
    load_csv(path, LabelColumn::Last, header)
}

pub(crate) fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data".into())
}

pub(crate) fn codebook_source(
    base: u32,
    policy: DimensionPolicy,
    strategy: Strategy,
    config: SearchConfig,
) -> Result<CodebookSource, Error> {
    Ok(match strategy {
        Strategy::Det => CodebookSource::Deterministic {
            base: prime(base as u64)?,
            policy,
        },
        Strategy::Rand => CodebookSource::Random { base, policy, config },
    })
}

fn eval(a: EvalArgs) -> CliResult {
    let source = codebook_source(a.base, a.policy, a.strategy, a.search.config())?;
    let ds = load_dataset(&a.data)?;
    let metric = a.search.metric.into();
    let r = evaluate_cv(&ds, &source, &a.learner, metric, a.folds, a.search.seed)?;
    println!(
        "{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}",
        dataset_name(&a.data),
        a.base,
        a.policy,
        a.strategy,
        a.learner,
        r.mean,
        r.std
    );
    if a.per_fold {
        for (i, acc) in r.per_fold.iter().enumerate() {
            println!("fold\t{i}\t{acc:.4}");
        }
    }
    Ok(ExitCode::SUCCESS)
}
