use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, ValueEnum};
use necoc_core::{
    deterministic_matrix, distance_report, evaluate_cv, is_prime, random_matrix, BasePrime, DimensionPolicy,
    DistanceMetric, Error, LearnerSpec, Objective, Provenance, SearchConfig,
};

use crate::{codebook_source, load_dataset, CliResult, MetricArg, Strategy};

/// Class counts of the known benchmark datasets, so distance tables need no files.
const REGISTRY: &[(&str, usize)] = &[
    ("pendigits", 10),
    ("usps", 10),
    ("vowel", 11),
    ("letters", 26),
    ("auslan", 95),
    ("aloi", 1000),
];

const DEFAULT_BASES: &[u32] = &[2, 3, 5, 7, 11, 13];

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Which {
    Distances,
    Accuracy,
}

#[derive(Args)]
pub(crate) struct TablesArgs {
    #[arg(long, value_enum)]
    which: Which,
    /// Comma-separated dataset names; empty prints nothing.
    #[arg(long, value_delimiter = ',', default_value = "")]
    datasets: Vec<String>,
    /// Comma-separated bases. Defaults to the primes up to 13 that do not exceed the class count.
    #[arg(long, value_delimiter = ',')]
    bases: Vec<u32>,
    /// Write `<dataset>_<which>.txt` files here instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where `<dataset>.csv` files live.
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
    #[arg(long, default_value = "square")]
    policy: DimensionPolicy,
    #[arg(long, value_enum, default_value_t = MetricArg::Hamming)]
    metric: MetricArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random-search trials per base; 0 leaves the random columns empty.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value = "dt")]
    learner: LearnerSpec,
}

pub(crate) fn run(a: TablesArgs) -> CliResult {
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
    }
    if let Some(&bad) = a.bases.iter().find(|&&b| !is_prime(b as u64)) {
        return Err(Error::CompositeBase(bad as u64).into());
    }
    let names = a.datasets.iter().map(|s| s.trim()).filter(|s| !s.is_empty());
    let mut first = true;
    for name in names {
        let table = match a.which {
            Which::Distances => distance_table(&a, name)?,
            Which::Accuracy => accuracy_table(&a, name)?,
        };
        let Some(table) = table else { continue };
        match &a.out {
            Some(dir) => {
                let suffix = match a.which {
                    Which::Distances => "distances",
                    Which::Accuracy => "accuracy",
                };
                let path = dir.join(format!("{name}_{suffix}.txt"));
                fs::write(&path, &table).map_err(|e| Error::Io { path, source: e })?;
            }
            None => {
                if !first {
                    println!();
                }
                print!("{table}");
            }
        }
        first = false;
    }
    Ok(ExitCode::SUCCESS)
}

fn bases_for(a: &TablesArgs, classes: usize) -> Vec<u32> {
    if a.bases.is_empty() {
        DEFAULT_BASES.iter().copied().filter(|&b| b as usize <= classes).collect()
    } else {
        a.bases.clone()
    }
}

fn config(a: &TablesArgs) -> SearchConfig {
    SearchConfig {
        trials: a.trials,
        objective: Objective::Total,
        metric: a.metric.into(),
        seed: a.seed,
    }
}

/// Class count from the registry, else from the dataset file.
fn class_count(a: &TablesArgs, name: &str) -> Result<Option<usize>, Error> {
    if let Some(&(_, c)) = REGISTRY.iter().find(|(n, _)| *n == name) {
        return Ok(Some(c));
    }
    let path = a.data_dir.join(format!("{name}.csv"));
    if !path.exists() {
        eprintln!("warning: unknown dataset {name} and no {}; skipped", path.display());
        return Ok(None);
    }
    Ok(Some(load_dataset(&path)?.class_count()))
}

fn distance_table(a: &TablesArgs, name: &str) -> Result<Option<String>, Error> {
    let Some(classes) = class_count(a, name)? else {
        return Ok(None);
    };
    let metric: DistanceMetric = a.metric.into();
    let cols = a.policy.resolve(classes);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {name}: {classes}x{cols} ({}), metric {}, random best of {} seed {}",
        a.policy,
        metric_name(a.metric),
        a.trials,
        a.seed
    );
    let _ = writeln!(out, "N\tn_k\td_r(M)\td_T(M)\td_r(M_R)\td_T(M_R)\ttrial");
    for base in bases_for(a, classes) {
        let det = deterministic_matrix(BasePrime::new(base as u64)?, classes, a.policy)?;
        let Provenance::Deterministic { k, .. } = det.provenance else {
            unreachable!("deterministic provenance")
        };
        let r = distance_report(&det.matrix, metric)?;
        let n_k = (base as u64).pow(k);
        let random = if a.trials == 0 {
            "-\t-\t-".to_string()
        } else {
            let m = random_matrix(base, classes, a.policy, &config(a))?;
            let Provenance::Random { trial, .. } = m.provenance else {
                unreachable!("random provenance")
            };
            format!("{}\t{}\t{}", m.report.d_r, m.report.d_t, trial)
        };
        let _ = writeln!(out, "{base}\t{n_k}\t{}\t{}\t{random}", r.d_r, r.d_t);
    }
    Ok(Some(out))
}

fn accuracy_table(a: &TablesArgs, name: &str) -> Result<Option<String>, Error> {
    let path = a.data_dir.join(format!("{name}.csv"));
    if !path.exists() {
        eprintln!("warning: {} not found; {name} skipped", path.display());
        return Ok(None);
    }
    let ds = load_dataset(&path)?;
    let metric: DistanceMetric = a.metric.into();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {name}: {} classes, {} policy, learner {}, {} folds, seed {}, random best of {}",
        ds.class_count(),
        a.policy,
        a.learner,
        a.folds,
        a.seed,
        a.trials
    );
    let _ = writeln!(out, "N\tdet_mean\tdet_std\trand_mean\trand_std");
    for base in bases_for(a, ds.class_count()) {
        let cv = |strategy| -> Result<String, Error> {
            let source = codebook_source(base, a.policy, strategy, config(a))?;
            let r = evaluate_cv(&ds, &source, &a.learner, metric, a.folds, a.seed)?;
            Ok(format!("{:.4}\t{:.4}", r.mean, r.std))
        };
        let det = cv(Strategy::Det)?;
        let rand = if a.trials == 0 { "-\t-".to_string() } else { cv(Strategy::Rand)? };
        let _ = writeln!(out, "{base}\t{det}\t{rand}");
    }
    Ok(Some(out))
}

fn metric_name(m: MetricArg) -> &'static str {
    match m {
        MetricArg::Hamming => "hamming",
        MetricArg::Absolute => "absolute",
    }
}
