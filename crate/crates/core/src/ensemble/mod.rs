//! ECOC ensembles: one base learner per codebook column, nearest-codeword decoding.

mod centroid;
mod tree;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use centroid::NearestCentroid;
pub use tree::{DecisionTree, TreeParams};

use crate::dataset::{stratified_folds, Dataset};
use crate::error::{Error, Result};
use crate::factory::{deterministic_matrix, random_matrix, DimensionPolicy, SearchConfig};
use crate::matrix::{BasePrime, CodingMatrix, Symbol};
use crate::metrics::DistanceMetric;

/// A trained column model: maps a feature vector to a superclass symbol.
pub trait PartitionModel: Send + Sync {
    fn predict_symbol(&self, x: &[f64]) -> Symbol;
}

/// Everything a learner sees when fitting one column.
pub struct ColumnTask<'a> {
    pub column_index: usize,
    /// The codebook column; entry `t` is the superclass of class `t`.
    pub column: &'a [Symbol],
    pub base: u32,
    pub train: &'a Dataset,
    /// `column[label]` for every training sample.
    pub targets: &'a [Symbol],
    pub seed: u64,
}

pub trait Learner: Sync {
    fn fit(&self, task: &ColumnTask<'_>) -> Box<dyn PartitionModel>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerSpec {
    DecisionTree(TreeParams),
    NearestCentroid,
}

impl LearnerSpec {
    pub fn decision_tree() -> LearnerSpec {
        LearnerSpec::DecisionTree(TreeParams::default())
    }
}

impl Learner for LearnerSpec {
    fn fit(&self, task: &ColumnTask<'_>) -> Box<dyn PartitionModel> {
        let ds = task.train;
        match *self {
            LearnerSpec::DecisionTree(params) => Box::new(DecisionTree::fit(
                ds.features(),
                ds.n_features(),
                task.targets,
                task.base,
                params,
                task.seed,
            )),
            LearnerSpec::NearestCentroid => Box::new(NearestCentroid::fit(
                ds.features(),
                ds.n_features(),
                task.targets,
                task.base,
            )),
        }
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LearnerSpec::DecisionTree(_) => "dt",
            LearnerSpec::NearestCentroid => "centroid",
        })
    }
}

impl FromStr for LearnerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dt" | "tree" => Ok(LearnerSpec::decision_tree()),
            "centroid" => Ok(LearnerSpec::NearestCentroid),
            other => Err(Error::InvalidArgument(format!("unknown learner {other:?}"))),
        }
    }
}

pub struct PartitionLearner {
    pub column: usize,
    pub base: u32,
    model: Box<dyn PartitionModel>,
}

impl PartitionLearner {
    pub fn new(column: usize, base: u32, model: Box<dyn PartitionModel>) -> Self {
        PartitionLearner {
            column,
            base,
            model,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Symbol {
        let s = self.model.predict_symbol(x);
        debug_assert!(u32::from(s) < self.base);
        s
    }
}

impl fmt::Debug for PartitionLearner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartitionLearner(column={}, base={})", self.column, self.base)
    }
}

/// Superclass of every label under one codebook column.
pub fn relabel(labels: &[usize], column: &[Symbol]) -> Result<Vec<Symbol>> {
    labels
        .iter()
        .map(|&l| {
            column.get(l).copied().ok_or(Error::LabelOutOfRange {
                label: l,
                classes: column.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub class: usize,
    pub codeword: Vec<Symbol>,
    pub distance: u64,
    /// Second-best distance minus best; zero on a tie or a single class.
    pub margin: u64,
}

/// Nearest codebook row to `codeword`; ties go to the smallest class index.
pub fn decode(codebook: &CodingMatrix, codeword: Vec<Symbol>, metric: DistanceMetric) -> Prediction {
    let mut best = (u64::MAX, 0);
    let mut second = u64::MAX;
    for (t, row) in codebook.row_iter().enumerate() {
        let d = metric.eval(row, &codeword);
        if d < best.0 {
            second = best.0;
            best = (d, t);
        } else if d < second {
            second = d;
        }
    }
    Prediction {
        class: best.1,
        codeword,
        distance: best.0,
        margin: if second == u64::MAX { 0 } else { second - best.0 },
    }
}

#[derive(Debug)]
pub struct EcocEnsemble {
    codebook: CodingMatrix,
    learners: Vec<PartitionLearner>,
    metric: DistanceMetric,
    constant_columns: Vec<usize>,
}

impl EcocEnsemble {
    /// Assembles an ensemble from already trained learners.
    pub fn from_parts(codebook: CodingMatrix, learners: Vec<PartitionLearner>, metric: DistanceMetric) -> Result<Self> {
        if learners.len() != codebook.cols() {
            return Err(Error::LengthMismatch(codebook.cols(), learners.len()));
        }
        check_distinct(&codebook)?;
        Ok(EcocEnsemble {
            codebook,
            learners,
            metric,
            constant_columns: Vec::new(),
        })
    }

    pub fn codebook(&self) -> &CodingMatrix {
        &self.codebook
    }

    pub fn learners(&self) -> &[PartitionLearner] {
        &self.learners
    }

    pub fn metric(&self) -> DistanceMetric {
        self.metric
    }

    /// Columns whose relabeled training targets were all one symbol.
    pub fn constant_columns(&self) -> &[usize] {
        &self.constant_columns
    }

    pub fn predict(&self, x: &[f64]) -> Prediction {
        let word = self.learners.iter().map(|l| l.predict(x)).collect();
        decode(&self.codebook, word, self.metric)
    }

    /// Fraction of samples whose decoded class equals the label.
    pub fn accuracy(&self, ds: &Dataset) -> f64 {
        if ds.is_empty() {
            return 0.0;
        }
        let correct = (0..ds.len())
            .into_par_iter()
            .filter(|&i| self.predict(ds.sample(i)).class == ds.labels()[i])
            .count();
        correct as f64 / ds.len() as f64
    }
}

fn check_distinct(codebook: &CodingMatrix) -> Result<()> {
    for i in 0..codebook.rows() {
        for j in i + 1..codebook.rows() {
            if codebook.row(i) == codebook.row(j) {
                return Err(Error::DuplicateCodewords(i, j));
            }
        }
    }
    Ok(())
}

/// Trains one learner per column on the relabeled data. Column `j` uses seed
/// `seed + j`, so the result does not depend on scheduling.
pub fn train(
    ds: &Dataset,
    codebook: &CodingMatrix,
    learner: &dyn Learner,
    metric: DistanceMetric,
    seed: u64,
) -> Result<EcocEnsemble> {
    if ds.class_count() != codebook.rows() {
        return Err(Error::ClassCountMismatch {
            dataset: ds.class_count(),
            codebook: codebook.rows(),
        });
    }
    if ds.is_empty() {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    check_distinct(codebook)?;
    let columns: Vec<Vec<Symbol>> = (0..codebook.cols()).map(|j| codebook.column(j)).collect();
    let fitted: Vec<(PartitionLearner, bool)> = columns
        .par_iter()
        .enumerate()
        .map(|(j, column)| {
            let targets = relabel(ds.labels(), column)?;
            let constant = targets.iter().all(|&t| t == targets[0]);
            let task = ColumnTask {
                column_index: j,
                column,
                base: codebook.base(),
                train: ds,
                targets: &targets,
                seed: seed.wrapping_add(j as u64),
            };
            Ok((PartitionLearner::new(j, codebook.base(), learner.fit(&task)), constant))
        })
        .collect::<Result<_>>()?;
    let constant_columns = fitted.iter().enumerate().filter(|(_, f)| f.1).map(|(j, _)| j).collect();
    Ok(EcocEnsemble {
        codebook: codebook.clone(),
        learners: fitted.into_iter().map(|f| f.0).collect(),
        metric,
        constant_columns,
    })
}

/// Where a cross-validation run gets its codebook.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodebookSource {
    Fixed(CodingMatrix),
    Deterministic {
        base: BasePrime,
        policy: DimensionPolicy,
    },
    Random {
        base: u32,
        policy: DimensionPolicy,
        config: SearchConfig,
    },
}

impl CodebookSource {
    pub fn build(&self, classes: usize) -> Result<CodingMatrix> {
        match self {
            CodebookSource::Fixed(m) => Ok(m.clone()),
            CodebookSource::Deterministic { base, policy } => {
                Ok(deterministic_matrix(*base, classes, *policy)?.matrix)
            }
            CodebookSource::Random {
                base,
                policy,
                config,
            } => Ok(random_matrix(*base, classes, *policy, config)?.matrix),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub mean: f64,
    /// Population standard deviation over folds.
    pub std: f64,
    pub per_fold: Vec<f64>,
}

/// Stratified k-fold cross-validation. The same seed drives the fold
/// assignment and the learners.
pub fn evaluate_cv(
    ds: &Dataset,
    source: &CodebookSource,
    learner: &dyn Learner,
    metric: DistanceMetric,
    folds: usize,
    seed: u64,
) -> Result<CvReport> {
    let codebook = source.build(ds.class_count())?;
    if codebook.rows() != ds.class_count() {
        return Err(Error::ClassCountMismatch {
            dataset: ds.class_count(),
            codebook: codebook.rows(),
        });
    }
    let assignment = stratified_folds(ds, folds, seed)?;
    let per_fold = (0..folds)
        .map(|k| {
            let (train_idx, test_idx) = assignment.split(k);
            let model = train(&ds.subset(&train_idx), &codebook, learner, metric, seed)?;
            Ok(model.accuracy(&ds.subset(&test_idx)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = per_fold.iter().sum::<f64>() / folds as f64;
    let var = per_fold.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / folds as f64;
    Ok(CvReport {
        mean,
        std: var.sqrt(),
        per_fold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_m1;
    use crate::dataset::make_blobs;

    #[test]
    fn relabel_examples() {
        let m1 = build_m1(BasePrime::new(3).unwrap());
        assert_eq!(relabel(&[0, 1, 2, 2], &m1.column(0)).unwrap(), vec![0, 0, 2, 2]);
        assert_eq!(relabel(&[0, 1, 2], &[0, 1, 2]).unwrap(), vec![0, 1, 2]);
        assert!(matches!(relabel(&[3], &[0, 1, 2]), Err(Error::LabelOutOfRange { label: 3, classes: 3 })));
    }

    #[test]
    fn decode_examples() {
        let m1 = build_m1(BasePrime::new(3).unwrap());
        // distances to the rows are 1, 1, 3; the tie goes to class 0
        let p = decode(&m1, vec![0, 0, 1], DistanceMetric::Kronecker);
        assert_eq!((p.class, p.distance, p.margin), (0, 1, 0));
        let exact = decode(&m1, m1.row(2).to_vec(), DistanceMetric::Kronecker);
        assert_eq!((exact.class, exact.distance), (2, 0));
    }

    #[test]
    fn decode_tie_goes_to_smallest_class() {
        let book = CodingMatrix::from_rows(2, &[[0u8, 0, 0, 0], [0, 0, 1, 1], [1, 1, 0, 0]]).unwrap();
        let p = decode(&book, vec![1, 1, 1, 1], DistanceMetric::Kronecker);
        assert_eq!((p.class, p.distance, p.margin), (1, 2, 0));
    }

    #[test]
    fn training_rejects_mismatches() {
        let ds = make_blobs(3, 5, 2, 8.0, 0).unwrap();
        let two = CodingMatrix::from_rows(2, &[[0u8, 1], [1, 0]]).unwrap();
        let err = train(&ds, &two, &LearnerSpec::NearestCentroid, DistanceMetric::Kronecker, 0).unwrap_err();
        assert!(matches!(err, Error::ClassCountMismatch { dataset: 3, codebook: 2 }));
        let dup = CodingMatrix::from_rows(2, &[[0u8, 1], [1, 0], [0, 1]]).unwrap();
        let err = train(&ds, &dup, &LearnerSpec::NearestCentroid, DistanceMetric::Kronecker, 0).unwrap_err();
        assert!(matches!(err, Error::DuplicateCodewords(0, 2)));
    }

    #[test]
    fn binary_one_column() {
        let ds = make_blobs(2, 20, 2, 10.0, 5).unwrap();
        let book = CodingMatrix::from_rows(2, &[[0u8], [1]]).unwrap();
        let model = train(&ds, &book, &LearnerSpec::decision_tree(), DistanceMetric::Kronecker, 0).unwrap();
        assert_eq!(model.learners().len(), 1);
        assert_eq!(model.accuracy(&ds), 1.0);
    }

    #[test]
    fn constant_columns_are_flagged() {
        let ds = make_blobs(3, 5, 2, 8.0, 0).unwrap();
        let book = CodingMatrix::from_rows(3, &[[0u8, 1, 1], [1, 1, 2], [2, 1, 0]]).unwrap();
        let model = train(&ds, &book, &LearnerSpec::NearestCentroid, DistanceMetric::Kronecker, 0).unwrap();
        assert_eq!(model.constant_columns(), &[1]);
    }

    #[test]
    fn cv_on_separable_blobs() {
        let ds = make_blobs(3, 30, 2, 20.0, 1).unwrap();
        let source = CodebookSource::Deterministic {
            base: BasePrime::new(3).unwrap(),
            policy: DimensionPolicy::Square,
        };
        let r = evaluate_cv(&ds, &source, &LearnerSpec::NearestCentroid, DistanceMetric::Kronecker, 5, 0).unwrap();
        assert_eq!(r.per_fold.len(), 5);
        assert!(r.mean >= 0.95, "{r:?}");
    }

    #[test]
    fn population_std() {
        let ds = make_blobs(2, 10, 1, 0.01, 2).unwrap();
        let book = CodingMatrix::from_rows(2, &[[0u8, 1], [1, 0]]).unwrap();
        let r = evaluate_cv(&ds, &CodebookSource::Fixed(book), &LearnerSpec::NearestCentroid, DistanceMetric::Kronecker, 2, 0).unwrap();
        let expected = ((r.per_fold[0] - r.per_fold[1]) / 2.0).abs();
        assert!((r.std - expected).abs() < 1e-12);
    }
}
