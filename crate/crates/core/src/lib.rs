//! Deterministic distance-optimal N-ary ECOC matrices, the oracles that check
//! them, and an ECOC ensemble classifier built on top.
//!
//! ```
//! use necoc_core::{build_mk, distance_report, BasePrime, DistanceMetric};
//!
//! let m = build_mk(BasePrime::new(3)?, 2)?;
//! let r = distance_report(&m, DistanceMetric::Kronecker)?;
//! assert_eq!((r.d_r, r.d_c, r.d_t), (6, 6, 12));
//! # Ok::<(), necoc_core::Error>(())
//! ```

pub mod construction;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod factory;
pub mod matrix;
pub mod metrics;
pub mod verification;

pub use construction::{
    build_m1, build_mk, build_mk_unchecked, build_mk_with_capacity, build_punctured_walsh,
    build_walsh, m1_entry, shift, DEFAULT_CAPACITY,
};
pub use dataset::{load_csv, load_sparse, make_blobs, stratified_folds, Dataset, FoldAssignment, LabelColumn};
pub use ensemble::{
    decode, evaluate_cv, relabel, train, CodebookSource, ColumnTask, CvReport, EcocEnsemble, Learner,
    LearnerSpec, PartitionLearner, PartitionModel, Prediction, TreeParams,
};
pub use error::{Error, Result};
pub use factory::{
    choose_k, deterministic_matrix, heuristic_length, random_matrix, repair_duplicate_rows, trial_matrix,
    truncate, DimensionPolicy, FactoryResult, Objective, Provenance, SearchConfig,
};
pub use matrix::{is_prime, BasePrime, CodingMatrix, Symbol, MAX_BASE};
pub use metrics::{
    are_nary_complements, difference_vector, distance_report, hamming, multiplicity, row_distance,
    validate_ecoc_properties, DifferenceVector, DistanceMetric, DistanceReport, PropertyReport,
};
pub use verification::{
    check_hamming_absolute_agreement, check_theorem12, check_theorem12_unchecked, exhaustive_max_dt,
    claimed_max_dt, ExhaustiveOptions, ExhaustiveResult, Theorem12Report,
};
