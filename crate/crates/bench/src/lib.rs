//! Shared inputs for the benchmarks.

use necoc_core::{make_blobs, Dataset};

/// Ten moderately overlapping classes in eight dimensions.
pub fn blobs() -> Dataset {
    make_blobs(10, 100, 8, 3.0, 17).expect("valid blob parameters")
}
