use super::PartitionModel;
use crate::matrix::Symbol;

/// Assigns the symbol whose training mean is nearest in Euclidean distance.
/// Symbols absent from training never win; ties go to the smallest symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestCentroid {
    centroids: Vec<(Symbol, Vec<f64>)>,
}

impl NearestCentroid {
    pub fn fit(features: &[f64], n_features: usize, targets: &[Symbol], base: u32) -> NearestCentroid {
        assert_eq!(features.len(), targets.len() * n_features);
        let mut sums = vec![vec![0.0; n_features]; base as usize];
        let mut counts = vec![0usize; base as usize];
        for (row, &t) in features.chunks_exact(n_features).zip(targets) {
            counts[t as usize] += 1;
            for (acc, v) in sums[t as usize].iter_mut().zip(row) {
                *acc += v;
            }
        }
        let centroids = sums
            .into_iter()
            .zip(counts)
            .enumerate()
            .filter(|(_, (_, c))| *c > 0)
            .map(|(s, (sum, c))| (s as Symbol, sum.into_iter().map(|v| v / c as f64).collect()))
            .collect();
        NearestCentroid { centroids }
    }

    pub fn centroid(&self, symbol: Symbol) -> Option<&[f64]> {
        self.centroids
            .iter()
            .find(|(s, _)| *s == symbol)
            .map(|(_, c)| c.as_slice())
    }
}

impl PartitionModel for NearestCentroid {
    fn predict_symbol(&self, x: &[f64]) -> Symbol {
        let mut best = (f64::INFINITY, 0);
        for (s, c) in &self.centroids {
            let d: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.0 {
                best = (d, *s);
            }
        }
        best.1
    }
}
