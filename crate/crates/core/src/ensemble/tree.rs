//! CART classification tree with the Gini criterion.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::PartitionModel;
use crate::matrix::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(Symbol),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    /// Fits on row-major `features`. Candidate features are visited in a
    /// seeded random order at every node; among equally good splits the first
    /// one visited wins, so the seed decides ties.
    pub fn fit(
        features: &[f64],
        n_features: usize,
        targets: &[Symbol],
        base: u32,
        params: TreeParams,
        seed: u64,
    ) -> DecisionTree {
        assert_eq!(features.len(), targets.len() * n_features);
        assert!(!targets.is_empty(), "cannot fit a tree on zero samples");
        let mut builder = Builder {
            features,
            n_features,
            targets,
            base: base as usize,
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            nodes: Vec::new(),
            order: (0..n_features).collect(),
            scratch: Vec::new(),
        };
        let mut samples: Vec<usize> = (0..targets.len()).collect();
        builder.grow(&mut samples, 0);
        DecisionTree {
            nodes: builder.nodes,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

impl PartitionModel for DecisionTree {
    fn predict_symbol(&self, x: &[f64]) -> Symbol {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(s) => return s,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }
}

struct Builder<'a> {
    features: &'a [f64],
    n_features: usize,
    targets: &'a [Symbol],
    base: usize,
    params: TreeParams,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
    order: Vec<usize>,
    scratch: Vec<(f64, Symbol)>,
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Builder<'_> {
    fn value(&self, sample: usize, feature: usize) -> f64 {
        self.features[sample * self.n_features + feature]
    }

    fn counts(&self, samples: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.base];
        for &s in samples {
            counts[self.targets[s] as usize] += 1;
        }
        counts
    }

    // Returns the index of the node it created.
    fn grow(&mut self, samples: &mut [usize], depth: usize) -> usize {
        let counts = self.counts(samples);
        let majority = majority(&counts);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        let too_small = samples.len() < 2 * self.params.min_samples_leaf.max(1);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(majority));
        if pure || depth_capped || too_small {
            return id;
        }
        let Some(split) = self.best_split(samples, &counts) else {
            return id;
        };
        let mut cut = 0;
        for i in 0..samples.len() {
            if self.value(samples[i], split.feature) <= split.threshold {
                samples.swap(i, cut);
                cut += 1;
            }
        }
        let (l, r) = samples.split_at_mut(cut);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    // Maximizes sum over children of (sum_k count_k^2) / size, which is the
    // same as minimizing the size-weighted Gini impurity.
    fn best_split(&mut self, samples: &[usize], total: &[usize]) -> Option<Split> {
        let min_leaf = self.params.min_samples_leaf.max(1);
        let n = samples.len();
        let total_sq: f64 = total.iter().map(|&c| (c * c) as f64).sum();
        let mut order = std::mem::take(&mut self.order);
        order.shuffle(&mut self.rng);
        let mut best: Option<Split> = None;
        let mut scratch = std::mem::take(&mut self.scratch);
        let mut left = vec![0usize; self.base];
        for &f in &order {
            scratch.clear();
            scratch.extend(samples.iter().map(|&s| (self.value(s, f), self.targets[s])));
            scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
            if scratch[0].0 == scratch[n - 1].0 {
                continue;
            }
            left.iter_mut().for_each(|c| *c = 0);
            let mut left_sq = 0.0;
            let mut right_sq = total_sq;
            for i in 0..n - 1 {
                let k = scratch[i].1 as usize;
                let lc = left[k] as f64;
                let rc = (total[k] - left[k]) as f64;
                left_sq += 2.0 * lc + 1.0;
                right_sq -= 2.0 * rc - 1.0;
                left[k] += 1;
                let n_left = i + 1;
                if scratch[i].0 == scratch[i + 1].0 || n_left < min_leaf || n - n_left < min_leaf {
                    continue;
                }
                let score = left_sq / n_left as f64 + right_sq / (n - n_left) as f64;
                if best.as_ref().is_none_or(|b| score > b.score) {
                    let (a, b) = (scratch[i].0, scratch[i + 1].0);
                    let mut threshold = a + (b - a) / 2.0;
                    if threshold >= b {
                        threshold = a;
                    }
                    best = Some(Split {
                        feature: f,
                        threshold,
                        score,
                    });
                }
            }
        }
        self.order = order;
        self.scratch = scratch;
        best
    }
}

/// Most frequent symbol; ties go to the smallest.
fn majority(counts: &[usize]) -> Symbol {
    let mut best = 0;
    for (k, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = k;
        }
    }
    best as Symbol
}
