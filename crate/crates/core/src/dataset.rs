//! Numeric datasets, CSV and sparse loaders, synthetic blobs, and stratified folds.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Dense features (row-major) with labels remapped to `0..class_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<usize>,
    class_count: usize,
    name: String,
    /// Original label text for each dense class index.
    label_names: Vec<String>,
}

impl Dataset {
    /// Validates finiteness, label range and that every class occurs.
    pub fn new(
        name: impl Into<String>,
        features: Vec<f64>,
        n_features: usize,
        labels: Vec<usize>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        let class_count = label_names.len();
        if n_features == 0 || features.len() != labels.len() * n_features {
            return Err(Error::InvalidArgument(format!(
                "{} feature values do not form {} rows of {n_features}",
                features.len(),
                labels.len()
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite feature in sample {}",
                pos / n_features
            )));
        }
        let mut seen = vec![false; class_count];
        for &l in &labels {
            if l >= class_count {
                return Err(Error::LabelOutOfRange {
                    label: l,
                    classes: class_count,
                });
            }
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidArgument(format!("class {missing} has no samples")));
        }
        Ok(Dataset {
            features,
            n_features,
            labels,
            class_count,
            name: name.into(),
            label_names,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// The samples at `indices`, in that order, keeping the full class indexing.
    /// Classes absent from the subset are allowed here.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            features.extend_from_slice(self.sample(i));
        }
        Dataset {
            features,
            n_features: self.n_features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_count: self.class_count,
            name: self.name.clone(),
            label_names: self.label_names.clone(),
        }
    }

    /// Writes a headed CSV with the label last, using the original label text.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
        let mut header: Vec<String> = (0..self.n_features).map(|j| format!("x{j}")).collect();
        header.push("label".into());
        w.write_record(&header).map_err(|e| csv_io(path, e))?;
        for i in 0..self.len() {
            let mut rec: Vec<String> = self.sample(i).iter().map(|v| format!("{v:?}")).collect();
            rec.push(self.label_names[self.labels[i]].clone());
            w.write_record(&rec).map_err(|e| csv_io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
}

/// Loads a comma-separated numeric table. Labels are remapped densely by
/// sorted value: numerically if every label parses as a number, otherwise
/// lexicographically.
pub fn load_csv(path: impl AsRef<Path>, label_column: LabelColumn, has_header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_io(path, e))?;
    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    let mut arity = None;
    let mut first = true;
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| Error::parse(line, e.to_string()))?;
        if first && has_header {
            first = false;
            continue;
        }
        first = false;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match arity {
            None => arity = Some(record.len()),
            Some(a) if a != record.len() => {
                return Err(Error::parse(line, format!("expected {a} fields, found {}", record.len())));
            }
            _ => {}
        }
        if record.len() < 2 {
            return Err(Error::parse(line, "need at least one feature and a label"));
        }
        let label_idx = match label_column {
            LabelColumn::Last => record.len() - 1,
            LabelColumn::Index(i) if i < record.len() => i,
            LabelColumn::Index(i) => {
                return Err(Error::parse(line, format!("label column {i} out of range")));
            }
        };
        for (j, cell) in record.iter().enumerate() {
            if j == label_idx {
                if cell.is_empty() {
                    return Err(Error::parse(line, "empty label"));
                }
                raw_labels.push(cell.to_string());
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::parse(line, format!("non-numeric cell {cell:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(line, format!("non-finite cell {cell:?}")));
            }
            features.push(v);
        }
    }
    let Some(arity) = arity else {
        return Err(Error::parse(1, "no data rows"));
    };
    let (labels, names) = remap_labels(&raw_labels);
    let name = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    Dataset::new(name, features, arity - 1, labels, names)
}

/// Loads `label index:value ...` lines with 1-based feature indices; missing
/// indices are zero.
pub fn load_sparse(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut raw_labels = Vec::new();
    let mut width = 0;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        let Some(label) = tokens.next() else {
            continue;
        };
        let mut row = Vec::new();
        for tok in tokens {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, format!("bad pair {tok:?}")))?;
            let i: usize = i
                .parse()
                .ok()
                .filter(|&i| i >= 1)
                .ok_or_else(|| Error::parse(lineno, format!("bad index {i:?}")))?;
            let v: f64 = v
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::parse(lineno, format!("bad value {v:?}")))?;
            width = width.max(i);
            row.push((i - 1, v));
        }
        raw_labels.push(label.to_string());
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(1, "no data rows"));
    }
    let width = width.max(1);
    let mut features = vec![0.0; rows.len() * width];
    for (r, row) in rows.iter().enumerate() {
        for &(i, v) in row {
            features[r * width + i] = v;
        }
    }
    let (labels, names) = remap_labels(&raw_labels);
    let name = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    Dataset::new(name, features, width, labels, names)
}

fn remap_labels(raw: &[String]) -> (Vec<usize>, Vec<String>) {
    let numeric: Option<Vec<f64>> = raw.iter().map(|s| s.parse::<f64>().ok()).collect();
    let mut names: Vec<String> = raw.to_vec();
    match &numeric {
        Some(_) => names.sort_by(|a, b| {
            a.parse::<f64>()
                .unwrap()
                .total_cmp(&b.parse::<f64>().unwrap())
                .then_with(|| a.cmp(b))
        }),
        None => names.sort(),
    }
    names.dedup();
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let labels = raw.iter().map(|s| index[s.as_str()]).collect();
    (labels, names)
}

/// Isotropic Gaussian clusters, one per class, with unit standard deviation.
/// Centers are drawn uniformly from a cube and rejected until every pair is
/// at least `separation` apart.
pub fn make_blobs(classes: usize, per_class: usize, dims: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if classes == 0 || per_class == 0 || dims == 0 || separation.is_nan() || separation <= 0.0 {
        return Err(Error::InvalidArgument("make_blobs arguments must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = separation * (classes as f64).powf(1.0 / dims as f64) * 2.0;
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(classes);
    let mut attempts = 0usize;
    while centers.len() < classes {
        attempts += 1;
        let scale = side * (1.0 + (attempts / 1000) as f64);
        let c: Vec<f64> = (0..dims).map(|_| rng.random_range(0.0..scale)).collect();
        let far = centers.iter().all(|o| {
            o.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() >= separation
        });
        if far {
            centers.push(c);
        }
    }
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut features = Vec::with_capacity(classes * per_class * dims);
    let mut labels = Vec::with_capacity(classes * per_class);
    for (class, center) in centers.iter().enumerate() {
        for _ in 0..per_class {
            features.extend(center.iter().map(|&m| m + noise.sample(&mut rng)));
            labels.push(class);
        }
    }
    let names = (0..classes).map(|c| c.to_string()).collect();
    Dataset::new(format!("blobs{classes}"), features, dims, labels, names)
}

/// Fold index per sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    folds: Vec<usize>,
    fold_count: usize,
}

impl FoldAssignment {
    pub fn fold_count(&self) -> usize {
        self.fold_count
    }

    pub fn fold_of(&self, sample: usize) -> usize {
        self.folds[sample]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.folds
    }

    /// `(train, test)` sample indices for one fold, each ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.folds.len()).partition(|&i| self.folds[i] != fold)
    }
}

/// Per class: shuffle the members with the seeded stream, then deal them
/// round-robin. The dealing offset carries over from one class to the next so
/// the overall fold sizes stay within one of each other per class.
pub fn stratified_folds(ds: &Dataset, folds: usize, seed: u64) -> Result<FoldAssignment> {
    if folds < 2 {
        return Err(Error::InvalidArgument("need at least 2 folds".into()));
    }
    let mut members = vec![Vec::new(); ds.class_count()];
    for (i, &l) in ds.labels().iter().enumerate() {
        members[l].push(i);
    }
    if let Some((class, m)) = members.iter().enumerate().find(|(_, m)| m.len() < folds) {
        return Err(Error::Stratification {
            class,
            size: m.len(),
            folds,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; ds.len()];
    let mut offset = 0;
    for mut class_members in members {
        class_members.shuffle(&mut rng);
        for &i in &class_members {
            assignment[i] = offset % folds;
            offset += 1;
        }
    }
    Ok(FoldAssignment {
        folds: assignment,
        fold_count: folds,
    })
}
