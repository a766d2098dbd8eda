//! One test per acceptance criterion. Each prints a single `criterion N: PASS`
//! or `criterion N: FAIL ...` line and fails on FAIL.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use necoc_core::*;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn necoc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_necoc")).args(args).output().expect("spawn necoc")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn verdict(criterion: u32, failures: &[String]) {
    if failures.is_empty() {
        println!("criterion {criterion}: PASS");
    } else {
        let line = format!("criterion {criterion}: FAIL {}", failures.join("; "));
        println!("{line}");
        panic!("{line}");
    }
}

fn p(n: u64) -> BasePrime {
    BasePrime::new(n).unwrap()
}

#[test]
fn criterion_01_construction_fidelity() {
    let m1 = CodingMatrix::from_rows(3, &[[0u8, 0, 2], [0, 1, 1], [2, 1, 2]]).unwrap();
    let m2: [[u8; 9]; 9] = [
        [0, 0, 2, 0, 0, 2, 2, 2, 1],
        [0, 1, 1, 0, 1, 1, 2, 0, 0],
        [2, 1, 2, 2, 1, 2, 1, 0, 1],
        [0, 0, 2, 1, 1, 0, 1, 1, 0],
        [0, 1, 1, 1, 2, 2, 1, 2, 2],
        [2, 1, 2, 0, 2, 0, 0, 2, 0],
        [2, 2, 1, 1, 1, 0, 2, 2, 1],
        [2, 0, 0, 1, 2, 2, 2, 0, 0],
        [1, 0, 1, 0, 2, 0, 1, 0, 1],
    ];
    let m2 = CodingMatrix::from_rows(3, &m2).unwrap();
    let mut failures = Vec::new();
    if build_m1(p(3)) != m1 {
        failures.push("M_1(3) differs".to_string());
    }
    if build_mk(p(3), 2).unwrap() != m2 {
        failures.push("M_2(3) differs".to_string());
    }
    let reps = 100;
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(build_m1(p(3)));
        std::hint::black_box(build_mk(p(3), 2).unwrap());
    }
    let each = start.elapsed() / reps;
    if each >= Duration::from_millis(1) {
        failures.push(format!("construction took {each:?}"));
    }
    let out = necoc(&["gen", "--base", "3", "--k", "2"]);
    if !out.status.success() || stdout(&out) != m2.to_text() {
        failures.push("gen --base 3 --k 2 output differs".to_string());
    }
    verdict(1, &failures);
}

#[test]
fn criterion_02_distance_theorem_suite() {
    let mut failures = Vec::new();
    for n in [2u64, 3, 5, 7, 11, 13] {
        let mut k = 1;
        while n.pow(k) <= 2200 {
            let r = check_theorem12(p(n), k).unwrap();
            if let Some(v) = r.first_violation() {
                failures.push(format!("N={n} k={k}: {v}"));
            }
            k += 1;
        }
    }
    verdict(2, &failures);
}

#[test]
fn criterion_03_composite_counterexample() {
    let mut failures = Vec::new();
    let r = distance_report(&build_mk_unchecked(4, 2).unwrap(), DistanceMetric::Kronecker).unwrap();
    if r.d_t != 16 {
        failures.push(format!("unchecked M_2(4) d_T = {}", r.d_t));
    }
    let out = necoc(&["verify", "--composite-demo"]);
    if !stdout(&out).contains("d_T 16") || !stdout(&out).contains("24") {
        failures.push("composite demo output".to_string());
    }
    if necoc(&["gen", "--base", "4", "--k", "2"]).status.code() != Some(3) {
        failures.push("gen accepted base 4".to_string());
    }
    verdict(3, &failures);
}

/// `(dataset, classes, [(N, d_r, d_T)])` deterministic columns of the published tables.
type Table = (&'static str, usize, &'static [(u64, u64, u64)]);

const HAMMING_TABLES: &[Table] = &[
    ("pendigits", 10, &[(2, 4, 8), (3, 6, 12), (5, 5, 10), (7, 7, 14)]),
    ("letters", 26, &[(2, 12, 24), (3, 17, 34), (5, 20, 40), (7, 19, 38), (11, 15, 30), (13, 13, 26)]),
    ("auslan", 95, &[(2, 46, 92), (3, 54, 108), (5, 70, 140), (7, 49, 98), (11, 84, 168), (13, 82, 164)]),
    ("usps", 10, &[(2, 4, 8), (3, 6, 12), (5, 5, 10), (7, 7, 14)]),
    ("vowel", 11, &[(2, 4, 8), (3, 6, 12), (5, 6, 12), (7, 7, 14), (11, 10, 20)]),
];

fn gen_and_dist(dir: &Path, base: u64, classes: usize, metric: &str) -> (String, String) {
    let path = dir.join(format!("m_{base}_{classes}.txt"));
    let path_str = path.to_str().unwrap();
    let g = necoc(&["gen", "--base", &base.to_string(), "--classes", &classes.to_string(), "--policy", "square", "--out", path_str]);
    assert!(g.status.success(), "gen failed: {}", String::from_utf8_lossy(&g.stderr));
    let d = necoc(&["dist", "--matrix", path_str, "--metric", metric]);
    assert!(d.status.success());
    let first = stdout(&d).lines().next().unwrap().to_string();
    (stdout(&g).trim().to_string(), first)
}

#[test]
fn criterion_04_distance_tables() {
    let dir = tempfile::tempdir().unwrap();
    let mut failures = Vec::new();
    for &(name, classes, rows) in HAMMING_TABLES {
        for &(n, d_r, d_t) in rows {
            let (printed, line) = gen_and_dist(dir.path(), n, classes, "hamming");
            if printed != line {
                failures.push(format!("{name} N={n}: gen printed {printed}, dist gave {line}"));
            }
            let got: Vec<u64> = line.split(' ').map(|v| v.parse().unwrap()).collect();
            if (got[0], got[2]) != (d_r, d_t) {
                failures.push(format!("{name} N={n}: got ({}, {}), table ({d_r}, {d_t})", got[0], got[2]));
            }
        }
    }
    let (_, line) = gen_and_dist(dir.path(), 11, 11, "absolute");
    let got: Vec<u64> = line.split(' ').map(|v| v.parse().unwrap()).collect();
    if (got[0], got[2]) != (31, 62) {
        failures.push(format!("vowel N=11 absolute: got ({}, {}), table (31, 62)", got[0], got[2]));
    }
    verdict(4, &failures);
}

#[test]
fn criterion_05_random_search_direction() {
    let mut failures = Vec::new();
    for seed in 0..5u64 {
        for (base, det, above) in [(3u32, 34u64, false), (13, 26, true)] {
            let out = necoc(&[
                "search", "--base", &base.to_string(), "--classes", "26", "--policy", "square",
                "--trials", "1000", "--seed", &seed.to_string(), "--objective", "total",
            ]);
            assert!(out.status.success());
            let report = String::from_utf8(out.stderr).unwrap();
            let d_t: u64 = report.trim().rsplit(' ').next().unwrap().parse().unwrap();
            let ok = if above { d_t > det } else { d_t < det };
            println!("seed {seed} N={base}: random d_T {d_t}, deterministic {det}");
            if !ok {
                failures.push(format!("seed {seed} N={base}: d_T {d_t} vs {det}"));
            }
        }
    }
    verdict(5, &failures);
}

#[test]
fn criterion_06_exhaustive_oracle() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in [3usize, 4] {
        let r = exhaustive_max_dt(2, n, ExhaustiveOptions::default()).unwrap();
        if r.max_d_t != 4 {
            failures.push(format!("n={n}: max d_T {}", r.max_d_t));
        }
    }
    let h2 = distance_report(&build_walsh(2).unwrap(), DistanceMetric::Kronecker).unwrap();
    if h2.d_t != 4 {
        failures.push(format!("H_2 d_T {}", h2.d_t));
    }
    let out = necoc(&["verify", "--conjecture", "--n", "4", "--base", "2"]);
    if out.status.code() != Some(0) || !stdout(&out).contains("max d_T 4") {
        failures.push("verify --conjecture --n 4 --base 2".to_string());
    }
    if start.elapsed() >= Duration::from_secs(10) {
        failures.push(format!("took {:?}", start.elapsed()));
    }
    verdict(6, &failures);
}

#[test]
fn criterion_07_walsh_lemmas() {
    let mut failures = Vec::new();
    for k in 1..=6 {
        let r = distance_report(&build_walsh(k).unwrap(), DistanceMetric::Kronecker).unwrap();
        if r.d_t != 1 << k {
            failures.push(format!("H_{k} d_T {}", r.d_t));
        }
    }
    for k in 2..=4 {
        let r = distance_report(&build_punctured_walsh(k).unwrap(), DistanceMetric::Kronecker).unwrap();
        if r.d_t != 1 << k {
            failures.push(format!("P_{k} d_T {}", r.d_t));
        }
    }
    verdict(7, &failures);
}

/// Number of words at Hamming distance exactly `t` from a length-`n` word.
fn corruption_count(n: usize, t: usize, base: u64) -> u128 {
    let mut choose = 1u128;
    for i in 0..t {
        choose = choose * (n - i) as u128 / (i + 1) as u128;
    }
    choose * ((base - 1) as u128).pow(t as u32)
}

fn corrupt_all(row: &[u8], t: usize, base: u8, start: usize, word: &mut Vec<u8>, visit: &mut dyn FnMut(&[u8])) {
    if t == 0 {
        visit(word);
        return;
    }
    for pos in start..row.len() {
        for s in 0..base {
            if s != row[pos] {
                word[pos] = s;
                corrupt_all(row, t - 1, base, pos + 1, word, visit);
            }
        }
        word[pos] = row[pos];
    }
}

#[test]
fn criterion_08_error_correction() {
    const BRUTE_LIMIT: u128 = 20_000;
    const SAMPLES: usize = 10_000;
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for base in [2u64, 3, 5] {
        for c in 2..=27 {
            let book = deterministic_matrix(p(base), c, DimensionPolicy::Square).unwrap().matrix;
            let d_r = distance_report(&book, DistanceMetric::Kronecker).unwrap().d_r as usize;
            let t = d_r.saturating_sub(1) / 2;
            let mut bad = 0usize;
            for class in 0..c {
                let row = book.row(class);
                let mut check = |w: &[u8]| {
                    if decode(&book, w.to_vec(), DistanceMetric::Kronecker).class != class {
                        bad += 1;
                    }
                };
                if corruption_count(c, t, base) <= BRUTE_LIMIT {
                    corrupt_all(row, t, base as u8, 0, &mut row.to_vec(), &mut check);
                } else {
                    for _ in 0..SAMPLES {
                        let mut w = row.to_vec();
                        for pos in sample(&mut rng, c, t) {
                            w[pos] = (w[pos] + rng.random_range(1..base as u8)) % base as u8;
                        }
                        check(&w);
                    }
                }
            }
            if bad > 0 {
                failures.push(format!("N={base} c={c} t={t}: {bad} misdecoded"));
            }
        }
    }
    verdict(8, &failures);
}

struct TruthLearner(HashMap<Vec<u64>, usize>);

struct TruthModel {
    truth: HashMap<Vec<u64>, usize>,
    column: Vec<Symbol>,
}

impl PartitionModel for TruthModel {
    fn predict_symbol(&self, x: &[f64]) -> Symbol {
        self.column[self.truth[&bits(x)]]
    }
}

impl Learner for TruthLearner {
    fn fit(&self, task: &ColumnTask<'_>) -> Box<dyn PartitionModel> {
        Box::new(TruthModel {
            truth: self.0.clone(),
            column: task.column.to_vec(),
        })
    }
}

fn bits(x: &[f64]) -> Vec<u64> {
    x.iter().map(|v| v.to_bits()).collect()
}

fn mean_of(out: &Output) -> f64 {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    stdout(out).split('\t').nth(5).unwrap().parse().unwrap()
}

#[test]
fn criterion_09_classification() {
    let mut failures = Vec::new();

    // (a) oracle learners
    let pendigits = load_csv(data("pendigits.csv"), LabelColumn::Last, true).unwrap();
    let blobs = make_blobs(12, 10, 3, 0.3, 5).unwrap();
    for ds in [&pendigits, &blobs] {
        let truth = (0..ds.len()).map(|i| (bits(ds.sample(i)), ds.labels()[i])).collect();
        let oracle = TruthLearner(truth);
        let sources = [
            CodebookSource::Deterministic { base: p(2), policy: DimensionPolicy::Half },
            CodebookSource::Deterministic { base: p(5), policy: DimensionPolicy::Square },
            CodebookSource::Random {
                base: 3,
                policy: DimensionPolicy::Double,
                config: SearchConfig { trials: 20, ..SearchConfig::default() },
            },
        ];
        for source in &sources {
            let r = evaluate_cv(ds, source, &oracle, DistanceMetric::Kronecker, 5, 0).unwrap();
            if r.mean != 1.0 {
                failures.push(format!("oracle on {} with {source:?}: {}", ds.name(), r.mean));
            }
        }
    }

    // (b) separated blobs, ternary square, decision tree
    let blobs = make_blobs(9, 30, 4, 10.0, 11).unwrap();
    let source = CodebookSource::Deterministic { base: p(3), policy: DimensionPolicy::Square };
    let r = evaluate_cv(&blobs, &source, &LearnerSpec::decision_tree(), DistanceMetric::Kronecker, 10, 0).unwrap();
    println!("blobs ternary dt: {:.4}", r.mean);
    if r.mean < 0.95 {
        failures.push(format!("blobs accuracy {:.4}", r.mean));
    }

    // (c) ternary vs binary on Pendigits and Vowel through the CLI
    for (name, target) in [("pendigits.csv", Some(0.9597)), ("vowel.csv", None)] {
        let path = data(name);
        let path = path.to_str().unwrap();
        let eval = |base: &str| {
            mean_of(&necoc(&["eval", "--data", path, "--base", base, "--policy", "square", "--strategy", "det", "--learner", "dt", "--folds", "10", "--seed", "0"]))
        };
        let (binary, ternary) = (eval("2"), eval("3"));
        println!("{name}: binary {binary:.4} ternary {ternary:.4}");
        if ternary < binary {
            failures.push(format!("{name}: ternary {ternary:.4} < binary {binary:.4}"));
        }
        if let Some(t) = target {
            if (ternary - t).abs() > 0.03 {
                failures.push(format!("{name}: ternary {ternary:.4} not within 0.03 of {t}"));
            }
        }
    }
    verdict(9, &failures);
}

fn run_with_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_necoc"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .expect("spawn necoc")
}

#[test]
fn criterion_10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let vowel = data("vowel.csv");
    let vowel = vowel.to_str().unwrap();
    let data_dir = data("");
    let data_dir = data_dir.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "--base", "5", "--classes", "26", "--policy", "double"],
        vec!["search", "--base", "3", "--classes", "26", "--trials", "500", "--seed", "7"],
        vec!["search", "--base", "7", "--classes", "11", "--trials", "300", "--seed", "3", "--objective", "row", "--metric", "absolute"],
        vec!["verify", "--conjecture", "--n", "4", "--base", "2"],
        vec!["verify", "--theorem12", "--base", "3", "--k", "4"],
        vec!["eval", "--data", vowel, "--base", "5", "--strategy", "rand", "--trials", "50", "--seed", "2", "--per-fold"],
        vec!["tables", "--which", "distances", "--datasets", "vowel", "--trials", "100", "--seed", "4"],
        vec!["tables", "--which", "accuracy", "--datasets", "vowel", "--bases", "3", "--trials", "20", "--data-dir", data_dir, "--learner", "centroid"],
    ];
    let mut failures = Vec::new();
    for args in &commands {
        let runs: Vec<Output> = ["1", "1", "4"].iter().map(|t| run_with_threads(t, args)).collect();
        for r in &runs[1..] {
            if r.stdout != runs[0].stdout || r.stderr != runs[0].stderr || r.status != runs[0].status {
                failures.push(args.join(" "));
                break;
            }
        }
    }
    // files written with --out
    let mut contents = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("w{i}.txt"));
        let out = out.to_str().unwrap();
        let r = run_with_threads(threads, &["search", "--base", "5", "--classes", "10", "--trials", "200", "--seed", "9", "--out", out]);
        assert!(r.status.success());
        contents.push((std::fs::read(out).unwrap(), std::fs::read(format!("{out}.meta")).unwrap()));
    }
    if contents[0] != contents[1] {
        failures.push("search --out files differ".to_string());
    }
    verdict(10, &failures);
}
