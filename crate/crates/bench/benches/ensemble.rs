use criterion::{criterion_group, criterion_main, Criterion};
use necoc_bench::blobs;
use necoc_core::{
    deterministic_matrix, evaluate_cv, train, BasePrime, CodebookSource, DimensionPolicy, DistanceMetric,
    LearnerSpec,
};
use std::hint::black_box;

fn ensemble(c: &mut Criterion) {
    let ds = blobs();
    let base = BasePrime::new(3).unwrap();
    let book = deterministic_matrix(base, ds.class_count(), DimensionPolicy::Square).unwrap().matrix;
    for learner in [LearnerSpec::decision_tree(), LearnerSpec::NearestCentroid] {
        c.bench_function(&format!("train {learner}"), |b| {
            b.iter(|| train(black_box(&ds), &book, &learner, DistanceMetric::Kronecker, 0).unwrap())
        });
    }
    let model = train(&ds, &book, &LearnerSpec::decision_tree(), DistanceMetric::Kronecker, 0).unwrap();
    c.bench_function("predict dt", |b| b.iter(|| model.accuracy(black_box(&ds))));

    let mut g = c.benchmark_group("cv");
    g.sample_size(10);
    let source = CodebookSource::Deterministic { base, policy: DimensionPolicy::Square };
    g.bench_function("10-fold dt", |b| {
        b.iter(|| evaluate_cv(&ds, &source, &LearnerSpec::decision_tree(), DistanceMetric::Kronecker, 10, 0).unwrap())
    });
    g.finish();
}

criterion_group!(benches, ensemble);
criterion_main!(benches);
