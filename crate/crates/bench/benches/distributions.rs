use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use privcount_core::audit::{maxgeo_dp_check, morris_epsilon_exact};
use privcount_core::dist::{lemma_sequences, morris_pmf, morris_row};

fn recursion(c: &mut Criterion) {
    let mut g = c.benchmark_group("morris_row");
    for n in [128u64, 512, 1024] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| morris_row(n).unwrap()));
    }
    g.finish();
}

fn closed_form(c: &mut Criterion) {
    let mut g = c.benchmark_group("morris_pmf");
    for (n, l) in [(129u64, 8i64), (1024, 11), (1024, 200)] {
        g.bench_with_input(BenchmarkId::new(n.to_string(), l), &(n, l), |b, &(n, l)| b.iter(|| morris_pmf(n, l)));
    }
    g.finish();
}

fn audits(c: &mut Criterion) {
    let mut g = c.benchmark_group("audit");
    g.sample_size(10);
    g.bench_function("morris_epsilon_exact/160", |b| b.iter(|| morris_epsilon_exact(160).unwrap()));
    g.bench_function("lemma_sequences/2..14", |b| b.iter(|| lemma_sequences(2, 14).unwrap()));
    g.bench_function("maxgeo_dp_check/0.5,e^-40", |b| b.iter(|| maxgeo_dp_check(0.5, (-40f64).exp()).unwrap()));
    g.finish();
}

criterion_group!(benches, recursion, closed_form, audits);
criterion_main!(benches);
