use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use privcount_core::counters::{Counter, CounterKind, MorrisState};
use privcount_core::rng::RandomSource;

const REQUESTS: u64 = 10_000;

fn observe(c: &mut Criterion) {
    let mut g = c.benchmark_group("observe");
    g.throughput(Throughput::Elements(REQUESTS));
    let kinds = [
        ("morris", CounterKind::Morris),
        ("maxgeo", CounterKind::MaxGeo),
        ("pcsa64", CounterKind::Pcsa { m: 64 }),
        ("hll64", CounterKind::HyperLogLog { m: 64 }),
    ];
    for (name, kind) in kinds {
        g.bench_function(name, |b| {
            let mut rng = RandomSource::new(1);
            b.iter(|| {
                let mut counter = Counter::new(kind).unwrap();
                (0..REQUESTS).for_each(|_| counter.observe(true, &mut rng));
                counter
            })
        });
    }
    g.finish();
}

fn skip_batch(c: &mut Criterion) {
    let mut g = c.benchmark_group("morris_skip_batch");
    for k in [1_000u64, 1_000_000, 1_000_000_000] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            let mut rng = RandomSource::new(2);
            b.iter(|| {
                let mut s = MorrisState::new();
                s.skip_batch(k, &mut rng);
                s.level()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, observe, skip_batch);
criterion_main!(benches);
