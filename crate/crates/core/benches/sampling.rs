use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gesture_score::*;

fn compose(text: &str, inv: &Inventory) -> GestureScore {
    let u = parse_utterance(text, inv).unwrap();
    compose_score(
        &u,
        None,
        inv,
        &TimingProfile::default(),
        DEFAULT_GAP_THRESHOLD,
    )
    .unwrap()
}

fn modes() -> [(&'static str, Execution); 2] {
    [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ]
}

fn single_score(c: &mut Criterion) {
    let inv = Inventory::german();
    let neutral = inv.neutral_config();
    let score = compose("kam.flik", &inv);
    let mut group = c.benchmark_group("kamflik");
    for dt in [5.0, 0.1, 0.01] {
        for (name, mode) in modes() {
            group.bench_with_input(BenchmarkId::new(name, dt), &dt, |b, &dt| {
                b.iter(|| sample_trajectories_with(black_box(&score), dt, &neutral, mode).unwrap())
            });
        }
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let inv = Inventory::german();
    let neutral = inv.neutral_config();
    let words = [
        "kam.flik", "pa:i:", "Spi:lt", "klatS", "faI6", "ma.na.la", "?a.ha",
    ];
    let mut group = c.benchmark_group("batch");
    for n in [7usize, 70, 700] {
        let scores: Vec<GestureScore> = words
            .iter()
            .cycle()
            .take(n)
            .map(|w| compose(w, &inv))
            .collect();
        for (name, mode) in modes() {
            group.bench_with_input(BenchmarkId::new(name, n), &scores, |b, scores| {
                b.iter(|| sample_batch(black_box(scores), 1.0, &neutral, mode))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, single_score, batch);
criterion_main!(benches);
