use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rmab_bench::{fixtures, single_replicate};
use rmab_core::harness::simulate_replicate;

fn replicate(c: &mut Criterion) {
    let mut group = c.benchmark_group("replicate");
    group.sample_size(20);
    for (name, p) in fixtures() {
        let config = single_replicate(p, 100_000);
        group.bench_function(format!("{name}/1e5"), |b| {
            let mut index = 0;
            b.iter(|| {
                index += 1;
                black_box(simulate_replicate(&config, index).unwrap())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, replicate);
criterion_main!(benches);
