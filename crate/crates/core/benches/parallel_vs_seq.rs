//! Placeholder bench; filled in once the norm and variation kernels land.

use criterion::{criterion_group, criterion_main, Criterion};

fn benches(_c: &mut Criterion) {}

criterion_group!(bench_group, benches);
criterion_main!(bench_group);
