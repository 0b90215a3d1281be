//! Null-ensemble throughput: sequential census against the rayon-parallel
//! path at several pool widths, plus the single-stack census cost at the
//! large sparse scale the pipeline targets.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use motifgrid::ensemble::{census_batch, census_batch_serial, generate, NullSpec};
use motifgrid::motif::count_all;

const LARGE_DIMS: [usize; 6] = [10, 400, 400, 400, 16, 7];

fn large_sparse_spec(samples: u32) -> NullSpec {
    // ~2% density per mask, the regime the significance pipeline runs in.
    let edges = LARGE_DIMS
        .windows(2)
        .map(|w| ((w[0] * w[1]) as f64 * 0.02).round() as u64)
        .collect();
    NullSpec::new(LARGE_DIMS.to_vec(), edges, 7, samples).unwrap()
}

fn bench_single_census(c: &mut Criterion) {
    let spec = large_sparse_spec(2);
    let stack = generate(&spec, 0).unwrap();
    c.bench_function("count_all/large_sparse", |b| b.iter(|| count_all(&stack).unwrap()));
}

fn bench_ensemble(c: &mut Criterion) {
    let spec = large_sparse_spec(64);
    let mut group = c.benchmark_group("census_batch");
    group.sample_size(10);

    group.bench_function("serial", |b| b.iter(|| census_batch_serial(&spec).unwrap()));

    for threads in [2usize, 4, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        group.bench_with_input(BenchmarkId::new("parallel", threads), &threads, |b, _| {
            b.iter(|| pool.install(|| census_batch(&spec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_single_census, bench_ensemble);
criterion_main!(benches);
