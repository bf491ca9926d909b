//! Parallel (`map_ordered`) against sequential (`map_sequential`) page
//! processing over a synthetic corpus, for both input paths.
//!
//! Build with `--no-default-features` to see `map_ordered` collapse onto the
//! sequential path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use gridlock_core::config::Config;
use gridlock_core::emit::PageOutput;
use gridlock_core::par::{map_ordered, map_sequential};
use gridlock_core::pipeline::{process_graphics, process_raster};
use gridlock_core::synth::{gen_table, SynthItem, SynthParams};

fn corpus(n: u64, skew: f64) -> Vec<SynthItem> {
    let seeds: Vec<u64> = (0..n).collect();
    map_ordered(&seeds, |&s| gen_table(&SynthParams { skew_deg: skew, ..SynthParams::with_seed(s) }).unwrap())
}

fn compare(c: &mut Criterion, group: &str, items: &[SynthItem], page: impl Fn(&SynthItem) -> PageOutput + Sync + Send) {
    let mut g = c.benchmark_group(group);
    g.throughput(Throughput::Elements(items.len() as u64));
    g.sample_size(10);
    g.bench_with_input(BenchmarkId::new("sequential", items.len()), items, |b, items| {
        b.iter(|| map_sequential(items, &page))
    });
    g.bench_with_input(BenchmarkId::new("parallel", items.len()), items, |b, items| {
        b.iter(|| map_ordered(items, &page))
    });
    g.finish();
}

fn vector(c: &mut Criterion) {
    let cfg = Config::default();
    let items = corpus(200, 0.0);
    compare(c, "vector", &items, |it| process_graphics(&it.page, Vec::new(), &cfg));
}

fn raster(c: &mut Criterion) {
    let cfg = Config::default();
    let items = corpus(32, 0.0);
    compare(c, "raster", &items, |it| process_raster(&it.raster, 0, &cfg).unwrap());
    let skewed = corpus(16, 3.0);
    compare(c, "raster_deskew", &skewed, |it| process_raster(&it.raster, 0, &cfg).unwrap());
}

criterion_group!(benches, vector, raster);
criterion_main!(benches);
