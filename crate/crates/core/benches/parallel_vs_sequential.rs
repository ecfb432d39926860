//! Compares the rayon kernels against their sequential twins on a grown
//! contact network. Run with `cargo bench -p emailnet-core`; size the pool
//! with RAYON_NUM_THREADS.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use emailnet_core::graph::EmailNetwork;
use emailnet_core::ingest::{DeliveryStatus, MessageLabel, Transmission};
use emailnet_core::metrics::{
    average_path_length, average_path_length_sequential, clustering, clustering_sequential,
    PathMode,
};
use emailnet_core::powerlaw::{degree_histogram_from_view, fit_power_law, FitMethod, KMinPolicy};
use emailnet_core::synth::{ham_contact_edges, HamModelParams};

fn contact_network(n_users: usize) -> EmailNetwork {
    let edges = ham_contact_edges(&HamModelParams {
        n_users,
        attachment_edges: 2,
        seed: 7,
        ..Default::default()
    })
    .expect("valid params");
    EmailNetwork::from_transmissions(
        edges.into_iter().map(|(a, b)| Transmission {
            sender: format!("u{a}"),
            recipient: format!("u{b}"),
            timestamp: 0,
            status: DeliveryStatus::Accepted,
            label: MessageLabel::Ham,
        }),
        None,
    )
}

fn bench_clustering(c: &mut Criterion) {
    let mut group = c.benchmark_group("clustering");
    group.sample_size(10);
    for &n in &[20_000usize, 100_000] {
        let net = contact_network(n);
        let view = net.undirected_view();
        group.bench_with_input(BenchmarkId::new("parallel", n), &view, |b, view| {
            b.iter(|| clustering(view).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &view, |b, view| {
            b.iter(|| clustering_sequential(view).unwrap())
        });
    }
    group.finish();
}

fn bench_path_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampled_path_length");
    group.sample_size(10);
    let net = contact_network(50_000);
    let view = net.undirected_view();
    let mode = PathMode::Sampled { sources: 64, seed: 11 };
    group.bench_function("parallel", |b| {
        b.iter(|| average_path_length(&view, mode).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| average_path_length_sequential(&view, mode).unwrap())
    });
    group.finish();
}

fn bench_fit_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("powerlaw_scan");
    group.sample_size(10);
    let net = contact_network(100_000);
    let hist = degree_histogram_from_view(&net.undirected_view());
    // The scan parallelizes over cutoff candidates; the fixed policy is the
    // single-candidate baseline.
    group.bench_function("scan", |b| {
        b.iter(|| fit_power_law(&hist, FitMethod::Mle, KMinPolicy::Scan).unwrap())
    });
    group.bench_function("fixed_cutoff", |b| {
        b.iter(|| fit_power_law(&hist, FitMethod::Mle, KMinPolicy::Fixed(2)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_clustering, bench_path_sampling, bench_fit_scan);
criterion_main!(benches);
