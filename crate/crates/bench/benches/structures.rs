use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use galoiswb::autgroup::{all_subgroups, automorphisms, PermutationGroup};
use galoiswb::fraisse::{amalgamate_span, Chain, FraisseClass, Span};
use galoiswb::galois::{coherence_check, verify_galois_property};
use galoiswb::structures::builders::graph;
use galoiswb::structures::canonical_labeling;

fn cycle(n: usize) -> galoiswb::FiniteStructure {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    graph(n, &edges)
}

fn canonical(c: &mut Criterion) {
    let mut group = c.benchmark_group("canonical_labeling");
    for n in [6, 8, 10] {
        let g = cycle(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| canonical_labeling(black_box(g), &[]))
        });
    }
    let top = Chain::build(&FraisseClass::graphs(), 3, Some(3), None).unwrap().last().structure.clone();
    group.bench_function("graph_stage_3", |b| b.iter(|| canonical_labeling(black_box(&top), &[])));
    group.bench_function("aut_graph_stage_3", |b| b.iter(|| automorphisms(black_box(&top))));
    group.finish();
}

fn amalgams(c: &mut Criterion) {
    let class = FraisseClass::graphs();
    let apex = Arc::new(graph(2, &[]));
    let path = Arc::new(graph(3, &[(0, 2), (1, 2)]));
    let span = Span { apex, left: path.clone(), f: vec![0, 1], right: path, g: vec![0, 1] };
    c.bench_function("amalgamate_graphs_p3_over_e2", |b| b.iter(|| amalgamate_span(&class, black_box(&span)).unwrap()));
}

fn chains(c: &mut Criterion) {
    let mut group = c.benchmark_group("chain_build");
    group.sample_size(10);
    for name in ["sets", "graphs", "linear_orders"] {
        let class = FraisseClass::builtin(name).unwrap();
        group.bench_function(name, |b| b.iter(|| Chain::build(&class, 3, Some(3), None).unwrap()));
    }
    group.finish();
}

fn galois(c: &mut Criterion) {
    let mut group = c.benchmark_group("galois");
    group.sample_size(10);
    for name in ["sets", "linear_orders", "graphs"] {
        let class = FraisseClass::builtin(name).unwrap();
        group.bench_function(BenchmarkId::new("sweep", name), |b| {
            b.iter(|| verify_galois_property(&class, 3, 3).unwrap())
        });
    }
    let graphs = FraisseClass::graphs();
    group.bench_function("coherence_graphs", |b| b.iter(|| coherence_check(&graphs, 3, 3).unwrap()));
    group.finish();
}

fn subgroups(c: &mut Criterion) {
    let s4 = Arc::new(PermutationGroup::symmetric(4));
    c.bench_function("all_subgroups_s4", |b| b.iter(|| all_subgroups(black_box(&s4)).unwrap()));
}

criterion_group!(benches, canonical, amalgams, chains, galois, subgroups);
criterion_main!(benches);
