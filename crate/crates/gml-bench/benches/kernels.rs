use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gml_core::cutmodel::{class_signature, dm_strata, SweepConfig};
use gml_core::gmlmesh::{build_mesh, GmlParams, MeshKind};
use gml_core::{catalan_euler, catalan_segner, cut_gml, sweep_dm_classes, CutSpec, GmlSpec, KnifeMode};

fn signatures(c: &mut Criterion) {
    let mut g = c.benchmark_group("class_signature");
    for m in [6usize, 10, 15] {
        let strata = dm_strata(m).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(m), &strata, |b, s| {
            b.iter(|| {
                for cut in s {
                    black_box(class_signature(m, m, cut).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let cfg = SweepConfig {
        grid: 32,
        ..SweepConfig::default()
    };
    let mut g = c.benchmark_group("sweep_dm_classes");
    g.sample_size(10);
    for m in [3usize, 4, 5] {
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| sweep_dm_classes(m, &cfg).unwrap())
        });
    }
    g.finish();
}

fn catalan(c: &mut Criterion) {
    c.bench_function("catalan_euler/200", |b| b.iter(|| catalan_euler(black_box(200)).unwrap()));
    c.bench_function("catalan_segner/200", |b| b.iter(|| catalan_segner(black_box(200)).unwrap()));
}

fn cutting(c: &mut Criterion) {
    let spec = GmlSpec::new(8, 3).unwrap();
    let cut: CutSpec = "VV:1,5:center".parse().unwrap();
    c.bench_function("cut_gml/m8", |b| b.iter(|| cut_gml(&spec, &cut, KnifeMode::Chordal).unwrap()));
}

fn meshing(c: &mut Criterion) {
    let params = GmlParams::polygonal(6, 1).unwrap();
    c.bench_function("build_mesh/m6_96x48", |b| {
        b.iter(|| build_mesh(&params, 96, 48, MeshKind::Surface).unwrap())
    });
}

criterion_group!(benches, signatures, sweep, catalan, cutting, meshing);
criterion_main!(benches);
