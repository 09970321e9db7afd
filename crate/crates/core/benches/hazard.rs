//! Hazard integration over a disk sector, sequential against parallel.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lcfpost::exec::Parallelism;
use lcfpost::material::MaterialParams;
use lcfpost::mesh::builders::annular_sector_graded;
use lcfpost::mesh::Mesh;
use lcfpost::quadrature::FaceRules;
use lcfpost::reliability::assess;
use nalgebra::Vector3;

fn sector(divisions: [usize; 3]) -> Mesh {
    let mut mesh = annular_sector_graded(50.0, 120.0, std::f64::consts::TAU / 44.0, 20.0, divisions, 2.5);
    // hoop-dominated bore field, decaying outward
    mesh.set_displacements(|x| {
        let r = x.x.hypot(x.y);
        let ur = 1e-3 * (0.2 * r + 3000.0 / r);
        Vector3::new(ur * x.x / r, ur * x.y / r, -3e-4 * x.z)
    });
    mesh
}

fn hazard(c: &mut Criterion) {
    let params = MaterialParams::example();
    let mut group = c.benchmark_group("assess");
    group.sample_size(20);
    for divisions in [[6, 4, 2], [16, 8, 4]] {
        let mesh = sector(divisions);
        let label = format!("{}_elements", mesh.elements().len());
        for lq in [2, 4, 6] {
            let rules = FaceRules::new(lq).unwrap();
            for mode in [Parallelism::Sequential, Parallelism::Parallel] {
                group.bench_with_input(BenchmarkId::new(format!("{mode}/lq{lq}"), &label), &mesh, |b, mesh| {
                    b.iter(|| assess(black_box(mesh), &params, &rules, mode).unwrap().eta)
                });
            }
        }
    }
    group.finish();
}

criterion_group!(benches, hazard);
criterion_main!(benches);
