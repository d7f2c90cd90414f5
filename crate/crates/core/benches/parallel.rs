use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use umbilic_core::quad::{disk_integral_with, verify_thm2_with, QuadScheme};
use umbilic_core::scan::{grid_field_with, umbilic_free_floor_with, Region, Residual, ResidualParams};
use umbilic_core::{Direction, Exec, Family};

const MODES: [(&str, Exec); 2] = [("serial", Exec::Serial), ("parallel", Exec::Parallel)];

fn grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("grid_field_401");
    let region = Region::square(20.0).unwrap();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| grid_field_with(exec, &Family::AsymBump, Residual::D, region, 401, 401, ResidualParams::default()).unwrap())
        });
    }
    g.finish();
}

fn floor(c: &mut Criterion) {
    let mut g = c.benchmark_group("umbilic_free_floor_401");
    let region = Region::square(20.0).unwrap();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| umbilic_free_floor_with(exec, &Family::ConeType { lambda: 0.1 }, region, 401).unwrap())
        });
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("disk_integral_r8_doubled");
    let s = QuadScheme::default().doubled();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| disk_integral_with(exec, |p| (-(p.x * p.x + p.y * p.y)).exp() * (1.0 + p.x).cos(), 8.0, s).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("verify_thm2_ladder");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                verify_thm2_with(
                    exec,
                    Family::AsymBump,
                    Direction::e_x(),
                    Direction::e_y(),
                    &[2.0, 4.0, 8.0, 16.0],
                    QuadScheme::default(),
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, grid, floor, quadrature);
criterion_main!(benches);
