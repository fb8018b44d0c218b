use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fds_core::coding::gf256;
use fds_core::{disseminate, solve, solve_exact, try_recover, AlphaMode, FdsInstance, SolverParams, StorageGraph};

fn solver_rounds(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver_200_rounds");
    for n in [50usize, 100, 200] {
        let g = StorageGraph::geometric(n, 0.4, 1).unwrap();
        let inst = FdsInstance::new(g, 0.1).unwrap();
        let params = SolverParams::for_instance(&inst, 0.1, AlphaMode::Dmax)
            .unwrap()
            .with_max_rounds(200);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| solve(inst, &params).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("simplex");
    for n in [50usize, 100] {
        let g = StorageGraph::geometric(n, 0.4, 2).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| solve_exact(g).unwrap())
        });
    }
    group.finish();
}

fn coding(c: &mut Criterion) {
    let rows: Vec<Vec<u8>> = (0..96u32)
        .map(|i| (0..64u32).map(|j| (i * 31 + j * 17 + i * j) as u8).collect())
        .collect();
    c.bench_function("gf256_rank_96x64", |b| b.iter(|| gf256::rank(&rows)));

    let g = StorageGraph::geometric(50, 0.4, 3).unwrap();
    let x = solve_exact(&g).unwrap().x_star;
    c.bench_function("disseminate_and_recover_all_m64", |b| {
        b.iter(|| {
            let store = disseminate(&g, &x, 64, 7).unwrap();
            (0..g.n()).all(|i| try_recover(&store, &g, i).unwrap().success)
        })
    });
}

criterion_group!(benches, solver_rounds, oracle, coding);
criterion_main!(benches);
