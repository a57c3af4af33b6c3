//! Data-parallel vs sequential comparison. With the `parallel` feature the
//! same code path runs inside rayon pools of one thread and of the default
//! width; without it only the sequential build exists and one timing is
//! reported per case.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use loglab::experiment::inequality_suite;
use loglab::grid::Grid1D;
use loglab::ops::{assemble_fraclap, assemble_loglap};
use loglab::profile;

#[cfg(feature = "parallel")]
fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

fn bench_case<F: Fn() + Sync>(c: &mut Criterion, name: &str, f: F) {
    #[cfg(feature = "parallel")]
    {
        let single = pool(1);
        c.bench_function(&format!("{name}/threads=1"), |b| {
            b.iter_batched(|| (), |()| single.install(&f), BatchSize::PerIteration)
        });
        let wide = pool(0); // rayon default width
        c.bench_function(
            &format!("{name}/threads={}", wide.current_num_threads()),
            |b| b.iter_batched(|| (), |()| wide.install(&f), BatchSize::PerIteration),
        );
    }
    #[cfg(not(feature = "parallel"))]
    c.bench_function(&format!("{name}/sequential"), |b| b.iter(&f));
}

fn benches(c: &mut Criterion) {
    let grid = Grid1D::shared(-1.0, 1.0, 512).unwrap();

    bench_case(c, "assemble_fraclap_n512", {
        let grid = grid.clone();
        move || {
            assemble_fraclap(&grid, 0.1).unwrap();
        }
    });

    bench_case(c, "assemble_loglap_n512", {
        let grid = grid.clone();
        move || {
            assemble_loglap(&grid).unwrap();
        }
    });

    let op = assemble_fraclap(&grid, 0.1).unwrap();
    let u = profile::bump(&grid);
    bench_case(c, "apply_n512", move || {
        op.apply(&u).unwrap();
    });

    let small = Grid1D::shared(-1.0, 1.0, 256).unwrap();
    bench_case(c, "inequality_suite_64_samples_n256", move || {
        inequality_suite(64, 42, &small).unwrap();
    });
}

criterion_group! {
    name = group;
    config = Criterion::default().sample_size(10);
    targets = benches
}
criterion_main!(group);
