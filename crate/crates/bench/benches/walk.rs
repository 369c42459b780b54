use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use cycleqw_core::lift::full_spectrum_ff;
use cycleqw_core::periodicity::{period, Limits, Strategy};
use cycleqw_core::sample::{random_iso_layout, seeded};
use cycleqw_core::walk::build_evolution;
use cycleqw_core::{Coin2x2, CoinLayout, ShiftKind};

fn spectra(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum");
    for n in [8, 16, 20] {
        let iso = random_iso_layout(&mut seeded(n as u64), n);
        let u = build_evolution(&iso.to_layout(), ShiftKind::Ff).unwrap();
        group.bench_with_input(BenchmarkId::new("lift", n), &iso, |b, iso| {
            b.iter(|| full_spectrum_ff(black_box(iso)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("direct", n), &u, |b, u| {
            b.iter(|| black_box(u).eigenvalues().unwrap())
        });
    }
    group.finish();
}

fn periods(c: &mut Criterion) {
    let mut group = c.benchmark_group("period");
    group.sample_size(20);
    let limits = Limits::default();
    for n in [4, 8, 16] {
        let layout = CoinLayout::homogeneous(Coin2x2::hadamard(), n).unwrap();
        for (name, strategy) in [("powering", Strategy::Powering), ("eigen", Strategy::Eigen)] {
            // n = 16 has no period; powering would scan the whole bound
            if n > 8 && strategy == Strategy::Powering {
                continue;
            }
            group.bench_with_input(BenchmarkId::new(name, n), &layout, |b, layout| {
                b.iter(|| period(black_box(layout), ShiftKind::Ms, strategy, &limits).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, spectra, periods);
criterion_main!(benches);
