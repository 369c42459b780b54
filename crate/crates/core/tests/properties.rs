use std::f64::consts::TAU;

use cycleqw_core::coin::{build_periodic_layout, check_isospectral, conjugate_layout_sigma_x, spectral_decompose, unit};
use cycleqw_core::periodicity::{period_by_eigen_orders, rational_angle};
use cycleqw_core::walk::{build_evolution, ms_ff_conjugation_residual};
use cycleqw_core::{Coin2x2, CoinLayout, IsoLayout, PeriodVerdict, ShiftKind};
use num_complex::Complex64;
use proptest::prelude::*;

fn coin() -> impl Strategy<Value = Coin2x2> {
    (0.0..TAU, 0.0..TAU, 0.0..TAU, 0.0..TAU).prop_map(|(a, b, g, t)| Coin2x2::general(a, b, g, t))
}

fn layout(max_n: usize) -> impl Strategy<Value = CoinLayout> {
    prop::collection::vec(coin(), 2..=max_n).prop_map(|c| CoinLayout::new(c).unwrap())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn spectral_round_trip(c in coin()) {
        let s = spectral_decompose(&c).unwrap();
        prop_assert!(s.reconstruct().max_abs_diff(&c) <= 1e-10);
        prop_assert!((s.nu1.norm() - 1.0).abs() <= 1e-12 && (s.nu2.norm() - 1.0).abs() <= 1e-12);
        let overlap = s.w1[0].conj() * s.w2[0] + s.w1[1].conj() * s.w2[1];
        prop_assert!(overlap.norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sigma_x_conjugation_is_an_involution(l in layout(10)) {
        prop_assert_eq!(conjugate_layout_sigma_x(&conjugate_layout_sigma_x(&l)), l);
    }

    #[test]
    fn ms_ff_conjugation(l in layout(10)) {
        prop_assert!(ms_ff_conjugation_residual(&l).unwrap() <= 1e-12);
    }

    #[test]
    fn rational_angles_recover_reduced_fractions(q in 1u64..2000, p_raw in 0u64..2000, noise in -1e-11f64..1e-11) {
        let p = p_raw % q;
        let g = gcd(p, q);
        let (p, q) = (p / g, q / g);
        let phi = TAU * p as f64 / q as f64 + noise;
        prop_assert_eq!(rational_angle(phi, 10_000, 1e-9), Some((p as i64, q)));
    }

    #[test]
    fn eigen_order_certificates_are_sound(qs in prop::collection::vec(1u64..60, 1..6)) {
        let eigs: Vec<Complex64> = qs.iter().enumerate().map(|(k, &q)| unit(TAU * (k as u64 % q) as f64 / q as f64)).collect();
        let v = period_by_eigen_orders(&eigs, 10_000, 1e-9).unwrap();
        let PeriodVerdict::Finite { period, certificate: Some(certs), .. } = v else {
            return Err(TestCaseError::fail("expected a finite verdict"));
        };
        for c in &certs {
            prop_assert_eq!(gcd(c.p as u64, c.q), 1);
            prop_assert!((c.mu - unit(TAU * c.p as f64 / c.q as f64)).norm() <= 1e-8);
            prop_assert!(c.power_deviation(period) <= 1e-7);
            prop_assert_eq!(period % c.q, 0);
        }
    }

    #[test]
    fn isospectral_layouts_reconstruct(nu in (0.0..TAU, 0.0..TAU), ws in prop::collection::vec((0.0..1.0f64, 0.0..TAU, 0.0..TAU), 2..8)) {
        let w = ws.iter().map(|&(q, a, b)| [Complex64::from_polar(q.sqrt(), a), Complex64::from_polar((1.0 - q).sqrt(), b)]).collect();
        let built = IsoLayout::from_spinors(unit(nu.0), unit(nu.1), w).unwrap().to_layout();
        let iso = check_isospectral(&built, 1e-9).unwrap();
        for i in 0..iso.n() {
            prop_assert!((iso.p(i) + iso.q(i) - 1.0).abs() <= 1e-12);
            prop_assert!(iso.site_coin(i).max_abs_diff(built.coin(i)) <= 1e-10);
        }
    }

    #[test]
    fn periodic_layout_follows_mod_rule(l in 1usize..4, m in 0usize..4, blocks in 1usize..5) {
        let n = (l + m) * blocks;
        let lay = build_periodic_layout(Coin2x2::hadamard(), l, Coin2x2::identity(), m, n).unwrap();
        prop_assert_eq!(lay.n(), n);
        for i in 0..n {
            let want = if i % (l + m) < l { Coin2x2::hadamard() } else { Coin2x2::identity() };
            prop_assert_eq!(lay.coin(i), &want);
        }
    }

    #[test]
    fn walks_are_unitary(l in layout(8)) {
        for shift in [ShiftKind::Ms, ShiftKind::Ff] {
            prop_assert!(build_evolution(&l, shift).unwrap().unitarity_residual() <= 1e-12);
        }
    }
}
