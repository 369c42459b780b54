//! Seeded random coins and layouts for property checks and the verify corpus.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coin::{unit, Coin2x2, CoinLayout, IsoLayout, Spinor};

pub type SampleRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn phase<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(0.0..TAU)
}

/// Random U(2) element: global phase, two relative phases, one mixing angle
/// with `sin^2` uniform on `[0, 1]`.
pub fn random_coin<R: Rng>(rng: &mut R) -> Coin2x2 {
    let t = rng.random::<f64>().sqrt().asin();
    Coin2x2::general(phase(rng), phase(rng), phase(rng), t)
}

pub fn random_layout<R: Rng>(rng: &mut R, n: usize) -> CoinLayout {
    CoinLayout::new((0..n).map(|_| random_coin(rng)).collect()).expect("n >= 1")
}

pub fn random_spinor<R: Rng>(rng: &mut R) -> Spinor {
    let q: f64 = rng.random();
    [
        Complex64::from_polar(q.sqrt(), phase(rng)),
        Complex64::from_polar((1.0 - q).sqrt(), phase(rng)),
    ]
}

/// Independent spinors at every site, one random eigenvalue pair.
pub fn random_iso_layout<R: Rng>(rng: &mut R, n: usize) -> IsoLayout {
    let (nu1, nu2) = (unit(phase(rng)), unit(phase(rng)));
    let w = (0..n).map(|_| random_spinor(rng)).collect();
    IsoLayout::from_spinors(nu1, nu2, w).expect("valid spinors")
}

/// Homogeneous `w = (1, e^{i phi}) / sqrt 2` with `phi = 2 pi j / n`: the
/// Jacobi matrix is circulant with eigenvalues `cos(2 pi k / n - phi)`, so
/// `lambda = 1` occurs (and `lambda = -1` too for even `n`).
pub fn boundary_iso_layout<R: Rng>(rng: &mut R, n: usize) -> IsoLayout {
    let j = rng.random_range(0..n);
    let w = [
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::from_polar(FRAC_1_SQRT_2, TAU * j as f64 / n as f64),
    ];
    IsoLayout::from_spinors(unit(phase(rng)), unit(phase(rng)), vec![w; n]).expect("valid spinors")
}

/// `w_i = (e^{i a_i}, e^{i a_{i+1}}) / sqrt 2`: every link equals `1/2`, so
/// `lambda = 1` occurs with site-dependent spinors.
pub fn inhomogeneous_boundary_layout<R: Rng>(rng: &mut R, n: usize) -> IsoLayout {
    let a: Vec<f64> = (0..n).map(|_| phase(rng)).collect();
    let w = (0..n)
        .map(|i| {
            [
                Complex64::from_polar(FRAC_1_SQRT_2, a[i]),
                Complex64::from_polar(FRAC_1_SQRT_2, a[(i + 1) % n]),
            ]
        })
        .collect();
    IsoLayout::from_spinors(unit(phase(rng)), unit(phase(rng)), w).expect("valid spinors")
}

/// `n` phases summing to `2 pi k` for a random `k` in `-2..=2`.
pub fn phases_summing_to_full_turns<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.random_range(-TAU..TAU)).collect();
    let k = rng.random_range(-2i32..=2) as f64;
    out.push(TAU * k - out.iter().sum::<f64>());
    out
}

pub fn hadamard_phase_layout(phases: &[f64]) -> CoinLayout {
    CoinLayout::new(phases.iter().map(|&t| Coin2x2::hadamard_phase(t)).collect()).expect("n >= 1")
}
