//! Two-state coins, their spectral decompositions, and per-site coin layouts.
//!
//! Matrices are written in the chirality basis `(L, R)`: row/column 0 is `L`,
//! row/column 1 is `R`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default unitarity tolerance for a single coin (max-entry residual of `C*C - I`).
pub const TOL_UNITARY: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub type Spinor = [Complex64; 2];

/// A 2x2 unitary coin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coin2x2 {
    entries: [[Complex64; 2]; 2],
}

impl Coin2x2 {
    /// Validates unitarity at [`TOL_UNITARY`].
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        Self::with_tolerance(entries, TOL_UNITARY)
    }

    pub fn with_tolerance(entries: [[Complex64; 2]; 2], tol: f64) -> Result<Self> {
        let coin = Coin2x2 { entries };
        let residual = coin.unitarity_residual();
        if !(residual <= tol) {
            return Err(Error::NotUnitary { residual });
        }
        Ok(coin)
    }

    pub fn identity() -> Self {
        Coin2x2 {
            entries: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn pauli_x() -> Self {
        Coin2x2 {
            entries: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    pub fn hadamard() -> Self {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Coin2x2 {
            entries: [[s, s], [s, -s]],
        }
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Coin2x2 {
            entries: [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ],
        }
    }

    /// `(1/sqrt 2) [[e^{i t}, 1], [1, -e^{-i t}]]`; `t = 0` is the Hadamard coin.
    pub fn hadamard_phase(theta: f64) -> Self {
        let s = FRAC_1_SQRT_2;
        let e = Complex64::from_polar(s, theta);
        let one = Complex64::new(s, 0.0);
        Coin2x2 {
            entries: [[e, one], [one, -e.conj()]],
        }
    }

    /// Euler-style parametrization covering all of U(2):
    /// `e^{i alpha} [[e^{i beta} cos t, e^{i gamma} sin t], [-e^{-i gamma} sin t, e^{-i beta} cos t]]`.
    pub fn general(alpha: f64, beta: f64, gamma: f64, theta: f64) -> Self {
        let g = Complex64::from_polar(1.0, alpha);
        let (s, c) = theta.sin_cos();
        Coin2x2 {
            entries: [
                [g * Complex64::from_polar(c, beta), g * Complex64::from_polar(s, gamma)],
                [-g * Complex64::from_polar(s, -gamma), g * Complex64::from_polar(c, -beta)],
            ],
        }
    }

    /// Builds `(nu1 - nu2) |w><w| + nu2 I` for a unit spinor `w`.
    pub fn from_spectral(nu1: Complex64, nu2: Complex64, w: Spinor) -> Self {
        let d = nu1 - nu2;
        let mut entries = [[ZERO; 2]; 2];
        for (r, row) in entries.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = d * w[r] * w[c].conj();
            }
        }
        entries[0][0] += nu2;
        entries[1][1] += nu2;
        Coin2x2 { entries }
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }

    pub fn apply(&self, v: Spinor) -> Spinor {
        let m = &self.entries;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn mul(&self, other: &Coin2x2) -> Coin2x2 {
        let (a, b) = (&self.entries, &other.entries);
        let mut entries = [[ZERO; 2]; 2];
        for (r, row) in entries.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Coin2x2 { entries }
    }

    pub fn adjoint(&self) -> Coin2x2 {
        let m = &self.entries;
        Coin2x2 {
            entries: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    /// `C sigma_x`: the two columns exchanged.
    pub fn times_sigma_x(&self) -> Coin2x2 {
        let m = &self.entries;
        Coin2x2 {
            entries: [[m[0][1], m[0][0]], [m[1][1], m[1][0]]],
        }
    }

    pub fn unitarity_residual(&self) -> f64 {
        let p = self.adjoint().mul(self);
        max_dev_from(&p.entries, &[[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn max_abs_diff(&self, other: &Coin2x2) -> f64 {
        max_dev_from(&self.entries, &other.entries)
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, k: u32) -> Coin2x2 {
        (0..k).fold(Coin2x2::identity(), |acc, _| acc.mul(self))
    }
}

fn max_dev_from(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..2 {
        for c in 0..2 {
            worst = worst.max((a[r][c] - b[r][c]).norm());
        }
    }
    worst
}

/// Named coin families accepted on the command line and in layout files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinFamily {
    Identity,
    Hadamard,
    PauliX,
    Rotation,
    HadamardPhase,
    General,
}

impl CoinFamily {
    pub fn parse(name: &str) -> Result<Self> {
        let family = match name.trim().to_ascii_lowercase().as_str() {
            "identity" | "i" | "id" => CoinFamily::Identity,
            "hadamard" | "h" => CoinFamily::Hadamard,
            "pauli-x" | "x" | "sigma-x" | "sigmax" => CoinFamily::PauliX,
            "rotation" | "rot" => CoinFamily::Rotation,
            "hadamard-phase" => CoinFamily::HadamardPhase,
            "general" | "u2" => CoinFamily::General,
            _ => return Err(Error::UnknownCoin(name.to_string())),
        };
        Ok(family)
    }

    pub fn name(self) -> &'static str {
        match self {
            CoinFamily::Identity => "identity",
            CoinFamily::Hadamard => "hadamard",
            CoinFamily::PauliX => "pauli-x",
            CoinFamily::Rotation => "rotation",
            CoinFamily::HadamardPhase => "hadamard-phase",
            CoinFamily::General => "general",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            CoinFamily::Identity | CoinFamily::Hadamard | CoinFamily::PauliX => 0,
            CoinFamily::Rotation | CoinFamily::HadamardPhase => 1,
            CoinFamily::General => 4,
        }
    }
}

pub fn make_named_coin(name: &str, params: &[f64]) -> Result<Coin2x2> {
    let family = CoinFamily::parse(name)?;
    if params.len() != family.arity() {
        return Err(Error::CoinArity {
            name: family.name().to_string(),
            expected: family.arity(),
            got: params.len(),
        });
    }
    if let Some(bad) = params.iter().find(|p| !p.is_finite()) {
        return Err(Error::Invalid(format!("non-finite coin parameter {bad}")));
    }
    let coin = match family {
        CoinFamily::Identity => Coin2x2::identity(),
        CoinFamily::Hadamard => Coin2x2::hadamard(),
        CoinFamily::PauliX => Coin2x2::pauli_x(),
        CoinFamily::Rotation => Coin2x2::rotation(params[0]),
        CoinFamily::HadamardPhase => Coin2x2::hadamard_phase(params[0]),
        CoinFamily::General => Coin2x2::general(params[0], params[1], params[2], params[3]),
    };
    Ok(coin)
}

/// Eigen-decomposition `C = nu1 |w1><w1| + nu2 |w2><w2|` of a coin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinSpectral {
    pub nu1: Complex64,
    pub nu2: Complex64,
    pub w1: Spinor,
    pub w2: Spinor,
}

impl CoinSpectral {
    pub fn reconstruct(&self) -> Coin2x2 {
        Coin2x2::from_spectral(self.nu1, self.nu2, self.w1)
    }

    pub fn is_degenerate(&self) -> bool {
        (self.nu1 - self.nu2).norm() <= DEGENERATE_TOL
    }
}

const DEGENERATE_TOL: f64 = 1e-12;

/// Argument of `z` mapped into `[0, 2pi)`.
pub fn arg_2pi(z: Complex64) -> f64 {
    let mut a = z.arg();
    if a < 0.0 {
        a += TAU;
    }
    if TAU - a < 1e-13 {
        a = 0.0;
    }
    a
}

/// Makes the first component real and positive (or the second, when the first vanishes).
fn canonical_phase(v: Spinor) -> Spinor {
    let pivot = if v[0].norm() > 1e-12 { v[0] } else { v[1] };
    if pivot.norm() == 0.0 {
        return v;
    }
    let phase = pivot.conj() / pivot.norm();
    [v[0] * phase, v[1] * phase]
}

fn normalize(v: Spinor) -> Spinor {
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / norm, v[1] / norm]
}

/// Orthogonal complement of a unit spinor.
pub fn perp(w: Spinor) -> Spinor {
    [-w[1].conj(), w[0].conj()]
}

fn rayleigh(c: &Coin2x2, w: Spinor) -> Complex64 {
    let cw = c.apply(w);
    let z = w[0].conj() * cw[0] + w[1].conj() * cw[1];
    z / z.norm()
}

/// Eigenpairs ordered by argument in `[0, 2pi)`; eigenvectors carry a real
/// positive leading component. Scalar coins return `w1 = [1, 0]`.
pub fn spectral_decompose(c: &Coin2x2) -> Result<CoinSpectral> {
    let residual = c.unitarity_residual();
    if !(residual <= TOL_UNITARY * 100.0) {
        return Err(Error::NotUnitary { residual });
    }
    let m = c.entries();
    let half_tr = c.trace() * 0.5;
    let off = m[0][1]
        .norm()
        .max(m[1][0].norm())
        .max(((m[0][0] - m[1][1]) * 0.5).norm());
    if off <= DEGENERATE_TOL {
        let nu = half_tr / half_tr.norm();
        return Ok(CoinSpectral {
            nu1: nu,
            nu2: nu,
            w1: [ONE, ZERO],
            w2: [ZERO, ONE],
        });
    }

    let half_diff = (m[0][0] - m[1][1]) * 0.5;
    let disc = (half_diff * half_diff + m[0][1] * m[1][0]).sqrt();
    let guess = half_tr + disc;

    // null vector of C - guess I, taken from the better-conditioned row
    let a = [[m[0][0] - guess, m[0][1]], [m[1][0], m[1][1] - guess]];
    let from_row0 = [-a[0][1], a[0][0]];
    let from_row1 = [a[1][1], -a[1][0]];
    let n0 = from_row0[0].norm_sqr() + from_row0[1].norm_sqr();
    let n1 = from_row1[0].norm_sqr() + from_row1[1].norm_sqr();
    let raw = if n0 >= n1 { from_row0 } else { from_row1 };

    let mut w1 = canonical_phase(normalize(raw));
    let mut w2 = canonical_phase(perp(w1));
    let mut nu1 = rayleigh(c, w1);
    let mut nu2 = rayleigh(c, w2);
    if arg_2pi(nu2) < arg_2pi(nu1) {
        std::mem::swap(&mut nu1, &mut nu2);
        std::mem::swap(&mut w1, &mut w2);
    }
    Ok(CoinSpectral { nu1, nu2, w1, w2 })
}

/// Per-site coins on the cycle `C_n`, site `i` at index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinLayout {
    coins: Vec<Coin2x2>,
}

impl CoinLayout {
    pub fn new(coins: Vec<Coin2x2>) -> Result<Self> {
        if coins.is_empty() {
            return Err(Error::TooFewVertices { n: 0, min: 1 });
        }
        for c in &coins {
            let residual = c.unitarity_residual();
            if !(residual <= TOL_UNITARY * 100.0) {
                return Err(Error::NotUnitary { residual });
            }
        }
        Ok(CoinLayout { coins })
    }

    pub fn homogeneous(coin: Coin2x2, n: usize) -> Result<Self> {
        Self::new(vec![coin; n])
    }

    pub fn n(&self) -> usize {
        self.coins.len()
    }

    pub fn coins(&self) -> &[Coin2x2] {
        &self.coins
    }

    pub fn coin(&self, i: usize) -> &Coin2x2 {
        &self.coins[i]
    }

    pub fn max_abs_diff(&self, other: &CoinLayout) -> f64 {
        assert_eq!(self.n(), other.n());
        self.coins
            .iter()
            .zip(&other.coins)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Replaces every `C_i` by `C_i sigma_x`.
pub fn conjugate_layout_sigma_x(layout: &CoinLayout) -> CoinLayout {
    CoinLayout {
        coins: layout.coins.iter().map(Coin2x2::times_sigma_x).collect(),
    }
}

/// `[C:l, C2:m]` on `n` sites: `C` where `i mod (l+m) < l`, `C2` otherwise.
pub fn build_periodic_layout(
    c: Coin2x2,
    l: usize,
    c2: Coin2x2,
    m: usize,
    n: usize,
) -> Result<CoinLayout> {
    if l == 0 {
        return Err(Error::Invalid("pattern needs l >= 1".into()));
    }
    let period = l + m;
    if n == 0 || n % period != 0 {
        return Err(Error::Divisibility { n, period });
    }
    let coins = (0..n)
        .map(|i| if i % period < l { c } else { c2 })
        .collect();
    CoinLayout::new(coins)
}

/// Layout whose coins share one eigenvalue pair, each written as
/// `(nu1 - nu2) |w_i><w_i| + nu2 I`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoLayout {
    pub nu1: Complex64,
    pub nu2: Complex64,
    /// `nu1`-branch eigenvectors, one per site.
    pub w: Vec<Spinor>,
    /// `nu2`-branch eigenvectors, orthogonal to `w` site by site.
    pub w2: Vec<Spinor>,
}

impl IsoLayout {
    /// Builds from shared eigenvalues and `nu1`-branch spinors (normalized here).
    pub fn from_spinors(nu1: Complex64, nu2: Complex64, w: Vec<Spinor>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::TooFewVertices { n: 0, min: 1 });
        }
        for nu in [nu1, nu2] {
            if (nu.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::NotUnitModulus { modulus: nu.norm() });
            }
        }
        let w: Vec<Spinor> = w.into_iter().map(normalize).collect();
        let w2 = w.iter().map(|&v| perp(v)).collect();
        Ok(IsoLayout { nu1, nu2, w, w2 })
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    /// `|w_i(R)|^2`
    pub fn p(&self, i: usize) -> f64 {
        self.w[i][1].norm_sqr()
    }

    /// `|w_i(L)|^2`
    pub fn q(&self, i: usize) -> f64 {
        self.w[i][0].norm_sqr()
    }

    pub fn theta_l(&self, i: usize) -> f64 {
        phase_or_zero(self.w[i][0])
    }

    pub fn theta_r(&self, i: usize) -> f64 {
        phase_or_zero(self.w[i][1])
    }

    pub fn site_coin(&self, i: usize) -> Coin2x2 {
        Coin2x2::from_spectral(self.nu1, self.nu2, self.w[i])
    }

    pub fn to_layout(&self) -> CoinLayout {
        CoinLayout {
            coins: (0..self.n()).map(|i| self.site_coin(i)).collect(),
        }
    }

    /// Same moduli, phases shifted: `w_j(L) -> w_j(L) e^{i dl_j}`, `w_j(R) -> w_j(R) e^{i dr_j}`.
    pub fn with_phase_shifts(&self, dl: &[f64], dr: &[f64]) -> IsoLayout {
        assert_eq!(dl.len(), self.n());
        assert_eq!(dr.len(), self.n());
        let w: Vec<Spinor> = self
            .w
            .iter()
            .zip(dl.iter().zip(dr))
            .map(|(v, (&a, &b))| {
                [
                    v[0] * Complex64::from_polar(1.0, a),
                    v[1] * Complex64::from_polar(1.0, b),
                ]
            })
            .collect();
        let w2 = w.iter().map(|&v| perp(v)).collect();
        IsoLayout {
            nu1: self.nu1,
            nu2: self.nu2,
            w,
            w2,
        }
    }
}

fn phase_or_zero(z: Complex64) -> f64 {
    if z.norm() <= 1e-15 {
        0.0
    } else {
        z.arg()
    }
}

/// Returns the isospectral form of `layout` when every site shares site 0's
/// eigenvalue pair within `tol`, matched as an unordered pair.
pub fn check_isospectral(layout: &CoinLayout, tol: f64) -> Option<IsoLayout> {
    let spectra: Vec<CoinSpectral> = layout
        .coins()
        .iter()
        .map(spectral_decompose)
        .collect::<Result<_>>()
        .ok()?;
    let reference = spectra[0];
    let (nu1, nu2) = (reference.nu1, reference.nu2);
    let mut w = Vec::with_capacity(spectra.len());
    let mut w2 = Vec::with_capacity(spectra.len());
    for s in &spectra {
        if (s.nu1 - nu1).norm() <= tol && (s.nu2 - nu2).norm() <= tol {
            w.push(s.w1);
            w2.push(s.w2);
        } else if (s.nu2 - nu1).norm() <= tol && (s.nu1 - nu2).norm() <= tol {
            w.push(s.w2);
            w2.push(s.w1);
        } else {
            return None;
        }
    }
    Some(IsoLayout { nu1, nu2, w, w2 })
}

/// `e^{i 2 pi k / q}` style helper used across the crate.
pub fn unit(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}
