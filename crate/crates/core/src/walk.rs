//! Shift operators, evolution unitaries and the brute-force powering oracle.
//!
//! Basis convention: index `2i` is `|i, L>`, index `2i + 1` is `|i, R>`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::{conjugate_layout_sigma_x, CoinLayout};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::verdict::{Method, PeriodVerdict};

pub const TOL_WALK_UNITARY: f64 = 1e-10;
pub const TOL_STATE_NORM: f64 = 1e-12;
/// Default max-entry distance under which `U^t` counts as the identity.
pub const TOL_IDENTITY: f64 = 1e-9;

const L: usize = 0;
const R: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftKind {
    /// `|i,R> -> |i+1,R>`, `|i,L> -> |i-1,L>`
    Ms,
    /// `|i,R> -> |i+1,L>`, `|i,L> -> |i-1,R>`
    Ff,
}

impl ShiftKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ShiftKind::Ms => "ms",
            ShiftKind::Ff => "ff",
        }
    }
}

impl fmt::Display for ShiftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShiftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ms" | "moving" => Ok(ShiftKind::Ms),
            "ff" | "flip-flop" | "flipflop" => Ok(ShiftKind::Ff),
            other => Err(Error::Invalid(format!("unknown shift `{other}`"))),
        }
    }
}

#[inline]
pub fn basis_index(vertex: usize, chirality: usize) -> usize {
    2 * vertex + chirality
}

/// Image of basis state `|vertex, chirality>` under the shift, as a basis index.
#[inline]
pub fn shift_target(n: usize, kind: ShiftKind, vertex: usize, chirality: usize) -> usize {
    let next = (vertex + 1) % n;
    let prev = (vertex + n - 1) % n;
    match (kind, chirality) {
        (ShiftKind::Ms, R) => basis_index(next, R),
        (ShiftKind::Ms, _) => basis_index(prev, L),
        (ShiftKind::Ff, R) => basis_index(next, L),
        (ShiftKind::Ff, _) => basis_index(prev, R),
    }
}

/// Applies the shift permutation to a `2n` vector.
pub fn apply_shift(kind: ShiftKind, v: &CVector) -> CVector {
    let n = v.len() / 2;
    let mut out = CVector::zeros(v.len());
    for vertex in 0..n {
        for chirality in [L, R] {
            out[shift_target(n, kind, vertex, chirality)] = v[basis_index(vertex, chirality)];
        }
    }
    out
}

/// A dense `2n x 2n` evolution (or shift) operator.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkUnitary {
    n: usize,
    shift: ShiftKind,
    matrix: CMatrix,
}

impl WalkUnitary {
    /// Wraps a dense matrix after checking shape and unitarity.
    pub fn from_matrix(n: usize, shift: ShiftKind, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != 2 * n || matrix.ncols() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: matrix.nrows(),
            });
        }
        let residual = linalg::unitarity_residual(&matrix);
        if !(residual <= TOL_WALK_UNITARY) {
            return Err(Error::NotUnitary { residual });
        }
        Ok(WalkUnitary { n, shift, matrix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn shift(&self) -> ShiftKind {
        self.shift
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn unitarity_residual(&self) -> f64 {
        linalg::unitarity_residual(&self.matrix)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    /// Eigenvalues by dense complex Schur decomposition.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        linalg::eigenvalues(&self.matrix)
    }

    fn sparse_rows(&self) -> Vec<Vec<(usize, Complex64)>> {
        (0..self.dim())
            .map(|r| {
                (0..self.dim())
                    .filter_map(|c| {
                        let z = self.matrix[(r, c)];
                        (z != Complex64::new(0.0, 0.0)).then_some((c, z))
                    })
                    .collect()
            })
            .collect()
    }

    /// Distances `max|U^t - I|` for `t = 1, 2, ...`, each power obtained by
    /// one more left-multiplication by `U`.
    pub fn identity_distances(&self) -> IdentityDistances {
        let d = self.dim();
        let rows = self.sparse_rows();
        IdentityDistances {
            rows,
            dim: d,
            power: identity_flat(d),
            scratch: vec![Complex64::new(0.0, 0.0); d * d],
        }
    }
}

fn identity_flat(d: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for k in 0..d {
        m[k * d + k] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Iterator over `max|U^t - I|`, `t = 1, 2, ...`.
pub struct IdentityDistances {
    rows: Vec<Vec<(usize, Complex64)>>,
    dim: usize,
    /// row-major `U^t`
    power: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Iterator for IdentityDistances {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let d = self.dim;
        let mut worst = 0.0f64;
        for (r, row) in self.rows.iter().enumerate() {
            let out = &mut self.scratch[r * d..(r + 1) * d];
            out.fill(Complex64::new(0.0, 0.0));
            for &(k, u) in row {
                let src = &self.power[k * d..(k + 1) * d];
                for (o, s) in out.iter_mut().zip(src) {
                    *o += u * s;
                }
            }
            for (c, z) in out.iter().enumerate() {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((z - Complex64::new(target, 0.0)).norm());
            }
        }
        std::mem::swap(&mut self.power, &mut self.scratch);
        Some(worst)
    }
}

pub fn build_shift(n: usize, kind: ShiftKind) -> Result<WalkUnitary> {
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for vertex in 0..n {
        for chirality in [L, R] {
            m[(shift_target(n, kind, vertex, chirality), basis_index(vertex, chirality))] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(WalkUnitary {
        n,
        shift: kind,
        matrix: m,
    })
}

/// Block-diagonal coin operator `sum_i |i><i| (x) C_i`.
pub fn coin_operator(layout: &CoinLayout) -> CMatrix {
    let n = layout.n();
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for (i, coin) in layout.coins().iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                m[(basis_index(i, r), basis_index(i, c))] = coin.get(r, c);
            }
        }
    }
    m
}

/// `U = S C` for the chosen shift.
pub fn build_evolution(layout: &CoinLayout, kind: ShiftKind) -> Result<WalkUnitary> {
    let n = layout.n();
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for (i, coin) in layout.coins().iter().enumerate() {
        for out_chir in [L, R] {
            let row = shift_target(n, kind, i, out_chir);
            for in_chir in [L, R] {
                m[(row, basis_index(i, in_chir))] = coin.get(out_chir, in_chir);
            }
        }
    }
    WalkUnitary::from_matrix(n, kind, m)
}

/// A unit-norm walker state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() < 2 || amplitudes.len() % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: 2 * (amplitudes.len() / 2).max(1),
                got: amplitudes.len(),
            });
        }
        let norm = linalg::vec_norm(&amplitudes);
        if !((norm - 1.0).abs() <= TOL_STATE_NORM) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector { amplitudes })
    }

    /// `|vertex, chirality>` with chirality 0 = L, 1 = R.
    pub fn basis(n: usize, vertex: usize, chirality: usize) -> Result<Self> {
        if vertex >= n || chirality > 1 {
            return Err(Error::Invalid(format!("no basis state ({vertex}, {chirality}) on C_{n}")));
        }
        let mut v = CVector::zeros(2 * n);
        v[basis_index(vertex, chirality)] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amplitudes: v })
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len() / 2
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::vec_norm(&self.amplitudes)
    }
}

/// `U^t psi` by `t` successive applications.
pub fn evolve(u: &WalkUnitary, psi: &StateVector, t: u64) -> Result<StateVector> {
    if psi.amplitudes.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: psi.amplitudes.len(),
        });
    }
    let mut v = psi.amplitudes.clone();
    for _ in 0..t {
        v = u.apply(&v);
    }
    Ok(StateVector { amplitudes: v })
}

/// Probability of finding the walker at each vertex.
pub fn position_distribution(psi: &StateVector) -> Vec<f64> {
    let a = &psi.amplitudes;
    (0..psi.n())
        .map(|x| a[basis_index(x, L)].norm_sqr() + a[basis_index(x, R)].norm_sqr())
        .collect()
}

/// `max|U^FF(C) - (I (x) sigma_x) U^MS(C sigma_x) (I (x) sigma_x)|`, both
/// operators assembled independently.
pub fn ms_ff_conjugation_residual(layout: &CoinLayout) -> Result<f64> {
    let ff = build_evolution(layout, ShiftKind::Ff)?;
    let ms = build_evolution(&conjugate_layout_sigma_x(layout), ShiftKind::Ms)?;
    let d = ms.dim();
    let flip = |k: usize| k ^ 1;
    let conj = CMatrix::from_fn(d, d, |r, c| ms.matrix()[(flip(r), flip(c))]);
    Ok(linalg::max_abs_diff(ff.matrix(), &conj))
}

/// Smallest `t <= t_max` with `max|U^t - I| <= tol`, checking every `t`.
pub fn period_by_powering(u: &WalkUnitary, t_max: u64, tol: f64) -> PeriodVerdict {
    for (t, dist) in (1..=t_max).zip(u.identity_distances()) {
        if dist <= tol {
            return PeriodVerdict::finite(t, Method::Powering);
        }
    }
    PeriodVerdict::none_up_to(t_max, Method::Powering, format!("U^t differs from identity for every t <= {t_max}"))
}
