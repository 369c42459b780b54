//! Dense complex helpers shared by the walk, Jacobi and lift modules.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::coin::arg_2pi;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 100_000;

/// Max-entry absolute difference of two equally sized matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max-entry distance from the identity.
pub fn identity_distance(a: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for ((r, c), z) in a.iter().enumerate().map(|(k, z)| ((k % a.nrows(), k / a.nrows()), z)) {
        let target = if r == c { 1.0 } else { 0.0 };
        worst = worst.max((z - Complex64::new(target, 0.0)).norm());
    }
    worst
}

/// `max |U* U - I|`
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    identity_distance(&(u.adjoint() * u))
}

/// Complex Schur form `m = Q T Q*`.
///
/// QR stalls (even cyclic permutations are the classic case) are retried on
/// a few fixed unitary similarity transforms of `m`.
pub fn schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    if let Some(s) = Schur::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER) {
        return Ok(s.unpack());
    }
    for attempt in 1..=3 {
        let v = fixed_unitary(m.nrows(), attempt);
        if let Some(s) = Schur::try_new(v.adjoint() * m * &v, SCHUR_EPS, SCHUR_MAX_ITER) {
            let (q, t) = s.unpack();
            return Ok((v * q, t));
        }
    }
    Err(Error::EigenNonConvergence)
}

/// Eigenvalues of a general complex square matrix (diagonal of the Schur form).
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let (_, t) = schur(m)?;
    Ok(t.diagonal().iter().copied().collect())
}

/// Deterministic dense unitary: the `Q` factor of a fixed trigonometric matrix.
fn fixed_unitary(n: usize, attempt: usize) -> CMatrix {
    let k = attempt as f64;
    let seed = CMatrix::from_fn(n, n, |r, c| {
        let (r, c) = (r as f64, c as f64);
        Complex64::new((1.3 * r + 0.7 * k * c + 0.1).sin(), (0.9 * r * c + 0.4 * k + 0.3 * c).cos())
    });
    seed.qr().q()
}

/// Hermitian eigendecomposition with eigenvalues ascending; column `k` of the
/// returned matrix is the eigenvector of the `k`-th eigenvalue.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER).ok_or(Error::EigenNonConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Outcome of pairing two eigenvalue multisets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumMatch {
    /// Largest distance between paired eigenvalues (infinite on size mismatch).
    pub max_residual: f64,
}

impl SpectrumMatch {
    pub fn within(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }
}

/// Sorts `a` by principal argument and pairs each entry greedily with the
/// nearest unused entry of `b`.
pub fn match_spectra(a: &[Complex64], b: &[Complex64]) -> SpectrumMatch {
    if a.len() != b.len() {
        return SpectrumMatch {
            max_residual: f64::INFINITY,
        };
    }
    let mut sorted: Vec<Complex64> = a.to_vec();
    sorted.sort_by(|x, y| arg_2pi(*x).total_cmp(&arg_2pi(*y)));
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in sorted {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("sizes agree");
        used[k] = true;
        worst = worst.max(d);
    }
    SpectrumMatch { max_residual: worst }
}

pub fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b>` conjugate-linear in `a`.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}
