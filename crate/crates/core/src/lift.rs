//! Lifting the Jacobi spectrum to the full `2n`-point spectrum of the
//! flip-flop walk `U = S_FF C`.
//!
//! For a Jacobi eigenpair `(lambda, v)` put `a = sum_i v(i) |i> (x) |w_i>` and
//! `b = S_FF a`. Then `U a = nu1 b` and `U b = nu2 a + (nu1 - nu2) lambda b`, so
//! `span(a, b)` carries the two roots of
//! `mu^2 - (nu1 - nu2) lambda mu - nu1 nu2 = 0` with eigenvectors `nu2 a + mu b`.
//! At `lambda = +-1` the span collapses (`b = +-a`) and the missing eigenpair
//! comes from the `nu2` branch vectors `a~`, `b~`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::IsoLayout;
use crate::error::{Error, Result};
use crate::jacobi::{build_jacobi, jacobi_eigensystem, GROUPING_TOL};
use crate::linalg::{self, CVector};
use crate::walk::{build_evolution, build_shift, basis_index, ShiftKind, WalkUnitary};

/// `|lambda -+ 1|` below this routes to the boundary lift.
pub const BOUNDARY_TOL: f64 = GROUPING_TOL;
/// Eigenvector residual accepted for a lifted pair.
pub const TOL_EIGVEC: f64 = 1e-8;
const SUPPLEMENTARY_MIN_NORM: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftKind {
    QuadraticPlus,
    QuadraticMinus,
    /// `lambda = +-1`, `mu = +-nu1`, vector `a`.
    Boundary,
    /// `nu2`-branch partner of a boundary eigenvalue.
    Supplementary,
    /// Recovered from the invariant complement when the `nu2`-branch vectors
    /// are not eigenvectors (inhomogeneous layouts with `lambda = +-1`).
    Complement,
}

impl LiftKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LiftKind::QuadraticPlus => "quadratic-plus",
            LiftKind::QuadraticMinus => "quadratic-minus",
            LiftKind::Boundary => "boundary",
            LiftKind::Supplementary => "supplementary",
            LiftKind::Complement => "complement",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedEigen {
    pub mu: Complex64,
    pub source_lambda: f64,
    pub kind: LiftKind,
    /// Unit eigenvector of `U_FF`.
    pub vector: CVector,
}

impl LiftedEigen {
    pub fn residual(&self, u: &WalkUnitary) -> f64 {
        linalg::vec_norm(&(u.apply(&self.vector) - self.vector.map(|z| z * self.mu)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairVectors {
    pub a: CVector,
    pub b: CVector,
    pub a2: CVector,
    pub b2: CVector,
}

fn spread(v: &CVector, spinors: &[[Complex64; 2]]) -> CVector {
    let n = spinors.len();
    let mut out = CVector::zeros(2 * n);
    for (i, w) in spinors.iter().enumerate() {
        out[basis_index(i, 0)] = v[i] * w[0];
        out[basis_index(i, 1)] = v[i] * w[1];
    }
    out
}

/// `a`, `b = S_FF a` from the `nu1` branch and `a~`, `b~ = S_FF a~` from the `nu2` branch.
pub fn build_pair_vectors(v: &CVector, iso: &IsoLayout, shift: &WalkUnitary) -> Result<PairVectors> {
    let n = iso.n();
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    if shift.n() != n {
        return Err(Error::DimensionMismatch { expected: 2 * n, got: shift.dim() });
    }
    if shift.shift() != ShiftKind::Ff {
        return Err(Error::Invalid("pair vectors need the flip-flop shift".into()));
    }
    let a = spread(v, &iso.w);
    let a2 = spread(v, &iso.w2);
    let b = shift.apply(&a);
    let b2 = shift.apply(&a2);
    Ok(PairVectors { a, b, a2, b2 })
}

/// Roots `(mu_plus, mu_minus)` of `mu^2 - (nu1 - nu2) lambda mu - nu1 nu2 = 0`,
/// `mu_plus` taking the principal square root of the discriminant.
pub fn lift_quadratic(lambda: f64, nu1: Complex64, nu2: Complex64) -> Result<(Complex64, Complex64)> {
    if !(lambda.abs() < 1.0 - BOUNDARY_TOL) {
        return Err(Error::BoundaryLambda { lambda });
    }
    for nu in [nu1, nu2] {
        if (nu.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnitModulus { modulus: nu.norm() });
        }
    }
    let lin = (nu1 - nu2) * lambda;
    let root = (lin * lin + 4.0 * nu1 * nu2).sqrt();
    Ok(((lin + root) * 0.5, (lin - root) * 0.5))
}

/// Boundary eigenpair `(+-nu1, a)` and its `nu2`-branch partner.
///
/// For `lambda = +1` the partner is `a~ - b~` with `mu = -nu2`; for
/// `lambda = -1` it is `a~ + b~` with `mu = +nu2`. (`U a~ = nu2 b~` and, when
/// `b~` lies in the `nu2` eigenspace of the coin, `U b~ = nu2 a~`.)
pub fn boundary_and_supplementary(
    lambda_sign: i8,
    pv: &PairVectors,
    nu1: Complex64,
    nu2: Complex64,
) -> Result<(LiftedEigen, LiftedEigen)> {
    let sign = match lambda_sign {
        1 => 1.0,
        -1 => -1.0,
        other => return Err(Error::NotBoundary { lambda: other as f64 }),
    };
    let boundary = LiftedEigen {
        mu: nu1 * sign,
        source_lambda: sign,
        kind: LiftKind::Boundary,
        vector: normalized(pv.a.clone()),
    };
    let raw = &pv.a2 - pv.b2.map(|z| z * sign);
    let norm = linalg::vec_norm(&raw);
    if norm < SUPPLEMENTARY_MIN_NORM {
        return Err(Error::DegenerateSupplementary { norm });
    }
    let supplementary = LiftedEigen {
        mu: -nu2 * sign,
        source_lambda: sign,
        kind: LiftKind::Supplementary,
        vector: raw.map(|z| z / norm),
    };
    Ok((boundary, supplementary))
}

fn normalized(v: CVector) -> CVector {
    let norm = linalg::vec_norm(&v);
    v.map(|z| z / norm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedSpectrum {
    pub eigen: Vec<LiftedEigen>,
    /// Number of Jacobi eigenvalues at `+-1`.
    pub boundary_count: usize,
}

impl LiftedSpectrum {
    pub fn values(&self) -> Vec<Complex64> {
        self.eigen.iter().map(|e| e.mu).collect()
    }
}

/// All `2n` eigenpairs of the flip-flop walk of `iso`.
pub fn full_spectrum_ff(iso: &IsoLayout) -> Result<LiftedSpectrum> {
    let n = iso.n();
    let shift = build_shift(n, ShiftKind::Ff)?;
    let u = build_evolution(&iso.to_layout(), ShiftKind::Ff)?;
    let jacobi = build_jacobi(iso)?;
    let pairs = jacobi_eigensystem(&jacobi)?;

    let mut eigen = Vec::with_capacity(2 * n);
    let mut supplementary = Vec::new();
    for pair in &pairs {
        let pv = build_pair_vectors(&pair.vector, iso, &shift)?;
        let lambda = pair.lambda;
        let boundary_sign = if (lambda - 1.0).abs() <= BOUNDARY_TOL {
            Some(1)
        } else if (lambda + 1.0).abs() <= BOUNDARY_TOL {
            Some(-1)
        } else {
            None
        };
        match boundary_sign {
            Some(sign) => {
                let (boundary, partner) = boundary_and_supplementary(sign, &pv, iso.nu1, iso.nu2)?;
                eigen.push(boundary);
                supplementary.push(partner);
            }
            None => {
                let (plus, minus) = lift_quadratic(lambda, iso.nu1, iso.nu2)?;
                for (mu, kind) in [(plus, LiftKind::QuadraticPlus), (minus, LiftKind::QuadraticMinus)] {
                    let v = pv.a.map(|z| z * iso.nu2) + pv.b.map(|z| z * mu);
                    eigen.push(LiftedEigen {
                        mu,
                        source_lambda: lambda,
                        kind,
                        vector: normalized(v),
                    });
                }
            }
        }
    }

    let boundary_count = supplementary.len();
    if supplementary.iter().all(|e| e.residual(&u) <= TOL_EIGVEC) {
        eigen.extend(supplementary);
    } else {
        let sources: Vec<f64> = supplementary.iter().map(|e| e.source_lambda).collect();
        eigen.extend(complement_block(&u, &eigen, &sources)?);
    }
    Ok(LiftedSpectrum { eigen, boundary_count })
}

/// Diagonalizes `U` on the orthogonal complement of the eigenvectors found so far.
fn complement_block(u: &WalkUnitary, known: &[LiftedEigen], sources: &[f64]) -> Result<Vec<LiftedEigen>> {
    let dim = u.dim();
    let mut basis: Vec<CVector> = Vec::with_capacity(dim);
    for e in known {
        if let Some(v) = orthogonalize(&e.vector, &basis, 1e-6) {
            basis.push(v);
        }
    }
    let known_rank = basis.len();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut e = CVector::zeros(dim);
        e[k] = Complex64::new(1.0, 0.0);
        if let Some(v) = orthogonalize(&e, &basis, 1e-6) {
            basis.push(v);
        }
    }
    let complement = &basis[known_rank..];
    let s = complement.len();
    if s != sources.len() {
        return Err(Error::Invalid(format!(
            "complement has dimension {s}, expected {}",
            sources.len()
        )));
    }
    let images: Vec<CVector> = complement.iter().map(|v| u.apply(v)).collect();
    let block = linalg::CMatrix::from_fn(s, s, |r, c| linalg::inner(&complement[r], &images[c]));
    let (q, t) = linalg::schur(&block)?;
    Ok((0..s)
        .map(|k| {
            let mut v = CVector::zeros(dim);
            for (j, basis_vec) in complement.iter().enumerate() {
                v += basis_vec.map(|z| z * q[(j, k)]);
            }
            LiftedEigen {
                mu: t[(k, k)],
                source_lambda: sources[k],
                kind: LiftKind::Complement,
                vector: normalized(v),
            }
        })
        .collect())
}

/// Gram-Schmidt (two passes) against an orthonormal basis; `None` if `v` is
/// numerically inside its span.
fn orthogonalize(v: &CVector, basis: &[CVector], min_norm: f64) -> Option<CVector> {
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = linalg::inner(b, &r);
            r -= b.map(|z| z * c);
        }
    }
    let norm = linalg::vec_norm(&r);
    (norm > min_norm).then(|| r.map(|z| z / norm))
}

/// Angles of `mu_+-` for `nu_j = e^{i phi_j}`: rescale `lambda` by
/// `-sin((phi1 - phi2)/2)`, lift the result to the unit circle upward and
/// downward, then rotate by `(phi1 + phi2 - pi)/2`.
pub fn geometric_lift_angles(lambda: f64, phi1: f64, phi2: f64) -> (f64, f64) {
    let x = (-((phi1 - phi2) / 2.0).sin() * lambda).clamp(-1.0, 1.0);
    let y = (1.0 - x * x).max(0.0).sqrt();
    let rotation = (phi1 + phi2 - std::f64::consts::PI) / 2.0;
    (y.atan2(x) + rotation, (-y).atan2(x) + rotation)
}
