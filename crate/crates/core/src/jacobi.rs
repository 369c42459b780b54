//! The `n x n` Hermitian Jacobi matrix of an isospectral layout and its
//! characteristic polynomial.
//!
//! Entry `(i, i+1 mod n)` is `conj(w_i(R)) w_{i+1}(L)`; the opposite triangle
//! follows by Hermitian symmetry. Everything else is zero.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::IsoLayout;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// Eigenvalues this far outside `[-1, 1]` are clamped; farther is an error.
pub const CLAMP_SLACK: f64 = 1e-10;
/// Eigenvalues closer than this are treated as one level.
pub const GROUPING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    /// `links[k] = conj(w_k(R)) w_{k+1 mod n}(L)`, the coupling of `k` to its right neighbour.
    links: Vec<Complex64>,
}

impl JacobiMatrix {
    pub fn n(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[Complex64] {
        &self.links
    }

    /// `u_i = J[i][i+1]` for `i = 0..n-2`.
    pub fn super_diagonal(&self) -> &[Complex64] {
        &self.links[..self.n() - 1]
    }

    /// `J[0][n-1] = conj(w_0(L)) w_{n-1}(R)`.
    pub fn corner(&self) -> Complex64 {
        self.links[self.n() - 1].conj()
    }

    /// Dense Hermitian matrix; on `C_2` both couplings land on the pair `(0, 1)` and add up.
    pub fn to_dense(&self) -> CMatrix {
        let n = self.n();
        let mut m = CMatrix::zeros(n, n);
        for (k, &z) in self.links.iter().enumerate() {
            let j = (k + 1) % n;
            if j == k {
                m[(k, k)] += z + z.conj();
                continue;
            }
            m[(k, j)] += z;
            m[(j, k)] += z.conj();
        }
        m
    }

    /// Nonzero entries `(row, col, value)` of the dense matrix, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        let d = self.to_dense();
        let n = self.n();
        let mut out = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if d[(r, c)] != Complex64::new(0.0, 0.0) {
                    out.push((r, c, d[(r, c)]));
                }
            }
        }
        out
    }
}

pub fn build_jacobi(iso: &IsoLayout) -> Result<JacobiMatrix> {
    let n = iso.n();
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    let links = (0..n)
        .map(|k| iso.w[k][1].conj() * iso.w[(k + 1) % n][0])
        .collect();
    Ok(JacobiMatrix { links })
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiEigenpair {
    pub lambda: f64,
    pub vector: CVector,
}

/// Eigenpairs ascending in `lambda`, clamped into `[-1, 1]`.
pub fn jacobi_eigensystem(j: &JacobiMatrix) -> Result<Vec<JacobiEigenpair>> {
    let (values, vectors) = linalg::hermitian_eigen(&j.to_dense())?;
    values
        .into_iter()
        .enumerate()
        .map(|(k, lambda)| {
            if lambda.abs() > 1.0 + CLAMP_SLACK || !lambda.is_finite() {
                return Err(Error::EigenvalueOutOfRange { value: lambda });
            }
            Ok(JacobiEigenpair {
                lambda: lambda.clamp(-1.0, 1.0),
                vector: vectors.column(k).into_owned(),
            })
        })
        .collect()
}

/// Eigenvalues grouped into levels `(value, multiplicity)`.
pub fn group_levels(lambdas: &[f64]) -> Vec<(f64, usize)> {
    let mut levels: Vec<(f64, usize)> = Vec::new();
    for &x in lambdas {
        match levels.last_mut() {
            Some((v, m)) if (x - *v).abs() <= GROUPING_TOL => *m += 1,
            _ => levels.push((x, 1)),
        }
    }
    levels
}

/// Monic characteristic polynomial `det(lambda I - J)`, coefficients in
/// ascending powers (`coeffs[k]` multiplies `lambda^k`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    pub coeffs: Vec<f64>,
    /// Largest imaginary part discarded when the complex construction was made real.
    pub imag_residue: f64,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        poly_eval(&self.coeffs, x)
    }

    /// Real roots with multiplicity, ascending.
    ///
    /// Assumes the polynomial is real-rooted (true for every `det(lambda I - J)`
    /// with `J` Hermitian). Then each derivative is real-rooted too and its
    /// roots separate those of the level below, so the roots are bracketed
    /// from the top derivative down. A root of multiplicity `m` is a simple
    /// root of the `(m-1)`-th derivative and is located there.
    ///
    /// Monomial coefficients stop resolving clustered roots past `n ~ 20`;
    /// there the result degrades or the root count comes up short (an error).
    pub fn roots(&self) -> Result<Vec<f64>> {
        let n = self.degree();
        if self.coeffs.iter().any(|c| !c.is_finite()) || self.coeffs[n] == 0.0 {
            return Err(Error::Invalid("characteristic polynomial is degenerate".into()));
        }
        let lead = self.coeffs[n];
        let bound = 1.0 + self.coeffs[..n].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
        let mut levels = vec![self.coeffs.clone()];
        for _ in 0..n {
            let d = levels.last().expect("nonempty");
            levels.push(d.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect());
        }
        // distinct roots of the current derivative with their multiplicities
        let mut current: Vec<(f64, usize)> = Vec::new();
        for k in (0..n).rev() {
            let p = &levels[k];
            // coefficient errors are absolute, on the scale of the largest coefficient
            let scale = p.iter().map(|c| c.abs()).fold(0.0, f64::max);
            let noise = |x: f64| {
                let powers = (0..p.len()).rev().fold(0.0, |acc, _| acc * x.abs() + 1.0);
                16.0 * (n + 1) as f64 * f64::EPSILON * scale * powers
            };
            let mut xs = vec![(-bound, 0usize)];
            xs.extend(current.iter().copied());
            xs.push((bound, 0));
            let values: Vec<f64> = xs.iter().map(|&(x, _)| poly_eval(p, x)).collect();
            // |p(c)| / noise(c) at interior critical points; <= 1 reads as a root
            let ratio: Vec<f64> = xs
                .iter()
                .zip(&values)
                .enumerate()
                .map(|(i, (&(x, _), v))| {
                    if i == 0 || i + 1 == xs.len() {
                        f64::INFINITY
                    } else {
                        v.abs() / noise(x)
                    }
                })
                .collect();
            let mut zero: Vec<bool> = ratio.iter().map(|&r| r <= 1.0).collect();
            let mut next = sweep(p, &xs, &values, &zero);
            // a root pair lost to rounding leaves a critical value of the wrong
            // sign; promote the closest-to-zero critical points until the count is right
            while next.iter().map(|r| r.1).sum::<usize>() < n - k {
                let Some(i) = (0..xs.len())
                    .filter(|&i| !zero[i] && ratio[i] <= MAX_PROMOTION_RATIO)
                    .min_by(|&a, &b| ratio[a].total_cmp(&ratio[b]))
                else {
                    break;
                };
                zero[i] = true;
                next = sweep(p, &xs, &values, &zero);
            }
            current = next;
        }
        let roots: Vec<f64> = current
            .into_iter()
            .flat_map(|(x, m)| std::iter::repeat_n(x, m))
            .collect();
        if roots.len() != n {
            return Err(Error::Invalid(format!(
                "found {} of {n} roots; polynomial is not real-rooted",
                roots.len()
            )));
        }
        Ok(roots)
    }
}

/// Largest `|p(c)| / noise(c)` still read as a lost double root; beyond it
/// the polynomial has non-real roots.
const MAX_PROMOTION_RATIO: f64 = 1e4;

/// Roots of `p` at flagged critical points and at sign changes between
/// unflagged neighbours, in order.
fn sweep(p: &[f64], xs: &[(f64, usize)], values: &[f64], zero: &[bool]) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    for i in 0..xs.len() - 1 {
        if zero[i] {
            out.push((xs[i].0, xs[i].1 + 1));
        }
        if !zero[i] && !zero[i + 1] && values[i].signum() != values[i + 1].signum() {
            out.push((bisect(p, xs[i].0, xs[i + 1].0, values[i]), 1));
        }
    }
    out
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Sign-change root of `p` on `[lo, hi]` with `p(lo) = f_lo`.
fn bisect(p: &[f64], mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let s_lo = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = poly_eval(p, mid);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

type Poly = Vec<Complex64>;

fn poly_sub_scaled(a: &Poly, b: &Poly, s: Complex64) -> Poly {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len().max(b.len())];
    for (k, &x) in a.iter().enumerate() {
        out[k] += x;
    }
    for (k, &x) in b.iter().enumerate() {
        out[k] -= s * x;
    }
    out
}

fn poly_times_lambda(a: &Poly) -> Poly {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    out.extend_from_slice(a);
    out
}

/// `det K_{i,j}(lambda)`: the tridiagonal block on vertices `i..=j+1` with
/// couplings `e_k = p_k q_{k+1}`, `k = i..=j`. `j = i - 1` is the `1 x 1` block `lambda`.
fn det_k(weights: &[Complex64], i: usize, j: isize) -> Poly {
    let one = vec![Complex64::new(1.0, 0.0)];
    if j < i as isize - 1 {
        return one;
    }
    let mut prev = one;
    let mut cur = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    for &e in &weights[i..(j + 1) as usize] {
        let next = poly_sub_scaled(&poly_times_lambda(&cur), &prev, e);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Characteristic polynomial assembled from three tridiagonal blocks plus the
/// cyclic term, using only `p_k`, `q_k` and the product of the `n` couplings.
///
/// `n = 2` has no block structure and falls back to `lambda^2 - |J_01|^2`.
pub fn charpoly_by_recurrence(iso: &IsoLayout) -> Result<CharPoly> {
    let n = iso.n();
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    if n == 2 {
        let j01 = build_jacobi(iso)?.to_dense()[(0, 1)];
        return Ok(CharPoly {
            coeffs: vec![-j01.norm_sqr(), 0.0, 1.0],
            imag_residue: 0.0,
        });
    }
    // e_k = |w_k(R)|^2 |w_{k+1}(L)|^2
    let weights: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(iso.p(k) * iso.q((k + 1) % n), 0.0))
        .collect();
    let ni = n as isize;

    let lead = poly_times_lambda(&det_k(&weights, 1, ni - 2));
    let mut poly = poly_sub_scaled(&lead, &det_k(&weights, 2, ni - 2), weights[0]);
    poly = poly_sub_scaled(&poly, &det_k(&weights, 1, ni - 3), weights[n - 1]);

    // cyclic term: both orientations of the n-cycle, each carrying sign -1
    let product = (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * iso.w[k][1].conj() * iso.w[k][0]);
    poly[0] -= product + product.conj();

    let imag_residue = poly.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let mut coeffs: Vec<f64> = poly.iter().map(|z| z.re).collect();
    coeffs.truncate(n + 1);
    Ok(CharPoly { coeffs, imag_residue })
}

/// Data that fixes the Jacobi spectrum (and hence the flip-flop spectrum):
/// the `p` sequence, the summed phase differences, and the coin eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassKey {
    pub p: Vec<f64>,
    /// `sum_j (theta_L(j) - theta_R(j))` reduced into `[0, 2pi)`.
    pub phase_sum: f64,
    pub nu1: Complex64,
    pub nu2: Complex64,
}

pub const CLASS_KEY_TOL: f64 = 1e-10;

impl ClassKey {
    pub fn matches(&self, other: &ClassKey, tol: f64) -> bool {
        self.p.len() == other.p.len()
            && self.p.iter().zip(&other.p).all(|(a, b)| (a - b).abs() <= tol)
            && angle_distance(self.phase_sum, other.phase_sum) <= tol
            && (self.nu1 - other.nu1).norm() <= tol
            && (self.nu2 - other.nu2).norm() <= tol
    }
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

pub fn class_key(iso: &IsoLayout) -> ClassKey {
    let n = iso.n();
    let sum: f64 = (0..n).map(|j| iso.theta_l(j) - iso.theta_r(j)).sum();
    let mut phase_sum = sum.rem_euclid(TAU);
    if TAU - phase_sum < 1e-13 {
        phase_sum = 0.0;
    }
    ClassKey {
        p: (0..n).map(|j| iso.p(j)).collect(),
        phase_sum,
        nu1: iso.nu1,
        nu2: iso.nu2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::{check_isospectral, conjugate_layout_sigma_x, unit, Coin2x2, CoinLayout};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn h_sigma_x(n: usize) -> IsoLayout {
        let lay = conjugate_layout_sigma_x(&CoinLayout::homogeneous(Coin2x2::hadamard(), n).unwrap());
        check_isospectral(&lay, 1e-10).unwrap()
    }

    #[test]
    fn h_sigma_x_entries() {
        let j = build_jacobi(&h_sigma_x(5)).unwrap();
        for u in j.super_diagonal() {
            assert!((u - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        }
        assert!((j.corner() - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        let d = j.to_dense();
        assert!((d[(0, 4)] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((d[(4, 0)] - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert_eq!(d[(0, 2)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn vanishing_right_components_give_zero_matrix() {
        let iso = IsoLayout::from_spinors(unit(0.3), unit(1.9), vec![[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]; 4]).unwrap();
        let j = build_jacobi(&iso).unwrap();
        assert!(j.to_dense().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        let eig = jacobi_eigensystem(&j).unwrap();
        assert!(eig.iter().all(|e| e.lambda == 0.0));
        let poly = charpoly_by_recurrence(&iso).unwrap();
        assert_eq!(poly.coeffs, vec![0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn circulant_spectra() {
        let lambdas: Vec<f64> = jacobi_eigensystem(&build_jacobi(&h_sigma_x(4)).unwrap())
            .unwrap()
            .iter()
            .map(|e| e.lambda)
            .collect();
        let want = [-1.0, 0.0, 0.0, 1.0];
        for (a, b) in lambdas.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }

        let lambdas: Vec<f64> = jacobi_eigensystem(&build_jacobi(&h_sigma_x(8)).unwrap())
            .unwrap()
            .iter()
            .map(|e| e.lambda)
            .collect();
        let mut want: Vec<f64> = (0..8).map(|k| (PI * k as f64 / 4.0).sin()).collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in lambdas.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(group_levels(&lambdas).len(), 5);
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let eig = jacobi_eigensystem(&build_jacobi(&h_sigma_x(6)).unwrap()).unwrap();
        for a in &eig {
            for b in &eig {
                let want = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                assert!((linalg::inner(&a.vector, &b.vector).norm() - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn charpoly_h_sigma_x_n4() {
        // (lambda^2)(lambda^2 - 1)
        let poly = charpoly_by_recurrence(&h_sigma_x(4)).unwrap();
        let want = [0.0, 0.0, -1.0, 0.0, 1.0];
        for (a, b) in poly.coeffs.iter().zip(want) {
            assert!((a - b).abs() < 1e-14, "{:?}", poly.coeffs);
        }
        assert!(poly.imag_residue <= 1e-12);
    }

    #[test]
    fn charpoly_real_cosine_case_n3() {
        // w = (1,1)/sqrt2: J = (P + P^T)/2, det = (x - 1)(x + 1/2)^2 = x^3 - 3x/4 - 1/4
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let iso = IsoLayout::from_spinors(unit(0.0), unit(PI), vec![[s, s]; 3]).unwrap();
        let poly = charpoly_by_recurrence(&iso).unwrap();
        let want = [-0.25, -0.75, 0.0, 1.0];
        for (a, b) in poly.coeffs.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn two_vertex_fallback() {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let iso = IsoLayout::from_spinors(unit(0.0), unit(PI), vec![[s, s], [s, s * unit(0.4)]]).unwrap();
        let j = build_jacobi(&iso).unwrap().to_dense();
        let expect = iso.w[0][1].conj() * iso.w[1][0] + (iso.w[1][1].conj() * iso.w[0][0]).conj();
        assert!((j[(0, 1)] - expect).norm() < 1e-15);
        let poly = charpoly_by_recurrence(&iso).unwrap();
        assert!((poly.coeffs[0] + expect.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn class_keys() {
        let base = h_sigma_x(5);
        assert!(class_key(&base).matches(&class_key(&h_sigma_x(5)), CLASS_KEY_TOL));

        let dl = [0.4, 1.1, -0.3, 2.0, 0.0];
        let mut dr = [0.1, 0.2, 0.3, 0.4, 0.0];
        // sum(dl - dr) = 3.2 - 1.0 = 2.2; make it 2pi
        dr[4] = dl.iter().sum::<f64>() - dr[..4].iter().sum::<f64>() - TAU;
        let tweaked = base.with_phase_shifts(&dl, &dr);
        assert!(class_key(&base).matches(&class_key(&tweaked), CLASS_KEY_TOL));

        dr[4] += PI;
        let off = base.with_phase_shifts(&dl, &dr);
        let (a, b) = (class_key(&base), class_key(&off));
        assert!(!a.matches(&b, CLASS_KEY_TOL));
        assert!((angle_distance(a.phase_sum, b.phase_sum) - PI).abs() < 1e-12);
    }

    #[test]
    fn repeated_roots_located_through_derivatives() {
        // sin(2 pi k / 8): 0 and +-1/sqrt 2 twice each, +-1 once
        let roots = charpoly_by_recurrence(&h_sigma_x(8)).unwrap().roots().unwrap();
        let mut want: Vec<f64> = (0..8).map(|k| (TAU * k as f64 / 8.0).sin()).collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in roots.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "{roots:?}");
        }
        let triple = CharPoly {
            coeffs: vec![-0.125, 0.75, -1.5, 1.0],
            imag_residue: 0.0,
        };
        assert_eq!(triple.roots().unwrap(), vec![0.5, 0.5, 0.5]);
        let complex = CharPoly {
            coeffs: vec![1.0, 0.0, 1.0],
            imag_residue: 0.0,
        };
        assert!(complex.roots().is_err());
    }
}
