//! Period `T_n(U) = inf{t : U^t = I}` by eigenvalue orders, closed forms and
//! brute-force powering.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::{check_isospectral, conjugate_layout_sigma_x, spectral_decompose, Coin2x2, CoinLayout, IsoLayout};
use crate::error::{Error, Result};
use crate::jacobi::{class_key, CLASS_KEY_TOL};
use crate::lift::full_spectrum_ff;
use crate::linalg::{self, CMatrix};
use crate::verdict::{Method, PeriodVerdict, RootOfUnityCert, SearchBound};
use crate::walk::{build_evolution, period_by_powering, ShiftKind, WalkUnitary};

pub const DEFAULT_Q_MAX: u64 = 10_000;
pub const DEFAULT_ANGLE_TOL: f64 = 1e-9;
pub const DEFAULT_T_MAX: u64 = 100_000;
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-9;
/// `|mu^T - 1|` accepted when confirming a candidate period.
pub const TOL_POWER: f64 = 1e-7;
/// Structural match tolerance for `[C:1, I:m]` recognition.
pub const PATTERN_TOL: f64 = 1e-12;
/// Minimum `max|U^{T/d} - I|` for a period to count as minimal.
pub const MIN_SEPARATION: f64 = 1e-3;
const ISOSPECTRAL_TOL: f64 = 1e-10;
const UNIT_MODULUS_TOL: f64 = 1e-9;
const NU_MATCH_TOL: f64 = 1e-10;

pub const REASON_IRRATIONAL: &str = "eigenvalue angle not rational within tolerance";
pub const REASON_HADAMARD: &str = "infinite by Hadamard-class corollary";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub t_max: u64,
    pub q_max: u64,
    pub angle_tol: f64,
    pub identity_tol: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            t_max: DEFAULT_T_MAX,
            q_max: DEFAULT_Q_MAX,
            angle_tol: DEFAULT_ANGLE_TOL,
            identity_tol: DEFAULT_IDENTITY_TOL,
        }
    }
}

impl Limits {
    pub fn validate(&self) -> Result<()> {
        if self.t_max == 0 || self.q_max == 0 {
            return Err(Error::Invalid("t_max and q_max must be positive".into()));
        }
        if !(self.angle_tol > 0.0 && self.identity_tol > 0.0) {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Auto,
    Powering,
    Eigen,
    Theorem,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Strategy::Auto),
            "powering" => Ok(Strategy::Powering),
            "eigen" | "eigen-orders" => Ok(Strategy::Eigen),
            "theorem" => Ok(Strategy::Theorem),
            other => Err(Error::Invalid(format!("unknown strategy '{other}'"))),
        }
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `lcm` in 128-bit arithmetic; results beyond `2^63` are an error.
pub fn lcm(a: u64, b: u64) -> Result<u64> {
    let (a, b) = (a as u128, b as u128);
    if a == 0 || b == 0 {
        return Ok(0);
    }
    let l = a / gcd(a, b) * b;
    if l > 1u128 << 63 {
        return Err(Error::LcmOverflow);
    }
    Ok(l as u64)
}

/// First continued-fraction convergent `p/q` of `phi / 2pi` (taken mod 1)
/// with `q <= q_max` and `|phi/2pi - p/q| <= angle_tol`, as `(p mod q, q)`.
pub fn rational_angle(phi: f64, q_max: u64, angle_tol: f64) -> Option<(i64, u64)> {
    if !phi.is_finite() || q_max == 0 {
        return None;
    }
    let x = (phi / std::f64::consts::TAU).rem_euclid(1.0);
    // convergents h/k, seeded with h_{-1}/k_{-1} = 1/0 and h_{-2}/k_{-2} = 0/1
    let (mut h_prev, mut h) = (0i128, 1i128);
    let (mut k_prev, mut k) = (1i128, 0i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let ai = a as i128;
        (h_prev, h) = (h, ai * h + h_prev);
        (k_prev, k) = (k, ai * k + k_prev);
        if k > q_max as i128 {
            return None;
        }
        if (x - h as f64 / k as f64).abs() <= angle_tol {
            let q = k as u64;
            return Some(((h as i64).rem_euclid(q as i64), q));
        }
        let frac = rest - a;
        if frac < 1e-300 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

fn certify(mu: Complex64, q_max: u64, angle_tol: f64) -> Option<RootOfUnityCert> {
    let phi = mu.arg();
    let (p, q) = rational_angle(phi, q_max, angle_tol)?;
    let x = (phi / std::f64::consts::TAU).rem_euclid(1.0);
    let offset = (x - p as f64 / q as f64 + 0.5).rem_euclid(1.0) - 0.5;
    Some(RootOfUnityCert { mu, p, q, offset })
}

/// Period from eigenvalue orders: `T = lcm(q_k)` over certified angles.
pub fn period_by_eigen_orders(eigs: &[Complex64], q_max: u64, angle_tol: f64) -> Result<PeriodVerdict> {
    let mut certs = Vec::with_capacity(eigs.len());
    for &mu in eigs {
        if (mu.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
            return Err(Error::NotUnitModulus { modulus: mu.norm() });
        }
        match certify(mu, q_max, angle_tol) {
            Some(cert) => certs.push(cert),
            None => return Ok(PeriodVerdict::none_up_to(q_max, Method::EigenOrders, REASON_IRRATIONAL)),
        }
    }
    let mut period = 1u64;
    for cert in &certs {
        period = lcm(period, cert.q)?;
    }
    if let Some(bad) = certs.iter().find(|c| c.power_deviation(period) > TOL_POWER) {
        return Ok(PeriodVerdict::none_up_to(
            q_max,
            Method::EigenOrders,
            format!("candidate period {period} fails |mu^T - 1| <= {TOL_POWER:e} at mu = {}", bad.mu),
        ));
    }
    Ok(PeriodVerdict::Finite {
        period,
        method: Method::EigenOrders,
        certificate: Some(certs),
    })
}

/// Closed-form periods of the moving-shift walk with Hadamard-class coins.
pub fn hadamard_class_period(n: usize) -> Result<PeriodVerdict> {
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    Ok(match n {
        2 => PeriodVerdict::finite(2, Method::Theorem),
        4 => PeriodVerdict::finite(8, Method::Theorem),
        8 => PeriodVerdict::finite(24, Method::Theorem),
        _ => PeriodVerdict::NoPeriodUpTo {
            bound: SearchBound::Unbounded,
            method: Method::Theorem,
            reason: REASON_HADAMARD.into(),
        },
    })
}

/// `Some(phases)` when every coin is `hadamard_phase(theta_j)`.
pub fn hadamard_class_phases(layout: &CoinLayout) -> Option<Vec<f64>> {
    layout
        .coins()
        .iter()
        .map(|c| {
            let theta = c.get(0, 0).arg();
            (c.max_abs_diff(&Coin2x2::hadamard_phase(theta)) <= PATTERN_TOL).then_some(theta)
        })
        .collect()
}

/// `true` when the two flip-flop walks provably share their period (same
/// `p`-sequence and phase sum mod `2pi`); `false` makes no claim.
pub fn theorem41_transfer(a: &IsoLayout, b: &IsoLayout) -> Result<bool> {
    if (a.nu1 - b.nu1).norm() > NU_MATCH_TOL || (a.nu2 - b.nu2).norm() > NU_MATCH_TOL {
        return Err(Error::TheoremInapplicable("coin eigenvalues differ".into()));
    }
    if a.n() != b.n() {
        return Err(Error::TheoremInapplicable("layouts have different sizes".into()));
    }
    Ok(class_key(a).matches(&class_key(b), CLASS_KEY_TOL))
}

/// Multiplicative order of a single coin from its eigenvalue angles.
pub fn coin_order(c: &Coin2x2, limits: &Limits) -> Result<Option<u64>> {
    let s = spectral_decompose(c)?;
    let (Some((_, m1)), Some((_, m2))) = (
        rational_angle(s.nu1.arg(), limits.q_max, limits.angle_tol),
        rational_angle(s.nu2.arg(), limits.q_max, limits.angle_tol),
    ) else {
        return Ok(None);
    };
    Ok(Some(lcm(m1, m2)?))
}

/// `[C:1, I:n-1]` under the moving shift: `T = lcm(M1, M2) n`.
pub fn period_one_defect(c: &Coin2x2, n: usize, limits: &Limits) -> Result<PeriodVerdict> {
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    Ok(match coin_order(c, limits)? {
        Some(m) => PeriodVerdict::finite(checked_mul(m, n as u64)?, Method::Theorem),
        None => PeriodVerdict::none_up_to(limits.q_max, Method::Theorem, REASON_IRRATIONAL),
    })
}

/// `[C:1, I:m]` on `n` sites under the moving shift:
/// `T = (m + 1) T_base`, `T_base` the period of the homogeneous `C` walk on
/// `n / (m + 1)` sites (the order of `C` itself when that is one site).
pub fn period_diluted(c: &Coin2x2, m: usize, n: usize, limits: &Limits) -> Result<PeriodVerdict> {
    let block = m + 1;
    if n == 0 || n % block != 0 {
        return Err(Error::Divisibility { n, period: block });
    }
    let base_n = n / block;
    let base = if base_n == 1 {
        match coin_order(c, limits)? {
            Some(order) => PeriodVerdict::finite(order, Method::Theorem),
            None => PeriodVerdict::none_up_to(limits.q_max, Method::Theorem, REASON_IRRATIONAL),
        }
    } else {
        let layout = CoinLayout::homogeneous(*c, base_n)?;
        period_numeric(&layout, ShiftKind::Ms, limits)?
    };
    Ok(match base.period() {
        Some(t) => PeriodVerdict::finite(checked_mul(t, block as u64)?, Method::Theorem),
        None => base,
    })
}

fn checked_mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).filter(|&t| t <= 1u64 << 63).ok_or(Error::LcmOverflow)
}

/// A layout of the form `[C:1, I:m]`, possibly rotated by `offset` sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilutedPattern {
    pub coin: Coin2x2,
    pub m: usize,
    pub offset: usize,
}

impl DilutedPattern {
    pub fn is_one_defect(&self, n: usize) -> bool {
        self.m + 1 == n
    }
}

/// Recognizes `[C:1, I:m]` with `m >= 1` from the coins themselves.
pub fn detect_pattern(layout: &CoinLayout) -> Option<DilutedPattern> {
    let n = layout.n();
    let id = Coin2x2::identity();
    let defects: Vec<usize> = (0..n)
        .filter(|&i| layout.coin(i).max_abs_diff(&id) > PATTERN_TOL)
        .collect();
    let first = *defects.first()?;
    let gap = if defects.len() == 1 { n } else { defects[1] - first };
    if gap < 2 || n % gap != 0 || defects.len() != n / gap {
        return None;
    }
    let coin = *layout.coin(first);
    let regular = defects
        .iter()
        .enumerate()
        .all(|(k, &i)| i == first + k * gap && layout.coin(i).max_abs_diff(&coin) <= PATTERN_TOL);
    regular.then_some(DilutedPattern {
        coin,
        m: gap - 1,
        offset: first,
    })
}

/// Eigenvalues of `U(layout)`, through the Jacobi lift when the layout (or
/// its `sigma_x` conjugate, for the moving shift) is isospectral.
pub fn walk_spectrum(layout: &CoinLayout, shift: ShiftKind) -> Result<(Vec<Complex64>, bool)> {
    let ff_layout = match shift {
        ShiftKind::Ff => layout.clone(),
        ShiftKind::Ms => conjugate_layout_sigma_x(layout),
    };
    if let Some(iso) = check_isospectral(&ff_layout, ISOSPECTRAL_TOL) {
        if let Ok(spec) = full_spectrum_ff(&iso) {
            return Ok((spec.values(), true));
        }
    }
    Ok((build_evolution(layout, shift)?.eigenvalues()?, false))
}

fn period_numeric(layout: &CoinLayout, shift: ShiftKind, limits: &Limits) -> Result<PeriodVerdict> {
    let (eigs, _) = walk_spectrum(layout, shift)?;
    period_by_eigen_orders(&eigs, limits.q_max, limits.angle_tol)
}

fn period_by_theorem(layout: &CoinLayout, shift: ShiftKind, limits: &Limits) -> Result<PeriodVerdict> {
    if shift != ShiftKind::Ms {
        return Err(Error::TheoremInapplicable(
            "closed forms are established for the moving shift only".into(),
        ));
    }
    let n = layout.n();
    if let Some(pat) = detect_pattern(layout) {
        return if pat.is_one_defect(n) {
            period_one_defect(&pat.coin, n, limits)
        } else {
            period_diluted(&pat.coin, pat.m, n, limits)
        };
    }
    if let Some(phases) = hadamard_class_phases(layout) {
        let total: f64 = phases.iter().sum();
        if crate::jacobi::angle_distance(total, 0.0) <= ISOSPECTRAL_TOL * n as f64 {
            return hadamard_class_period(n);
        }
    }
    Err(Error::TheoremInapplicable(
        "layout is neither [C:1, I:m] nor Hadamard class".into(),
    ))
}

/// `T_n(U)` with the chosen strategy. `Auto` uses the closed forms for
/// recognized `[C:1, I:m]` layouts under the moving shift and eigenvalue
/// orders otherwise.
pub fn period(layout: &CoinLayout, shift: ShiftKind, strategy: Strategy, limits: &Limits) -> Result<PeriodVerdict> {
    limits.validate()?;
    match strategy {
        Strategy::Powering => {
            let u = build_evolution(layout, shift)?;
            Ok(period_by_powering(&u, limits.t_max, limits.identity_tol))
        }
        Strategy::Eigen => period_numeric(layout, shift, limits),
        Strategy::Theorem => period_by_theorem(layout, shift, limits),
        Strategy::Auto => {
            if shift == ShiftKind::Ms && detect_pattern(layout).is_some() {
                period_by_theorem(layout, shift, limits)
            } else {
                period_numeric(layout, shift, limits)
            }
        }
    }
}

/// `U^t` by repeated squaring.
pub fn matrix_power(u: &WalkUnitary, t: u64) -> CMatrix {
    let mut result = CMatrix::identity(u.dim(), u.dim());
    let mut base = u.matrix().clone();
    let mut e = t;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

pub fn prime_factors(mut t: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= t {
        if t % d == 0 {
            out.push(d);
            while t % d == 0 {
                t /= d;
            }
        }
        d += 1;
    }
    if t > 1 {
        out.push(t);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalityCheck {
    pub period: u64,
    /// `max|U^T - I|`
    pub at_period: f64,
    /// Smallest `max|U^{T/d} - I|` over prime divisors `d` of `T` (none for `T = 1`).
    pub closest_divisor: Option<f64>,
    pub passed: bool,
}

/// Confirms `U^T ~ I` and `U^{T/d}` separated from `I` for each prime `d | T`.
pub fn check_minimality(u: &WalkUnitary, period: u64, identity_tol: f64, separation: f64) -> MinimalityCheck {
    let at_period = linalg::identity_distance(&matrix_power(u, period));
    let closest_divisor = prime_factors(period)
        .into_iter()
        .map(|d| linalg::identity_distance(&matrix_power(u, period / d)))
        .reduce(f64::min);
    let passed = at_period <= identity_tol && closest_divisor.is_none_or(|g| g >= separation);
    MinimalityCheck {
        period,
        at_period,
        closest_divisor,
        passed,
    }
}

/// Closed form vs powering under both shifts for one `[C:1, I:m]` layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionReport {
    pub m: usize,
    pub n: usize,
    pub formula: Option<u64>,
    pub powering_ms: Option<u64>,
    pub powering_ff: Option<u64>,
}

impl ConventionReport {
    /// Equal periods, or no period on either side (formula: irrational angle;
    /// powering: none up to `t_max`).
    pub fn matches_ms(&self) -> bool {
        self.formula == self.powering_ms
    }

    pub fn matches_ff(&self) -> bool {
        self.formula == self.powering_ff
    }
}

pub fn convention_report(c: &Coin2x2, m: usize, n: usize, limits: &Limits) -> Result<ConventionReport> {
    let formula = if m + 1 == n {
        period_one_defect(c, n, limits)?
    } else {
        period_diluted(c, m, n, limits)?
    };
    let layout = crate::coin::build_periodic_layout(*c, 1, Coin2x2::identity(), m, n)?;
    let mut powered = [None, None];
    for (slot, shift) in powered.iter_mut().zip([ShiftKind::Ms, ShiftKind::Ff]) {
        let u = build_evolution(&layout, shift)?;
        *slot = period_by_powering(&u, limits.t_max, limits.identity_tol).period();
    }
    Ok(ConventionReport {
        m,
        n,
        formula: formula.period(),
        powering_ms: powered[0],
        powering_ff: powered[1],
    })
}
