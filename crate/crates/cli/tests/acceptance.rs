//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Oracles here are built from the definitions: the walk matrix from the
//! shift rules and coin blocks, pair vectors from their defining sums, and
//! periods and minimality from explicit matrix powers.

use std::f64::consts::TAU;
use std::process::Command;
use std::time::Instant;

use cycleqw_core::coin::{build_periodic_layout, check_isospectral, Spinor};
use cycleqw_core::jacobi::{build_jacobi, charpoly_by_recurrence, jacobi_eigensystem};
use cycleqw_core::lift::{build_pair_vectors, full_spectrum_ff, LiftKind};
use cycleqw_core::linalg::{eigenvalues, hermitian_eigen};
use cycleqw_core::sample::{hadamard_phase_layout, phases_summing_to_full_turns, random_layout, seeded};
use cycleqw_core::verify::{defect_coins, iso_corpus};
use cycleqw_core::periodicity::{period_diluted, period_one_defect};
use cycleqw_core::walk::{build_evolution, build_shift};
use cycleqw_core::{period, Coin2x2, CoinLayout, IsoLayout, Limits, PeriodVerdict, RootOfUnityCert, SearchBound, ShiftKind, Strategy, WalkUnitary};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::Value;

type M = DMatrix<Complex64>;

// Pinned tolerances.
const TOL_IDENTITY: f64 = 1e-9;
const TOL_SPECTRUM: f64 = 1e-8;
const TOL_CONJUGATION: f64 = 1e-12;
const TOL_RANGE: f64 = 1e-10;
const TOL_CHARPOLY: f64 = 1e-8;
const TOL_CIRCULANT: f64 = 1e-10;
const TOL_PAIRS: f64 = 1e-9;
const TOL_EIGVEC: f64 = 1e-8;
const MIN_SEPARATION: f64 = 1e-3;
const SEARCH_BOUND: u64 = 10_000;
const DEFECT_T_MAX: u64 = 2_000;
const BUDGET_HADAMARD_S: f64 = 30.0;
const BUDGET_DEFECT_S: f64 = 60.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `S C` assembled from `|x,R> -> |x+1,R>`, `|x,L> -> |x-1,L>` (moving) or
/// `|x,R> -> |x+1,L>`, `|x,L> -> |x-1,R>` (flip-flop); index `2x` is L, `2x+1` is R.
fn oracle_walk(coins: &[[[Complex64; 2]; 2]], shift: ShiftKind) -> M {
    let n = coins.len();
    let mut s = M::zeros(2 * n, 2 * n);
    for x in 0..n {
        let (next, prev) = ((x + 1) % n, (x + n - 1) % n);
        match shift {
            ShiftKind::Ms => {
                s[(2 * next + 1, 2 * x + 1)] = ONE;
                s[(2 * prev, 2 * x)] = ONE;
            }
            ShiftKind::Ff => {
                s[(2 * next, 2 * x + 1)] = ONE;
                s[(2 * prev + 1, 2 * x)] = ONE;
            }
        }
    }
    let mut c = M::zeros(2 * n, 2 * n);
    for (x, coin) in coins.iter().enumerate() {
        for r in 0..2 {
            for k in 0..2 {
                c[(2 * x + r, 2 * x + k)] = coin[r][k];
            }
        }
    }
    s * c
}

fn entries(layout: &CoinLayout) -> Vec<[[Complex64; 2]; 2]> {
    layout.coins().iter().map(|c| *c.entries()).collect()
}

fn times_sigma_x(coins: &[[[Complex64; 2]; 2]]) -> Vec<[[Complex64; 2]; 2]> {
    coins.iter().map(|c| [[c[0][1], c[0][0]], [c[1][1], c[1][0]]]).collect()
}

fn max_entry(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn identity_gap(m: &M) -> f64 {
    max_entry(&(m - M::identity(m.nrows(), m.ncols())))
}

fn power(m: &M, mut t: u64) -> M {
    let mut base = m.clone();
    let mut acc = M::identity(m.nrows(), m.ncols());
    while t > 0 {
        if t & 1 == 1 {
            acc = &acc * &base;
        }
        base = &base * &base;
        t >>= 1;
    }
    acc
}

/// Least `t <= t_max` with `max|m^t - I| <= tol`, by repeated multiplication.
fn oracle_period(m: &M, t_max: u64) -> Option<u64> {
    let mut p = m.clone();
    for t in 1..=t_max {
        if identity_gap(&p) <= TOL_IDENTITY {
            return Some(t);
        }
        p = &p * m;
    }
    None
}

fn prime_divisors(mut t: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= t {
        if t % p == 0 {
            out.push(p);
            while t % p == 0 {
                t /= p;
            }
        }
        p += 1;
    }
    if t > 1 {
        out.push(t);
    }
    out
}

/// Symmetric nearest-unused pairing distance between two multisets.
fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let one_way = |a: &[Complex64], b: &[Complex64]| {
        let mut used = vec![false; b.len()];
        let mut worst = 0.0f64;
        for x in a {
            let (k, d) = b
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, y)| (k, (x - y).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            used[k] = true;
            worst = worst.max(d);
        }
        worst
    };
    one_way(a, b).max(one_way(b, a))
}

fn cli(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_cycleqw"))
        .args(args)
        .arg("--payload-only")
        .output()
        .expect("run cycleqw");
    let code = out.status.code().unwrap_or(-1);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json)
}

struct Finite {
    label: String,
    matrix: M,
    period: u64,
    certificate: Option<Vec<RootOfUnityCert>>,
}

impl Finite {
    fn new(label: String, layout: &CoinLayout, shift: ShiftKind, v: &PeriodVerdict) -> Option<Self> {
        let PeriodVerdict::Finite { period, certificate, .. } = v else {
            return None;
        };
        Some(Finite {
            label,
            matrix: oracle_walk(&entries(layout), shift),
            period: *period,
            certificate: certificate.clone(),
        })
    }
}

struct Line {
    pass: bool,
    detail: String,
}

fn hadamard_table(found: &mut Vec<Finite>) -> Line {
    let start = Instant::now();
    let table: [(usize, Option<u64>); 10] = [
        (2, Some(2)),
        (4, Some(8)),
        (8, Some(24)),
        (3, None),
        (5, None),
        (6, None),
        (7, None),
        (9, None),
        (10, None),
        (16, None),
    ];
    let limits = Limits { t_max: SEARCH_BOUND, q_max: SEARCH_BOUND, ..Limits::default() };
    let mut bad = Vec::new();
    let mut worst_identity = 0.0f64;
    for (n, want) in table {
        let ns = n.to_string();
        let layout = CoinLayout::homogeneous(Coin2x2::hadamard(), n).unwrap();
        for (name, strategy) in [("powering", Strategy::Powering), ("eigen", Strategy::Eigen)] {
            let (code, out) = cli(&[
                "period", "--coin", "hadamard", "--n", &ns, "--shift", "ms", "--strategy", name, "--t-max", "10000",
                "--q-max", "10000",
            ]);
            let cli_ok = code == 0
                && match want {
                    Some(t) => out["outcome"] == "finite" && out["T"] == t,
                    None => out["outcome"] == "unknown" && out["bound"] == SEARCH_BOUND,
                };
            let lib = period(&layout, ShiftKind::Ms, strategy, &limits).unwrap();
            let lib_ok = match want {
                Some(t) => lib.period() == Some(t),
                None => matches!(lib, PeriodVerdict::NoPeriodUpTo { bound: SearchBound::Steps(SEARCH_BOUND), .. }),
            };
            if !(cli_ok && lib_ok) {
                bad.push(format!("n={n} {name}: cli {out} lib {lib:?}"));
            }
            if let Some(f) = Finite::new(format!("hadamard n={n} {name}"), &layout, ShiftKind::Ms, &lib) {
                found.push(f);
            }
        }
        if let Some(t) = want {
            let u = oracle_walk(&entries(&layout), ShiftKind::Ms);
            let gap = identity_gap(&power(&u, t));
            worst_identity = worst_identity.max(gap);
            if oracle_period(&u, t) != Some(t) {
                bad.push(format!("n={n}: oracle powering disagrees"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = bad.is_empty() && worst_identity <= TOL_IDENTITY && secs < BUDGET_HADAMARD_S;
    Line {
        pass,
        detail: format!(
            "T(2,4,8) = 2,8,24 and NoPeriodUpTo{{{SEARCH_BOUND}}} at n in {{3,5,6,7,9,10,16}} via CLI + library, powering + eigen; \
             max|U^T - I| = {worst_identity:.1e} (tol {TOL_IDENTITY:.0e}); {secs:.1}s (budget {BUDGET_HADAMARD_S}s){}",
            fmt_bad(&bad)
        ),
    }
}

fn phase_invariance(found: &mut Vec<Finite>) -> Line {
    const CASES: usize = 200;
    let mut rng = seeded(41);
    let limits = Limits { t_max: SEARCH_BOUND, ..Limits::default() };
    let mut bad = Vec::new();
    let mut worst_spec = 0.0f64;
    let mut checked = 0usize;
    for n in [2usize, 4, 8, 6] {
        let base = hadamard_phase_layout(&vec![0.0; n]);
        let base_spec = eigenvalues(&oracle_walk(&entries(&base), ShiftKind::Ms)).unwrap();
        let base_v = period(&base, ShiftKind::Ms, Strategy::Eigen, &limits).unwrap();
        for k in 0..CASES {
            let phases = phases_summing_to_full_turns(&mut rng, n);
            let turns = phases.iter().sum::<f64>() / TAU;
            if (turns - turns.round()).abs() > 1e-12 {
                bad.push(format!("n={n}: phase sum {turns} turns"));
            }
            let layout = hadamard_phase_layout(&phases);
            let u = oracle_walk(&entries(&layout), ShiftKind::Ms);
            worst_spec = worst_spec.max(multiset_distance(&eigenvalues(&u).unwrap(), &base_spec));
            let v = period(&layout, ShiftKind::Ms, Strategy::Auto, &limits).unwrap();
            let ok = if n == 6 {
                v.outcome_label() == "unknown"
            } else {
                v.period().is_some() && v.period() == base_v.period()
            };
            // powering oracle on a subsample
            if k < 5 && oracle_period(&u, if n == 6 { 500 } else { 100 }) != v.period() {
                bad.push(format!("n={n} phases {phases:?}: powering oracle disagrees with {v:?}"));
            }
            if !ok {
                bad.push(format!("n={n} phases {phases:?}: {v:?} vs base {:?}", base_v.period()));
            }
            if let Some(f) = Finite::new(format!("hadamard-phase n={n} #{k}"), &layout, ShiftKind::Ms, &v) {
                found.push(f);
            }
            checked += 1;
        }
    }
    Line {
        pass: bad.is_empty() && worst_spec <= TOL_SPECTRUM,
        detail: format!(
            "{checked} perturbations ({CASES} each at n = 2,4,8 and 6): periods 2,8,24 kept, n=6 stays unknown; \
             spectrum distance {worst_spec:.1e} (tol {TOL_SPECTRUM:.0e}){}",
            fmt_bad(&bad)
        ),
    }
}

fn conjugation() -> Line {
    let mut rng = seeded(2);
    let mut worst_res = 0.0f64;
    let mut worst_spec = 0.0f64;
    let mut worst_build = 0.0f64;
    for k in 0..100 {
        let n = 2 + k % 9;
        let layout = random_layout(&mut rng, n);
        let c = entries(&layout);
        let ff = oracle_walk(&c, ShiftKind::Ff);
        let ms = oracle_walk(&times_sigma_x(&c), ShiftKind::Ms);
        let mut x = M::zeros(2 * n, 2 * n);
        for v in 0..n {
            x[(2 * v, 2 * v + 1)] = ONE;
            x[(2 * v + 1, 2 * v)] = ONE;
        }
        worst_res = worst_res.max(max_entry(&(&ff - &x * &ms * &x)));
        worst_res = worst_res.max(cycleqw_core::walk::ms_ff_conjugation_residual(&layout).unwrap());
        worst_build = worst_build.max(max_entry(&(build_evolution(&layout, ShiftKind::Ff).unwrap().matrix() - &ff)));
        worst_spec = worst_spec.max(multiset_distance(&eigenvalues(&ff).unwrap(), &eigenvalues(&ms).unwrap()));
    }
    Line {
        pass: worst_res <= TOL_CONJUGATION && worst_spec <= TOL_SPECTRUM && worst_build <= TOL_CONJUGATION,
        detail: format!(
            "100 random layouts, n = 2..10: conjugation residual {worst_res:.1e} (tol {TOL_CONJUGATION:.0e}), \
             spectrum distance {worst_spec:.1e} (tol {TOL_SPECTRUM:.0e}), library vs oracle matrix {worst_build:.1e}"
        ),
    }
}

/// `H sigma_x` on every vertex, `n = 3..=12`; its Jacobi matrix is circulant.
fn homogeneous_hsx() -> Vec<IsoLayout> {
    (3..=12)
        .map(|n| check_isospectral(&CoinLayout::homogeneous(Coin2x2::hadamard().times_sigma_x(), n).unwrap(), 1e-10).unwrap())
        .collect()
}

struct PipelineStats {
    range: f64,
    charpoly: f64,
    lift: f64,
    circulant: f64,
    boundary_layouts: usize,
    layouts: usize,
}

fn jacobi_pipeline(corpus: &[IsoLayout]) -> Line {
    let mut s = PipelineStats { range: 0.0, charpoly: 0.0, lift: 0.0, circulant: 0.0, boundary_layouts: 0, layouts: 0 };
    let mut bad = Vec::new();
    let hsx = homogeneous_hsx();
    for iso in corpus.iter().chain(&hsx) {
        let n = iso.n();
        let j = build_jacobi(iso).unwrap().to_dense();
        let (lambdas, _) = hermitian_eigen(&j).unwrap();
        s.range = s.range.max(lambdas.iter().map(|l| l.abs() - 1.0).fold(0.0, f64::max));
        match charpoly_by_recurrence(iso).and_then(|p| p.roots()) {
            Ok(roots) if roots.len() == n => {
                s.charpoly = s.charpoly.max(roots.iter().zip(&lambdas).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            }
            other => bad.push(format!("n={n}: charpoly roots {other:?}")),
        }
        let lifted = full_spectrum_ff(iso).unwrap();
        let direct = eigenvalues(&oracle_walk(&entries(&iso.to_layout()), ShiftKind::Ff)).unwrap();
        s.lift = s.lift.max(multiset_distance(&lifted.values(), &direct));
        if lifted.boundary_count > 0 {
            s.boundary_layouts += 1;
        }
        s.layouts += 1;
    }
    for iso in &hsx {
        let n = iso.n();
        let (lambdas, _) = hermitian_eigen(&build_jacobi(iso).unwrap().to_dense()).unwrap();
        let mut sines: Vec<f64> = (0..n).map(|k| (TAU * k as f64 / n as f64).sin()).collect();
        sines.sort_by(f64::total_cmp);
        s.circulant = s.circulant.max(lambdas.iter().zip(&sines).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    let pass = bad.is_empty()
        && s.range <= TOL_RANGE
        && s.charpoly <= TOL_CHARPOLY
        && s.lift <= TOL_SPECTRUM
        && s.circulant <= TOL_CIRCULANT
        && s.boundary_layouts > 0;
    Line {
        pass,
        detail: format!(
            "{} isospectral layouts, n = 3..12 ({} with lambda = +-1): range excess {:.1e} (tol {TOL_RANGE:.0e}), \
             charpoly roots {:.1e} (tol {TOL_CHARPOLY:.0e}), lift vs direct {:.1e} (tol {TOL_SPECTRUM:.0e}), \
             H sigma_x circulant vs sin(2 pi k/n) {:.1e} (tol {TOL_CIRCULANT:.0e}){}",
            s.layouts,
            s.boundary_layouts,
            s.range,
            s.charpoly,
            s.lift,
            s.circulant,
            fmt_bad(&bad)
        ),
    }
}

fn spread(v: &nalgebra::DVector<Complex64>, w: &[Spinor]) -> nalgebra::DVector<Complex64> {
    let n = w.len();
    let mut out = nalgebra::DVector::from_element(2 * n, ZERO);
    for i in 0..n {
        out[2 * i] = v[i] * w[i][0];
        out[2 * i + 1] = v[i] * w[i][1];
    }
    out
}

fn vector_relations(corpus: &[IsoLayout]) -> Line {
    let mut worst_pairs = 0.0f64;
    let mut worst_lib = 0.0f64;
    let mut worst_vec = 0.0f64;
    let mut worst_supp = 0.0f64;
    let (mut lifted_pairs, mut supplementary, mut complement) = (0usize, 0usize, 0usize);
    let mut bad = Vec::new();
    for iso in corpus.iter().chain(&homogeneous_hsx()) {
        let n = iso.n();
        let layout = iso.to_layout();
        let u = oracle_walk(&entries(&layout), ShiftKind::Ff);
        let s = oracle_walk(&vec![[[ONE, ZERO], [ZERO, ONE]]; n], ShiftKind::Ff);
        let lib_shift = build_shift(n, ShiftKind::Ff).unwrap();
        let (nu1, nu2) = (iso.nu1, iso.nu2);
        for pair in jacobi_eigensystem(&build_jacobi(iso).unwrap()).unwrap() {
            let a = spread(&pair.vector, &iso.w);
            let b = &s * &a;
            let rel = [
                (&u * &a - &b * nu1).norm(),
                (&u * &b - &a * nu2 - &b * ((nu1 - nu2) * pair.lambda)).norm(),
                (a.norm() - 1.0).abs(),
                (b.norm() - 1.0).abs(),
                (a.dotc(&b) - pair.lambda).norm(),
            ];
            worst_pairs = rel.into_iter().fold(worst_pairs, f64::max);
            let pv = build_pair_vectors(&pair.vector, iso, &lib_shift).unwrap();
            worst_lib = worst_lib.max((&pv.a - &a).norm()).max((&pv.b - &b).norm());
        }
        let lifted = full_spectrum_ff(iso).unwrap();
        if lifted.eigen.len() != 2 * n {
            bad.push(format!("n={n}: {} lifted pairs", lifted.eigen.len()));
        }
        for e in &lifted.eigen {
            let r = (&u * &e.vector - &e.vector * e.mu).norm() / e.vector.norm();
            worst_vec = worst_vec.max(r);
            lifted_pairs += 1;
            match e.kind {
                LiftKind::Supplementary => {
                    worst_supp = worst_supp.max(r);
                    supplementary += 1;
                }
                LiftKind::Complement => complement += 1,
                _ => {}
            }
        }
    }
    if supplementary == 0 {
        bad.push("no supplementary eigenvectors exercised".into());
    }
    let pass = bad.is_empty() && worst_pairs <= TOL_PAIRS && worst_supp <= TOL_PAIRS && worst_vec <= TOL_EIGVEC && worst_lib <= TOL_PAIRS;
    Line {
        pass,
        detail: format!(
            "U a = nu1 b, U b = nu2 a + (nu1-nu2) lambda b, |a|=|b|=1, (a,b)=lambda: {worst_pairs:.1e}; \
             supplementary ({supplementary}) {worst_supp:.1e} (tol {TOL_PAIRS:.0e}); library vectors vs definition {worst_lib:.1e}; \
             |U v - mu v| over {lifted_pairs} lifted pairs {worst_vec:.1e} (tol {TOL_EIGVEC:.0e}); \
             {complement} boundary pairs from the complement block{}",
            fmt_bad(&bad)
        ),
    }
}

struct DefectCase {
    coin: String,
    m: usize,
    n: usize,
    formula: Option<u64>,
    formula_label: &'static str,
    powering_ms: Option<u64>,
    powering_ff: Option<u64>,
    routed_agrees: bool,
}

fn defect_convention(found: &mut Vec<Finite>) -> Line {
    let start = Instant::now();
    let limits = Limits { t_max: DEFECT_T_MAX, ..Limits::default() };
    let mut jobs = Vec::new();
    for (name, c) in defect_coins() {
        for n in 2..=20usize {
            for m in 1..n {
                if n % (m + 1) == 0 {
                    jobs.push((name.clone(), c, m, n));
                }
            }
        }
    }
    let cases: Vec<(DefectCase, CoinLayout, PeriodVerdict)> = jobs
        .into_par_iter()
        .map(|(name, c, m, n)| {
            let layout = build_periodic_layout(c, 1, Coin2x2::identity(), m, n).unwrap();
            let v = if m + 1 == n {
                period_one_defect(&c, n, &limits).unwrap()
            } else {
                period_diluted(&c, m, n, &limits).unwrap()
            };
            // the layout route must recognize the pattern (all-identity layouts have none)
            let routed = (c != Coin2x2::identity()).then(|| period(&layout, ShiftKind::Ms, Strategy::Theorem, &limits).unwrap());
            let coins = entries(&layout);
            let case = DefectCase {
                coin: name,
                m,
                n,
                formula: v.period(),
                formula_label: v.outcome_label(),
                powering_ms: oracle_period(&oracle_walk(&coins, ShiftKind::Ms), DEFECT_T_MAX),
                powering_ff: oracle_period(&oracle_walk(&coins, ShiftKind::Ff), DEFECT_T_MAX),
                routed_agrees: routed.is_none_or(|r| r == v),
            };
            (case, layout, v)
        })
        .collect();
    let total = cases.len();
    let mut bad = Vec::new();
    let (mut exact, mut both_unknown, mut ff_match) = (0usize, 0usize, 0usize);
    let mut report = Vec::new();
    for (c, layout, v) in cases {
        match (c.formula, c.powering_ms) {
            (Some(a), Some(b)) if a == b => exact += 1,
            (None, None) => both_unknown += 1,
            _ => bad.push(format!("{} m={} n={}: formula {:?} powering {:?}", c.coin, c.m, c.n, c.formula, c.powering_ms)),
        }
        if !c.routed_agrees {
            bad.push(format!("{} m={} n={}: layout route disagrees with the closed form", c.coin, c.m, c.n));
        }
        ff_match += (c.formula == c.powering_ff) as usize;
        report.push(serde_json::json!({
            "coin": c.coin, "m": c.m, "n": c.n, "formula": c.formula, "formula_outcome": c.formula_label,
            "powering_ms": c.powering_ms, "powering_ff": c.powering_ff,
        }));
        if let Some(f) = Finite::new(format!("[{}:1, I:{}] n={}", c.coin, c.m, c.n), &layout, ShiftKind::Ms, &v) {
            found.push(f);
        }
    }
    // the CLI route for the same family
    let (code, out) = cli(&["period", "--pattern", "C:1,I:2", "--coin-c", "pauli-x", "--n", "6", "--shift", "ms"]);
    if code != 0 || out["T"] != 6 || out["method"] != "theorem" {
        bad.push(format!("cli [pauli-x:1, I:2] n=6: {out}"));
    }
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("defect_convention.json");
    let summary = serde_json::json!({
        "cases": total, "moving_shift_matches": exact + both_unknown, "both_unknown": both_unknown,
        "flip_flop_matches": ff_match, "rows": report,
    });
    std::fs::write(&path, serde_json::to_string_pretty(&summary).unwrap()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    Line {
        pass: bad.is_empty() && secs < BUDGET_DEFECT_S,
        detail: format!(
            "{total} [C:1, I:m] layouts, n <= 20, C in {{I, sigma_x, R(2pi/3), R(2pi/5)}}: closed form = moving-shift powering \
             on {}/{total} ({exact} finite, {both_unknown} with no period up to {DEFECT_T_MAX} either way); \
             flip-flop powering matches {ff_match}/{total}; report {}; {secs:.1}s (budget {BUDGET_DEFECT_S}s){}",
            exact + both_unknown,
            path.display(),
            fmt_bad(&bad)
        ),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn minimality(found: &[Finite]) -> Line {
    let results: Vec<(f64, f64, Option<String>)> = found
        .par_iter()
        .map(|f| {
            let at = identity_gap(&power(&f.matrix, f.period));
            let sep = prime_divisors(f.period)
                .into_iter()
                .map(|p| identity_gap(&power(&f.matrix, f.period / p)))
                .fold(f64::INFINITY, f64::min);
            let lib = cycleqw_core::periodicity::check_minimality(
                &WalkUnitary::from_matrix(f.matrix.nrows() / 2, ShiftKind::Ms, f.matrix.clone()).unwrap(),
                f.period,
                TOL_IDENTITY,
                MIN_SEPARATION,
            );
            let mut problem = None;
            if !lib.passed {
                problem = Some(format!("{}: library minimality check failed {lib:?}", f.label));
            }
            for c in f.certificate.iter().flatten() {
                let exact = Complex64::from_polar(1.0, TAU * c.p as f64 / c.q as f64);
                if gcd(c.p.rem_euclid(c.q as i64) as u64, c.q) != 1 || f.period % c.q != 0 || (c.mu - exact).norm() > TOL_SPECTRUM {
                    problem = Some(format!("{}: unsound certificate {c:?}", f.label));
                }
            }
            (at, sep, problem)
        })
        .collect();
    let worst_at = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let min_sep = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let bad: Vec<String> = results.into_iter().filter_map(|r| r.2).collect();
    let certified = found.iter().filter(|f| f.certificate.is_some()).count();
    Line {
        pass: bad.is_empty() && worst_at <= TOL_IDENTITY && min_sep >= MIN_SEPARATION,
        detail: format!(
            "{} finite verdicts ({certified} with eigenvalue certificates): max|U^T - I| = {worst_at:.1e} (tol {TOL_IDENTITY:.0e}), \
             min over prime p | T of max|U^(T/p) - I| = {min_sep:.3} (need >= {MIN_SEPARATION:.0e}){}",
            found.len(),
            fmt_bad(&bad)
        ),
    }
}

fn fmt_bad(bad: &[String]) -> String {
    if bad.is_empty() {
        return String::new();
    }
    let shown: Vec<&str> = bad.iter().take(5).map(String::as_str).collect();
    format!("; {} problem(s): {}", bad.len(), shown.join(" | "))
}

fn main() {
    // `cargo test -- --list` and filters: this target has no sub-tests to select.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut found = Vec::new();
    let corpus = iso_corpus(&mut seeded(4), 200);
    let criteria: Vec<(&str, Box<dyn FnOnce(&mut Vec<Finite>) -> Line + '_>)> = vec![
        ("1 hadamard-class table", Box::new(hadamard_table)),
        ("2 phase invariance", Box::new(phase_invariance)),
        ("3 ms/ff conjugation", Box::new(|_| conjugation())),
        ("4 jacobi pipeline", Box::new(|_| jacobi_pipeline(&corpus))),
        ("5 vector relations", Box::new(|_| vector_relations(&corpus))),
        ("6 defect convention", Box::new(defect_convention)),
        ("7 certificate minimality", Box::new(minimality_of_all)),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let line = check(&mut found);
        println!(
            "criterion {name}: {} [{:.1}s] {}",
            if line.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            line.detail
        );
        failed += !line.pass as usize;
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}

fn minimality_of_all(found: &mut Vec<Finite>) -> Line {
    minimality(found)
}
