//! Seeded invariant corpus: each family reports its worst residual against a
//! tolerance.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::{conjugate_layout_sigma_x, Coin2x2, CoinLayout, IsoLayout};
use crate::error::Result;
use crate::jacobi::{build_jacobi, charpoly_by_recurrence, jacobi_eigensystem};
use crate::lift::{build_pair_vectors, full_spectrum_ff, LiftKind};
use crate::linalg::{self, match_spectra};
use crate::periodicity::{
    check_minimality, convention_report, period, walk_spectrum, Limits, Strategy, MIN_SEPARATION,
};
use crate::sample::{self, SampleRng};
use crate::verdict::PeriodVerdict;
use crate::walk::{build_evolution, build_shift, ms_ff_conjugation_residual, ShiftKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Conjugation,
    JacobiRange,
    Circulant,
    Charpoly,
    PairRelations,
    LiftSpectrum,
    LiftEigenvectors,
    PhaseInvariance,
    PeriodAgreement,
    DefectConvention,
    Minimality,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::Conjugation,
        Family::JacobiRange,
        Family::Circulant,
        Family::Charpoly,
        Family::PairRelations,
        Family::LiftSpectrum,
        Family::LiftEigenvectors,
        Family::PhaseInvariance,
        Family::PeriodAgreement,
        Family::DefectConvention,
        Family::Minimality,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Conjugation => "conjugation",
            Family::JacobiRange => "jacobi-range",
            Family::Circulant => "circulant",
            Family::Charpoly => "charpoly",
            Family::PairRelations => "pair-relations",
            Family::LiftSpectrum => "lift-spectrum",
            Family::LiftEigenvectors => "lift-eigenvectors",
            Family::PhaseInvariance => "phase-invariance",
            Family::PeriodAgreement => "period-agreement",
            Family::DefectConvention => "defect-convention",
            Family::Minimality => "minimality",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.as_str() == s)
    }

    /// Default tolerance. Period families count mismatches, so theirs is 0.
    pub fn tolerance(self) -> f64 {
        match self {
            Family::Conjugation => 1e-12,
            Family::JacobiRange | Family::Circulant => 1e-10,
            Family::PairRelations => 1e-9,
            Family::Charpoly | Family::LiftSpectrum | Family::LiftEigenvectors | Family::PhaseInvariance => 1e-8,
            Family::PeriodAgreement | Family::DefectConvention | Family::Minimality => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: Family,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub cases: usize,
    /// Families whose tolerance is replaced by `-1` so that they must fail.
    #[serde(default)]
    pub inject_fault: Vec<Family>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            cases: 100,
            inject_fault: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub cases: usize,
    pub families: Vec<FamilyReport>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.families.iter().all(|f| f.passed)
    }
}

/// Running worst-case over a family.
#[derive(Debug, Clone)]
pub struct Tally {
    family: Family,
    cases: usize,
    worst: f64,
    notes: Vec<String>,
}

impl Tally {
    pub fn new(family: Family) -> Self {
        Tally {
            family,
            cases: 0,
            worst: 0.0,
            notes: Vec::new(),
        }
    }

    pub fn record(&mut self, residual: f64) {
        self.cases += 1;
        // NaN must not hide behind max()
        self.worst = if residual.is_nan() { f64::INFINITY } else { self.worst.max(residual) };
    }

    /// Counts `ok = false` as one mismatch.
    pub fn check(&mut self, ok: bool, note: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.worst += 1.0;
            self.notes.push(note());
        }
    }

    pub fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    pub fn finish(self, tolerance: f64) -> FamilyReport {
        FamilyReport {
            family: self.family,
            cases: self.cases,
            worst: self.worst,
            tolerance,
            passed: self.worst <= tolerance,
            notes: self.notes,
        }
    }
}

fn rng_for(seed: u64, family: Family) -> SampleRng {
    sample::seeded(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ family as u64)
}

/// Isospectral corpus: random layouts, `n` cycling through `3..=12`, every
/// fourth case engineered to contain `lambda = +-1`.
pub fn iso_corpus(rng: &mut SampleRng, cases: usize) -> Vec<IsoLayout> {
    (0..cases)
        .map(|k| {
            let n = 3 + k % 10;
            match k % 8 {
                3 => sample::boundary_iso_layout(rng, n),
                7 => sample::inhomogeneous_boundary_layout(rng, n),
                _ => sample::random_iso_layout(rng, n),
            }
        })
        .collect()
}

pub fn check_conjugation(rng: &mut SampleRng, cases: usize) -> Result<(Tally, Tally)> {
    let mut residual = Tally::new(Family::Conjugation);
    let mut spectra = Tally::new(Family::LiftSpectrum);
    for k in 0..cases {
        let n = 2 + k % 9;
        let layout = sample::random_layout(rng, n);
        residual.record(ms_ff_conjugation_residual(&layout)?);
        let ff = build_evolution(&layout, ShiftKind::Ff)?.eigenvalues()?;
        let ms = build_evolution(&conjugate_layout_sigma_x(&layout), ShiftKind::Ms)?.eigenvalues()?;
        spectra.record(match_spectra(&ff, &ms).max_residual);
    }
    Ok((residual, spectra))
}

pub struct JacobiTallies {
    pub range: Tally,
    pub charpoly: Tally,
    pub pairs: Tally,
    pub spectrum: Tally,
    pub eigvecs: Tally,
}

pub fn check_jacobi_pipeline(corpus: &[IsoLayout]) -> Result<JacobiTallies> {
    let mut t = JacobiTallies {
        range: Tally::new(Family::JacobiRange),
        charpoly: Tally::new(Family::Charpoly),
        pairs: Tally::new(Family::PairRelations),
        spectrum: Tally::new(Family::LiftSpectrum),
        eigvecs: Tally::new(Family::LiftEigenvectors),
    };
    let mut complement = 0usize;
    for iso in corpus {
        let n = iso.n();
        let jacobi = build_jacobi(iso)?;
        let (raw, _) = linalg::hermitian_eigen(&jacobi.to_dense())?;
        t.range.record(raw.iter().map(|l| (l.abs() - 1.0).max(0.0)).fold(0.0, f64::max));

        let roots = charpoly_by_recurrence(iso)?.roots()?;
        let worst_root = roots
            .iter()
            .zip(&raw)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        t.charpoly.record(worst_root);

        let shift = build_shift(n, ShiftKind::Ff)?;
        let u = build_evolution(&iso.to_layout(), ShiftKind::Ff)?;
        for pair in jacobi_eigensystem(&jacobi)? {
            let pv = build_pair_vectors(&pair.vector, iso, &shift)?;
            let ua = u.apply(&pv.a) - pv.b.map(|z| z * iso.nu1);
            let ub = u.apply(&pv.b) - pv.a.map(|z| z * iso.nu2) - pv.b.map(|z| z * ((iso.nu1 - iso.nu2) * pair.lambda));
            let ua2 = u.apply(&pv.a2) - pv.b2.map(|z| z * iso.nu2);
            let overlap = (linalg::inner(&pv.a, &pv.b) - pair.lambda).norm();
            t.pairs.record(
                [linalg::vec_norm(&ua), linalg::vec_norm(&ub), linalg::vec_norm(&ua2), overlap]
                    .into_iter()
                    .fold(0.0, f64::max),
            );
        }

        let lifted = full_spectrum_ff(iso)?;
        t.spectrum.record(match_spectra(&lifted.values(), &u.eigenvalues()?).max_residual);
        for e in &lifted.eigen {
            t.eigvecs.record(e.residual(&u));
            if e.kind == LiftKind::Supplementary {
                t.pairs.record(e.residual(&u));
            }
        }
        if lifted.eigen.iter().any(|e| e.kind == LiftKind::Complement) {
            complement += 1;
        }
    }
    t.eigvecs
        .note(format!("{complement} layout(s) needed the complement fallback at lambda = +-1"));
    Ok(t)
}

/// Homogeneous layouts: `J` is circulant with eigenvalues `2 Re(c e^{2 pi i k/n})`,
/// `c` the common link; for `H sigma_x` that is `sin(2 pi k / n)`.
pub fn check_circulant(rng: &mut SampleRng, cases: usize) -> Result<Tally> {
    let mut tally = Tally::new(Family::Circulant);
    let h = crate::coin::check_isospectral(
        &CoinLayout::homogeneous(Coin2x2::hadamard().times_sigma_x(), 1)?,
        1e-10,
    )
    .expect("single site");
    for k in 0..cases.max(10) {
        let n = 3 + k % 10;
        let iso = if k < 10 {
            IsoLayout::from_spinors(h.nu1, h.nu2, vec![h.w[0]; n])?
        } else {
            let w = sample::random_spinor(rng);
            IsoLayout::from_spinors(h.nu1, h.nu2, vec![w; n])?
        };
        let jacobi = build_jacobi(&iso)?;
        let (raw, _) = linalg::hermitian_eigen(&jacobi.to_dense())?;
        let c = jacobi.links()[0];
        let mut expected: Vec<f64> = (0..n)
            .map(|j| 2.0 * (c * Complex64::from_polar(1.0, TAU * j as f64 / n as f64)).re)
            .collect();
        expected.sort_by(f64::total_cmp);
        let mut worst = raw.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if k < 10 {
            let mut sines: Vec<f64> = (0..n).map(|j| (TAU * j as f64 / n as f64).sin()).collect();
            sines.sort_by(f64::total_cmp);
            worst = worst.max(raw.iter().zip(&sines).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
        tally.record(worst);
    }
    Ok(tally)
}

/// Hadamard-class phase perturbations with full-turn phase sums keep the
/// moving-shift spectrum and period.
pub fn check_phase_invariance(rng: &mut SampleRng, cases: usize, limits: &Limits) -> Result<(Tally, Tally)> {
    let mut spectra = Tally::new(Family::PhaseInvariance);
    let mut periods = Tally::new(Family::PeriodAgreement);
    for n in [2usize, 4, 6, 8] {
        let base = sample::hadamard_phase_layout(&vec![0.0; n]);
        let (base_spec, _) = walk_spectrum(&base, ShiftKind::Ms)?;
        let base_period = period(&base, ShiftKind::Ms, Strategy::Eigen, limits)?;
        for _ in 0..cases {
            let phases = sample::phases_summing_to_full_turns(rng, n);
            let layout = sample::hadamard_phase_layout(&phases);
            let (spec, _) = walk_spectrum(&layout, ShiftKind::Ms)?;
            spectra.record(match_spectra(&spec, &base_spec).max_residual);
            let v = period(&layout, ShiftKind::Ms, Strategy::Eigen, limits)?;
            periods.check(v.period() == base_period.period(), || {
                format!("n={n} phases {phases:?}: {:?} vs {:?}", v.period(), base_period.period())
            });
        }
    }
    Ok((spectra, periods))
}

/// The coins used for the `[C:1, I:m]` corpus.
pub fn defect_coins() -> Vec<(String, Coin2x2)> {
    vec![
        ("identity".into(), Coin2x2::identity()),
        ("pauli-x".into(), Coin2x2::pauli_x()),
        ("rotation(2pi/3)".into(), Coin2x2::rotation(TAU / 3.0)),
        ("rotation(2pi/5)".into(), Coin2x2::rotation(TAU / 5.0)),
    ]
}

/// Closed forms vs powering for `[C:1, I:m]`, `n <= n_max`. Mismatches under
/// the moving shift count as failures; the flip-flop comparison is reported.
pub fn check_defect_convention(n_max: usize, limits: &Limits) -> Result<(Tally, Vec<crate::periodicity::ConventionReport>)> {
    let mut tally = Tally::new(Family::DefectConvention);
    let mut reports = Vec::new();
    let (mut ff_match, mut total) = (0usize, 0usize);
    for (name, c) in defect_coins() {
        for n in 2..=n_max {
            for m in 1..n {
                if n % (m + 1) != 0 {
                    continue;
                }
                let r = convention_report(&c, m, n, limits)?;
                tally.check(r.matches_ms(), || {
                    format!("{name} m={m} n={n}: formula {:?}, moving-shift powering {:?}", r.formula, r.powering_ms)
                });
                total += 1;
                ff_match += r.matches_ff() as usize;
                reports.push(r);
            }
        }
    }
    tally.note(format!(
        "formula matches moving-shift powering on {}/{total}, flip-flop powering on {ff_match}/{total}",
        total - tally.worst as usize
    ));
    Ok((tally, reports))
}

/// Eigen-orders and powering agree on the Hadamard walk, `n = 2..=10`, and on
/// the identity walk under both shifts; every finite verdict is minimal.
pub fn check_period_agreement(limits: &Limits) -> Result<(Tally, Tally)> {
    let mut agree = Tally::new(Family::PeriodAgreement);
    let mut minimal = Tally::new(Family::Minimality);
    let mut layouts: Vec<(String, CoinLayout, ShiftKind)> = Vec::new();
    for n in 2..=10 {
        layouts.push((format!("hadamard n={n}"), CoinLayout::homogeneous(Coin2x2::hadamard(), n)?, ShiftKind::Ms));
        layouts.push((format!("hadamard ff n={n}"), CoinLayout::homogeneous(Coin2x2::hadamard(), n)?, ShiftKind::Ff));
    }
    for n in [2, 5, 7] {
        for shift in [ShiftKind::Ms, ShiftKind::Ff] {
            layouts.push((format!("identity {shift} n={n}"), CoinLayout::homogeneous(Coin2x2::identity(), n)?, shift));
        }
    }
    for (name, c) in defect_coins() {
        for (m, n) in [(1, 4), (2, 6), (3, 8), (5, 6)] {
            let layout = crate::coin::build_periodic_layout(c, 1, Coin2x2::identity(), m, n)?;
            layouts.push((format!("[{name}:1, I:{m}] n={n}"), layout, ShiftKind::Ms));
        }
    }
    for (name, layout, shift) in layouts {
        let verdicts: Vec<PeriodVerdict> = [Strategy::Auto, Strategy::Eigen, Strategy::Powering]
            .into_iter()
            .map(|s| period(&layout, shift, s, limits))
            .collect::<Result<_>>()?;
        let finite: Vec<u64> = verdicts.iter().filter_map(PeriodVerdict::period).collect();
        agree.check(finite.windows(2).all(|w| w[0] == w[1]), || format!("{name}: {finite:?}"));
        if let Some(&t) = finite.first() {
            let u = build_evolution(&layout, shift)?;
            let mc = check_minimality(&u, t, limits.identity_tol, MIN_SEPARATION);
            minimal.check(mc.passed, || format!("{name}: T={t} {mc:?}"));
        }
    }
    Ok((agree, minimal))
}

pub fn run_corpus(config: &VerifyConfig) -> Result<VerifyReport> {
    let limits = Limits {
        t_max: 10_000,
        ..Limits::default()
    };
    let seed = config.seed;
    let cases = config.cases;
    let mut tallies = Vec::new();

    let (conj, conj_spec) = check_conjugation(&mut rng_for(seed, Family::Conjugation), cases)?;
    tallies.push(conj);

    let corpus = iso_corpus(&mut rng_for(seed, Family::LiftSpectrum), cases);
    let jt = check_jacobi_pipeline(&corpus)?;
    tallies.push(jt.range);
    tallies.push(check_circulant(&mut rng_for(seed, Family::Circulant), cases)?);
    tallies.push(jt.charpoly);
    tallies.push(jt.pairs);
    let mut spectrum = jt.spectrum;
    spectrum.record(conj_spec.worst);
    tallies.push(spectrum);
    tallies.push(jt.eigvecs);

    let (phase_spec, phase_periods) =
        check_phase_invariance(&mut rng_for(seed, Family::PhaseInvariance), cases.div_ceil(4), &limits)?;
    tallies.push(phase_spec);

    let (mut agree, minimal) = check_period_agreement(&limits)?;
    agree.worst += phase_periods.worst;
    agree.cases += phase_periods.cases;
    agree.notes.extend(phase_periods.notes);
    tallies.push(agree);

    let (defect, _) = check_defect_convention(20, &Limits { t_max: 2_000, ..limits })?;
    tallies.push(defect);
    tallies.push(minimal);

    let families = tallies
        .into_iter()
        .map(|t| {
            let tol = if config.inject_fault.contains(&t.family) { -1.0 } else { t.family.tolerance() };
            t.finish(tol)
        })
        .collect();
    Ok(VerifyReport { seed, cases, families })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_corpus_passes_and_is_deterministic() {
        let cfg = VerifyConfig {
            seed: 7,
            cases: 24,
            inject_fault: vec![],
        };
        let a = run_corpus(&cfg).unwrap();
        for f in &a.families {
            assert!(f.passed, "{:?}", f);
        }
        let b = run_corpus(&cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn injected_fault_fails() {
        let cfg = VerifyConfig {
            seed: 1,
            cases: 8,
            inject_fault: vec![Family::Charpoly],
        };
        let r = run_corpus(&cfg).unwrap();
        assert!(!r.all_passed());
        let failed: Vec<Family> = r.families.iter().filter(|f| !f.passed).map(|f| f.family).collect();
        assert_eq!(failed, vec![Family::Charpoly]);
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(Family::parse(f.as_str()), Some(f));
        }
        assert_eq!(Family::parse("nope"), None);
    }
}
