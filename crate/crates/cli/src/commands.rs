use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::Path;
use std::time::Instant;

use cycleqw_core::coin::{arg_2pi, check_isospectral, conjugate_layout_sigma_x};
use cycleqw_core::io::{distribution_csv, format_float, read_state};
use cycleqw_core::jacobi::{build_jacobi, charpoly_by_recurrence, class_key, jacobi_eigensystem};
use cycleqw_core::lift::full_spectrum_ff;
use cycleqw_core::linalg::match_spectra;
use cycleqw_core::periodicity::{check_minimality, MIN_SEPARATION};
use cycleqw_core::verify::{run_corpus, Family, VerifyConfig};
use cycleqw_core::walk::{build_evolution, evolve as evolve_state, position_distribution};
use cycleqw_core::{period as compute_period, CoinLayout, Error, Limits, PeriodVerdict, SearchBound, ShiftKind, StateVector, Strategy};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::source::LayoutArgs;
use crate::{Outcome, SpectrumMethod, Usage};

const ISOSPECTRAL_TOL: f64 = 1e-10;

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// The flip-flop layout whose spectrum equals that of `U(layout, shift)`.
fn ff_equivalent(layout: &CoinLayout, shift: ShiftKind) -> CoinLayout {
    match shift {
        ShiftKind::Ff => layout.clone(),
        ShiftKind::Ms => conjugate_layout_sigma_x(layout),
    }
}

fn sorted_by_arg(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| arg_2pi(*a).total_cmp(&arg_2pi(*b)));
    v
}

#[derive(Serialize)]
struct LiftedRow {
    mu: [f64; 2],
    source_lambda: f64,
    kind: &'static str,
}

pub fn spectrum(args: &LayoutArgs, shift: ShiftKind, method: SpectrumMethod) -> anyhow::Result<Outcome> {
    let layout = args.resolve()?;
    let iso = check_isospectral(&ff_equivalent(&layout, shift), ISOSPECTRAL_TOL);
    let lifted = match (method, &iso) {
        (SpectrumMethod::Direct, _) => None,
        (SpectrumMethod::Lift, None) => return Err(Error::NotIsospectral.into()),
        (_, Some(iso)) => Some(full_spectrum_ff(iso)?),
        (SpectrumMethod::Auto, None) => None,
    };
    let direct = sorted_by_arg(build_evolution(&layout, shift)?.eigenvalues()?);
    let residual = lifted.as_ref().map(|l| match_spectra(&l.values(), &direct).max_residual);

    let rows: Option<Vec<LiftedRow>> = lifted.as_ref().map(|l| {
        l.eigen
            .iter()
            .map(|e| LiftedRow {
                mu: pair(e.mu),
                source_lambda: e.source_lambda,
                kind: e.kind.as_str(),
            })
            .collect()
    });
    let mut csv = String::from("source,re,im,source_lambda,kind\n");
    for r in rows.iter().flatten() {
        let _ = writeln!(
            csv,
            "lift,{},{},{},{}",
            format_float(r.mu[0]),
            format_float(r.mu[1]),
            format_float(r.source_lambda),
            r.kind
        );
    }
    for z in &direct {
        let _ = writeln!(csv, "direct,{},{},,", format_float(z.re), format_float(z.im));
    }
    let payload = json!({
        "n": layout.n(),
        "shift": shift,
        "isospectral": iso.is_some(),
        "lifted": rows,
        "boundary_count": lifted.as_ref().map(|l| l.boundary_count),
        "direct": direct.iter().copied().map(pair).collect::<Vec<_>>(),
        "match_residual": residual,
    });
    Ok(Outcome {
        payload,
        csv: Some(csv),
        failed: false,
    })
}

pub fn jacobi(args: &LayoutArgs, shift: ShiftKind) -> anyhow::Result<Outcome> {
    let layout = args.resolve()?;
    let iso = check_isospectral(&ff_equivalent(&layout, shift), ISOSPECTRAL_TOL).ok_or(Error::NotIsospectral)?;
    let j = build_jacobi(&iso)?;
    let eigenvalues: Vec<f64> = jacobi_eigensystem(&j)?.into_iter().map(|e| e.lambda).collect();
    let charpoly = charpoly_by_recurrence(&iso)?;
    let triplets = j.triplets();

    let mut csv = String::from("i,j,re,im\n");
    for (r, c, z) in &triplets {
        let _ = writeln!(csv, "{r},{c},{},{}", format_float(z.re), format_float(z.im));
    }
    let payload = json!({
        "n": layout.n(),
        "shift": shift,
        "operator": match shift {
            ShiftKind::Ff => "flip-flop walk of the layout",
            ShiftKind::Ms => "flip-flop walk of the sigma_x-conjugated layout",
        },
        "nu1": pair(iso.nu1),
        "nu2": pair(iso.nu2),
        "entries": triplets.iter().map(|(r, c, z)| json!([r, c, pair(*z)])).collect::<Vec<_>>(),
        "eigenvalues": eigenvalues,
        "charpoly": charpoly.coeffs,
        "class_key": class_key(&iso),
    });
    Ok(Outcome {
        payload,
        csv: Some(csv),
        failed: false,
    })
}

fn verdict_json(v: &PeriodVerdict) -> Value {
    let mut out = json!({
        "outcome": v.outcome_label(),
        "method": v.method().as_str(),
    });
    let obj = out.as_object_mut().expect("object");
    match v {
        PeriodVerdict::Finite { period, certificate, .. } => {
            obj.insert("T".into(), json!(period));
            let certs: Vec<Value> = certificate
                .iter()
                .flatten()
                .map(|c| json!({"mu": pair(c.mu), "p": c.p, "q": c.q, "residual": c.residual()}))
                .collect();
            obj.insert("certificate".into(), Value::Array(certs));
        }
        PeriodVerdict::NoPeriodUpTo { bound, reason, .. } => {
            if let SearchBound::Steps(b) = bound {
                obj.insert("bound".into(), json!(b));
            }
            obj.insert("certificate".into(), json!([]));
            obj.insert("reason".into(), json!(reason));
        }
    }
    out
}

fn csv_row(n: usize, v: &PeriodVerdict) -> String {
    let t = v.period().map(|t| t.to_string()).unwrap_or_default();
    format!("{n},{},{t},{}", v.outcome_label(), v.method().as_str())
}

pub fn period(
    args: &LayoutArgs,
    shift: ShiftKind,
    strategy: Strategy,
    limits: &Limits,
    check_minimal: bool,
) -> anyhow::Result<Outcome> {
    let layout = args.resolve()?;
    let v = compute_period(&layout, shift, strategy, limits)?;
    let mut payload = verdict_json(&v);
    let obj = payload.as_object_mut().expect("object");
    obj.insert("n".into(), json!(layout.n()));
    obj.insert("shift".into(), json!(shift));
    let mut failed = false;
    if let (true, Some(t)) = (check_minimal, v.period()) {
        let u = build_evolution(&layout, shift)?;
        let mc = check_minimality(&u, t, limits.identity_tol, MIN_SEPARATION);
        failed = !mc.passed;
        obj.insert("minimality".into(), serde_json::to_value(&mc)?);
    }
    Ok(Outcome {
        payload,
        csv: Some(format!("n,outcome,T,method\n{}\n", csv_row(layout.n(), &v))),
        failed,
    })
}

/// `a..b` or `a..=b`, both inclusive.
pub fn parse_range(s: &str) -> anyhow::Result<RangeInclusive<usize>> {
    let bad = || Usage(format!("--n-range '{s}' must look like a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(Usage(format!("--n-range '{s}' is empty")).into());
    }
    Ok(a..=b)
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    #[serde(flatten)]
    verdict: Value,
    seconds: f64,
}

pub fn sweep(
    args: &LayoutArgs,
    shift: ShiftKind,
    strategy: Strategy,
    limits: &Limits,
    range: RangeInclusive<usize>,
) -> anyhow::Result<Outcome> {
    if args.is_file() {
        return Err(Usage("sweep needs a named coin or a pattern, not a layout file".into()).into());
    }
    if args.n.is_some() {
        return Err(Usage("sweep takes n from --n-range; drop --n".into()).into());
    }
    let ns: Vec<usize> = range.collect();
    let rows: Vec<(SweepRow, String)> = ns
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let result = args
                .resolve_with(Some(n))
                .and_then(|layout| Ok(compute_period(&layout, shift, strategy, limits)?));
            let seconds = start.elapsed().as_secs_f64();
            match result {
                Ok(v) => {
                    let csv = format!("{},{}", csv_row(n, &v), format_float(seconds));
                    (SweepRow { n, verdict: verdict_json(&v), seconds }, csv)
                }
                Err(e) => {
                    let verdict = json!({"outcome": "error", "error": crate::describe(&e)});
                    (SweepRow { n, verdict, seconds }, format!("{n},error,,,{}", format_float(seconds)))
                }
            }
        })
        .collect();
    let mut csv = String::from("n,outcome,T,method,seconds\n");
    for (_, line) in &rows {
        csv.push_str(line);
        csv.push('\n');
    }
    let errors = rows.iter().filter(|(r, _)| r.verdict["outcome"] == "error").count();
    let payload = json!({
        "shift": shift,
        "rows": rows.into_iter().map(|(r, _)| r).collect::<Vec<_>>(),
        "error_rows": errors,
    });
    Ok(Outcome {
        payload,
        csv: Some(csv),
        failed: false,
    })
}

pub fn verify(seed: u64, cases: usize, inject_fault: &[String]) -> anyhow::Result<Outcome> {
    if cases == 0 {
        return Err(Usage("--cases must be positive".into()).into());
    }
    let inject_fault = inject_fault
        .iter()
        .map(|name| {
            Family::parse(name).ok_or_else(|| {
                let known: Vec<&str> = Family::ALL.iter().map(|f| f.as_str()).collect();
                Usage(format!("unknown family '{name}' (known: {})", known.join(", ")))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = run_corpus(&VerifyConfig { seed, cases, inject_fault })?;
    let mut csv = String::from("family,cases,worst,tolerance,passed\n");
    for f in &report.families {
        eprintln!(
            "{:<18} {:>6} worst {:.3e} tol {:.1e} {}",
            f.family.as_str(),
            f.cases,
            f.worst,
            f.tolerance,
            if f.passed { "PASS" } else { "FAIL" }
        );
        for note in f.notes.iter().take(3) {
            eprintln!("    {note}");
        }
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            f.family.as_str(),
            f.cases,
            format_float(f.worst),
            format_float(f.tolerance),
            f.passed
        );
    }
    let failed = !report.all_passed();
    let mut payload = serde_json::to_value(&report)?;
    payload["passed"] = json!(!failed);
    Ok(Outcome {
        payload,
        csv: Some(csv),
        failed,
    })
}

fn parse_start(s: &str, n: usize) -> anyhow::Result<StateVector> {
    let bad = || Usage(format!("--start '{s}' must look like vertex:L or vertex:R"));
    let (v, c) = s.split_once(':').ok_or_else(bad)?;
    let v: usize = v.trim().parse().map_err(|_| bad())?;
    let chirality = match c.trim() {
        "L" | "l" => 0,
        "R" | "r" => 1,
        _ => return Err(bad().into()),
    };
    if v >= n {
        return Err(Usage(format!("start vertex {v} is outside 0..{n}")).into());
    }
    Ok(StateVector::basis(n, v, chirality)?)
}

pub fn evolve(
    args: &LayoutArgs,
    shift: ShiftKind,
    state: Option<&Path>,
    start: Option<&str>,
    steps: u64,
) -> anyhow::Result<Outcome> {
    let layout = args.resolve()?;
    let psi = match (state, start) {
        (Some(path), None) => read_state(path)?,
        (None, Some(s)) => parse_start(s, layout.n())?,
        _ => return Err(Usage("give exactly one of --state or --start".into()).into()),
    };
    let u = build_evolution(&layout, shift)?;
    let out = evolve_state(&u, &psi, steps)?;
    let dist = position_distribution(&out);
    let payload = json!({
        "n": layout.n(),
        "shift": shift,
        "steps": steps,
        "norm": out.norm(),
        "distribution": dist,
    });
    Ok(Outcome {
        payload,
        csv: Some(distribution_csv(&dist)),
        failed: false,
    })
}
