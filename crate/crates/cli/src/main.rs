mod commands;
mod report;
mod source;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cycleqw_core::periodicity::{DEFAULT_ANGLE_TOL, DEFAULT_IDENTITY_TOL, DEFAULT_Q_MAX, DEFAULT_T_MAX};
use cycleqw_core::{Limits, ShiftKind, Strategy};

use report::{ReportEnvelope, RunConfig};
use source::LayoutArgs;

/// Bad invocation or unreadable input (exit code 2).
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cycleqw", version, about = "Spectra and periods of coined quantum walks on cycles")]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "CYCLEQW_THREADS")]
    threads: Option<usize>,
    /// Print only the payload, without the report envelope.
    #[arg(long, global = true)]
    payload_only: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long, default_value = "auto", value_parser = parse_strategy)]
    pub strategy: Strategy,
    /// Largest power tried by the powering search.
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    pub t_max: u64,
    /// Largest denominator accepted for eigenvalue angles.
    #[arg(long, default_value_t = DEFAULT_Q_MAX)]
    pub q_max: u64,
    /// Angle tolerance (radians) for root-of-unity recognition.
    #[arg(long, default_value_t = DEFAULT_ANGLE_TOL)]
    pub tol: f64,
    /// Max-entry distance from the identity accepted by powering.
    #[arg(long, default_value_t = DEFAULT_IDENTITY_TOL)]
    pub identity_tol: f64,
}

impl LimitArgs {
    pub fn limits(&self) -> anyhow::Result<Limits> {
        let l = Limits {
            t_max: self.t_max,
            q_max: self.q_max,
            angle_tol: self.tol,
            identity_tol: self.identity_tol,
        };
        l.validate().map_err(|e| Usage(e.to_string()))?;
        Ok(l)
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: cycleqw_core::Error| e.to_string())
}

fn parse_shift(s: &str) -> Result<ShiftKind, String> {
    s.parse().map_err(|e: cycleqw_core::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumMethod {
    Auto,
    Lift,
    Direct,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues of U, lifted from the Jacobi matrix and computed directly.
    Spectrum {
        #[command(flatten)]
        layout: LayoutArgs,
        #[arg(long, default_value = "ms", value_parser = parse_shift)]
        shift: ShiftKind,
        #[arg(long, value_enum, default_value = "auto")]
        method: SpectrumMethod,
    },
    /// Jacobi matrix of an isospectral layout (moving shift uses the sigma_x conjugate).
    Jacobi {
        #[command(flatten)]
        layout: LayoutArgs,
        #[arg(long, default_value = "ff", value_parser = parse_shift)]
        shift: ShiftKind,
    },
    /// Period T with U^T = I.
    Period {
        #[command(flatten)]
        layout: LayoutArgs,
        #[arg(long, default_value = "ms", value_parser = parse_shift)]
        shift: ShiftKind,
        #[command(flatten)]
        limits: LimitArgs,
        /// Also check that no proper divisor of a finite T is a period.
        #[arg(long)]
        check_minimal: bool,
    },
    /// Periods over a range of n.
    Sweep {
        #[command(flatten)]
        layout: LayoutArgs,
        #[arg(long, default_value = "ms", value_parser = parse_shift)]
        shift: ShiftKind,
        #[command(flatten)]
        limits: LimitArgs,
        /// Inclusive range `a..b`.
        #[arg(long)]
        n_range: String,
    },
    /// Run the invariant corpus.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Force a family to fail (negative control).
        #[arg(long)]
        inject_fault: Vec<String>,
    },
    /// Evolve a state and report the position distribution.
    Evolve {
        #[command(flatten)]
        layout: LayoutArgs,
        #[arg(long, default_value = "ms", value_parser = parse_shift)]
        shift: ShiftKind,
        /// State file `{"n", "amplitudes"}`.
        #[arg(long, conflicts_with = "start")]
        state: Option<PathBuf>,
        /// Basis start `vertex:L|R`.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        steps: u64,
    },
}

/// Payload plus optional CSV rendering; `failed` maps to exit code 1.
pub struct Outcome {
    pub payload: serde_json::Value,
    pub csv: Option<String>,
    pub failed: bool,
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if cli.threads == Some(0) {
        return Err(Usage("--threads must be positive".into()).into());
    }
    let start = Instant::now();
    let mut config = RunConfig {
        command: String::new(),
        layout: None,
        shift: None,
        strategy: None,
        limits: None,
        extra: serde_json::Value::Null,
        format: cli.format.as_str().to_string(),
        output: cli.output.as_ref().map(|p| p.display().to_string()),
    };
    let outcome = match &cli.command {
        Command::Spectrum { layout, shift, method } => {
            config.command = "spectrum".into();
            config.layout = Some(layout.clone());
            config.shift = Some(*shift);
            config.extra = serde_json::json!({ "method": format!("{method:?}").to_lowercase() });
            commands::spectrum(layout, *shift, *method)?
        }
        Command::Jacobi { layout, shift } => {
            config.command = "jacobi".into();
            config.layout = Some(layout.clone());
            config.shift = Some(*shift);
            commands::jacobi(layout, *shift)?
        }
        Command::Period { layout, shift, limits, check_minimal } => {
            let l = limits.limits()?;
            config.command = "period".into();
            config.layout = Some(layout.clone());
            config.shift = Some(*shift);
            config.strategy = Some(limits.strategy);
            config.limits = Some(l);
            config.extra = serde_json::json!({ "check_minimal": check_minimal });
            commands::period(layout, *shift, limits.strategy, &l, *check_minimal)?
        }
        Command::Sweep { layout, shift, limits, n_range } => {
            let l = limits.limits()?;
            let range = commands::parse_range(n_range)?;
            config.command = "sweep".into();
            config.layout = Some(layout.clone());
            config.shift = Some(*shift);
            config.strategy = Some(limits.strategy);
            config.limits = Some(l);
            config.extra = serde_json::json!({ "n_range": [range.start(), range.end()] });
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.threads.unwrap_or(0))
                .build()
                .context("building the worker pool")?;
            pool.install(|| commands::sweep(layout, *shift, limits.strategy, &l, range))?
        }
        Command::Verify { seed, cases, inject_fault } => {
            config.command = "verify".into();
            config.extra = serde_json::json!({ "seed": seed, "cases": cases, "inject_fault": inject_fault });
            commands::verify(*seed, *cases, inject_fault)?
        }
        Command::Evolve { layout, shift, state, start, steps } => {
            config.command = "evolve".into();
            config.layout = Some(layout.clone());
            config.shift = Some(*shift);
            config.extra = serde_json::json!({
                "state": state.as_ref().map(|p| p.display().to_string()),
                "start": start,
                "steps": steps,
            });
            commands::evolve(layout, *shift, state.as_deref(), start.as_deref(), *steps)?
        }
    };
    let elapsed = start.elapsed().as_secs_f64();

    let text = match cli.format {
        Format::Csv => outcome
            .csv
            .ok_or_else(|| Usage(format!("{} has no CSV form; use --format json", config.command)))?,
        Format::Json if cli.payload_only => serde_json::to_string_pretty(&outcome.payload)? + "\n",
        Format::Json => serde_json::to_string_pretty(&ReportEnvelope::new(config, elapsed, outcome.payload))? + "\n",
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(outcome.failed)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use cycleqw_core::Error as E;
    for cause in err.chain() {
        if cause.is::<Usage>() || cause.is::<serde_json::Error>() || cause.is::<std::io::Error>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::EigenNonConvergence
                | E::EigenvalueOutOfRange { .. }
                | E::DegenerateSupplementary { .. }
                | E::LcmOverflow
                | E::BoundaryLambda { .. }
                | E::NotBoundary { .. } => 1,
                _ => 2,
            };
        }
    }
    1
}

/// Error chain joined by `: `, skipping causes already quoted by their parent.
pub fn describe(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let msg = cause.to_string();
        if out.contains(&msg) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&msg);
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
