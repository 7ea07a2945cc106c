mod cli;
mod manifest;

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use serde::Serialize;
use serde_json::value::RawValue;
use serde_json::{json, Map, Value};
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use catsim::io::{self, StateFile};
use catsim::modes::{linspace, partial_trace_pure, quadrature_pdf, quadrature_pdf_mixed, trapezoid, wigner, PhaseSpaceGrid};
use catsim::protocols::{self, selftest, Precision, ProtocolConfig, SweepRange};
use catsim::fock::{DEFAULT_CUTOFF, DEFAULT_TWO_MODE_CUTOFF};
use catsim::{CatsimError, FockSpace, Mode};

use cli::{Cli, Command, GlobalArgs, ModeArg};
use manifest::{write_manifest, RunManifest};

/// Largest closed-form vs simulation gap accepted by `fig3`.
const FIG3_CHECK_TOLERANCE: f64 = 1e-6;

/// A verification step inside a command failed; maps to the numeric exit code.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<CheckFailed>().is_some() {
        return 3;
    }
    match err.chain().find_map(|e| e.downcast_ref::<CatsimError>()) {
        Some(CatsimError::ImpossibleOutcome(_)) => 4,
        Some(
            CatsimError::Truncation(_)
            | CatsimError::Leakage { .. }
            | CatsimError::ZeroState(_)
            | CatsimError::DegenerateAmplitude(_)
            | CatsimError::NoConvergence { .. },
        ) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// What a command produced: the bytes of its output file plus summary
/// values for the manifest.
struct Outcome {
    bytes: Vec<u8>,
    summary: Map<String, Value>,
    /// Set when the output was written but a verification step failed.
    failure: Option<String>,
}

impl Outcome {
    fn new(bytes: impl Into<Vec<u8>>) -> Self {
        Self { bytes: bytes.into(), summary: Map::new(), failure: None }
    }

    fn note(mut self, key: &str, value: impl Serialize) -> Self {
        self.summary.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }
}

#[derive(Serialize)]
struct Parameters<'a> {
    #[serde(flatten)]
    global: &'a GlobalArgs,
    #[serde(flatten)]
    command: &'a Command,
}

fn default_output(command: &Command) -> &'static str {
    match command {
        Command::Herald(_) => "herald.json",
        Command::Fig2(_) => "fig2.csv",
        Command::Fig3(_) => "fig3.csv",
        Command::Ecs(_) => "ecs.json",
        Command::Logical(_) => "logical.json",
        Command::Noon(_) => "noon.csv",
        Command::Wigner(_) => "wigner.csv",
        Command::Quadrature(_) => "quadrature.csv",
        Command::Selftest => "selftest.csv",
    }
}

fn command_name(command: &Command) -> &'static str {
    let name = default_output(command);
    &name[..name.find('.').unwrap_or(name.len())]
}

fn default_cutoff(command: &Command) -> usize {
    match command {
        Command::Ecs(_) | Command::Logical(_) | Command::Noon(_) => DEFAULT_TWO_MODE_CUTOFF,
        _ => DEFAULT_CUTOFF,
    }
}

fn run(cli: Cli) -> Result<()> {
    let start = Instant::now();
    let mut global = cli.global.clone();
    global.cutoff = Some(global.cutoff.unwrap_or_else(|| default_cutoff(&cli.command)));
    let out = global.out.clone().unwrap_or_else(|| PathBuf::from(default_output(&cli.command)));
    global.out = Some(out.clone());

    let outcome = execute(&cli.command, &global)?;

    let to_stdout = out.as_os_str() == "-";
    if to_stdout {
        std::io::stdout().lock().write_all(&outcome.bytes).context("writing to stdout")?;
    } else {
        std::fs::write(&out, &outcome.bytes).with_context(|| format!("writing {}", out.display()))?;
        let parameters = Parameters { global: &global, command: &cli.command };
        write_manifest(
            &out,
            &RunManifest {
                command: command_name(&cli.command),
                parameters: &parameters,
                tool_version: concat!("catsim ", env!("CARGO_PKG_VERSION")),
                outputs: vec![out.display().to_string()],
                duration_seconds: start.elapsed().as_secs_f64(),
                summary: outcome.summary,
            },
        )?;
    }
    match outcome.failure {
        Some(msg) => Err(CheckFailed(msg).into()),
        None => Ok(()),
    }
}

fn execute(command: &Command, global: &GlobalArgs) -> Result<Outcome> {
    let cutoff = global.cutoff.expect("resolved before dispatch");
    let tolerance = global.tolerance;
    match command {
        Command::Herald(a) => {
            let cfg = ProtocolConfig::new(a.xi, a.transmission, a.alpha)
                .with_eta_det(a.eta_det)
                .with_cutoff(cutoff)
                .with_tail_tolerance(tolerance);
            let report = protocols::run_cat_protocol(&cfg)?;
            eprintln!(
                "fidelity {:.6} at alpha {}, herald probability {:.6e}; best alpha {:.4} gives {:.6}",
                report.fidelity, a.alpha, report.herald_probability, report.alpha_star, report.fidelity_star
            );
            Ok(Outcome::new(io::cat_report_json(&report))
                .note("fidelity", report.fidelity)
                .note("herald_probability", report.herald_probability))
        }
        Command::Fig2(a) => {
            let precision = Precision::new(cutoff, tolerance)?;
            let range = SweepRange::new(a.xi_min, a.xi_max, a.xi_steps)?;
            let rows = protocols::sweep_fig2(&a.alphas, range, &precision)?;
            let mut bytes = Vec::new();
            io::write_fig2_csv(&mut bytes, &rows)?;
            let mut peaks = Vec::new();
            for &alpha in &a.alphas {
                let best = rows
                    .iter()
                    .filter(|r| r.alpha == alpha)
                    .max_by(|x, y| x.fidelity.total_cmp(&y.fidelity))
                    .ok_or_else(|| anyhow!("no rows for alpha {alpha}"))?;
                eprintln!("alpha {alpha}: peak fidelity {:.6} at xi {:.4}", best.fidelity, best.xi.unwrap_or(f64::NAN));
                peaks.push(json!({ "alpha": alpha, "xi": best.xi, "fidelity": best.fidelity }));
            }
            Ok(Outcome::new(bytes).note("rows", rows.len()).note("peaks", peaks))
        }
        Command::Fig3(a) => fig3(a, cutoff, tolerance),
        Command::Ecs(a) => {
            let cfg = two_mode_config(&a.source, cutoff, tolerance);
            let report = protocols::run_ecs_protocol(&cfg)?;
            eprintln!(
                "herald probability {:.6e}, fidelity with the four-component state {:.6}",
                report.herald_probability, report.fidelity_vs_qudit_ecs
            );
            Ok(Outcome::new(io::ecs_report_json(&report, a.max_n)?)
                .note("herald_probability", report.herald_probability)
                .note("fidelity_vs_qudit_ecs", report.fidelity_vs_qudit_ecs))
        }
        Command::Logical(a) => {
            let cfg = two_mode_config(&a.source, cutoff, tolerance);
            let report = protocols::run_ecs_protocol(&cfg)?;
            let codeword = protocols::extract_logical(&report.state, a.herald_a)?;
            let state = io::state_to_json(&StateFile::Single(codeword.state.clone()));
            let doc = LogicalOut {
                herald_n: codeword.herald_n,
                probability: codeword.probability,
                support: [codeword.herald_n - 2, codeword.herald_n + 2],
                off_support: codeword.off_support,
                config: &cfg,
                state: RawValue::from_string(state.trim_end().to_string())?,
            };
            eprintln!(
                "heralded |{}> on mode A with probability {:.6e}; off-support residue {:.1e}",
                codeword.herald_n, codeword.probability, codeword.off_support
            );
            Ok(Outcome::new(serde_json::to_string_pretty(&doc)? + "\n")
                .note("probability", codeword.probability)
                .note("off_support", codeword.off_support))
        }
        Command::Noon(a) => {
            let cfg = two_mode_config(&a.source, cutoff, tolerance);
            let phases = if a.phases.is_empty() { linspace(0.0, PI, 9) } else { a.phases.clone() };
            let rows = protocols::noon_loss_experiment(a.photons, &a.eta, &phases, &cfg)?;
            let mut bytes = Vec::new();
            io::write_noon_csv(&mut bytes, &rows)?;
            Ok(Outcome::new(bytes).note("rows", rows.len()))
        }
        Command::Wigner(a) => {
            let state = load_state(a.state.as_deref(), a.mode, cutoff, tolerance)?;
            let grid = PhaseSpaceGrid::square(a.range, a.points)?;
            let w = match &state {
                StateFile::Single(s) => wigner(s, &grid)?,
                StateFile::Mixed(m) => wigner(m, &grid)?,
                StateFile::TwoMode(_) => unreachable!("reduced by load_state"),
            };
            let ((ix, ip), &min) = w
                .indexed_iter()
                .min_by(|x, y| x.1.total_cmp(y.1))
                .expect("grid has at least 4 points");
            let (x, p) = (grid.x[ix], grid.p[ip]);
            eprintln!("minimum {min:.6e} at (x, p) = ({x}, {p})");
            let mut bytes = Vec::new();
            io::write_wigner_csv(&mut bytes, &grid, &w)?;
            let integral = w.sum() * grid.cell_area();
            Ok(Outcome::new(bytes)
                .note("minimum", json!({ "value": min, "x": x, "p": p }))
                .note("integral", integral))
        }
        Command::Quadrature(a) => {
            let state = load_state(a.state.as_deref(), a.mode, cutoff, tolerance)?;
            if !(a.range.is_finite() && a.range > 0.0) || a.points < 2 {
                bail!(CatsimError::InvalidArgument("quadrature grid needs a positive range and at least 2 points".into()));
            }
            let xs = linspace(-a.range, a.range, a.points);
            let pdf = match &state {
                StateFile::Single(s) => quadrature_pdf(s, a.phi, &xs)?,
                StateFile::Mixed(m) => quadrature_pdf_mixed(m, a.phi, &xs)?,
                StateFile::TwoMode(_) => unreachable!("reduced by load_state"),
            };
            let integral = trapezoid(&xs, &pdf);
            eprintln!("integral {integral:.9}");
            let mut bytes = Vec::new();
            io::write_quadrature_csv(&mut bytes, &xs, &pdf)?;
            Ok(Outcome::new(bytes).note("integral", integral))
        }
        Command::Selftest => {
            let checks = selftest::run_selftest()?;
            let mut bytes = Vec::new();
            io::write_selftest_csv(&mut bytes, &checks)?;
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
            for c in &checks {
                eprintln!("{:<28} {:.3e} (tolerance {:.0e}) {}", c.name, c.deviation, c.tolerance, if c.passed { "ok" } else { "FAILED" });
            }
            let mut outcome = Outcome::new(bytes).note("checks", checks.len()).note("failed", &failed);
            if !failed.is_empty() {
                outcome.failure = Some(format!("self-test failed: {}", failed.join(", ")));
            }
            Ok(outcome)
        }
    }
}

#[derive(Serialize)]
struct LogicalOut<'a> {
    herald_n: usize,
    probability: f64,
    support: [usize; 2],
    /// Largest heralded amplitude outside `support`, dropped from `state`.
    off_support: f64,
    config: &'a ProtocolConfig,
    state: Box<RawValue>,
}

fn two_mode_config(source: &cli::SourceArgs, cutoff: usize, tolerance: f64) -> ProtocolConfig {
    ProtocolConfig::two_mode(source.xi, source.transmission, source.alpha)
        .with_cutoff(cutoff)
        .with_tail_tolerance(tolerance)
}

fn fig3(a: &cli::Fig3Args, cutoff: usize, tolerance: f64) -> Result<Outcome> {
    let xi_t_range = SweepRange::new(a.xi_t_min, a.xi_t_max, a.xi_t_steps)?;
    let alpha_range = SweepRange::new(a.alpha_min, a.alpha_max, a.alpha_steps)?;
    let rows = protocols::contour_fig3(xi_t_range, alpha_range)?;
    let mut bytes = Vec::new();
    io::write_fig3_csv(&mut bytes, &rows)?;
    let mut outcome = Outcome::new(bytes).note("rows", rows.len());
    if a.check_stride == 0 {
        return Ok(outcome);
    }

    let reachable = a.check_transmission * a.check_transmission;
    let xi_ts: Vec<f64> = xi_t_range
        .values()
        .into_iter()
        .step_by(a.check_stride)
        .filter(|&x| x > 0.0 && x < reachable)
        .collect();
    let alphas: Vec<f64> = alpha_range.values().into_iter().step_by(a.check_stride).collect();
    let precision = Precision::new(cutoff, tolerance)?;
    let checks = protocols::cross_validate_fig3(&xi_ts, &alphas, a.check_transmission, &precision)?;
    let worst = checks.iter().map(|c| c.deviation()).fold(0.0, f64::max);
    eprintln!("cross-check: {} lattice points simulated, max deviation {worst:.3e}", checks.len());
    outcome = outcome
        .note("cross_check_points", checks.len())
        .note("cross_check_max_deviation", worst);
    if worst > FIG3_CHECK_TOLERANCE {
        outcome.failure = Some(format!("closed form and simulation differ by {worst:.3e}"));
    }
    Ok(outcome)
}

/// Reads a state file (vacuum when absent), reducing two-mode states to `mode`.
fn load_state(path: Option<&Path>, mode: Option<ModeArg>, cutoff: usize, tolerance: f64) -> Result<StateFile> {
    let state = match path {
        None => StateFile::Single(FockSpace::new(cutoff)?.with_tail_tolerance(tolerance)?.vacuum()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            io::state_from_json(&text).with_context(|| format!("parsing {}", p.display()))?
        }
    };
    let keep = mode.map(|m| match m {
        ModeArg::A => Mode::A,
        ModeArg::B => Mode::B,
    });
    match (state, keep) {
        (StateFile::TwoMode(s), Some(m)) => Ok(StateFile::Mixed(partial_trace_pure(&s, m))),
        (StateFile::TwoMode(_), None) => {
            Err(CatsimError::InvalidArgument("two-mode state file needs --mode a or --mode b".into()).into())
        }
        (StateFile::Mixed(m), Some(k)) if m.modes() == 2 => Ok(StateFile::Mixed(catsim::modes::partial_trace(&m, k)?)),
        (StateFile::Mixed(m), None) if m.modes() == 2 => {
            Err(CatsimError::InvalidArgument("two-mode state file needs --mode a or --mode b".into()).into())
        }
        (other, _) => Ok(other),
    }
}
