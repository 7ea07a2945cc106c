use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "catsim", version, about = "Heralded cat-state and entangled-coherent-state experiments in a truncated Fock basis")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// Fock cutoff (per mode for two-mode commands). Defaults: 60 single-mode, 40 two-mode.
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Truncation tail tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tolerance: f64,
    /// Output file; `-` writes to stdout without a manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Accepted for interface stability; no command is stochastic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Herald a single-photon-subtracted squeezed vacuum and compare with an odd cat.
    Herald(HeraldArgs),
    /// Ideal-subtraction fidelity against ξ for several cat amplitudes.
    Fig2(Fig2Args),
    /// Closed-form fidelity over (ξ_T, α), cross-checked against simulation.
    Fig3(Fig3Args),
    /// Two heralded cats interfered on a balanced splitter.
    Ecs(EcsArgs),
    /// Herald |2> or |4> on mode A of the two-mode output.
    Logical(LogicalArgs),
    /// Phase distinguishability of N00N and two-mode cat states under loss.
    Noon(NoonArgs),
    /// Wigner function of a state file on a square grid.
    Wigner(WignerArgs),
    /// Homodyne quadrature distribution of a state file.
    Quadrature(QuadratureArgs),
    /// Run the oracle-equivalence checks.
    Selftest,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct HeraldArgs {
    #[arg(long)]
    pub xi: f64,
    #[arg(long)]
    pub transmission: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta_det: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Fig2Args {
    #[arg(long, value_delimiter = ',', default_values_t = [1.2, 1.4, 1.6])]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub xi_min: f64,
    #[arg(long, default_value_t = 1.2)]
    pub xi_max: f64,
    #[arg(long, default_value_t = 200)]
    pub xi_steps: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Fig3Args {
    #[arg(long, default_value_t = 0.0)]
    pub xi_t_min: f64,
    #[arg(long, default_value_t = 0.9)]
    pub xi_t_max: f64,
    #[arg(long, default_value_t = 181)]
    pub xi_t_steps: usize,
    #[arg(long, default_value_t = 0.1)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 146)]
    pub alpha_steps: usize,
    /// Simulate every k-th lattice point to validate the closed form (0 disables).
    #[arg(long, default_value_t = 15)]
    pub check_stride: usize,
    /// Transmission used for the simulated cross-check.
    #[arg(long, default_value_t = 0.99)]
    pub check_transmission: f64,
}

/// Parameters of the two-mode source shared by `ecs`, `logical` and `noon`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct SourceArgs {
    #[arg(long, default_value_t = 0.43)]
    pub xi: f64,
    #[arg(long, default_value_t = 0.99)]
    pub transmission: f64,
    /// Cat amplitude of the reference four-component state.
    #[arg(long, default_value_t = 1.2)]
    pub alpha: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EcsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Largest n listed in the coefficient table.
    #[arg(long, default_value_t = 12)]
    pub max_n: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LogicalArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Photon number heralded on mode A: 2 or 4.
    #[arg(long, value_parser = parse_herald)]
    pub herald_a: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct NoonArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 2)]
    pub photons: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.9, 0.8, 0.6])]
    pub eta: Vec<f64>,
    /// Phase samples θ; defaults to 9 points from 0 to π.
    #[arg(long, value_delimiter = ',')]
    pub phases: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    A,
    B,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WignerArgs {
    /// State file (catsim-state-v1 or a protocol report); vacuum if omitted.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Mode kept when the state file holds two modes.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Half-width of the square grid in x and p.
    #[arg(long, default_value_t = 5.0)]
    pub range: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QuadratureArgs {
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Homodyne angle: the measured quadrature is x cos φ + p sin φ.
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    #[arg(long, default_value_t = 7.0)]
    pub range: f64,
    #[arg(long, default_value_t = 281)]
    pub points: usize,
}

fn parse_herald(text: &str) -> Result<usize, String> {
    match text {
        "2" => Ok(2),
        "4" => Ok(4),
        _ => Err(format!("expected 2 or 4, got {text}")),
    }
}
