//! End-to-end experiments: heralded cats, figure sweeps, the two-mode
//! entangled output, logical-qubit extraction and the loss comparison.

mod cat;
mod ecs;
mod noon;
pub mod selftest;
mod sweep;

pub use cat::{herald_single_photon, ideal_subtraction, run_cat_protocol, simulate_heralded, CatProtocolReport};
pub use ecs::{extract_logical, qudit_ecs, run_ecs_protocol, EcsCoefficient, EcsReport, LogicalCodeword, ECS_ROTATION_A, ECS_ROTATION_B};
pub use noon::{noon_loss_experiment, noon_state, NoonRow, NoonStateKind};
pub use sweep::{
    contour_fig3, cross_validate_fig3, optimize_fidelity, optimize_fidelity_with, sweep_fig2, CrossCheck,
    OptimizeResult, SweepRange, SweepRow, FIG2_ALPHAS, OPTIMIZE_TOLERANCE, OPTIMIZE_XI_RANGE,
};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fock::{
    required_cutoff, CatSign, FockSpace, PureState, StateFamily, DEFAULT_CUTOFF, DEFAULT_TAIL_TOLERANCE,
    DEFAULT_TWO_MODE_CUTOFF, MAX_CUTOFF,
};
use crate::modes::MixedState;

/// Parameters of one protocol run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub xi: f64,
    pub transmission: f64,
    pub alpha: f64,
    pub eta_det: f64,
    pub cutoff: usize,
    pub tail_tolerance: f64,
}

impl ProtocolConfig {
    /// Single-mode defaults: ideal detector, cutoff 60.
    pub fn new(xi: f64, transmission: f64, alpha: f64) -> Self {
        Self { xi, transmission, alpha, eta_det: 1.0, cutoff: DEFAULT_CUTOFF, tail_tolerance: DEFAULT_TAIL_TOLERANCE }
    }

    /// Two-mode defaults: cutoff 40 per mode.
    pub fn two_mode(xi: f64, transmission: f64, alpha: f64) -> Self {
        Self { cutoff: DEFAULT_TWO_MODE_CUTOFF, ..Self::new(xi, transmission, alpha) }
    }

    pub fn with_eta_det(mut self, eta: f64) -> Self {
        self.eta_det = eta;
        self
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_tail_tolerance(mut self, tolerance: f64) -> Self {
        self.tail_tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.xi.is_finite() {
            return Err(invalid(format!("squeezing must be finite, got {}", self.xi)));
        }
        if !(self.transmission > 0.0 && self.transmission <= 1.0) {
            return Err(invalid(format!("transmission must lie in (0, 1], got {}", self.transmission)));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(invalid(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.eta_det > 0.0 && self.eta_det <= 1.0) {
            return Err(invalid(format!("detector efficiency must lie in (0, 1], got {}", self.eta_det)));
        }
        if self.cutoff < 2 || self.cutoff > MAX_CUTOFF {
            return Err(invalid(format!("cutoff must lie in [2, {MAX_CUTOFF}], got {}", self.cutoff)));
        }
        if !(self.tail_tolerance.is_finite() && self.tail_tolerance >= 0.0) {
            return Err(invalid("tail tolerance must be a non-negative number"));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<FockSpace> {
        FockSpace::new(self.cutoff)?.with_tail_tolerance(self.tail_tolerance)
    }

    /// `ξ_T = T² tanh ξ`.
    pub fn xi_t(&self) -> f64 {
        crate::analytic::xi_t(self.xi, self.transmission)
    }
}

/// Truncation settings for sweeps, which raise the cutoff per point as needed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Precision {
    pub min_cutoff: usize,
    pub tail_tolerance: f64,
}

impl Default for Precision {
    fn default() -> Self {
        Self { min_cutoff: DEFAULT_CUTOFF, tail_tolerance: DEFAULT_TAIL_TOLERANCE }
    }
}

impl Precision {
    pub fn new(min_cutoff: usize, tail_tolerance: f64) -> Result<Self> {
        if min_cutoff < 2 || min_cutoff > MAX_CUTOFF {
            return Err(invalid(format!("cutoff must lie in [2, {MAX_CUTOFF}], got {min_cutoff}")));
        }
        if !(tail_tolerance.is_finite() && tail_tolerance > 0.0) {
            return Err(invalid("sweeps need a positive tail tolerance"));
        }
        Ok(Self { min_cutoff, tail_tolerance })
    }

    /// Smallest admissible cutoff for all listed families.
    pub fn cutoff_for(&self, families: &[StateFamily]) -> Result<usize> {
        let mut cutoff = self.min_cutoff;
        for &f in families {
            cutoff = cutoff.max(required_cutoff(f, self.min_cutoff, self.tail_tolerance)?);
        }
        Ok(cutoff)
    }

    pub fn space(&self, cutoff: usize) -> Result<FockSpace> {
        FockSpace::new(cutoff)?.with_tail_tolerance(self.tail_tolerance)
    }
}

/// A heralded single-mode state: pure for ideal detection, mixed otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum HeraldedState {
    Pure(PureState),
    Mixed(MixedState),
}

impl HeraldedState {
    pub fn dim(&self) -> usize {
        match self {
            HeraldedState::Pure(s) => s.dim(),
            HeraldedState::Mixed(m) => m.dimension(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            HeraldedState::Pure(s) => Some(s),
            HeraldedState::Mixed(_) => None,
        }
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalized target. The target may live on a larger
    /// basis; its amplitudes above this state's cutoff do not contribute.
    pub fn fidelity_with(&self, target: &PureState) -> Result<f64> {
        if target.dim() < self.dim() {
            return Err(invalid("target basis is smaller than the heralded state's"));
        }
        let t = &target.amplitudes()[..self.dim()];
        let f = match self {
            HeraldedState::Pure(s) => t.iter().zip(s.amplitudes()).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr(),
            HeraldedState::Mixed(m) => {
                let rho = m.matrix();
                let mut acc = C64::new(0.0, 0.0);
                for (i, ti) in t.iter().enumerate() {
                    for (j, tj) in t.iter().enumerate() {
                        acc += ti.conj() * rho[(i, j)] * tj;
                    }
                }
                acc.re
            }
        };
        Ok(f.clamp(0.0, 1.0))
    }
}

/// Odd cat `SCS⁻_{iα}` on a basis at least `min_cutoff` large, escalated
/// until its tail is within `tolerance`.
pub fn target_cat(alpha: f64, min_cutoff: usize, tolerance: f64) -> Result<PureState> {
    let beta = C64::new(0.0, alpha);
    let cutoff = required_cutoff(StateFamily::Cat(beta, CatSign::Minus), min_cutoff, tolerance)?;
    FockSpace::new(cutoff)?.with_tail_tolerance(tolerance)?.cat(beta, CatSign::Minus)
}
