use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

use super::{run_ecs_protocol, ProtocolConfig};
use crate::error::{invalid, Result};
use crate::modes::{loss_branches, trace_distance_ensembles, Mode, TwoModePureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoonStateKind {
    Noon,
    Ecs,
}

impl fmt::Display for NoonStateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoonStateKind::Noon => "noon",
            NoonStateKind::Ecs => "ecs",
        })
    }
}

/// Trace distance between the θ-rotated and unrotated state after loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoonRow {
    pub state: NoonStateKind,
    pub theta: f64,
    pub eta: f64,
    pub trace_distance: f64,
}

/// `(|N,0⟩ + |0,N⟩)/√2`.
pub fn noon_state(n: usize, cutoff: usize) -> Result<TwoModePureState> {
    if n == 0 || n > cutoff {
        return Err(invalid(format!("N00N photon number must lie in [1, {cutoff}], got {n}")));
    }
    let mut grid = Array2::<C64>::zeros((cutoff + 1, cutoff + 1));
    grid[(n, 0)] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    grid[(0, n)] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    TwoModePureState::from_amplitudes(grid)
}

fn branches(s: &TwoModePureState, eta: f64) -> Result<Vec<Array1<C64>>> {
    Ok(loss_branches(s, Mode::B, eta)?
        .into_iter()
        .map(|b| Array1::from_iter(b.into_amplitudes()))
        .filter(|v| v.iter().any(|z| z.norm_sqr() > 0.0))
        .collect())
}

/// Phase sensitivity under loss: for the N00N state and the two-mode cat
/// output of `cfg`, rotate mode A by each θ, send mode B through loss `η`,
/// and report the trace distance to the θ = 0 state. Rows are ordered by
/// state, then η, then θ as given.
pub fn noon_loss_experiment(n: usize, etas: &[f64], thetas: &[f64], cfg: &ProtocolConfig) -> Result<Vec<NoonRow>> {
    if let Some(bad) = etas.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(invalid(format!("loss transmissivity must lie in [0, 1], got {bad}")));
    }
    if thetas.iter().any(|t| !t.is_finite()) {
        return Err(invalid("phases must be finite"));
    }
    let states = [(NoonStateKind::Noon, noon_state(n, cfg.cutoff)?), (NoonStateKind::Ecs, run_ecs_protocol(cfg)?.state)];
    let jobs: Vec<(usize, f64, f64)> = (0..states.len())
        .flat_map(|s| etas.iter().flat_map(move |&e| thetas.iter().map(move |&t| (s, e, t))))
        .collect();
    jobs.par_iter()
        .map(|&(idx, eta, theta)| {
            let (kind, state) = &states[idx];
            let reference = branches(state, eta)?;
            let rotated = branches(&state.phase_rotate(Mode::A, theta), eta)?;
            Ok(NoonRow { state: *kind, theta, eta, trace_distance: trace_distance_ensembles(&rotated, &reference)? })
        })
        .collect()
}
