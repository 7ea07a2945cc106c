use rayon::prelude::*;
use serde::Serialize;

use super::{ideal_subtraction, simulate_heralded, target_cat, Precision};
use crate::analytic::{fidelity_closed_form, xi_t};
use crate::error::{invalid, Result};
use crate::optimize::golden_section_max;

pub const FIG2_ALPHAS: [f64; 3] = [1.2, 1.4, 1.6];
pub const OPTIMIZE_XI_RANGE: (f64, f64) = (0.01, 1.5);
pub const OPTIMIZE_TOLERANCE: f64 = 1e-5;

/// `steps` evenly spaced values from `min` to `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || steps == 0 || min > max || (steps > 1 && min == max) {
            return Err(invalid(format!("malformed range [{min}, {max}] with {steps} steps")));
        }
        Ok(Self { min, max, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        crate::modes::phase_space::linspace(self.min, self.max, self.steps)
    }
}

/// One point of a fidelity sweep. `xi` is absent for rows indexed by `ξ_T` alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub xi: Option<f64>,
    pub xi_t: f64,
    pub fidelity: f64,
    pub herald_probability: Option<f64>,
}

/// Ideal-subtraction fidelity `|⟨SCS⁻_{iα}|â Sq(ξ)⟩|²` (normalized) along
/// `xi_range`, for each α. Rows are ordered by α, then ξ.
pub fn sweep_fig2(alphas: &[f64], xi_range: SweepRange, precision: &Precision) -> Result<Vec<SweepRow>> {
    if alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(invalid("alphas must be positive"));
    }
    let xis = xi_range.values();
    if xis.iter().any(|&x| x <= 0.0) {
        return Err(invalid("squeezing values must be positive"));
    }
    let per_xi: Vec<Vec<f64>> = xis
        .par_iter()
        .map(|&xi| {
            let state = super::HeraldedState::Pure(ideal_subtraction(xi, precision)?);
            alphas
                .iter()
                .map(|&alpha| state.fidelity_with(&target_cat(alpha, state.dim() - 1, precision.tail_tolerance)?))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(alphas.len() * xis.len());
    for (ia, &alpha) in alphas.iter().enumerate() {
        for (ix, &xi) in xis.iter().enumerate() {
            rows.push(SweepRow { alpha, xi: Some(xi), xi_t: xi.tanh(), fidelity: per_xi[ix][ia], herald_probability: None });
        }
    }
    Ok(rows)
}

/// Closed-form fidelity over a `(ξ_T, α)` grid, ordered by `ξ_T`, then α.
pub fn contour_fig3(xi_t_range: SweepRange, alpha_range: SweepRange) -> Result<Vec<SweepRow>> {
    if xi_t_range.min < 0.0 || xi_t_range.max >= 1.0 {
        return Err(invalid("xi_T must lie in [0, 1)"));
    }
    if alpha_range.min <= 0.0 {
        return Err(invalid("alpha must be positive"));
    }
    let alphas = alpha_range.values();
    let mut rows = Vec::with_capacity(xi_t_range.steps * alphas.len());
    for x in xi_t_range.values() {
        for &alpha in &alphas {
            rows.push(SweepRow { alpha, xi: None, xi_t: x, fidelity: fidelity_closed_form(alpha, x)?, herald_probability: None });
        }
    }
    Ok(rows)
}

/// Closed form against full two-mode simulation at one lattice point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub xi_t: f64,
    pub alpha: f64,
    pub closed_form: f64,
    pub simulated: f64,
}

impl CrossCheck {
    pub fn deviation(&self) -> f64 {
        (self.closed_form - self.simulated).abs()
    }
}

/// Simulates each `ξ_T` with a beam splitter of transmission `probe_t`
/// (squeezing `artanh(ξ_T/T²)`) and compares against the closed form for every α.
pub fn cross_validate_fig3(xi_ts: &[f64], alphas: &[f64], probe_t: f64, precision: &Precision) -> Result<Vec<CrossCheck>> {
    let t2 = probe_t * probe_t;
    if let Some(bad) = xi_ts.iter().find(|&&x| !(x > 0.0 && x < t2)) {
        return Err(invalid(format!("xi_T = {bad} is not reachable with T = {probe_t}")));
    }
    let per_xi: Vec<Vec<CrossCheck>> = xi_ts
        .par_iter()
        .map(|&x| {
            let xi = (x / t2).atanh();
            let h = simulate_heralded(xi, probe_t, 1.0, precision)?;
            let reached = xi_t(xi, probe_t);
            alphas
                .iter()
                .map(|&alpha| {
                    let target = target_cat(alpha, h.state.dim() - 1, precision.tail_tolerance)?;
                    Ok(CrossCheck {
                        xi_t: x,
                        alpha,
                        closed_form: fidelity_closed_form(alpha, reached)?,
                        simulated: h.state.fidelity_with(&target)?,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_xi.into_iter().flatten().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub xi: f64,
    pub xi_t: f64,
    pub fidelity: f64,
}

/// Squeezing maximizing the heralded fidelity to `SCS⁻_{iα}` at transmission `T`.
pub fn optimize_fidelity(alpha: f64, transmission: f64) -> Result<OptimizeResult> {
    optimize_fidelity_with(alpha, transmission, &Precision::default())
}

/// As [`optimize_fidelity`] with explicit truncation settings. `T = 1` uses
/// the ideal-subtraction limit, since heralding then has probability zero.
pub fn optimize_fidelity_with(alpha: f64, transmission: f64, precision: &Precision) -> Result<OptimizeResult> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !(transmission > 0.0 && transmission <= 1.0) {
        return Err(invalid(format!("transmission must lie in (0, 1], got {transmission}")));
    }
    let objective = |xi: f64| -> Result<f64> {
        let state = if transmission == 1.0 {
            super::HeraldedState::Pure(ideal_subtraction(xi, precision)?)
        } else {
            simulate_heralded(xi, transmission, 1.0, precision)?.state
        };
        state.fidelity_with(&target_cat(alpha, state.dim() - 1, precision.tail_tolerance)?)
    };
    let best = golden_section_max(objective, OPTIMIZE_XI_RANGE.0, OPTIMIZE_XI_RANGE.1, OPTIMIZE_TOLERANCE)?;
    Ok(OptimizeResult { xi: best.x, xi_t: xi_t(best.x, transmission), fidelity: best.value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::optimal_xi_t;

    #[test]
    fn range_validation() {
        assert!(SweepRange::new(1.0, 0.0, 3).is_err());
        assert!(SweepRange::new(0.0, 1.0, 0).is_err());
        assert!(SweepRange::new(0.5, 0.5, 2).is_err());
        assert_eq!(SweepRange::new(0.5, 0.5, 1).unwrap().values(), vec![0.5]);
        assert_eq!(SweepRange::new(0.0, 1.0, 3).unwrap().values(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn fig2_matches_closed_form() {
        let rows = sweep_fig2(&[1.0, 1.6], SweepRange::new(0.05, 1.1, 12).unwrap(), &Precision::default()).unwrap();
        assert_eq!(rows.len(), 24);
        assert_eq!(rows[0].alpha, 1.0);
        assert_eq!(rows[12].alpha, 1.6);
        for r in &rows {
            let expected = fidelity_closed_form(r.alpha, r.xi.unwrap().tanh()).unwrap();
            assert!((r.fidelity - expected).abs() < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn fig3_boundary_and_order() {
        let rows = contour_fig3(SweepRange::new(0.0, 0.5, 3).unwrap(), SweepRange::new(0.5, 1.5, 4).unwrap()).unwrap();
        assert_eq!(rows.len(), 12);
        for r in rows.iter().take(4) {
            let a2 = r.alpha * r.alpha;
            assert!((r.fidelity - a2 / a2.sinh()).abs() < 1e-14);
        }
        assert_eq!(rows[4].xi_t, 0.25);
        assert!(contour_fig3(SweepRange::new(0.0, 1.0, 3).unwrap(), SweepRange::new(0.5, 1.5, 4).unwrap()).is_err());
    }

    #[test]
    fn cross_validation_small_lattice() {
        let checks = cross_validate_fig3(&[0.1, 0.45, 0.75], &[0.3, 1.2, 2.4], 0.99, &Precision::default()).unwrap();
        assert_eq!(checks.len(), 9);
        for c in &checks {
            assert!(c.deviation() < 1e-8, "{c:?}");
        }
        assert!(cross_validate_fig3(&[0.99], &[1.0], 0.99, &Precision::default()).is_err());
    }

    #[test]
    fn optimizer_agrees_with_analytic_optimum() {
        let r = optimize_fidelity(1.2, 1.0).unwrap();
        assert!((r.xi_t - optimal_xi_t(1.2).unwrap()).abs() < 1e-4);
        assert!((r.xi - 0.43).abs() < 0.01);
        assert!((r.fidelity - 0.99).abs() < 5e-3);
        let capped = optimize_fidelity(1.2, 0.5).unwrap();
        assert_eq!(capped.xi, OPTIMIZE_XI_RANGE.1);
        assert!(capped.fidelity < 0.99);
        let mid = optimize_fidelity(1.2, 0.8).unwrap();
        assert!((mid.xi_t - optimal_xi_t(1.2).unwrap()).abs() < 1e-4);
        assert!((mid.fidelity - r.fidelity).abs() < 1e-8);
    }
}
