use super::{target_cat, HeraldedState, Precision, ProtocolConfig};
use crate::error::Result;
use crate::fock::{make_vacuum, normalize, PureState, StateFamily};
use crate::modes::{
    annihilate, beam_splitter, herald_with_efficiency, project_fock, tensor, BeamSplitterSpec, HeraldResult, Mode,
};
use crate::optimize::golden_section_max;

/// Search interval for the best-matching cat amplitude.
pub const ALPHA_SEARCH: (f64, f64) = (0.1, 3.0);
const ALPHA_SEARCH_TOLERANCE: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq)]
pub struct CatProtocolReport {
    pub config: ProtocolConfig,
    pub xi_t: f64,
    pub herald_probability: f64,
    pub state: HeraldedState,
    /// Fidelity against `SCS⁻_{iα}` at the configured α.
    pub fidelity: f64,
    pub alpha_star: f64,
    pub fidelity_star: f64,
}

/// Taps `sq` on a beam splitter of transmission `T` with a vacuum ancilla and
/// heralds one photon on the ancilla through a detector of efficiency `eta`.
pub fn herald_single_photon(sq: &PureState, transmission: f64, eta: f64) -> Result<HeraldResult<HeraldedState>> {
    let spec = BeamSplitterSpec::new(transmission)?;
    let input = tensor(sq, &make_vacuum(sq.cutoff())?);
    let output = beam_splitter(&input, spec)?;
    if eta == 1.0 {
        let h = project_fock(&output, Mode::B, 1)?;
        Ok(HeraldResult { state: HeraldedState::Pure(h.state), probability: h.probability })
    } else {
        let h = herald_with_efficiency(&output, Mode::B, 1, eta)?;
        Ok(HeraldResult { state: HeraldedState::Mixed(h.state), probability: h.probability })
    }
}

/// Full two-mode heralding of `Sq(ξ)` with the cutoff raised as far as the
/// squeezing requires.
pub fn simulate_heralded(xi: f64, transmission: f64, eta: f64, precision: &Precision) -> Result<HeraldResult<HeraldedState>> {
    let cutoff = precision.cutoff_for(&[StateFamily::Squeezed(xi)])?;
    let sq = precision.space(cutoff)?.squeezed_vacuum(xi)?;
    normalize(&annihilate(&sq))?;
    herald_single_photon(&sq, transmission, eta)
}

/// Ideal subtraction `â|Sq(ξ)⟩`, normalized, on an escalated cutoff.
pub fn ideal_subtraction(xi: f64, precision: &Precision) -> Result<PureState> {
    let cutoff = precision.cutoff_for(&[StateFamily::Squeezed(xi)])?;
    let sq = precision.space(cutoff)?.squeezed_vacuum(xi)?;
    Ok(normalize(&annihilate(&sq))?.0)
}

/// Runs the heralded cat protocol at the configured cutoff; truncation is
/// not escalated here.
pub fn run_cat_protocol(cfg: &ProtocolConfig) -> Result<CatProtocolReport> {
    cfg.validate()?;
    let space = cfg.space()?;
    let sq = space.squeezed_vacuum(cfg.xi)?;
    // no photon to subtract from the vacuum
    normalize(&annihilate(&sq))?;
    let herald = herald_single_photon(&sq, cfg.transmission, cfg.eta_det)?;
    let state = herald.state;
    let fidelity = state.fidelity_with(&target_cat(cfg.alpha, cfg.cutoff, cfg.tail_tolerance)?)?;
    let best = golden_section_max(
        |alpha| state.fidelity_with(&target_cat(alpha, cfg.cutoff, cfg.tail_tolerance)?),
        ALPHA_SEARCH.0,
        ALPHA_SEARCH.1,
        ALPHA_SEARCH_TOLERANCE,
    )?;
    Ok(CatProtocolReport {
        config: *cfg,
        xi_t: cfg.xi_t(),
        herald_probability: herald.probability,
        state,
        fidelity,
        alpha_star: best.x,
        fidelity_star: best.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{fidelity_closed_form, herald_probability};
    use crate::error::CatsimError;
    use crate::fock::fidelity_pure;

    #[test]
    fn near_unit_transmission_values() {
        let r = run_cat_protocol(&ProtocolConfig::new(0.43, 0.9999, 1.2)).unwrap();
        assert!((r.fidelity - 0.99).abs() < 5e-3);
        assert!((r.alpha_star - 1.2).abs() < 0.1);
        assert!(r.fidelity_star >= r.fidelity - 1e-9);
        let r = run_cat_protocol(&ProtocolConfig::new(0.54, 0.9999, 1.4)).unwrap();
        assert!((r.fidelity - 0.975).abs() < 5e-3);
    }

    #[test]
    fn matches_closed_forms() {
        let cfg = ProtocolConfig::new(0.5, 0.8, 1.3);
        let r = run_cat_protocol(&cfg).unwrap();
        assert!((r.fidelity - fidelity_closed_form(1.3, cfg.xi_t()).unwrap()).abs() < 1e-9);
        assert!((r.herald_probability - herald_probability(0.5, 0.8).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn xi_t_sufficiency() {
        let (t1, t2) = (0.95f64, 0.85f64);
        let xi1 = 0.4f64;
        let xi2 = (t1 * t1 * xi1.tanh() / (t2 * t2)).atanh();
        let a = run_cat_protocol(&ProtocolConfig::new(xi1, t1, 1.1)).unwrap();
        let b = run_cat_protocol(&ProtocolConfig::new(xi2, t2, 1.1)).unwrap();
        assert!((a.fidelity - b.fidelity).abs() < 1e-8);
        let (sa, sb) = (a.state.as_pure().unwrap(), b.state.as_pure().unwrap());
        assert!(1.0 - fidelity_pure(sa, sb).unwrap() < 1e-10);
    }

    #[test]
    fn failure_modes() {
        assert!(matches!(run_cat_protocol(&ProtocolConfig::new(0.0, 0.9, 1.0)), Err(CatsimError::ZeroState(_))));
        assert!(matches!(run_cat_protocol(&ProtocolConfig::new(0.4, 1.0, 1.0)), Err(CatsimError::ImpossibleOutcome(_))));
        assert!(matches!(run_cat_protocol(&ProtocolConfig::new(0.4, 1.2, 1.0)), Err(CatsimError::InvalidArgument(_))));
        assert!(matches!(
            run_cat_protocol(&ProtocolConfig::new(2.5, 0.9, 1.0).with_cutoff(10)),
            Err(CatsimError::Truncation(_))
        ));
    }

    #[test]
    fn imperfect_detector_lowers_fidelity() {
        let ideal = run_cat_protocol(&ProtocolConfig::new(0.5, 0.9, 1.3)).unwrap();
        let lossy = run_cat_protocol(&ProtocolConfig::new(0.5, 0.9, 1.3).with_eta_det(0.6)).unwrap();
        assert!(matches!(lossy.state, HeraldedState::Mixed(_)));
        assert!(lossy.fidelity < ideal.fidelity);
        assert!(lossy.herald_probability > 0.0);
    }

    #[test]
    fn simulated_and_ideal_routes_converge() {
        let p = Precision::default();
        let ideal = ideal_subtraction(0.43, &p).unwrap();
        let h = simulate_heralded(0.43, 0.99999, 1.0, &p).unwrap();
        let f = h.state.fidelity_with(&ideal).unwrap();
        assert!(1.0 - f < 1e-8);
    }
}
