use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::FRAC_PI_4;

use super::{herald_single_photon, HeraldedState, ProtocolConfig};
use crate::error::{invalid, CatsimError, Result};
use crate::fock::{normalize, FockSpace, PureState, ZERO_NORM};
use crate::modes::{annihilate, beam_splitter, project_fock, tensor, BeamSplitterSpec, HeraldResult, Mode, TwoModePureState};

/// Phase rotations taking the balanced-splitter output onto `{±α, ±iα}`.
pub const ECS_ROTATION_A: f64 = -FRAC_PI_4;
pub const ECS_ROTATION_B: f64 = FRAC_PI_4;

/// Coefficients `⟨n−2, n|Ψ⟩` (`upper`) and `⟨n, n−2|Ψ⟩` (`lower`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EcsCoefficient {
    pub n: usize,
    pub upper: C64,
    pub lower: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EcsReport {
    pub config: ProtocolConfig,
    /// Output of the final balanced splitter, with the global phase chosen so
    /// that `⟨0, 2|Ψ⟩` is real and positive.
    pub state: TwoModePureState,
    pub herald_probability: f64,
    /// Fidelity of the phase-rotated output with the four-component ECS at α.
    pub fidelity_vs_qudit_ecs: f64,
    pub coefficients: Vec<EcsCoefficient>,
}

/// Normalized `|α,α⟩ − |iα,−iα⟩ − |−iα,iα⟩ + |−α,−α⟩`.
pub fn qudit_ecs(alpha: f64, space: &FockSpace) -> Result<TwoModePureState> {
    let a = C64::new(alpha, 0.0);
    let i = C64::new(0.0, 1.0);
    let terms = [(a, a, 1.0), (i * a, -i * a, -1.0), (-i * a, i * a, -1.0), (-a, -a, 1.0)];
    let c = space.cutoff();
    let mut total = TwoModePureState::zeros(c, c);
    for (x, y, sign) in terms {
        let t = tensor(&space.coherent(x)?, &space.coherent(y)?);
        total = TwoModePureState::from_array_unchecked(total.into_amplitudes() + t.amplitudes() * C64::new(sign, 0.0));
    }
    total.normalized()
}

fn heralded_pure(xi: f64, cfg: &ProtocolConfig) -> Result<HeraldResult<PureState>> {
    let sq = cfg.space()?.squeezed_vacuum(xi)?;
    normalize(&annihilate(&sq))?;
    let h = herald_single_photon(&sq, cfg.transmission, 1.0)?;
    match h.state {
        HeraldedState::Pure(s) => Ok(HeraldResult { state: s, probability: h.probability }),
        HeraldedState::Mixed(_) => unreachable!("ideal detection yields pure states"),
    }
}

/// Heralds single-photon subtraction on `Sq(+ξ)` (mode A) and `Sq(−ξ)`
/// (mode B), then interferes the two on a balanced beam splitter.
pub fn run_ecs_protocol(cfg: &ProtocolConfig) -> Result<EcsReport> {
    cfg.validate()?;
    if cfg.eta_det != 1.0 {
        return Err(invalid("the two-mode protocol models ideal detectors only"));
    }
    let a = heralded_pure(cfg.xi, cfg)?;
    let b = heralded_pure(-cfg.xi, cfg)?;
    // Photon-number blocks that do not fit on the output grid would be cut
    // unevenly by the splitter; drop them whole instead.
    let (input, dropped) = tensor(&a.state, &b.state).truncate_total(cfg.cutoff);
    if dropped > cfg.tail_tolerance.max(ZERO_NORM) {
        return Err(CatsimError::Leakage { leaked: dropped });
    }
    let out = beam_splitter(&input.normalized()?, BeamSplitterSpec::balanced())?;
    let anchor = if cfg.cutoff >= 2 { out.amplitude(0, 2) } else { C64::new(0.0, 0.0) };
    let state = if anchor.norm() > 0.0 { out.scaled(anchor.conj() / anchor.norm()) } else { out };

    let rotated = state.phase_rotate(Mode::A, ECS_ROTATION_A).phase_rotate(Mode::B, ECS_ROTATION_B);
    let target = qudit_ecs(cfg.alpha, &cfg.space()?)?;
    let fidelity_vs_qudit_ecs = rotated.fidelity(&target)?;

    let coefficients = (2..=cfg.cutoff)
        .map(|n| EcsCoefficient { n, upper: state.amplitude(n - 2, n), lower: state.amplitude(n, n - 2) })
        .collect();
    Ok(EcsReport {
        config: *cfg,
        state,
        herald_probability: a.probability * b.probability,
        fidelity_vs_qudit_ecs,
        coefficients,
    })
}

/// Logical codeword heralded from the two-mode output.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalCodeword {
    pub herald_n: usize,
    pub probability: f64,
    /// Mode-B state restricted to its nominal support `{n−2, n+2}` and renormalized.
    pub state: PureState,
    /// Mode-B state exactly as heralded.
    pub raw: PureState,
    /// Largest amplitude of `raw` outside the nominal support.
    pub off_support: f64,
}

/// Heralds `|n⟩` on mode A of the two-mode output, leaving a logical
/// codeword on mode B: `n = 2` gives support `{0, 4}`, `n = 4` gives `{2, 6}`.
/// Amplitudes outside that support are rounding residue of the splitter
/// (reported in `off_support`) and are removed from `state`.
pub fn extract_logical(state: &TwoModePureState, herald_n: usize) -> Result<LogicalCodeword> {
    if herald_n != 2 && herald_n != 4 {
        return Err(invalid(format!("logical heralding uses |2> or |4>, got |{herald_n}>")));
    }
    let HeraldResult { state: raw, probability } = project_fock(state, Mode::A, herald_n)?;
    let support = [herald_n - 2, herald_n + 2];
    let mut off_support: f64 = 0.0;
    let mut kept = vec![C64::new(0.0, 0.0); raw.dim()];
    for (n, &z) in raw.amplitudes().iter().enumerate() {
        if support.contains(&n) {
            kept[n] = z;
        } else {
            off_support = off_support.max(z.norm());
        }
    }
    let (codeword, _) = normalize(&PureState::from_amplitudes(kept)?)?;
    Ok(LogicalCodeword { herald_n, probability, state: codeword, raw, off_support })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{ecs_mean_photon_number, fidelity_closed_form, tau_exact};
    use crate::fock::inner_product;

    fn report(xi: f64, t: f64) -> EcsReport {
        run_ecs_protocol(&ProtocolConfig::two_mode(xi, t, 1.2)).unwrap()
    }

    #[test]
    fn antisymmetric_with_gap_two_support() {
        let r = report(0.45, 0.9);
        assert!(crate::protocols::selftest::antisymmetry_residual(&r.state) < 1e-12);
        assert!(r.state.is_normalized());
    }

    #[test]
    fn coefficients_follow_exact_law() {
        let (xi, t) = (0.45, 0.9);
        let r = report(xi, t);
        let x = r.config.xi_t();
        for c in r.coefficients.iter().take(12) {
            let expected = tau_exact(c.n, xi, t).unwrap();
            assert!((c.upper - C64::new(expected, 0.0)).norm() < 1e-8, "n={}", c.n);
            assert!((c.lower + c.upper).norm() < 1e-12);
        }
        let ratio = r.coefficients[1].upper.norm() / r.coefficients[0].upper.norm();
        assert!((ratio - 3f64.sqrt() * x).abs() < 1e-6);
        let mean = s_mean(&r.state);
        assert!((mean - ecs_mean_photon_number(xi, t).unwrap()).abs() < 1e-8);
    }

    fn s_mean(s: &TwoModePureState) -> f64 {
        s.mean_photon_number(Mode::A) + s.mean_photon_number(Mode::B)
    }

    #[test]
    fn fidelity_is_product_of_cat_fidelities() {
        let (xi, t) = (0.5, 0.9);
        let r = report(xi, t);
        let single = fidelity_closed_form(1.2, r.config.xi_t()).unwrap();
        assert!((r.fidelity_vs_qudit_ecs - single * single).abs() < 1e-8);
        assert!(r.fidelity_vs_qudit_ecs > 0.9);
    }

    #[test]
    fn logical_codewords() {
        let (xi, t) = (0.45, 0.9);
        let r = report(xi, t);
        let zero = extract_logical(&r.state, 2).unwrap();
        let one = extract_logical(&r.state, 4).unwrap();
        assert!(zero.off_support < 1e-12 && one.off_support < 1e-12);
        assert!(1.0 - crate::fock::fidelity_pure(&zero.state, &zero.raw).unwrap() < 1e-15);
        assert_eq!(inner_product(&zero.state, &one.state).unwrap(), C64::new(0.0, 0.0));
        let ratio = zero.state.amplitude(4).norm() / zero.state.amplitude(0).norm();
        let expected = tau_exact(4, xi, t).unwrap() / tau_exact(2, xi, t).unwrap();
        assert!((ratio - expected).abs() < 1e-6);
        let slice2: f64 = r.state.slice(Mode::A, 2).unwrap().norm_sqr();
        assert!((zero.probability - slice2).abs() < 1e-12);
        assert!(zero.probability + one.probability < 1.0);
        assert!(extract_logical(&r.state, 3).is_err());
    }

    #[test]
    fn qudit_ecs_is_normalized_and_symmetric() {
        let space = FockSpace::new(40).unwrap();
        let s = qudit_ecs(1.2, &space).unwrap();
        assert!(s.is_normalized());
        assert!(s.amplitude(0, 0).norm() < 1e-12);
    }
}
