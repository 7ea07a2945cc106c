//! Oracle-equivalence checks run by the `selftest` command.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{run_ecs_protocol, simulate_heralded, target_cat, HeraldedState, Precision, ProtocolConfig};
use crate::analytic::{fidelity_closed_form, herald_probability, optimal_xi_t, xi_t};
use crate::error::Result;
use crate::fock::{fidelity_pure, normalize, FockSpace, CatSign};
use crate::modes::{annihilate, attenuate, beam_splitter, loss_channel, tensor, wigner, BeamSplitterSpec, Mode, PhaseSpaceGrid, TwoModePureState};
use crate::optimize::grid_search_max;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfTestCheck {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn check(name: &'static str, deviation: f64, tolerance: f64) -> SelfTestCheck {
    SelfTestCheck { name, deviation, tolerance, passed: deviation <= tolerance }
}

/// Runs every check; each compares two independent routes to one quantity.
pub fn run_selftest() -> Result<Vec<SelfTestCheck>> {
    let precision = Precision::default();
    let mut out = Vec::new();

    let (xi, t, alpha) = (0.5, 0.8, 1.2);
    let h = simulate_heralded(xi, t, 1.0, &precision)?;
    let sim = match &h.state {
        HeraldedState::Pure(s) => s.clone(),
        HeraldedState::Mixed(_) => unreachable!("ideal detection"),
    };
    let space = FockSpace::new(sim.cutoff())?;
    let operator = normalize(&annihilate(&attenuate(&space.squeezed_vacuum(xi)?, t)?))?.0;
    out.push(check("heralding_identity", 1.0 - fidelity_pure(&sim, &operator)?, 1e-10));
    out.push(check("herald_probability", (h.probability - herald_probability(xi, t)?).abs(), 1e-8));
    let simulated = h.state.fidelity_with(&target_cat(alpha, sim.cutoff(), precision.tail_tolerance)?)?;
    out.push(check("fidelity_closed_form", (simulated - fidelity_closed_form(alpha, xi_t(xi, t))?).abs(), 1e-6));

    let best = optimal_xi_t(alpha)?;
    let grid = grid_search_max(|x| fidelity_closed_form(alpha, x), 0.0, 0.95, 19_001)?;
    out.push(check("optimal_xi_t", (grid.value - fidelity_closed_form(alpha, best)?).max(0.0), 1e-9));

    let fock = FockSpace::new(40)?;
    let mut unitarity: f64 = 0.0;
    for k in 0..5 {
        let phase = 0.7 * k as f64;
        let a = fock.coherent(C64::from_polar(0.4 + 0.2 * k as f64, phase))?;
        let b = fock.squeezed_vacuum(0.1 * k as f64)?;
        let s = beam_splitter(&tensor(&a, &b), BeamSplitterSpec::new(0.3 + 0.12 * k as f64)?)?;
        unitarity = unitarity.max((s.norm_sqr() - 1.0).abs());
    }
    out.push(check("beam_splitter_unitarity", unitarity, 1e-9));

    let (beta, gamma, spec) = (C64::new(0.8, -0.3), C64::new(-0.2, 0.5), BeamSplitterSpec::new(0.6)?);
    let (tt, r) = (spec.transmission(), spec.reflection());
    let moved = beam_splitter(&tensor(&fock.coherent(beta)?, &fock.coherent(gamma)?), spec)?;
    let expected = tensor(&fock.coherent(beta * tt + gamma * r)?, &fock.coherent(gamma * tt - beta * r)?);
    out.push(check("coherent_covariance", 1.0 - moved.fidelity(&expected)?, 1e-9));

    let lossy = loss_channel(&fock.coherent(beta)?, Mode::A, 0.7)?;
    out.push(check("loss_trace", (lossy.trace() - 1.0).abs(), 1e-9));
    let shrunk = fock.coherent(beta * 0.7f64.sqrt())?;
    out.push(check("loss_coherent_covariance", 1.0 - lossy.fidelity_with_pure(&shrunk)?, 1e-9));

    let ecs = run_ecs_protocol(&ProtocolConfig::two_mode(0.45, 0.9, alpha))?;
    out.push(check("ecs_antisymmetry", antisymmetry_residual(&ecs.state), 1e-12));

    let odd = fock.cat(C64::new(1.3, 0.0), CatSign::Minus)?;
    let w = wigner(&odd, &PhaseSpaceGrid::new((0.0, 1.0), (0.0, 1.0), 2)?)?;
    out.push(check("wigner_odd_cat_origin", (w[(0, 0)] + std::f64::consts::FRAC_1_PI).abs(), 1e-12));
    Ok(out)
}

/// Largest amplitude violating `⟨n,m|Ψ⟩ = −⟨m,n|Ψ⟩` or the `|n−m| = 2` support.
pub fn antisymmetry_residual(s: &TwoModePureState) -> f64 {
    let (ca, cb) = (s.cutoff_a(), s.cutoff_b());
    let mut worst: f64 = 0.0;
    for n in 0..=ca {
        for m in 0..=cb {
            let v = s.amplitude(n, m);
            if n.abs_diff(m) != 2 {
                worst = worst.max(v.norm());
            }
            if m <= ca && n <= cb {
                worst = worst.max((v + s.amplitude(m, n)).norm());
            }
        }
    }
    worst
}
