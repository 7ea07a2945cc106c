//! Fixtures shared by the benchmarks.

use catsim::protocols::{run_ecs_protocol, simulate_heralded};
use catsim::{tensor, FockSpace, Precision, ProtocolConfig, PureState, Result, TwoModePureState};

/// Heralded odd cat at the usual operating point (ξ = 0.43, T = 0.99).
pub fn heralded_cat() -> Result<PureState> {
    let h = simulate_heralded(0.43, 0.99, 1.0, &Precision::default())?;
    Ok(h.state.as_pure().expect("ideal detection").clone())
}

/// Two squeezed vacua on a 41×41 grid, the input of the two-mode protocol.
pub fn squeezed_pair() -> Result<TwoModePureState> {
    let space = FockSpace::new(40)?;
    Ok(tensor(&space.squeezed_vacuum(0.4)?, &space.squeezed_vacuum(-0.4)?))
}

/// Output of the two-mode protocol at default settings.
pub fn ecs_state() -> Result<TwoModePureState> {
    Ok(run_ecs_protocol(&ProtocolConfig::two_mode(0.43, 0.99, 1.2))?.state)
}
