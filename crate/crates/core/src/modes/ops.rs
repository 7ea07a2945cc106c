//! Single-mode linear maps on truncated states. None of them renormalize.

use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::fock::PureState;

/// `â|ψ⟩`: `out[n] = √(n+1)·ψ[n+1]`, with `out[cutoff] = 0`.
pub fn annihilate(s: &PureState) -> PureState {
    let amps = s.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for n in 0..amps.len() - 1 {
        out[n] = amps[n + 1] * ((n + 1) as f64).sqrt();
    }
    PureState::from_vec_unchecked(out)
}

/// `â†|ψ⟩` restricted to the truncated basis; the weight pushed above the
/// cutoff is dropped.
pub fn create(s: &PureState) -> PureState {
    let amps = s.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for n in 1..amps.len() {
        out[n] = amps[n - 1] * (n as f64).sqrt();
    }
    PureState::from_vec_unchecked(out)
}

/// `T^{n̂}|ψ⟩`: `out[n] = Tⁿ·ψ[n]` for `0 < T <= 1`.
pub fn attenuate(s: &PureState, transmission: f64) -> Result<PureState> {
    if !(transmission > 0.0 && transmission <= 1.0) {
        return Err(invalid(format!("attenuation factor must lie in (0, 1], got {transmission}")));
    }
    let mut factor = 1.0;
    let out = s
        .amplitudes()
        .iter()
        .map(|z| {
            let v = z * factor;
            factor *= transmission;
            v
        })
        .collect();
    Ok(PureState::from_vec_unchecked(out))
}

/// `e^{iφn̂}|ψ⟩`, mapping `|β⟩` to `|βe^{iφ}⟩`.
pub fn phase_rotate(s: &PureState, phi: f64) -> PureState {
    let out = s
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, z)| z * C64::from_polar(1.0, n as f64 * phi))
        .collect();
    PureState::from_vec_unchecked(out)
}
