//! Pure-loss channel and detector models.
//!
//! Loss with transmitted energy fraction `η` couples the mode to a vacuum
//! ancilla through a beam splitter of transmission `√η` and discards the
//! ancilla. Reading off the ancilla photon number `k` gives the Kraus
//! operators `K_k = ⟨k|_anc BS |0⟩_anc`, which act on each branch separately.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{invalid, CatsimError, Result};
use crate::fock::PureState;
use crate::modes::beam_splitter::single_mode_column;
use crate::modes::mixed::MixedState;
use crate::modes::two_mode::{HeraldResult, Mode, TwoModePureState};
use crate::special::ln_factorials;

/// Borrowed view over the state kinds the channels accept.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a PureState),
    TwoMode(&'a TwoModePureState),
    Mixed(&'a MixedState),
}

impl<'a> From<&'a PureState> for StateRef<'a> {
    fn from(s: &'a PureState) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a TwoModePureState> for StateRef<'a> {
    fn from(s: &'a TwoModePureState) -> Self {
        StateRef::TwoMode(s)
    }
}

impl<'a> From<&'a MixedState> for StateRef<'a> {
    fn from(s: &'a MixedState) -> Self {
        StateRef::Mixed(s)
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("loss transmissivity must lie in [0, 1], got {eta}")));
    }
    Ok(())
}

/// Kraus operators of the pure-loss channel on a mode of dimension `dim`,
/// as sparse lists: `kraus[k]` holds `(m, K_k[m−k, m])` for `m >= k`.
pub fn loss_kraus(dim: usize, eta: f64) -> Result<Vec<Vec<(usize, f64)>>> {
    check_eta(eta)?;
    let t = eta.sqrt();
    let r = (1.0 - eta).sqrt();
    let lf = ln_factorials(dim);
    let mut kraus = vec![Vec::new(); dim];
    for m in 0..dim {
        // BS |m, 0⟩ = Σ_n c_n |n, m−n⟩ with (T â† − R b̂†)^m / √m!
        let column = single_mode_column(m, t, -r, &lf);
        for k in 0..=m {
            let value = column[m - k];
            if value != 0.0 {
                kraus[k].push((m, value));
            }
        }
    }
    Ok(kraus)
}

/// Dense Kraus matrices, mainly for inspection and tests.
pub fn loss_kraus_matrices(dim: usize, eta: f64) -> Result<Vec<Array2<f64>>> {
    Ok(loss_kraus(dim, eta)?
        .into_iter()
        .enumerate()
        .map(|(k, entries)| {
            let mut m = Array2::<f64>::zeros((dim, dim));
            for (col, v) in entries {
                m[(col - k, col)] = v;
            }
            m
        })
        .collect())
}

/// Unnormalized branches `(1 ⊗ K_k)|Ψ⟩` of a two-mode pure state after loss on `mode`.
pub fn loss_branches(s: &TwoModePureState, mode: Mode, eta: f64) -> Result<Vec<TwoModePureState>> {
    let dim = s.cutoff(mode) + 1;
    let kraus = loss_kraus(dim, eta)?;
    let amps = s.amplitudes();
    let mut out = Vec::with_capacity(dim);
    for (k, entries) in kraus.iter().enumerate() {
        if entries.is_empty() {
            continue;
        }
        let mut grid = Array2::<C64>::zeros(amps.dim());
        for &(m, v) in entries {
            match mode {
                Mode::A => {
                    let src = amps.row(m);
                    let mut dst = grid.row_mut(m - k);
                    dst.scaled_add(C64::new(v, 0.0), &src);
                }
                Mode::B => {
                    let src = amps.column(m);
                    let mut dst = grid.column_mut(m - k);
                    dst.scaled_add(C64::new(v, 0.0), &src);
                }
            }
        }
        out.push(TwoModePureState::from_array_unchecked(grid));
    }
    Ok(out)
}

/// Pure-loss channel with transmissivity `η` on `mode`.
pub fn loss_channel<'a>(state: impl Into<StateRef<'a>>, mode: Mode, eta: f64) -> Result<MixedState> {
    check_eta(eta)?;
    match state.into() {
        StateRef::Pure(s) => {
            if mode != Mode::A {
                return Err(invalid("a single-mode state only has mode A"));
            }
            let kraus = loss_kraus(s.dim(), eta)?;
            let branches: Vec<Array1<C64>> = kraus
                .iter()
                .enumerate()
                .map(|(k, entries)| {
                    let mut v = Array1::<C64>::zeros(s.dim());
                    for &(m, val) in entries {
                        v[m - k] += s.amplitude(m) * val;
                    }
                    v
                })
                .collect();
            MixedState::from_ensemble(vec![s.dim()], &branches)
        }
        StateRef::TwoMode(s) => {
            let dims = vec![s.cutoff_a() + 1, s.cutoff_b() + 1];
            let branches: Vec<Array1<C64>> = loss_branches(s, mode, eta)?
                .into_iter()
                .map(|b| Array1::from_iter(b.into_amplitudes()))
                .collect();
            MixedState::from_ensemble(dims, &branches)
        }
        StateRef::Mixed(rho) => loss_channel_mixed(rho, mode, eta),
    }
}

fn loss_channel_mixed(rho: &MixedState, mode: Mode, eta: f64) -> Result<MixedState> {
    let dims = rho.dims().to_vec();
    let (dim_mode, stride, other) = match (dims.len(), mode) {
        (1, Mode::A) => (dims[0], 1, 1),
        (1, Mode::B) => return Err(invalid("a single-mode state only has mode A")),
        (_, Mode::A) => (dims[0], dims[1], dims[1]),
        (_, Mode::B) => (dims[1], 1, dims[0]),
    };
    let kraus = loss_kraus(dim_mode, eta)?;
    let total = rho.dimension();
    // flat index of (mode photon number n, index of the other mode o)
    let flat = |n: usize, o: usize| -> usize {
        match (dims.len(), mode) {
            (1, _) => n,
            (_, Mode::A) => n * stride + o,
            (_, Mode::B) => o * dims[1] + n,
        }
    };
    let src = rho.matrix();
    let mut out = Array2::<C64>::zeros((total, total));
    for (k, entries) in kraus.iter().enumerate() {
        for &(m1, v1) in entries {
            for &(m2, v2) in entries {
                let w = v1 * v2;
                for o1 in 0..other {
                    for o2 in 0..other {
                        out[(flat(m1 - k, o1), flat(m2 - k, o2))] += src[(flat(m1, o1), flat(m2, o2))] * w;
                    }
                }
            }
        }
    }
    MixedState::from_matrix(dims, out)
}

/// Number-resolving detection of `n` photons on `mode` behind a detector of
/// efficiency `eta`: loss followed by the ideal projector `⟨n|`.
pub fn herald_with_efficiency(s: &TwoModePureState, mode: Mode, n: usize, eta: f64) -> Result<HeraldResult<MixedState>> {
    if n > s.cutoff(mode) {
        return Err(invalid(format!("Fock index {n} exceeds cutoff {} of mode {mode:?}", s.cutoff(mode))));
    }
    let branches: Vec<Array1<C64>> = loss_branches(s, mode, eta)?
        .into_iter()
        .map(|b| Array1::from(b.slice(mode, n).expect("index checked").into_amplitudes()))
        .collect();
    let dim = s.cutoff(mode.other()) + 1;
    let unnormalized = MixedState::from_ensemble(vec![dim], &branches)?;
    normalize_herald(unnormalized)
}

/// On-off detection on `mode`: the POVM `{|0⟩⟨0|, 1 − |0⟩⟨0|}`. `click = true`
/// selects the second element.
pub fn project_on_off(s: &TwoModePureState, mode: Mode, click: bool) -> Result<HeraldResult<MixedState>> {
    let range: Vec<usize> = if click { (1..=s.cutoff(mode)).collect() } else { vec![0] };
    let branches: Vec<Array1<C64>> = range
        .into_iter()
        .map(|n| Array1::from(s.slice(mode, n).expect("index in range").into_amplitudes()))
        .collect();
    let dim = s.cutoff(mode.other()) + 1;
    normalize_herald(MixedState::from_ensemble(vec![dim], &branches)?)
}

fn normalize_herald(unnormalized: MixedState) -> Result<HeraldResult<MixedState>> {
    let probability = unnormalized.trace();
    if !(probability >= 1e-14) {
        return Err(CatsimError::ImpossibleOutcome(probability));
    }
    let dims = unnormalized.dims().to_vec();
    let rho = unnormalized.matrix() / C64::new(probability, 0.0);
    Ok(HeraldResult { state: MixedState::from_matrix(dims, rho)?, probability })
}
