//! Two-mode pure states on a `(cutoff_a+1) × (cutoff_b+1)` amplitude grid.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CatsimError, Result};
use crate::fock::{PureState, NORM_TOLERANCE, ZERO_NORM};

/// Which of the two modes an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
}

impl Mode {
    pub fn other(self) -> Mode {
        match self {
            Mode::A => Mode::B,
            Mode::B => Mode::A,
        }
    }
}

/// `amplitudes[(n_a, n_b)] = ⟨n_a, n_b|Ψ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModePureState {
    amplitudes: Array2<C64>,
}

/// A post-selected, renormalized state and the probability of the outcome
/// that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct HeraldResult<S> {
    pub state: S,
    pub probability: f64,
}

impl TwoModePureState {
    pub fn from_amplitudes(amplitudes: Array2<C64>) -> Result<Self> {
        if amplitudes.nrows() < 1 || amplitudes.ncols() < 1 {
            return Err(invalid("two-mode grid must be non-empty"));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CatsimError::InvalidState("non-finite amplitude".into()));
        }
        Ok(Self { amplitudes })
    }

    pub(crate) fn from_array_unchecked(amplitudes: Array2<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn zeros(cutoff_a: usize, cutoff_b: usize) -> Self {
        Self { amplitudes: Array2::zeros((cutoff_a + 1, cutoff_b + 1)) }
    }

    /// Drops every component with more than `max_total` photons in total and
    /// returns the discarded probability. The state is not renormalized.
    pub fn truncate_total(&self, max_total: usize) -> (Self, f64) {
        let mut amplitudes = self.amplitudes.clone();
        let mut dropped = 0.0;
        for ((a, b), z) in amplitudes.indexed_iter_mut() {
            if a + b > max_total {
                dropped += z.norm_sqr();
                *z = C64::new(0.0, 0.0);
            }
        }
        (Self { amplitudes }, dropped)
    }

    /// `|n_a, n_b⟩`.
    pub fn fock(n_a: usize, n_b: usize, cutoff_a: usize, cutoff_b: usize) -> Result<Self> {
        if n_a > cutoff_a || n_b > cutoff_b {
            return Err(invalid(format!("|{n_a},{n_b}⟩ lies outside cutoffs ({cutoff_a},{cutoff_b})")));
        }
        let mut s = Self::zeros(cutoff_a, cutoff_b);
        s.amplitudes[(n_a, n_b)] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn cutoff_a(&self) -> usize {
        self.amplitudes.nrows() - 1
    }

    pub fn cutoff_b(&self) -> usize {
        self.amplitudes.ncols() - 1
    }

    pub fn cutoff(&self, mode: Mode) -> usize {
        match mode {
            Mode::A => self.cutoff_a(),
            Mode::B => self.cutoff_b(),
        }
    }

    pub fn amplitudes(&self) -> &Array2<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Array2<C64> {
        self.amplitudes
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize) -> C64 {
        self.amplitudes.get((n_a, n_b)).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n >= ZERO_NORM) {
            return Err(CatsimError::ZeroState(n));
        }
        Ok(Self { amplitudes: self.amplitudes.mapv(|z| z / n) })
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { amplitudes: self.amplitudes.mapv(|z| z * factor) }
    }

    /// Mean photon number of one mode.
    pub fn mean_photon_number(&self, mode: Mode) -> f64 {
        let mut acc = 0.0;
        for ((a, b), z) in self.amplitudes.indexed_iter() {
            let n = if mode == Mode::A { a } else { b };
            acc += n as f64 * z.norm_sqr();
        }
        acc / self.norm_sqr()
    }

    /// Applies `e^{iφn̂}` to one mode.
    pub fn phase_rotate(&self, mode: Mode, phi: f64) -> Self {
        let mut out = self.amplitudes.clone();
        for ((a, b), z) in out.indexed_iter_mut() {
            let n = if mode == Mode::A { a } else { b };
            *z *= C64::from_polar(1.0, n as f64 * phi);
        }
        Self { amplitudes: out }
    }

    /// `⟨a|Ψ⟩⟨b|`-style inner product over both modes.
    pub fn inner_product(&self, other: &Self) -> Result<C64> {
        if self.amplitudes.dim() != other.amplitudes.dim() {
            return Err(invalid("two-mode grids differ in shape"));
        }
        Ok(self.amplitudes.iter().zip(other.amplitudes.iter()).map(|(x, y)| x.conj() * y).sum())
    }

    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        for s in [self, other] {
            if !s.is_normalized() {
                return Err(CatsimError::InvalidState(format!("state norm² {} is not 1", s.norm_sqr())));
            }
        }
        Ok(self.inner_product(other)?.norm_sqr().min(1.0))
    }

    /// Number of non-negligible Schmidt coefficients, via the eigenvalues of
    /// the reduced state of mode A.
    pub fn schmidt_rank(&self, threshold: f64) -> Result<usize> {
        let rho = crate::modes::partial_trace_pure(self, Mode::A);
        let values = crate::modes::eigen::hermitian_eigenvalues(rho.matrix())?;
        Ok(values.iter().filter(|&&v| v > threshold).count())
    }

    /// Slice with one mode fixed to `n`, unnormalized.
    pub fn slice(&self, mode: Mode, n: usize) -> Result<PureState> {
        if n > self.cutoff(mode) {
            return Err(invalid(format!("Fock index {n} exceeds cutoff {} of mode {:?}", self.cutoff(mode), mode)));
        }
        let v: Vec<C64> = match mode {
            Mode::A => self.amplitudes.row(n).to_vec(),
            Mode::B => self.amplitudes.column(n).to_vec(),
        };
        if v.len() < 2 {
            return Err(invalid("the surviving mode needs cutoff >= 1"));
        }
        Ok(PureState::from_vec_unchecked(v))
    }
}

/// `|a⟩ ⊗ |b⟩`.
pub fn tensor(a: &PureState, b: &PureState) -> TwoModePureState {
    let mut grid = Array2::zeros((a.dim(), b.dim()));
    for (i, x) in a.amplitudes().iter().enumerate() {
        for (j, y) in b.amplitudes().iter().enumerate() {
            grid[(i, j)] = x * y;
        }
    }
    TwoModePureState { amplitudes: grid }
}

/// Ideal number-resolving projection `⟨n|` on `mode`; the other mode is
/// returned renormalized.
pub fn project_fock(s: &TwoModePureState, mode: Mode, n: usize) -> Result<HeraldResult<PureState>> {
    let slice = s.slice(mode, n)?;
    let probability = slice.norm_sqr();
    if !(probability >= 1e-14) {
        return Err(CatsimError::ImpossibleOutcome(probability));
    }
    let state = slice.scaled(C64::new(1.0 / probability.sqrt(), 0.0));
    Ok(HeraldResult { state, probability })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::make_vacuum;

    #[test]
    fn tensor_of_vacua() {
        let v = make_vacuum(4).unwrap();
        let t = tensor(&v, &v);
        assert_eq!(t, TwoModePureState::fock(0, 0, 4, 4).unwrap());
    }

    #[test]
    fn tensor_is_normalized_product() {
        let a = crate::fock::loose(20).coherent(C64::new(0.5, 0.3)).unwrap();
        let b = crate::fock::loose(20).squeezed_vacuum(0.4).unwrap();
        let t = tensor(&a, &b);
        assert!((t.norm() - 1.0).abs() < 1e-13);
        assert_eq!(t.schmidt_rank(1e-10).unwrap(), 1);
    }

    #[test]
    fn projection_probabilities_sum_to_one() {
        let a = crate::fock::loose(20).coherent(C64::new(0.5, 0.3)).unwrap();
        let b = crate::fock::loose(20).squeezed_vacuum(0.4).unwrap();
        let t = tensor(&a, &b);
        let total: f64 = (0..=20).map(|n| project_fock(&t, Mode::B, n).map(|h| h.probability).unwrap_or(0.0)).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let h = project_fock(&t, Mode::B, 0).unwrap();
        assert!((crate::fock::fidelity_pure(&h.state, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(project_fock(&t, Mode::B, 1), Err(CatsimError::ImpossibleOutcome(_))));
        assert!(project_fock(&t, Mode::A, 21).is_err());
    }
}
