//! Density matrices over one or two truncated modes, reductions, and the
//! trace distance.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{invalid, CatsimError, Result};
use crate::fock::PureState;
use crate::modes::eigen::{hermitian_eigen, hermitian_eigenvalues, JACOBI_MAX_SWEEPS};
use crate::modes::two_mode::{HeraldResult, Mode, TwoModePureState};

/// Density matrix over a one- or two-mode truncated basis. Two-mode indices
/// are flattened row-major in `n_A`: `index = n_A · dim_B + n_B`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    dims: Vec<usize>,
    rho: Array2<C64>,
}

impl MixedState {
    /// `dims` holds the per-mode dimensions (`cutoff + 1`).
    pub fn from_matrix(dims: Vec<usize>, rho: Array2<C64>) -> Result<Self> {
        if dims.is_empty() || dims.len() > 2 || dims.iter().any(|&d| d < 2) {
            return Err(invalid("mixed states cover one or two modes, each with dimension >= 2"));
        }
        let total: usize = dims.iter().product();
        if rho.dim() != (total, total) {
            return Err(invalid(format!("density matrix is {:?}, expected {total}x{total}", rho.dim())));
        }
        Ok(Self { dims, rho })
    }

    pub fn from_pure(s: &PureState) -> Self {
        let v = Array1::from(s.amplitudes().to_vec());
        Self { dims: vec![s.dim()], rho: outer(&v, &v) }
    }

    pub fn from_two_mode(s: &TwoModePureState) -> Self {
        let dims = vec![s.cutoff_a() + 1, s.cutoff_b() + 1];
        let v = Array1::from_iter(s.amplitudes().iter().copied());
        Self { dims, rho: outer(&v, &v) }
    }

    /// `Σ_k |v_k⟩⟨v_k|` for unnormalized branch vectors.
    pub fn from_ensemble(dims: Vec<usize>, branches: &[Array1<C64>]) -> Result<Self> {
        let total: usize = dims.iter().product();
        let mut rho = Array2::<C64>::zeros((total, total));
        for v in branches {
            if v.len() != total {
                return Err(invalid("branch length does not match dimensions"));
            }
            rho += &outer(v, v);
        }
        Self::from_matrix(dims, rho)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn modes(&self) -> usize {
        self.dims.len()
    }

    pub fn dimension(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        (0..self.dimension()).map(|i| self.rho[(i, i)].re).sum()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.rho)
    }

    /// Checks Hermiticity (1e-10), unit trace (1e-9) and eigenvalues ≥ −1e-9.
    pub fn validate(&self) -> Result<()> {
        let n = self.dimension();
        for i in 0..n {
            for j in 0..n {
                if (self.rho[(i, j)] - self.rho[(j, i)].conj()).norm() > 1e-10 {
                    return Err(CatsimError::InvalidState(format!("not Hermitian at ({i},{j})")));
                }
            }
        }
        if (self.trace() - 1.0).abs() > 1e-9 {
            return Err(CatsimError::InvalidState(format!("trace {} is not 1", self.trace())));
        }
        if let Some(min) = self.eigenvalues()?.first() {
            if *min < -1e-9 {
                return Err(CatsimError::InvalidState(format!("negative eigenvalue {min}")));
            }
        }
        Ok(())
    }

    /// `⟨ψ|ρ|ψ⟩` for a single-mode state of matching cutoff.
    pub fn fidelity_with_pure(&self, psi: &PureState) -> Result<f64> {
        if self.dims != [psi.dim()] {
            return Err(invalid("pure state does not match the density matrix dimensions"));
        }
        let v = Array1::from(psi.amplitudes().to_vec());
        let rv = self.rho.dot(&v);
        let f: C64 = v.iter().zip(rv.iter()).map(|(a, b)| a.conj() * b).sum();
        Ok(f.re.clamp(0.0, 1.0))
    }

    /// Applies `e^{iφn̂}` on one mode.
    pub fn phase_rotate(&self, mode: Mode, phi: f64) -> Result<Self> {
        let n_of = self.photon_number_map(mode)?;
        let mut rho = self.rho.clone();
        for ((i, j), z) in rho.indexed_iter_mut() {
            *z *= C64::from_polar(1.0, (n_of[i] as f64 - n_of[j] as f64) * phi);
        }
        Ok(Self { dims: self.dims.clone(), rho })
    }

    fn photon_number_map(&self, mode: Mode) -> Result<Vec<usize>> {
        let total = self.dimension();
        Ok(match (self.dims.len(), mode) {
            (1, Mode::A) => (0..total).collect(),
            (1, Mode::B) => return Err(invalid("single-mode state has no mode B")),
            (_, Mode::A) => (0..total).map(|i| i / self.dims[1]).collect(),
            (_, Mode::B) => (0..total).map(|i| i % self.dims[1]).collect(),
        })
    }
}

fn outer(a: &Array1<C64>, b: &Array1<C64>) -> Array2<C64> {
    let mut m = Array2::<C64>::zeros((a.len(), b.len()));
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            m[(i, j)] = x * y.conj();
        }
    }
    m
}

/// Reduced state of `keep` for a two-mode pure state.
pub fn partial_trace_pure(s: &TwoModePureState, keep: Mode) -> MixedState {
    let amps = s.amplitudes();
    let (dk, dt) = match keep {
        Mode::A => (amps.nrows(), amps.ncols()),
        Mode::B => (amps.ncols(), amps.nrows()),
    };
    let at = |k: usize, t: usize| match keep {
        Mode::A => amps[(k, t)],
        Mode::B => amps[(t, k)],
    };
    let mut rho = Array2::<C64>::zeros((dk, dk));
    for i in 0..dk {
        for j in 0..dk {
            rho[(i, j)] = (0..dt).map(|t| at(i, t) * at(j, t).conj()).sum();
        }
    }
    MixedState { dims: vec![dk], rho }
}

/// Reduced state of `keep` for a two-mode density matrix.
pub fn partial_trace(s: &MixedState, keep: Mode) -> Result<MixedState> {
    if s.modes() != 2 {
        return Err(invalid("partial trace needs a two-mode state"));
    }
    let (da, db) = (s.dims[0], s.dims[1]);
    let rho = &s.rho;
    let out = match keep {
        Mode::A => Array2::from_shape_fn((da, da), |(i, j)| (0..db).map(|t| rho[(i * db + t, j * db + t)]).sum()),
        Mode::B => Array2::from_shape_fn((db, db), |(i, j)| (0..da).map(|t| rho[(t * db + i, t * db + j)]).sum()),
    };
    let dim = out.nrows();
    Ok(MixedState { dims: vec![dim], rho: out })
}

/// Projects one mode of a two-mode density matrix onto `|n⟩`.
pub fn project_fock_mixed(s: &MixedState, mode: Mode, n: usize) -> Result<HeraldResult<MixedState>> {
    if s.modes() != 2 {
        return Err(invalid("projection needs a two-mode state"));
    }
    let (da, db) = (s.dims[0], s.dims[1]);
    let (dk, limit) = match mode {
        Mode::A => (db, da),
        Mode::B => (da, db),
    };
    if n >= limit {
        return Err(invalid(format!("Fock index {n} exceeds the cutoff of mode {mode:?}")));
    }
    let idx = |k: usize| match mode {
        Mode::A => n * db + k,
        Mode::B => k * db + n,
    };
    let block = Array2::from_shape_fn((dk, dk), |(i, j)| s.rho[(idx(i), idx(j))]);
    let probability: f64 = (0..dk).map(|i| block[(i, i)].re).sum();
    if !(probability >= 1e-14) {
        return Err(CatsimError::ImpossibleOutcome(probability));
    }
    Ok(HeraldResult { state: MixedState { dims: vec![dk], rho: block / C64::new(probability, 0.0) }, probability })
}

/// `½ Σ|λᵢ(ρ − σ)|`, clamped to `[0, 1]`.
pub fn trace_distance(rho: &MixedState, sigma: &MixedState) -> Result<f64> {
    if rho.dims != sigma.dims {
        return Err(invalid(format!("dimension mismatch: {:?} vs {:?}", rho.dims, sigma.dims)));
    }
    let diff = &rho.rho - &sigma.rho;
    let values = hermitian_eigenvalues(&diff)?;
    Ok((0.5 * values.iter().map(|v| v.abs()).sum::<f64>()).clamp(0.0, 1.0))
}

/// Trace distance between `Σ|vᵢ⟩⟨vᵢ|` and `Σ|wⱼ⟩⟨wⱼ|` without forming the
/// full density matrices: both are expressed in an orthonormal basis of the
/// joint span, obtained from the Gram matrix of all branch vectors.
pub fn trace_distance_ensembles(rho: &[Array1<C64>], sigma: &[Array1<C64>]) -> Result<f64> {
    let all: Vec<&Array1<C64>> = rho.iter().chain(sigma.iter()).collect();
    if all.is_empty() {
        return Ok(0.0);
    }
    let len = all[0].len();
    if all.iter().any(|v| v.len() != len) {
        return Err(invalid("ensemble vectors differ in length"));
    }
    let k = all.len();
    let mut gram = Array2::<C64>::zeros((k, k));
    for i in 0..k {
        for j in i..k {
            let g: C64 = all[i].iter().zip(all[j].iter()).map(|(a, b)| a.conj() * b).sum();
            gram[(i, j)] = g;
            gram[(j, i)] = g.conj();
        }
    }
    let scale = gram.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let eig = hermitian_eigen(&gram, 1e-14 * scale, JACOBI_MAX_SWEEPS)?;
    let max = eig.values.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return Ok(0.0);
    }
    let kept: Vec<usize> = (0..k).filter(|&i| eig.values[i] > 1e-14 * max).collect();
    let r = kept.len();
    // coordinate of vector j along basis vector i: √λᵢ · conj(Q[j, i])
    let coord = |j: usize| -> Array1<C64> {
        Array1::from_iter(kept.iter().map(|&i| eig.vectors[(j, i)].conj() * eig.values[i].sqrt()))
    };
    let mut diff = Array2::<C64>::zeros((r, r));
    for j in 0..k {
        let c = coord(j);
        let sign = if j < rho.len() { 1.0 } else { -1.0 };
        diff += &(outer(&c, &c) * C64::new(sign, 0.0));
    }
    let values = hermitian_eigenvalues(&diff)?;
    Ok((0.5 * values.iter().map(|v| v.abs()).sum::<f64>()).clamp(0.0, 1.0))
}
