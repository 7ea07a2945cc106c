//! Two-mode beam splitter `BS = exp[θ/2 (â†b̂ − âb̂†)]` with `T = cos(θ/2)`.
//!
//! Convention: conjugating the creation operators gives
//! `BS â† BS† = T â† − R b̂†` and `BS b̂† BS† = R â† + T b̂†`, so a coherent input
//! `|β, γ⟩` leaves as `|Tβ + Rγ, Tγ − Rβ⟩` (in particular `|β,0⟩ → |Tβ, −Rβ⟩`).
//!
//! The unitary conserves total photon number, so it is applied block by block.
//! Columns whose input has all photons in one mode are closed-form binomial
//! expansions. Other columns come from diagonalizing the block generator: with
//! `D = diag(iᵐ)`, the generator equals `θ/2 · D(−iS)D⁻¹` where `S` is the real
//! symmetric tridiagonal matrix with off-diagonals `√((m+1)(N−m))`, whose
//! spectrum is exactly `{−N, −N+2, …, N}`.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CatsimError, Result};
use crate::modes::two_mode::TwoModePureState;
use crate::special::{ln_binomial, ln_factorials, pow_usize};

/// Probability allowed to leak above the grid before the result is rejected.
pub const LEAKAGE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterSpec {
    transmission: f64,
}

impl BeamSplitterSpec {
    /// `T` must lie in `(0, 1]`.
    pub fn new(transmission: f64) -> Result<Self> {
        if !(transmission > 0.0 && transmission <= 1.0) {
            return Err(invalid(format!("transmission must lie in (0, 1], got {transmission}")));
        }
        Ok(Self { transmission })
    }

    /// The balanced splitter `T = 1/√2`.
    pub fn balanced() -> Self {
        Self { transmission: std::f64::consts::FRAC_1_SQRT_2 }
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    /// `R = sin(θ/2) = √(1 − T²)`.
    pub fn reflection(&self) -> f64 {
        (1.0 - self.transmission * self.transmission).max(0.0).sqrt()
    }

    /// `θ = 2 arccos T`.
    pub fn theta(&self) -> f64 {
        2.0 * self.transmission.acos()
    }
}

/// Amplitudes of `(xâ† + yb̂†)^N/√N! |0,0⟩` on `|m, N−m⟩`, `m = 0..=N`.
/// Handles `x = 0` or `y = 0` without logarithms.
pub(crate) fn single_mode_column(n: usize, x: f64, y: f64, lf: &[f64]) -> Vec<f64> {
    (0..=n)
        .map(|m| {
            let k = n - m;
            if (x == 0.0 && m > 0) || (y == 0.0 && k > 0) {
                return 0.0;
            }
            let mag = if x != 0.0 && y != 0.0 {
                (0.5 * ln_binomial(lf, n, m) + m as f64 * x.abs().ln() + k as f64 * y.abs().ln()).exp()
            } else {
                (0.5 * ln_binomial(lf, n, m)).exp() * pow_usize(x.abs(), m) * pow_usize(y.abs(), k)
            };
            let negative = (x < 0.0 && m % 2 == 1) ^ (y < 0.0 && k % 2 == 1);
            if negative {
                -mag
            } else {
                mag
            }
        })
        .collect()
}

/// Full block unitary `⟨m, N−m|BS|p, N−p⟩` (real in this convention).
pub(crate) fn block_unitary(n: usize, spec: BeamSplitterSpec) -> Array2<f64> {
    let dim = n + 1;
    let s = DMatrix::<f64>::from_fn(dim, dim, |i, j| {
        if i == j + 1 || j == i + 1 {
            let m = i.min(j);
            (((m + 1) * (n - m)) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(s);
    let half_theta = 0.5 * spec.theta();
    // eigenvalues snapped to the exact spectrum {-N, -N+2, ..., N}
    let (cos, sin): (Vec<f64>, Vec<f64>) = eig
        .eigenvalues
        .iter()
        .map(|&lambda| {
            let exact = 2.0 * ((lambda + n as f64) / 2.0).round() - n as f64;
            let phase = half_theta * exact;
            (phase.cos(), phase.sin())
        })
        .unzip();
    let v = &eig.eigenvectors;
    // U = D exp(−iθ/2 S) D⁻¹ with D = diag(iᵐ); only the real part survives
    Array2::from_shape_fn((dim, dim), |(m, p)| {
        let (mut re, mut im) = (0.0, 0.0);
        for k in 0..dim {
            let w = v[(m, k)] * v[(p, k)];
            re += cos[k] * w;
            im -= sin[k] * w;
        }
        match (m as i64 - p as i64).rem_euclid(4) {
            0 => re,
            1 => -im,
            2 => -re,
            _ => im,
        }
    })
}

/// Applies the beam splitter to a two-mode state on its own grid. Fails if
/// more than [`LEAKAGE_TOLERANCE`] of the probability would land above either
/// cutoff.
pub fn beam_splitter(s: &TwoModePureState, spec: BeamSplitterSpec) -> Result<TwoModePureState> {
    if spec.transmission == 1.0 {
        return Ok(s.clone());
    }
    let ca = s.cutoff_a();
    let cb = s.cutoff_b();
    let t = spec.transmission;
    let r = spec.reflection();
    let lf = ln_factorials(ca + cb);
    let amps = s.amplitudes();

    let blocks: Vec<Result<(usize, Vec<C64>, f64)>> = (0..=ca + cb)
        .into_par_iter()
        .map(|n| {
            let p_lo = n.saturating_sub(cb);
            let p_hi = n.min(ca);
            let inputs: Vec<(usize, C64)> = (p_lo..=p_hi)
                .map(|p| (p, amps[(p, n - p)]))
                .filter(|(_, z)| *z != C64::new(0.0, 0.0))
                .collect();
            let mut out = vec![C64::new(0.0, 0.0); n + 1];
            if inputs.is_empty() {
                return Ok((n, out, 0.0));
            }
            let mut general: Option<Array2<f64>> = None;
            for (p, z) in inputs {
                if p == n {
                    // (T â† − R b̂†)^N / √N!
                    for (m, c) in single_mode_column(n, t, -r, &lf).into_iter().enumerate() {
                        out[m] += z * c;
                    }
                } else if p == 0 {
                    // (R â† + T b̂†)^N / √N!
                    for (m, c) in single_mode_column(n, r, t, &lf).into_iter().enumerate() {
                        out[m] += z * c;
                    }
                } else {
                    let u = general.get_or_insert_with(|| block_unitary(n, spec));
                    for m in 0..=n {
                        out[m] += z * u[(m, p)];
                    }
                }
            }
            let leaked: f64 = out
                .iter()
                .enumerate()
                .filter(|(m, _)| *m > ca || n - m > cb)
                .map(|(_, z)| z.norm_sqr())
                .sum();
            Ok((n, out, leaked))
        })
        .collect();

    let mut grid = Array2::<C64>::zeros((ca + 1, cb + 1));
    let mut leaked_total = 0.0;
    for block in blocks {
        let (n, out, leaked) = block?;
        leaked_total += leaked;
        for (m, z) in out.into_iter().enumerate() {
            if m <= ca && n - m <= cb {
                grid[(m, n - m)] = z;
            }
        }
    }
    if leaked_total > LEAKAGE_TOLERANCE {
        return Err(CatsimError::Leakage { leaked: leaked_total });
    }
    Ok(TwoModePureState::from_array_unchecked(grid))
}
