//! Wigner function and homodyne quadrature distributions.
//!
//! Phase-space coordinates use `α = (x + ip)/√2`, so the vacuum has
//! quadrature variance 1/2 and `W` integrates to one over `dx dp`.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::fock::{PureState, NORM_TOLERANCE};
use crate::modes::channel::StateRef;
use crate::modes::MixedState;

pub const DEFAULT_WIGNER_EXTENT: f64 = 5.0;
pub const DEFAULT_WIGNER_POINTS: usize = 101;
pub const DEFAULT_QUADRATURE_EXTENT: f64 = 7.0;
pub const DEFAULT_QUADRATURE_POINTS: usize = 281;

/// Evenly spaced points from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / (points - 1) as f64;
            (0..points).map(|i| min + step * i as f64).collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceGrid {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseSpaceGrid {
    pub fn new(x_range: (f64, f64), p_range: (f64, f64), points: usize) -> Result<Self> {
        if points < 2 {
            return Err(invalid(format!("grid needs at least 2 points per axis, got {points}")));
        }
        if !(x_range.0 < x_range.1 && p_range.0 < p_range.1) {
            return Err(invalid("grid ranges must be increasing"));
        }
        Ok(Self { x: linspace(x_range.0, x_range.1, points), p: linspace(p_range.0, p_range.1, points) })
    }

    pub fn square(extent: f64, points: usize) -> Result<Self> {
        Self::new((-extent, extent), (-extent, extent), points)
    }

    /// Area element of one grid cell.
    pub fn cell_area(&self) -> f64 {
        let dx = (self.x[self.x.len() - 1] - self.x[0]) / (self.x.len() - 1) as f64;
        let dp = (self.p[self.p.len() - 1] - self.p[0]) / (self.p.len() - 1) as f64;
        dx * dp
    }
}

impl Default for PhaseSpaceGrid {
    fn default() -> Self {
        Self::square(DEFAULT_WIGNER_EXTENT, DEFAULT_WIGNER_POINTS).expect("valid default grid")
    }
}

fn single_mode_density(state: StateRef<'_>) -> Result<Array2<C64>> {
    match state {
        StateRef::Pure(s) => {
            let a = s.amplitudes();
            Ok(Array2::from_shape_fn((a.len(), a.len()), |(m, n)| a[m] * a[n].conj()))
        }
        StateRef::Mixed(rho) if rho.modes() == 1 => Ok(rho.matrix().clone()),
        _ => Err(invalid("phase-space functions need a single-mode state")),
    }
}

/// Wigner function on `grid`, indexed `[ix, ip]`.
///
/// Evaluates `(1/π) tr[ρ D(α) Π D†(α)]` through the Laguerre recurrence for
/// the displaced-parity matrix elements.
pub fn wigner<'a>(state: impl Into<StateRef<'a>>, grid: &PhaseSpaceGrid) -> Result<Array2<f64>> {
    let rho = single_mode_density(state.into())?;
    if grid.x.len() < 2 || grid.p.len() < 2 {
        return Err(invalid("grid needs at least 2 points per axis"));
    }
    let np = grid.p.len();
    let values: Vec<f64> = (0..grid.x.len() * np)
        .into_par_iter()
        .map(|idx| {
            let alpha = C64::new(grid.x[idx / np], grid.p[idx % np]) / 2f64.sqrt();
            wigner_point(&rho, alpha)
        })
        .collect();
    Ok(Array2::from_shape_vec((grid.x.len(), np), values).expect("shape matches"))
}

fn wigner_point(rho: &Array2<C64>, alpha: C64) -> f64 {
    let dim = rho.nrows();
    let mut w = vec![C64::new(0.0, 0.0); dim];
    w[0] = C64::new((-2.0 * alpha.norm_sqr()).exp() / PI, 0.0);
    let mut acc = rho[(0, 0)].re * w[0].re;
    for n in 1..dim {
        w[n] = 2.0 * alpha * w[n - 1] / (n as f64).sqrt();
        acc += 2.0 * (rho[(0, n)] * w[n]).re;
    }
    for m in 1..dim {
        let sm = (m as f64).sqrt();
        let mut temp = w[m];
        w[m] = (2.0 * alpha.conj() * temp - sm * w[m - 1]) / sm;
        acc += (rho[(m, m)] * w[m]).re;
        for n in m + 1..dim {
            let next = (2.0 * alpha * w[n - 1] - sm * temp) / (n as f64).sqrt();
            temp = w[n];
            w[n] = next;
            acc += 2.0 * (rho[(m, n)] * w[n]).re;
        }
    }
    acc
}

/// Harmonic-oscillator eigenfunctions `ψ_0..ψ_{dim-1}` at `x`.
pub fn hermite_functions(x: f64, dim: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(dim);
    if dim == 0 {
        return psi;
    }
    psi.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if dim > 1 {
        psi.push(2f64.sqrt() * x * psi[0]);
    }
    for n in 1..dim.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * psi[n] - (nf / (nf + 1.0)).sqrt() * psi[n - 1];
        psi.push(next);
    }
    psi
}

/// Distribution of the rotated quadrature `x cos φ + p sin φ` at the points `xs`.
pub fn quadrature_pdf(s: &PureState, phi: f64, xs: &[f64]) -> Result<Vec<f64>> {
    if !s.is_normalized() {
        return Err(invalid(format!("quadrature distribution needs a normalized state, norm² = {}", s.norm_sqr())));
    }
    let rotated: Vec<C64> = s
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, &c)| c * C64::from_polar(1.0, -(n as f64) * phi))
        .collect();
    Ok(xs
        .iter()
        .map(|&x| {
            let psi = hermite_functions(x, rotated.len());
            rotated.iter().zip(&psi).map(|(c, h)| c * *h).sum::<C64>().norm_sqr()
        })
        .collect())
}

/// Quadrature distribution of a single-mode density matrix,
/// `Σ_{mn} ρ_{mn} e^{−i(m−n)φ} ψ_m(x) ψ_n(x)`.
pub fn quadrature_pdf_mixed(rho: &MixedState, phi: f64, xs: &[f64]) -> Result<Vec<f64>> {
    if rho.modes() != 1 {
        return Err(invalid("quadrature distribution needs a single-mode state"));
    }
    if (rho.trace() - 1.0).abs() > NORM_TOLERANCE {
        return Err(invalid(format!("quadrature distribution needs unit trace, got {}", rho.trace())));
    }
    let m = rho.matrix();
    let dim = m.nrows();
    Ok(xs
        .iter()
        .map(|&x| {
            let psi = hermite_functions(x, dim);
            let mut acc = 0.0;
            for a in 0..dim {
                acc += m[(a, a)].re * psi[a] * psi[a];
                for b in a + 1..dim {
                    let z = m[(a, b)] * C64::from_polar(1.0, (b as f64 - a as f64) * phi);
                    acc += 2.0 * z.re * psi[a] * psi[b];
                }
            }
            acc
        })
        .collect())
}

/// Default homodyne grid.
pub fn default_quadrature_grid() -> Vec<f64> {
    linspace(-DEFAULT_QUADRATURE_EXTENT, DEFAULT_QUADRATURE_EXTENT, DEFAULT_QUADRATURE_POINTS)
}

/// Trapezoid rule over evenly or unevenly spaced points.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_cat, make_coherent, make_fock, make_squeezed_vacuum, make_vacuum, CatSign};
    use crate::modes::eigen::hermitian_eigen;
    use crate::modes::mixed::MixedState;

    fn at(state: &PureState, x: f64, p: f64) -> f64 {
        let grid = PhaseSpaceGrid { x: vec![x, x + 1.0], p: vec![p, p + 1.0] };
        wigner(state, &grid).unwrap()[(0, 0)]
    }

    #[test]
    fn vacuum_and_coherent_gaussians() {
        let vac = make_vacuum(20).unwrap();
        assert!((at(&vac, 0.0, 0.0) - 1.0 / PI).abs() < 1e-14);
        let beta = C64::new(0.7, -0.4);
        let coh = make_coherent(beta, 40).unwrap();
        let (x0, p0) = (2f64.sqrt() * beta.re, 2f64.sqrt() * beta.im);
        for &(x, p) in &[(0.0, 0.0), (1.0, -0.5), (x0, p0), (-1.2, 0.9)] {
            let expected = (-(x - x0).powi(2) - (p - p0).powi(2)).exp() / PI;
            assert!((at(&coh, x, p) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn fock_one_and_superposition() {
        let one = make_fock(1, 10).unwrap();
        let amps = vec![C64::new(1.0 / 2f64.sqrt(), 0.0), C64::new(1.0 / 2f64.sqrt(), 0.0), C64::new(0.0, 0.0)];
        let sup = PureState::from_amplitudes(amps).unwrap();
        for &(x, p) in &[(0.0, 0.0), (0.5, 0.3), (-1.1, 0.8), (1.7, -1.2)] {
            let r2: f64 = x * x + p * p;
            let w1 = (2.0 * r2 - 1.0) * (-r2).exp() / PI;
            assert!((at(&one, x, p) - w1).abs() < 1e-13);
            let ws = (-r2).exp() * (r2 + 2f64.sqrt() * x) / PI;
            assert!((at(&sup, x, p) - ws).abs() < 1e-13);
        }
    }

    fn displacement(alpha: C64, dim: usize) -> Array2<C64> {
        // D(α) = exp(α a† − α* a), exponentiated through the eigenbasis of the
        // Hermitian generator i(α a† − α* a)
        let mut h = Array2::<C64>::zeros((dim, dim));
        for n in 0..dim - 1 {
            let s = ((n + 1) as f64).sqrt();
            h[(n + 1, n)] = C64::i() * alpha * s;
            h[(n, n + 1)] = -C64::i() * alpha.conj() * s;
        }
        let eig = hermitian_eigen(&h, 1e-14, 100).unwrap();
        let v = &eig.vectors;
        Array2::from_shape_fn((dim, dim), |(i, j)| {
            (0..dim).map(|k| v[(i, k)] * C64::from_polar(1.0, -eig.values[k]) * v[(j, k)].conj()).sum()
        })
    }

    #[test]
    fn matches_brute_force_displaced_parity() {
        let cat = make_cat(C64::new(1.1, 0.3), CatSign::Minus, 30).unwrap();
        let big = 90;
        let mut padded = cat.amplitudes().to_vec();
        padded.resize(big, C64::new(0.0, 0.0));
        for &(x, p) in &[(0.0, 0.0), (0.6, -0.2), (-1.0, 1.3)] {
            let alpha = C64::new(x, p) / 2f64.sqrt();
            let d = displacement(-alpha, big);
            let shifted: Vec<C64> = (0..big).map(|i| (0..big).map(|j| d[(i, j)] * padded[j]).sum()).collect();
            let parity: f64 = shifted.iter().enumerate().map(|(n, c)| if n % 2 == 0 { c.norm_sqr() } else { -c.norm_sqr() }).sum();
            assert!((at(&cat, x, p) - parity / PI).abs() < 1e-9, "({x},{p})");
        }
    }

    #[test]
    fn odd_cat_negative_at_origin_and_integrates_to_one() {
        let odd = make_cat(C64::new(1.3, 0.0), CatSign::Minus, 40).unwrap();
        let even = make_cat(C64::new(1.3, 0.0), CatSign::Plus, 40).unwrap();
        assert!((at(&odd, 0.0, 0.0) + 1.0 / PI).abs() < 1e-12);
        assert!((at(&even, 0.0, 0.0) - 1.0 / PI).abs() < 1e-12);
        let grid = PhaseSpaceGrid::default();
        let w = wigner(&odd, &grid).unwrap();
        assert!((w.sum() * grid.cell_area() - 1.0).abs() < 2e-2);
    }

    #[test]
    fn mixed_input_is_linear() {
        let a = make_fock(1, 6).unwrap();
        let b = crate::fock::loose(6).coherent(C64::new(0.4, 0.2)).unwrap();
        let ra = MixedState::from_pure(&a);
        let rb = MixedState::from_pure(&b);
        let mix = MixedState::from_matrix(vec![7], (ra.matrix() * 0.3 + rb.matrix() * 0.7).to_owned()).unwrap();
        let grid = PhaseSpaceGrid::square(2.0, 7).unwrap();
        let (wa, wb, wm) = (wigner(&a, &grid).unwrap(), wigner(&b, &grid).unwrap(), wigner(&mix, &grid).unwrap());
        for ((x, y), z) in wa.iter().zip(wb.iter()).zip(wm.iter()) {
            assert!((0.3 * x + 0.7 * y - z).abs() < 1e-13);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(PhaseSpaceGrid::square(5.0, 1).is_err());
        assert!(PhaseSpaceGrid::new((1.0, -1.0), (0.0, 1.0), 4).is_err());
    }

    fn moments(pdf: &[f64], xs: &[f64]) -> (f64, f64, f64) {
        let norm = trapezoid(xs, pdf);
        let mean = trapezoid(xs, &xs.iter().zip(pdf).map(|(x, p)| x * p).collect::<Vec<_>>());
        let second = trapezoid(xs, &xs.iter().zip(pdf).map(|(x, p)| x * x * p).collect::<Vec<_>>());
        (norm, mean, second - mean * mean)
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let xs = linspace(-12.0, 12.0, 2001);
        let table: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_functions(x, 12)).collect();
        for m in 0..12 {
            for n in 0..12 {
                let ys: Vec<f64> = table.iter().map(|row| row[m] * row[n]).collect();
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((trapezoid(&xs, &ys) - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn quadrature_moments() {
        let xs = default_quadrature_grid();
        let vac = make_vacuum(10).unwrap();
        let (n, m, v) = moments(&quadrature_pdf(&vac, 0.0, &xs).unwrap(), &xs);
        assert!((n - 1.0).abs() < 1e-3 && m.abs() < 1e-12 && (v - 0.5).abs() < 1e-9);

        let beta = C64::new(0.9, 0.5);
        let coh = make_coherent(beta, 50).unwrap();
        let (_, mx, _) = moments(&quadrature_pdf(&coh, 0.0, &xs).unwrap(), &xs);
        let (_, mp, vp) = moments(&quadrature_pdf(&coh, PI / 2.0, &xs).unwrap(), &xs);
        assert!((mx - 2f64.sqrt() * beta.re).abs() < 1e-9);
        assert!((mp - 2f64.sqrt() * beta.im).abs() < 1e-9);
        assert!((vp - 0.5).abs() < 1e-9);

        let xi = 0.5f64;
        let sq = make_squeezed_vacuum(xi, 60).unwrap();
        let (_, _, vx) = moments(&quadrature_pdf(&sq, 0.0, &xs).unwrap(), &xs);
        let (_, _, vp) = moments(&quadrature_pdf(&sq, PI / 2.0, &xs).unwrap(), &xs);
        assert!((vx - (-2.0 * xi).exp() / 2.0).abs() < 1e-7);
        assert!((vp - (2.0 * xi).exp() / 2.0).abs() < 1e-6);
        assert!(vx * vp >= 0.25 - 1e-6);
    }

    #[test]
    fn mixed_quadrature_matches_pure_route() {
        let s = crate::fock::loose(30).cat(C64::new(0.7, 1.1), crate::fock::CatSign::Minus).unwrap();
        let xs = linspace(-6.0, 6.0, 61);
        for phi in [0.0, 0.4, 2.0] {
            let pure = quadrature_pdf(&s, phi, &xs).unwrap();
            let mixed = quadrature_pdf_mixed(&MixedState::from_pure(&s), phi, &xs).unwrap();
            for (a, b) in pure.iter().zip(&mixed) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_rejects_unnormalized() {
        let s = make_vacuum(3).unwrap().scaled(C64::new(2.0, 0.0));
        assert!(quadrature_pdf(&s, 0.0, &[0.0]).is_err());
    }
}
