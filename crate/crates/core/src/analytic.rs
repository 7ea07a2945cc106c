//! Closed forms for photon-subtracted squeezed vacuum.
//!
//! All amplitudes are real: the target odd cat points along the imaginary
//! axis, and that phase lives in the state construction.

use serde::Serialize;

use crate::error::{invalid, Result};

/// Normalization constants `M± = 1/√(2(1 ± e^{−2|β|²}))` of even/odd cats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CatNormalization {
    pub beta: num_complex::Complex64,
    pub m_plus: f64,
    pub m_minus: f64,
}

impl CatNormalization {
    pub fn new(beta: num_complex::Complex64) -> Result<Self> {
        if !(beta.re.is_finite() && beta.im.is_finite()) || beta.norm() == 0.0 {
            return Err(invalid("cat amplitude must be finite and nonzero"));
        }
        let overlap = (-2.0 * beta.norm_sqr()).exp();
        let m_plus = 1.0 / (2.0 * (1.0 + overlap)).sqrt();
        // 1 − e^{−x} without cancellation for small |β|
        let m_minus = 1.0 / (-2.0 * (-2.0 * beta.norm_sqr()).exp_m1()).sqrt();
        Ok(Self { beta, m_plus, m_minus })
    }
}

/// Effective squeezing `ξ_T = T² tanh ξ` of the heralded state.
pub fn xi_t(xi: f64, transmission: f64) -> f64 {
    transmission * transmission * xi.tanh()
}

/// Summary of a single-photon herald on squeezed vacuum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeraldClosedForm {
    pub xi: f64,
    pub transmission: f64,
    pub xi_t: f64,
    /// `N^T_ξ = (1−ξ_T²)^{3/4}/(√sech ξ · ξ_T)`; infinite at `ξ_T = 0`.
    pub n_factor: f64,
    pub herald_prob: f64,
}

impl HeraldClosedForm {
    pub fn new(xi: f64, transmission: f64) -> Result<Self> {
        check_transmission(transmission, true)?;
        if !(xi.is_finite() && xi >= 0.0) {
            return Err(invalid(format!("squeezing must be finite and non-negative, got {xi}")));
        }
        let x = xi_t(xi, transmission);
        let n_factor = if x > 0.0 { (1.0 - x * x).powf(0.75) / ((1.0 / xi.cosh()).sqrt() * x) } else { f64::INFINITY };
        Ok(Self { xi, transmission, xi_t: x, n_factor, herald_prob: herald_probability_unchecked(xi, transmission) })
    }
}

fn check_transmission(t: f64, allow_one: bool) -> Result<()> {
    let ok = if allow_one { t > 0.0 && t <= 1.0 } else { t > 0.0 && t < 1.0 };
    if ok {
        Ok(())
    } else {
        Err(invalid(format!("transmission {t} outside {}", if allow_one { "(0, 1]" } else { "(0, 1)" })))
    }
}

fn check_xi_t(xi_t: f64) -> Result<()> {
    if !(0.0..1.0).contains(&xi_t) {
        return Err(invalid(format!("xi_T must lie in [0, 1), got {xi_t}")));
    }
    Ok(())
}

/// Fidelity between `a T^n̂ |Sq(ξ)⟩` (normalized) and the odd cat `|SCS⁻_{iα}⟩`:
/// `F = α² (1−ξ_T²)^{3/2} e^{α² ξ_T} / sinh α²`.
pub fn fidelity_closed_form(alpha: f64, xi_t: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    check_xi_t(xi_t)?;
    let a2 = alpha * alpha;
    // α²/sinh α² = 2α² e^{−α²} / (1 − e^{−2α²})
    let ratio = 2.0 * a2 * (-a2).exp() / -(-2.0 * a2).exp_m1();
    Ok(ratio * (1.0 - xi_t * xi_t).powf(1.5) * (a2 * xi_t).exp())
}

/// Stationary point of the fidelity in `ξ_T`: `(√(9+4α⁴) − 3)/(2α²)`.
pub fn optimal_xi_t(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    let a2 = alpha * alpha;
    // rationalized form, accurate as α → 0
    Ok(2.0 * a2 / ((9.0 + 4.0 * a2 * a2).sqrt() + 3.0))
}

fn herald_probability_unchecked(xi: f64, transmission: f64) -> f64 {
    let t2 = transmission * transmission;
    let x = xi_t(xi, transmission);
    (1.0 - t2) / t2 / xi.cosh() * x * x * (1.0 - x * x).powf(-1.5)
}

/// Probability of a single click on the tapped port:
/// `(1−T²)/T² · sech ξ · ξ_T² (1−ξ_T²)^{−3/2}`.
pub fn herald_probability(xi: f64, transmission: f64) -> Result<f64> {
    check_transmission(transmission, false)?;
    if !xi.is_finite() {
        return Err(invalid("squeezing must be finite"));
    }
    Ok(herald_probability_unchecked(xi.abs(), transmission))
}

fn tau_args(n: usize, xi: f64, transmission: f64) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("tau_n is defined for n >= 2, got {n}")));
    }
    check_transmission(transmission, true)?;
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(invalid(format!("squeezing must be finite and non-negative, got {xi}")));
    }
    Ok(xi_t(xi, transmission))
}

/// Two-mode coefficient in the form `sech ξ (N^T_ξ)² (−ξ_T)^n`, which
/// simplifies to `(1−ξ_T²)^{3/2} (−1)^n ξ_T^{n−2}`.
pub fn tau_signed(n: usize, xi: f64, transmission: f64) -> Result<f64> {
    let x = tau_args(n, xi, transmission)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * (1.0 - x * x).powf(1.5) * x.powi(n as i32 - 2))
}

/// Magnitude of the `|n−2, n⟩` coefficient of the simulated two-mode output,
/// `(1−ξ_T²)^{3/2}/√2 · √(n(n−1)/2) · ξ_T^{n−2}`, normalized so that
/// `Σ_n 2 τ_n² = 1`.
pub fn tau_exact(n: usize, xi: f64, transmission: f64) -> Result<f64> {
    let x = tau_args(n, xi, transmission)?;
    let nf = n as f64;
    Ok((1.0 - x * x).powf(1.5) / 2f64.sqrt() * (nf * (nf - 1.0) / 2.0).sqrt() * x.powi(n as i32 - 2))
}

/// Total mean photon number of the two-mode output, `2 + 6ξ_T²/(1−ξ_T²)`.
pub fn ecs_mean_photon_number(xi: f64, transmission: f64) -> Result<f64> {
    let x = tau_args(2, xi, transmission)?;
    let x2 = x * x;
    Ok(2.0 + 6.0 * x2 / (1.0 - x2))
}
