//! Single-mode pure states in a truncated Fock basis `|0⟩..|N_cut⟩`.
//!
//! Analytic families (coherent, squeezed vacuum, even/odd cat) are assembled
//! term by term from their series coefficients in log space and then
//! renormalized to absorb the discarded tail. Every constructor first checks
//! the analytic tail weight above the cutoff and refuses to build a state
//! whose tail exceeds the configured tolerance.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CatsimError, Result};
use crate::special::ln_factorials;

/// Default single-mode cutoff.
pub const DEFAULT_CUTOFF: usize = 60;
/// Default per-mode cutoff for two-mode experiments.
pub const DEFAULT_TWO_MODE_CUTOFF: usize = 40;
/// Largest tail mass accepted by the constructors unless overridden.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of `⟨ψ|ψ⟩` from 1 for a state to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Norms below this are treated as the zero vector.
pub const ZERO_NORM: f64 = 1e-14;
/// Odd cats below this amplitude are rejected (`M⁻` diverges as `β → 0`).
pub const MIN_CAT_AMPLITUDE: f64 = 1e-3;
/// Hard ceiling for automatic cutoff escalation.
pub const MAX_CUTOFF: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Relative sign of the two coherent components of a cat state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CatSign {
    /// `|β⟩ + |−β⟩`, even photon numbers only.
    Plus,
    /// `|β⟩ − |−β⟩`, odd photon numbers only.
    Minus,
}

impl CatSign {
    pub fn parity(self) -> Parity {
        match self {
            CatSign::Plus => Parity::Even,
            CatSign::Minus => Parity::Odd,
        }
    }
}

/// Analytic state families whose truncation tail can be evaluated in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StateFamily {
    Coherent(C64),
    Squeezed(f64),
    Cat(C64, CatSign),
}

/// Probability weight an analytic state places above a cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub family: StateFamily,
    pub cutoff: usize,
    pub tail_mass: f64,
    pub tolerance: f64,
    pub acceptable: bool,
}

/// A single-mode state, `amplitudes[n] = ⟨n|ψ⟩` for `n = 0..=cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps raw amplitudes. The vector must hold at least two entries
    /// (cutoff ≥ 1); no normalization is applied.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(invalid("a pure state needs cutoff >= 1"));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CatsimError::InvalidState("non-finite amplitude".into()));
        }
        Ok(Self { amplitudes })
    }

    pub(crate) fn from_vec_unchecked(amplitudes: Vec<C64>) -> Self {
        debug_assert!(amplitudes.len() >= 2);
        Self { amplitudes }
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amplitudes.get(n).copied().unwrap_or_default()
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

    /// `⟨n̂⟩ / ⟨ψ|ψ⟩`.
    pub fn mean_photon_number(&self) -> f64 {
        let weighted: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(n, z)| n as f64 * z.norm_sqr())
            .sum();
        weighted / self.norm_sqr()
    }

    /// Parity if every amplitude of the opposite parity is exactly zero.
    pub fn parity(&self) -> Option<Parity> {
        let zero_at = |start: usize| self.amplitudes.iter().skip(start).step_by(2).all(|z| *z == C64::new(0.0, 0.0));
        match (zero_at(1), zero_at(0)) {
            (true, false) => Some(Parity::Even),
            (false, true) => Some(Parity::Odd),
            _ => None,
        }
    }

    pub fn scaled(&self, factor: C64) -> PureState {
        PureState::from_vec_unchecked(self.amplitudes.iter().map(|z| z * factor).collect())
    }

    fn renormalized(mut amplitudes: Vec<C64>) -> PureState {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut amplitudes {
            *z /= norm;
        }
        PureState::from_vec_unchecked(amplitudes)
    }
}

/// A truncated Fock space with a tail tolerance used by the analytic
/// constructors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockSpace {
    cutoff: usize,
    tail_tolerance: f64,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(invalid("cutoff must be >= 1"));
        }
        Ok(Self { cutoff, tail_tolerance: DEFAULT_TAIL_TOLERANCE })
    }

    pub fn with_tail_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(invalid(format!("tail tolerance must be a non-negative number, got {tolerance}")));
        }
        self.tail_tolerance = tolerance;
        Ok(self)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    fn check_tail(&self, family: StateFamily) -> Result<()> {
        let report = truncation_tail_with_tolerance(family, self.cutoff, self.tail_tolerance);
        if report.acceptable {
            Ok(())
        } else {
            Err(CatsimError::Truncation(report))
        }
    }

    pub fn vacuum(&self) -> PureState {
        self.fock(0).expect("0 <= cutoff")
    }

    pub fn fock(&self, n: usize) -> Result<PureState> {
        if n > self.cutoff {
            return Err(invalid(format!("Fock index {n} exceeds cutoff {}", self.cutoff)));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); self.cutoff + 1];
        amplitudes[n] = C64::new(1.0, 0.0);
        Ok(PureState::from_vec_unchecked(amplitudes))
    }

    /// `|β⟩ = e^{-|β|²/2} Σ βᵐ/√(m!) |m⟩`, renormalized on the truncated basis.
    pub fn coherent(&self, beta: C64) -> Result<PureState> {
        check_finite_complex(beta, "beta")?;
        self.check_tail(StateFamily::Coherent(beta))?;
        Ok(PureState::renormalized(coherent_series(beta, self.cutoff)))
    }

    /// Squeezed vacuum from its even-photon series:
    /// `√sech ξ · √((2l)!)/l! · (−½ tanh ξ)^l` on `|2l⟩`.
    pub fn squeezed_vacuum(&self, xi: f64) -> Result<PureState> {
        if !xi.is_finite() {
            return Err(invalid("squeezing must be finite"));
        }
        self.check_tail(StateFamily::Squeezed(xi))?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); self.cutoff + 1];
        let lf = ln_factorials(self.cutoff);
        let half_ln_sech = -0.5 * xi.abs().cosh().ln();
        if xi == 0.0 {
            amplitudes[0] = C64::new(1.0, 0.0);
        } else {
            let ln_half_tanh = (0.5 * xi.abs().tanh()).ln();
            for l in 0..=self.cutoff / 2 {
                let ln_mag = half_ln_sech + 0.5 * lf[2 * l] - lf[l] + l as f64 * ln_half_tanh;
                let sign = if xi > 0.0 && l % 2 == 1 { -1.0 } else { 1.0 };
                amplitudes[2 * l] = C64::new(sign * ln_mag.exp(), 0.0);
            }
        }
        Ok(PureState::renormalized(amplitudes))
    }

    /// Even (`Plus`) or odd (`Minus`) cat `M±(|β⟩ ± |−β⟩)`.
    ///
    /// The odd cat is assembled directly from its odd-photon series; the even
    /// cat as the literal two-term superposition, where `|−β⟩` is obtained by
    /// flipping the sign of odd coefficients so that odd entries cancel
    /// exactly.
    pub fn cat(&self, beta: C64, sign: CatSign) -> Result<PureState> {
        check_finite_complex(beta, "beta")?;
        if beta.norm() < MIN_CAT_AMPLITUDE {
            return Err(CatsimError::DegenerateAmplitude(beta.norm()));
        }
        self.check_tail(StateFamily::Cat(beta, sign))?;
        let amplitudes = match sign {
            CatSign::Minus => {
                let lf = ln_factorials(self.cutoff);
                let mean = beta.norm_sqr();
                let ln_two_m = 2.0f64.ln() + 0.5 * ln_cat_norm_sqr(mean, CatSign::Minus);
                let ln_abs = beta.norm().ln();
                let arg = beta.arg();
                let mut amps = vec![C64::new(0.0, 0.0); self.cutoff + 1];
                for n in (1..=self.cutoff).step_by(2) {
                    let ln_mag = ln_two_m - 0.5 * mean + n as f64 * ln_abs - 0.5 * lf[n];
                    amps[n] = C64::from_polar(ln_mag.exp(), n as f64 * arg);
                }
                amps
            }
            CatSign::Plus => {
                let m = (0.5 * ln_cat_norm_sqr(beta.norm_sqr(), CatSign::Plus)).exp();
                let plus = coherent_series(beta, self.cutoff);
                plus.iter()
                    .enumerate()
                    .map(|(n, &c)| {
                        let minus = if n % 2 == 1 { -c } else { c };
                        (c + minus) * m
                    })
                    .collect()
            }
        };
        Ok(PureState::renormalized(amplitudes))
    }
}

fn check_finite_complex(z: C64, name: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite")))
    }
}

/// `ln (M±)²` with `M± = 1/√(2(1 ± e^{−2|β|²}))`.
fn ln_cat_norm_sqr(mean: f64, sign: CatSign) -> f64 {
    let denom = match sign {
        CatSign::Plus => 2.0 * (1.0 + (-2.0 * mean).exp()),
        CatSign::Minus => 2.0 * -(-2.0 * mean).exp_m1(),
    };
    -denom.ln()
}

/// Unnormalized coherent-state coefficients on `0..=cutoff`.
fn coherent_series(beta: C64, cutoff: usize) -> Vec<C64> {
    let mut amplitudes = vec![C64::new(0.0, 0.0); cutoff + 1];
    if beta.norm() == 0.0 {
        amplitudes[0] = C64::new(1.0, 0.0);
        return amplitudes;
    }
    let lf = ln_factorials(cutoff);
    let mean = beta.norm_sqr();
    let ln_abs = beta.norm().ln();
    let arg = beta.arg();
    for (n, amp) in amplitudes.iter_mut().enumerate() {
        let ln_mag = -0.5 * mean + n as f64 * ln_abs - 0.5 * lf[n];
        *amp = C64::from_polar(ln_mag.exp(), n as f64 * arg);
    }
    amplitudes
}

pub fn make_vacuum(cutoff: usize) -> Result<PureState> {
    Ok(FockSpace::new(cutoff)?.vacuum())
}

pub fn make_fock(n: usize, cutoff: usize) -> Result<PureState> {
    FockSpace::new(cutoff)?.fock(n)
}

pub fn make_coherent(beta: C64, cutoff: usize) -> Result<PureState> {
    FockSpace::new(cutoff)?.coherent(beta)
}

pub fn make_squeezed_vacuum(xi: f64, cutoff: usize) -> Result<PureState> {
    FockSpace::new(cutoff)?.squeezed_vacuum(xi)
}

pub fn make_cat(beta: C64, sign: CatSign, cutoff: usize) -> Result<PureState> {
    FockSpace::new(cutoff)?.cat(beta, sign)
}

/// `⟨a|b⟩ = Σ conj(aₙ) bₙ`.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<C64> {
    if a.cutoff() != b.cutoff() {
        return Err(invalid(format!("cutoff mismatch: {} vs {}", a.cutoff(), b.cutoff())));
    }
    Ok(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum())
}

/// `|⟨a|b⟩|²` for normalized states.
pub fn fidelity_pure(a: &PureState, b: &PureState) -> Result<f64> {
    for s in [a, b] {
        if !s.is_normalized() {
            return Err(CatsimError::InvalidState(format!("state norm² {} is not 1", s.norm_sqr())));
        }
    }
    Ok(inner_product(a, b)?.norm_sqr().min(1.0))
}

/// Returns the unit-norm state together with the norm it had before.
pub fn normalize(a: &PureState) -> Result<(PureState, f64)> {
    let norm = a.norm();
    if !(norm >= ZERO_NORM) {
        return Err(CatsimError::ZeroState(norm));
    }
    Ok((a.scaled(C64::new(1.0 / norm, 0.0)), norm))
}

pub fn truncation_tail(family: StateFamily, cutoff: usize) -> TruncationReport {
    truncation_tail_with_tolerance(family, cutoff, DEFAULT_TAIL_TOLERANCE)
}

/// Analytic weight above `cutoff`, summed from the closed-form photon-number
/// distribution until the remaining geometric tail is negligible.
pub fn truncation_tail_with_tolerance(family: StateFamily, cutoff: usize, tolerance: f64) -> TruncationReport {
    let tail_mass = match family {
        StateFamily::Coherent(beta) => poisson_tail(beta.norm_sqr(), cutoff, None),
        StateFamily::Cat(beta, sign) => {
            let mean = beta.norm_sqr();
            if mean == 0.0 {
                // the limit states |0⟩ / |1⟩ have no tail for cutoff >= 1
                0.0
            } else {
                let scale = (2.0f64.ln() * 2.0 + ln_cat_norm_sqr(mean, sign)).exp();
                scale * poisson_tail(mean, cutoff, Some(sign.parity()))
            }
        }
        StateFamily::Squeezed(xi) => squeezed_tail(xi, cutoff),
    };
    let tail_mass = if tail_mass.is_nan() { 1.0 } else { tail_mass.clamp(0.0, 1.0) };
    TruncationReport { family, cutoff, tail_mass, tolerance, acceptable: tail_mass <= tolerance }
}

/// `Σ_{n > cutoff} e^{-m} mⁿ/n!`, optionally restricted to one parity.
fn poisson_tail(mean: f64, cutoff: usize, parity: Option<Parity>) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let mut ln_w = -mean;
    for n in 1..=cutoff {
        ln_w += ln_mean - (n as f64).ln();
    }
    let mut tail = 0.0f64;
    let mut n = cutoff;
    loop {
        n += 1;
        ln_w += ln_mean - (n as f64).ln();
        let w = ln_w.exp();
        let keep = match parity {
            None => true,
            Some(Parity::Even) => n % 2 == 0,
            Some(Parity::Odd) => n % 2 == 1,
        };
        if keep {
            tail += w;
        }
        // past the mode the terms decay at least geometrically with ratio mean/n
        let ratio = mean / (n as f64 + 1.0);
        if ratio < 0.5 && (w == 0.0 || w <= 1e-20 * tail) {
            break;
        }
        if n > cutoff + 10_000_000 {
            break;
        }
    }
    tail
}

/// `Σ_{2l > cutoff} sech ξ · C(2l,l) (tanh ξ / 2)^{2l}`.
fn squeezed_tail(xi: f64, cutoff: usize) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    let t = xi.abs().tanh();
    let one_minus_t2 = 1.0 - t * t;
    if one_minus_t2 <= 0.0 {
        return 1.0;
    }
    let ln_t2_over_4 = (t * t / 4.0).ln();
    let mut ln_w = -xi.abs().cosh().ln();
    let mut l = 0usize;
    let first = cutoff / 2 + 1;
    while l < first {
        l += 1;
        // C(2l,l)/C(2l-2,l-1) = (2l)(2l-1)/l²
        ln_w += ((2 * l) as f64 * (2 * l - 1) as f64 / (l as f64 * l as f64)).ln() + ln_t2_over_4;
    }
    let mut tail = 0.0f64;
    loop {
        let w = ln_w.exp();
        tail += w;
        // successive ratios are below t², so the remainder is at most w t²/(1-t²)
        if w == 0.0 || w * t * t / one_minus_t2 <= 1e-18 * tail {
            break;
        }
        if l > 100_000_000 {
            break;
        }
        l += 1;
        ln_w += ((2 * l) as f64 * (2 * l - 1) as f64 / (l as f64 * l as f64)).ln() + ln_t2_over_4;
    }
    tail
}

/// Smallest even cutoff `>= min_cutoff` whose tail is within `tolerance`.
pub fn required_cutoff(family: StateFamily, min_cutoff: usize, tolerance: f64) -> Result<usize> {
    let mut cutoff = min_cutoff.max(2);
    cutoff += cutoff % 2;
    if truncation_tail_with_tolerance(family, cutoff, tolerance).acceptable {
        return Ok(cutoff);
    }
    // exponential probe, then bisection on even values
    let mut lo = cutoff;
    let mut hi = cutoff;
    loop {
        hi = (hi * 2).min(MAX_CUTOFF);
        let report = truncation_tail_with_tolerance(family, hi, tolerance);
        if report.acceptable {
            break;
        }
        if hi == MAX_CUTOFF {
            return Err(CatsimError::Truncation(report));
        }
        lo = hi;
    }
    while hi - lo > 2 {
        let mid = (lo + (hi - lo) / 2) & !1;
        let mid = if mid <= lo { lo + 2 } else { mid };
        if truncation_tail_with_tolerance(family, mid, tolerance).acceptable {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Builder that accepts any truncation, for small-basis tests.
#[cfg(test)]
pub(crate) fn loose(cutoff: usize) -> FockSpace {
    FockSpace::new(cutoff).unwrap().with_tail_tolerance(1.0).unwrap()
}
