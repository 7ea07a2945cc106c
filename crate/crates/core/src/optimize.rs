//! One-dimensional maximization.

use crate::error::{invalid, Result};

/// Location and value of a maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`. The endpoints are
/// compared at the end so a boundary maximum is returned exactly.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid(format!("bad search interval [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let mut best = if fc >= fd { Maximum { x: c, value: fc } } else { Maximum { x: d, value: fd } };
    for edge in [lo, hi] {
        if (edge - best.x).abs() < 2.0 * tol {
            let v = f(edge)?;
            if v > best.value {
                best = Maximum { x: edge, value: v };
            }
        }
    }
    Ok(best)
}

/// Exhaustive search over `points` evenly spaced samples of `[lo, hi]`.
pub fn grid_search_max<F>(mut f: F, lo: f64, hi: f64, points: usize) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if points < 2 || !(lo < hi) {
        return Err(invalid("grid search needs lo < hi and at least 2 points"));
    }
    let mut best = Maximum { x: lo, value: f64::NEG_INFINITY };
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let v = f(x)?;
        if v > best.value {
            best = Maximum { x, value: v };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        let m = golden_section_max(|x| Ok(-(x - 0.3712f64).powi(2)), 0.0, 2.0, 1e-8).unwrap();
        assert!((m.x - 0.3712).abs() < 1e-7);
    }

    #[test]
    fn returns_boundary() {
        let m = golden_section_max(|x| Ok(x), 0.0, 1.0, 1e-6).unwrap();
        assert_eq!(m.x, 1.0);
        let m = golden_section_max(|x| Ok(-x), 0.5, 1.0, 1e-6).unwrap();
        assert_eq!(m.x, 0.5);
    }

    #[test]
    fn grid_agrees_with_golden() {
        let f = |x: f64| Ok((3.0 * x).sin() * (-x).exp());
        let g = golden_section_max(f, 0.0, 2.0, 1e-9).unwrap();
        let s = grid_search_max(f, 0.0, 2.0, 20_001).unwrap();
        assert!((g.x - s.x).abs() < 2e-4);
        assert!(g.value >= s.value - 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(golden_section_max(|x| Ok(x), 1.0, 0.0, 1e-6).is_err());
        assert!(golden_section_max(|x| Ok(x), 0.0, 1.0, 0.0).is_err());
        assert!(grid_search_max(|x| Ok(x), 0.0, 1.0, 1).is_err());
    }
}
