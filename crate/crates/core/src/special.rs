//! Log-factorials and binomial coefficients used to assemble Fock-basis
//! coefficients without overflow.

/// Products are exact in f64 up to this index; above it the table switches to
/// cumulative sums of logarithms.
const EXACT_PRODUCT_LIMIT: usize = 30;

/// Table of `ln(n!)` for `n = 0..=n_max`.
pub fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut product = 1.0f64;
    for n in 0..=n_max.min(EXACT_PRODUCT_LIMIT) {
        if n > 0 {
            product *= n as f64;
        }
        out.push(product.ln());
    }
    let mut acc = out[out.len() - 1];
    for n in (EXACT_PRODUCT_LIMIT + 1)..=n_max {
        acc += (n as f64).ln();
        out.push(acc);
    }
    out
}

/// `ln C(n, k)` from a log-factorial table.
#[inline]
pub fn ln_binomial(table: &[f64], n: usize, k: usize) -> f64 {
    table[n] - table[k] - table[n - k]
}

/// `x^k` that treats `0^0` as 1 and never produces NaN for `x = 0`.
#[inline]
pub fn pow_usize(x: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        x.powi(k as i32)
    }
}

/// Sum of `|z|^2` in index order.
pub fn norm_sqr_sum<'a>(values: impl IntoIterator<Item = &'a num_complex::Complex64>) -> f64 {
    values.into_iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials_are_exact() {
        let t = ln_factorials(10);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[1], 0.0);
        assert!((t[5] - 120f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn large_factorials_match_lgamma_recurrence() {
        let t = ln_factorials(200);
        // ln(200!) = 863.2319871924054
        assert!((t[200] - 863.231_987_192_405_4).abs() < 1e-9);
        for n in 31..200 {
            assert!((t[n + 1] - t[n] - ((n + 1) as f64).ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn binomials() {
        let t = ln_factorials(60);
        assert!((ln_binomial(&t, 10, 3).exp() - 120.0).abs() < 1e-9);
        assert!((ln_binomial(&t, 60, 30).exp() - 1.182_645_815_648_614_2e17).abs() / 1.18e17 < 1e-10);
    }

    #[test]
    fn pow_of_zero() {
        assert_eq!(pow_usize(0.0, 0), 1.0);
        assert_eq!(pow_usize(0.0, 3), 0.0);
    }
}
