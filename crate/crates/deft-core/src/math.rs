//! Thin wrappers over `libm` so the non-test build stays `no_std`.
//!
//! Routing every transcendental through one place also guarantees unit tests
//! and release builds evaluate bit-identical expressions.

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// ln(1 + x), accurate near zero; used for the stable softplus.
#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Numerically stable log(sum(exp(x))) with the usual max shift.
pub(crate) fn logsumexp(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if v > max {
            max = v;
        }
    }
    if !max.is_finite() {
        return max;
    }
    let mut sum = 0.0;
    for &v in values {
        sum += exp(v - max);
    }
    max + ln(sum)
}

/// Stable softplus: ln(1 + e^x) without overflow for large |x|.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + ln_1p(exp(-x))
    } else {
        ln_1p(exp(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logsumexp_matches_naive_on_small_values() {
        let xs = [-1.0f64, 0.5, 0.25];
        let naive = (xs.iter().map(|&x| x.exp()).sum::<f64>()).ln();
        assert!((logsumexp(&xs) - naive).abs() < 1e-12);
    }

    #[test]
    fn logsumexp_survives_large_magnitudes() {
        let xs = [1000.0, 1000.0];
        let got = logsumexp(&xs);
        assert!((got - (1000.0 + core::f64::consts::LN_2)).abs() < 1e-9);
    }

    #[test]
    fn softplus_is_stable_at_both_tails() {
        assert!((softplus(800.0) - 800.0).abs() < 1e-9);
        assert!(softplus(-700.0) > 0.0);
        assert!(softplus(-700.0) < 1e-300);
        assert!((softplus(0.0) - core::f64::consts::LN_2).abs() < 1e-15);
    }
}
