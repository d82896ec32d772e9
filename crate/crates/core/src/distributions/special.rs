//! Special functions backing the lifetime distributions: the regularized
//! lower incomplete gamma function and the standard normal CDF / quantile.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const MAX_ITER: usize = 500;
const GAMMA_REL_TOL: f64 = 1e-15;
const TINY: f64 = 1e-300;

/// Regularized lower incomplete gamma function P(a, x), a > 0, x >= 0.
///
/// Series expansion for x < a + 1, Lentz continued fraction for Q(a, x)
/// otherwise.
pub(crate) fn gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let log_prefactor = -x + a * x.ln() - libm::lgamma(a);
    if x < a + 1.0 {
        series_p(a, x, log_prefactor)
    } else {
        1.0 - continued_fraction_q(a, x, log_prefactor)
    }
}

fn series_p(a: f64, x: f64, log_prefactor: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_REL_TOL {
            break;
        }
    }
    (sum * log_prefactor.exp()).min(1.0)
}

// Modified Lentz: Q(a,x) = e^{-x} x^a / Gamma(a) * 1/(x+1-a- 1(1-a)/(x+3-a- 2(2-a)/(x+5-a-...)))
fn continued_fraction_q(a: f64, x: f64, log_prefactor: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_REL_TOL {
            break;
        }
    }
    (log_prefactor.exp() * h).clamp(0.0, 1.0)
}

/// Standard normal CDF.
pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

/// Rational approximation (relative error ~1e-9) for p <= 0.5.
fn lower_half_initial(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Inverse standard normal CDF for p in (0, 1), no domain checks.
pub(crate) fn normal_quantile_unchecked(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    if p > 0.5 {
        // 1 - p is exact for p in [0.5, 1)
        return -normal_quantile_unchecked(1.0 - p);
    }
    let x0 = lower_half_initial(p);
    x0 - (normal_cdf(x0) - p) / normal_pdf(x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_p_shape_one_is_exponential_cdf() {
        for &x in &[1e-6, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 40.0] {
            let expected = -(-x as f64).exp_m1();
            assert!((gamma_p(1.0, x) - expected).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn gamma_p_shape_two_closed_form() {
        for &x in &[0.01, 0.3, 1.0, 2.9, 3.1, 10.0, 30.0] {
            let expected = 1.0 - (1.0 + x) * (-x as f64).exp();
            assert!((gamma_p(2.0, x) - expected).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn gamma_p_half_shape_is_erf_of_root() {
        for &x in &[1e-8, 1e-3, 0.25, 1.0, 4.0, 16.0] {
            let expected = libm::erf(f64::sqrt(x));
            assert!((gamma_p(0.5, x) - expected).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn gamma_p_bounds() {
        assert_eq!(gamma_p(3.0, 0.0), 0.0);
        assert_eq!(gamma_p(3.0, f64::INFINITY), 1.0);
        assert!((gamma_p(3.0, 200.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normal_quantile_reference_values() {
        // Reference values of the standard normal quantile.
        let cases = [
            (0.5, 0.0),
            (0.975, 1.959963984540054),
            (0.00135, -2.9999769927033935),
            (1e-10, -6.361340902404056),
            (0.8413447460685429, 1.0),
        ];
        for (p, z) in cases {
            assert!((normal_quantile_unchecked(p) - z).abs() < 1e-10, "p={p}");
        }
    }
}
