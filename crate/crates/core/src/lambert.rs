//! Principal branch of the Lambert W function on `[0, ∞)`.
//!
//! Large arguments are accepted in logarithmic form: [`lambert_w0_ln`] solves
//! `w + ln w = y` directly, so `x = e^y` never has to be formed.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_ITER: usize = 64;

/// `W₀(x)` for `x ≥ 0`.
pub fn lambert_w0<T: Scalar>(x: T) -> Result<T> {
    if x.is_nan() || x < T::zero() {
        return Err(Error::Domain(format!("lambert_w0 is evaluated on x >= 0, got {x}")));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return Ok(x);
    }
    if x > T::E() {
        return lambert_w0_ln(x.ln());
    }
    Ok(halley_direct(x))
}

/// `W₀(e^y)`, valid for any finite `y` (and `y = -∞`, which maps to 0).
pub fn lambert_w0_ln<T: Scalar>(y: T) -> Result<T> {
    if y.is_nan() || y == T::infinity() {
        return Err(Error::Domain(format!("lambert_w0_ln needs a finite logarithm, got {y}")));
    }
    if y <= T::one() {
        let x = y.exp();
        return Ok(if x == T::zero() { T::zero() } else { halley_direct(x) });
    }
    // w ≥ 1 here; asymptotic start, then Halley on g(w) = w + ln w − y.
    let mut w = y - y.ln() + y.ln() / y;
    if w < T::one() {
        w = T::one();
    }
    let tol = T::lit(4.0) * T::epsilon();
    for _ in 0..MAX_ITER {
        let g = w + w.ln() - y;
        let g1 = T::one() + w.recip();
        let g2 = -(w * w).recip();
        let step = T::lit(2.0) * g * g1 / (T::lit(2.0) * g1 * g1 - g * g2);
        w = w - step;
        if step.abs() <= tol * w {
            break;
        }
    }
    Ok(w)
}

/// Halley iteration on `w e^w − x` for `0 < x ≤ e`.
fn halley_direct<T: Scalar>(x: T) -> T {
    // Winitzki-style starting point, accurate to a few percent on this range.
    let l = x.ln_1p();
    let mut w = l * (T::one() - l.ln_1p() / (T::lit(2.0) + l));
    let tol = T::lit(4.0) * T::epsilon();
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + T::one();
        let denom = ew * wp1 - (w + T::lit(2.0)) * f / (T::lit(2.0) * wp1);
        let step = f / denom;
        w = w - step;
        if step.abs() <= tol * w.abs().max(x) {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_points() {
        assert_eq!(lambert_w0(0.0f64).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-14);
        assert!((lambert_w0_ln(1.0f64).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(lambert_w0_ln(f64::NEG_INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn negative_argument_is_a_domain_error() {
        assert!(matches!(lambert_w0(-0.1f64), Err(Error::Domain(_))));
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn small_arguments_are_linear() {
        let w = lambert_w0(1e-300f64).unwrap();
        assert!((w - 1e-300).abs() <= 1e-315);
        let w = lambert_w0(1e-8f64).unwrap();
        assert!((w * w.exp() - 1e-8).abs() <= 1e-8 * 1e-14);
    }

    #[test]
    fn log_form_handles_huge_arguments() {
        for y in [2.0f64, 50.0, 690.0, 1e4, 1e6] {
            let w = lambert_w0_ln(y).unwrap();
            assert!(((w + w.ln()) - y).abs() <= 1e-12 * y.max(1.0), "y={y}");
        }
    }

    #[test]
    fn single_precision_works() {
        let w = lambert_w0(std::f32::consts::E).unwrap();
        assert!((w - 1.0).abs() < 1e-6);
        let w = lambert_w0_ln(100.0f32).unwrap();
        assert!(((w + w.ln()) - 100.0).abs() < 1e-4);
    }
}
