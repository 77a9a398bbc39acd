//! The two hypergeometric functions the effective-capacity closed forms need.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_semi_infinite_with, QuadOptions};

use super::gamma::ln_gamma;

const REL_TOL: f64 = 1e-12;

/// ₂F₁(a, 1; a+1; z) for `a > 0` and `z < 1`.
///
/// Evaluated from the Euler integral `a ∫₀¹ t^{a−1}/(1 − z t) dt`, written
/// with `t = u^{1/a}` as `∫₀¹ du / (1 − z u^{1/a})` so the endpoint
/// singularity for `a < 1` disappears.
pub fn gauss_2f1_ratio(a: f64, z: f64) -> Result<f64> {
    const NAME: &str = "gauss_2f1_ratio";
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(NAME, format!("a must be finite and > 0, got {a}")));
    }
    if !(z < 1.0) || !z.is_finite() {
        return Err(Error::domain(
            NAME,
            format!("z must be finite and < 1 (pole inside the Euler integral), got {z}"),
        ));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let inv_a = 1.0 / a;
    let integrand = |u: f64| 1.0 / (1.0 - z * u.powf(inv_a));
    integrate(integrand, 0.0, 1.0, &QuadOptions::relative(REL_TOL)).into_value(NAME)
}

/// Tricomi's confluent hypergeometric function
/// `U(a, b, z) = (1/Γ(a)) ∫₀^∞ e^{−zt} t^{a−1} (1+t)^{b−a−1} dt` for `a > 0`, `z > 0`.
pub fn tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    const NAME: &str = "tricomi_u";
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(NAME, format!("a must be finite and > 0, got {a}")));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(NAME, format!("z must be finite and > 0, got {z}")));
    }
    if !b.is_finite() {
        return Err(Error::domain(NAME, format!("b must be finite, got {b}")));
    }
    let opts = QuadOptions::relative(REL_TOL);
    let power = b - a - 1.0;
    if z >= 1.0 {
        // t = s/z keeps the exponential on a unit scale for large z.
        let integrand = |s: f64| {
            if s == 0.0 {
                return 0.0;
            }
            ((a - 1.0) * s.ln() - s + power * (s / z).ln_1p()).exp()
        };
        let integral = integrate_semi_infinite_with(integrand, 0.0, &opts).into_value(NAME)?;
        Ok(integral * (-a * z.ln() - ln_gamma(a)).exp())
    } else {
        let integrand = |t: f64| {
            if t == 0.0 {
                return 0.0;
            }
            (-z * t + (a - 1.0) * t.ln() + power * t.ln_1p()).exp()
        };
        let integral = integrate_semi_infinite_with(integrand, 0.0, &opts).into_value(NAME)?;
        Ok(integral * (-ln_gamma(a)).exp())
    }
}
