//! Gamma function, exponential integral and the upper incomplete gamma
//! function for non-positive order.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_431;

/// Largest `y` with `exp(y)` finite.
const LN_MAX: f64 = 709.782_712_893_384;

/// Below this argument the power series is used; above it, continued fractions.
const E1_SERIES_LIMIT: f64 = 1.0;
/// Below this argument the incomplete gamma function is built by recurrence
/// from a series base value; above it, Legendre's continued fraction.
const GAMMA_CF_LIMIT: f64 = 2.0;

const MAX_ITER: usize = 10_000;
const FPMIN: f64 = 1e-300;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + (i + 1) as f64))
}

/// Γ(x) for real `x` away from the poles at the non-positive integers.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * lanczos_sum(x) * ((x + 0.5) * t.ln() - t).exp()
    }
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let t = x + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + lanczos_sum(x).ln() + (x + 0.5) * t.ln() - t
    }
}

/// Riemann zeta at an integer `k >= 2` (Euler–Maclaurin with 15 explicit terms).
fn zeta_int(k: u32) -> f64 {
    const N: f64 = 16.0;
    let s = k as f64;
    let head: f64 = (1..16).map(|n| (n as f64).powf(-s)).sum();
    let rising = |m: i32| (0..m).map(|i| s + i as f64).product::<f64>();
    head + 0.5 * N.powf(-s) + N.powf(1.0 - s) / (s - 1.0) + rising(1) * N.powf(-s - 1.0) / 12.0
        - rising(3) * N.powf(-s - 3.0) / 720.0
        + rising(5) * N.powf(-s - 5.0) / 30_240.0
        - rising(7) * N.powf(-s - 7.0) / 1_209_600.0
}

/// Γ(1 + a) − 1, accurate for small |a|.
pub fn gamma1pm1(a: f64) -> f64 {
    if a.abs() < 0.2 {
        // ln Γ(1+a) = −γa + Σ_{k≥2} (−1)^k ζ(k) a^k / k
        let mut sum = -EULER_GAMMA * a;
        let mut power = -a;
        for k in 2..40u32 {
            power *= -a;
            let term = zeta_int(k) * power / k as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum.exp_m1()
    } else {
        gamma(1.0 + a) - 1.0
    }
}

fn check_positive(function: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(function, format!("x must be finite and > 0, got {x}")))
    }
}

/// Power series −γ − ln x + Σ_{k≥1} (−1)^{k+1} x^k / (k·k!) for E₁(x).
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        term *= -x / kf;
        let add = -term / kf;
        sum += add;
        if add.abs() < f64::EPSILON * sum.abs() * 0.25 {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum
}

/// Modified Lentz evaluation of Legendre's continued fraction
/// `x^{-a} e^{x} Γ(a, x) = 1/(x+1−a− 1(1−a)/(x+3−a− 2(2−a)/(x+5−a− …)))`.
fn legendre_cf(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        let an = -fi * (fi - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= f64::EPSILON {
            return Ok(h);
        }
    }
    Err(Error::convergence(
        "upper_incomplete_gamma",
        format!("continued fraction did not converge for a = {a}, x = {x}"),
    ))
}

/// E₁(x) = ∫₁^∞ e^{−xt}/t dt for `x > 0`.
///
/// Power series for `x <= 1`, continued fraction above.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    check_positive("exp_integral_e1", x)?;
    if x <= E1_SERIES_LIMIT {
        Ok(e1_series(x))
    } else {
        Ok(legendre_cf(0.0, x)? * (-x).exp())
    }
}

/// eˣ·E₁(x) evaluated jointly, finite for every `x > 0`.
pub fn scaled_exp_integral_e1(x: f64) -> Result<f64> {
    check_positive("scaled_exp_integral_e1", x)?;
    if x <= E1_SERIES_LIMIT {
        Ok(x.exp() * e1_series(x))
    } else {
        legendre_cf(0.0, x)
    }
}

/// Γ(a₀, x) for `a₀ ∈ (0, 1)` and small `x`:
/// `[Γ(1+a₀) − x^{a₀}]/a₀ − x^{a₀} Σ_{n≥1} (−x)^n / (n!(a₀+n))`.
fn upper_gamma_base_series(a0: f64, x: f64) -> f64 {
    let ln_x = x.ln();
    let head = (gamma1pm1(a0) - (a0 * ln_x).exp_m1()) / a0;
    let mut sum = 0.0;
    let mut fact = 1.0;
    for n in 1..MAX_ITER {
        let nf = n as f64;
        fact *= -x / nf;
        let add = fact / (a0 + nf);
        sum += add;
        if add.abs() < 0.25 * f64::EPSILON * sum.abs() {
            break;
        }
    }
    head - (a0 * ln_x).exp() * sum
}

/// x^{−a}·eˣ·Γ(a, x) for `a <= 1`, `x > 0`.
///
/// This is the overflow-free form in which every closed form consumes the
/// incomplete gamma function; for `a = 1 − k` it equals eˣ·E_k(x).
pub fn scaled_upper_gamma(a: f64, x: f64) -> Result<f64> {
    const NAME: &str = "scaled_upper_gamma";
    check_positive(NAME, x)?;
    if !(a <= 1.0) || !a.is_finite() {
        return Err(Error::domain(NAME, format!("order must be finite and <= 1, got {a}")));
    }
    if x >= GAMMA_CF_LIMIT {
        return legendre_cf(a, x);
    }
    if a == 1.0 {
        return Ok(1.0 / x);
    }

    // Seed S(b) = x^{-b} eˣ Γ(b, x) at b ∈ [0, 1) and walk down with
    // Γ(b−1, x) = (Γ(b, x) − x^{b−1} e^{−x})/(b − 1), i.e. S(b−1) = (x·S(b) − 1)/(b − 1).
    let floor = a.floor();
    let (mut b, mut s) = if a == floor {
        (0.0, scaled_exp_integral_e1(x)?)
    } else {
        let a0 = a - floor;
        let base = upper_gamma_base_series(a0, x);
        (a0, base * (x - a0 * x.ln()).exp())
    };
    while b > a {
        s = (x * s - 1.0) / (b - 1.0);
        b -= 1.0;
    }
    Ok(s)
}

/// Upper incomplete gamma function Γ(a, x) = ∫ₓ^∞ t^{a−1} e^{−t} dt for
/// `a <= 1` (including negative orders) and `x > 0`.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    const NAME: &str = "upper_incomplete_gamma";
    check_positive(NAME, x)?;
    if a == 0.0 {
        return exp_integral_e1(x);
    }
    let scaled = scaled_upper_gamma(a, x)?;
    let log_value = scaled.ln() + a * x.ln() - x;
    if log_value > LN_MAX {
        return Err(Error::Overflow {
            function: NAME,
            detail: format!("Γ({a}, {x}) exceeds the f64 range (x^a = e^{:.1})", a * x.ln()),
        });
    }
    Ok(log_value.exp())
}

/// Regularised upper incomplete gamma Q(p, x) = Γ(p, x)/Γ(p) for `p > 0`, `x >= 0`.
pub fn regularized_upper_gamma(p: f64, x: f64) -> Result<f64> {
    const NAME: &str = "regularized_upper_gamma";
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::domain(NAME, format!("p must be finite and > 0, got {p}")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(NAME, format!("x must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    let log_prefactor = p * x.ln() - x;
    if x < p + 1.0 {
        let mut ap = p;
        let mut del = 1.0 / p;
        let mut sum = del;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * f64::EPSILON {
                let lower = sum * (log_prefactor - ln_gamma(p)).exp();
                return Ok((1.0 - lower).max(0.0));
            }
        }
        Err(Error::convergence(NAME, format!("series did not converge for p = {p}, x = {x}")))
    } else {
        let h = legendre_cf(p, x)?;
        Ok(h * (log_prefactor - ln_gamma(p)).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn gamma1pm1_matches_direct_evaluation_away_from_zero() {
        for a in [-0.19, -0.05, 1e-9, 0.01, 0.15, 0.19] {
            let direct = gamma(1.0 + a) - 1.0;
            let tol = 1e-14 + 1e-13 * direct.abs().max(a.abs());
            assert!((gamma1pm1(a) - direct).abs() < tol.max(2e-15), "a = {a}");
        }
        // Γ'(1) = −γ
        assert!((gamma1pm1(1e-10) / 1e-10 + EULER_GAMMA).abs() < 1e-9);
    }

    #[test]
    fn e1_rejects_nonpositive_and_nan() {
        for x in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(exp_integral_e1(x).is_err(), "x = {x}");
        }
    }

    #[test]
    fn e1_reference_values() {
        // Abramowitz & Stegun Table 5.1
        assert!((exp_integral_e1(1.0).unwrap() - 0.219_383_934_395_520_3).abs() < 1e-15);
        assert!((exp_integral_e1(0.5).unwrap() - 0.559_773_594_776_160_8).abs() < 1e-14);
        let e1_10 = exp_integral_e1(10.0).unwrap();
        assert!((e1_10 / 4.156_968_929_685_324e-6 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn e1_series_and_fraction_agree_at_switch() {
        let x = E1_SERIES_LIMIT;
        let series = e1_series(x);
        let cf = legendre_cf(0.0, x).unwrap() * (-x).exp();
        assert!((series / cf - 1.0).abs() < 1e-13);
    }

    #[test]
    fn scaled_e1_large_argument() {
        let x = 1e6;
        let s = scaled_exp_integral_e1(x).unwrap();
        // eˣE₁(x) ~ 1/x − 1/x² + 2/x³
        assert!((s - (1.0 / x - 1.0 / (x * x) + 2.0 / x.powi(3))).abs() < 1e-20);
    }

    #[test]
    fn gamma_of_order_one_and_zero() {
        assert!((upper_incomplete_gamma(1.0, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(
            upper_incomplete_gamma(0.0, 1.0).unwrap(),
            exp_integral_e1(1.0).unwrap()
        );
    }

    #[test]
    fn gamma_minus_one_identity() {
        // Γ(−1, x) = e^{−x}/x − E₁(x)
        for x in [0.05, 0.7, 1.9, 2.1, 15.0] {
            let lhs = upper_incomplete_gamma(-1.0, x).unwrap();
            let rhs = (-x).exp() / x - exp_integral_e1(x).unwrap();
            assert!((lhs / rhs - 1.0).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn branches_agree_at_switch() {
        for a in [-3.5, -2.0, -0.5, 0.3, 0.999] {
            let x = GAMMA_CF_LIMIT;
            let cf = legendre_cf(a, x).unwrap();
            let below = scaled_upper_gamma(a, x * (1.0 - 1e-15)).unwrap();
            assert!((cf / below - 1.0).abs() < 1e-11, "a = {a}: {cf} vs {below}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        let err = upper_incomplete_gamma(-200.0, 1e-5).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
    }

    #[test]
    fn domain_errors() {
        assert!(upper_incomplete_gamma(0.5, 0.0).is_err());
        assert!(upper_incomplete_gamma(1.5, 1.0).is_err());
        assert!(scaled_upper_gamma(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn regularized_upper_gamma_special_cases() {
        for x in [0.01, 0.5, 3.0, 20.0] {
            assert!((regularized_upper_gamma(1.0, x).unwrap() - (-x).exp()).abs() < 1e-14);
            let erfc = libm::erfc(x.sqrt());
            assert!((regularized_upper_gamma(0.5, x).unwrap() / erfc - 1.0).abs() < 1e-12);
        }
        assert_eq!(regularized_upper_gamma(2.0, 0.0).unwrap(), 1.0);
        // Q(3, x) = e^{−x}(1 + x + x²/2)
        let x = 2.5f64;
        let exact = (-x).exp() * (1.0 + x + x * x / 2.0);
        assert!((regularized_upper_gamma(3.0, x).unwrap() - exact).abs() < 1e-14);
    }
}
