//! Closed-form and quadrature expressions for the secondary link.
//!
//! Notation used throughout: `r = Ωλ₂/λ₃`, `c = Ωλ₁λ₂/λ₀`, `z = γ/c`,
//! `g(x) = eˣE₁(x)` and `S(a, x) = x^{−a}eˣΓ(a, x)`. With these the SNR CDF is
//! `F(γ) = [γ + r z g(z)]/(r + γ)` and its complement
//! `1 − F(γ) = r S(−1, z)/(r + γ)`.
//!
//! `*_quadrature` and `*_exact` functions integrate the exact CDF
//! numerically. `*_approx` functions replace `g` by an [`E1ExpSum`] and
//! integrate term by term in closed form. `*_asymptotic` functions are the
//! `λ₁ → ∞` limits.

use std::cell::Cell;
use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::model::{mpsk_alpha, BinaryModulation, ModulationSpec, SystemParams};
use crate::quadrature::{
    find_root_increasing, integrate, integrate_semi_infinite_with, QuadOptions,
};
use crate::specfun::{
    gauss_2f1_ratio, scaled_exp_integral_e1, scaled_upper_gamma, tricomi_u, E1ExpSum,
};

/// Absolute tolerance of the ergodic-capacity and SER integrals.
pub const ERGODIC_ABS_TOL: f64 = 1e-8;
/// Absolute tolerance of the effective-capacity integral.
pub const EFFECTIVE_ABS_TOL: f64 = 1e-9;
/// Relative bracket width at which the inverse CDF stops bisecting.
pub const INVERSE_CDF_REL_TOL: f64 = 1e-10;
/// Relative gap `|λ₃ − Ωλ₂|/max(·,·)` below which partial fractions are refused.
pub const PARTIAL_FRACTION_MIN_GAP: f64 = 1e-8;
/// Largest tolerated roundoff bound, relative to the result, in the
/// partial-fraction sum of [`effective_capacity_approx_integer`].
const PARTIAL_FRACTION_MAX_ROUNDOFF: f64 = 1e-4;

fn check_gamma(function: &'static str, gamma: f64) -> Result<()> {
    if gamma >= 0.0 && !gamma.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(function, format!("gamma must be >= 0, got {gamma}")))
    }
}

fn check_positive(function: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(function, format!("{name} must be finite and > 0, got {v}")))
    }
}

/// `x·g(x)` with the limits 0 at `x = 0` and 1 at `x = ∞`.
fn x_scaled_e1(x: f64) -> Result<f64> {
    if x == 0.0 {
        Ok(0.0)
    } else if x == f64::INFINITY {
        Ok(1.0)
    } else {
        Ok(x * scaled_exp_integral_e1(x)?)
    }
}

/// Exact CDF `F_Υ(γ)`.
pub fn snr_cdf_exact(params: &SystemParams, gamma: f64) -> Result<f64> {
    check_gamma("snr_cdf_exact", gamma)?;
    if gamma == f64::INFINITY {
        return Ok(1.0);
    }
    let r = params.ratio();
    let z = gamma / params.cdf_scale();
    Ok((gamma + r * x_scaled_e1(z)?) / (r + gamma))
}

/// Exact complementary CDF `1 − F_Υ(γ)`, accurate in the far tail.
pub fn snr_ccdf_exact(params: &SystemParams, gamma: f64) -> Result<f64> {
    check_gamma("snr_ccdf_exact", gamma)?;
    if gamma == f64::INFINITY {
        return Ok(0.0);
    }
    if gamma == 0.0 {
        return Ok(1.0);
    }
    let r = params.ratio();
    let z = gamma / params.cdf_scale();
    Ok(r * scaled_upper_gamma(-1.0, z)? / (r + gamma))
}

/// CDF with `g(z)` replaced by the exponential sum, clamped to `[0, 1]`.
pub fn snr_cdf_approx(params: &SystemParams, gamma: f64, approx: &E1ExpSum) -> Result<f64> {
    check_gamma("snr_cdf_approx", gamma)?;
    if gamma == f64::INFINITY {
        return Ok(1.0);
    }
    let r = params.ratio();
    let z = gamma / params.cdf_scale();
    let f = (gamma + r * z * approx.evaluate(z)) / (r + gamma);
    Ok(f.clamp(0.0, 1.0))
}

/// `P(log₂(1 + Υ) < R)`.
pub fn outage_probability(params: &SystemParams, rate: f64) -> Result<f64> {
    check_positive("outage_probability", "rate", rate)?;
    snr_cdf_exact(params, rate.exp2() - 1.0)
}

/// ε-outage capacity `log₂(1 + F⁻¹(ε))`.
pub fn outage_capacity(params: &SystemParams, epsilon: f64) -> Result<f64> {
    const NAME: &str = "outage_capacity";
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(NAME, format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let gamma = find_root_increasing(
        |g| snr_cdf_exact(params, g),
        epsilon,
        0.0,
        INVERSE_CDF_REL_TOL,
    )?;
    Ok(gamma.ln_1p() / LN_2)
}

/// Runs a semi-infinite integral whose integrand can fail, reporting the
/// first failure instead of a quadrature result.
fn integrate_fallible<F>(name: &'static str, f: F, opts: &QuadOptions) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: Cell<Option<Error>> = Cell::new(None);
    let result = integrate_semi_infinite_with(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                let prev = failure.take();
                failure.set(Some(prev.unwrap_or(e)));
                0.0
            }
        },
        0.0,
        opts,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    result.into_value(name)
}

/// `E[log₂(1 + Υ)] = (1/ln 2) ∫₀^∞ (1 − F(γ))/(1 + γ) dγ` by adaptive quadrature.
pub fn ergodic_capacity_quadrature(params: &SystemParams) -> Result<f64> {
    let integral = integrate_fallible(
        "ergodic_capacity_quadrature",
        |g| Ok(snr_ccdf_exact(params, g)? / (1.0 + g)),
        &QuadOptions::absolute(ERGODIC_ABS_TOL * LN_2),
    )?;
    Ok(integral / LN_2)
}

/// `r ln r/(r − 1)`, continuous at `r = 1`.
fn ergodic_base(r: f64, special: bool) -> f64 {
    if special {
        1.0
    } else {
        r * r.ln() / (r - 1.0)
    }
}

/// Ergodic capacity from the exponential-sum closed form.
///
/// Uses the `λ₃ = Ωλ₂` form when [`SystemParams::is_special_case`] holds.
pub fn ergodic_capacity_approx(params: &SystemParams, approx: &E1ExpSum) -> Result<f64> {
    let r = params.ratio();
    let c = params.cdf_scale();
    let scale = r / c;
    let special = params.is_special_case();
    let mut correction = 0.0;
    for term in approx.terms() {
        let a = term.rate / c;
        let inner = if special {
            // ∫ γ e^{−aγ}/(1+γ)² dγ = (1 + a)g(a) − 1 = g(a) − S(−1, a)
            scaled_exp_integral_e1(a)? - scaled_upper_gamma(-1.0, a)?
        } else {
            // ∫ γ e^{−aγ}/((γ+r)(1+γ)) dγ
            (r * scaled_exp_integral_e1(a * r)? - scaled_exp_integral_e1(a)?) / (r - 1.0)
        };
        correction += term.weight * inner;
    }
    Ok((ergodic_base(r, special) - scale * correction) / LN_2)
}

/// `λ₁ → ∞` limit of the ergodic capacity: `r log₂ r/(r − 1)`, or `1/ln 2` at `r = 1`.
pub fn ergodic_capacity_asymptotic(params: &SystemParams) -> f64 {
    ergodic_base(params.ratio(), params.is_special_case()) / LN_2
}

/// Partial-fraction constants of `γ/((γ + r)(1 + γ)^{A+1})`:
/// `c0/(γ + r) + Σ_{k=1}^{A+1} c[k−1]/(1 + γ)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffCapConstants {
    pub c0: f64,
    pub c: Vec<f64>,
    ratio: f64,
}

impl EffCapConstants {
    /// The `r` the constants were built for.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Evaluates the decomposition at `γ`.
    pub fn reconstruct(&self, gamma: f64) -> f64 {
        let inv = 1.0 / (1.0 + gamma);
        let mut power = 1.0;
        let mut sum = self.c0 / (gamma + self.ratio);
        for ck in &self.c {
            power *= inv;
            sum += ck * power;
        }
        sum
    }

    /// The function being decomposed, `γ/((γ + r)(1 + γ)^{A+1})`.
    pub fn direct(&self, gamma: f64) -> f64 {
        gamma / ((gamma + self.ratio) * (1.0 + gamma).powi(self.c.len() as i32))
    }
}

/// Constants for integer QoS exponent `A >= 1`; refuses near-degenerate `r ≈ 1`.
pub fn effcap_constants(params: &SystemParams, a: u32) -> Result<EffCapConstants> {
    if a == 0 {
        return Err(Error::domain("effcap_constants", "A must be >= 1"));
    }
    let gap = params.relative_gap();
    if gap < PARTIAL_FRACTION_MIN_GAP {
        return Err(Error::NearDegenerate { gap });
    }
    let r = params.ratio();
    let m = a as i32 + 1;
    let d = r - 1.0;
    let c0 = -r / (1.0 - r).powi(m);
    let c = (1..=m)
        .map(|k| {
            let j = m - k;
            if j == 0 {
                -1.0 / d
            } else {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                -r * sign / d.powi(j + 1)
            }
        })
        .collect();
    Ok(EffCapConstants { c0, c, ratio: r })
}

/// `Ψ = −(1/A) log₂(1 − A·X)` computed without cancellation for small `A·X`.
fn effcap_from_integral(a: f64, x: f64) -> Result<f64> {
    let ax = a * x;
    if !(ax < 1.0) {
        return Err(Error::domain(
            "effective_capacity",
            format!("A·X = {ax} must be < 1"),
        ));
    }
    Ok(-(-ax).ln_1p() / (a * LN_2))
}

fn check_exponent(function: &'static str, a: f64) -> Result<()> {
    check_positive(function, "A", a)
}

/// Effective capacity `−(1/A) log₂ E[(1 + Υ)^{−A}]` by quadrature of
/// `X = ∫₀^∞ (1 − F(γ))/(1 + γ)^{A+1} dγ`.
pub fn effective_capacity_quadrature(params: &SystemParams, a: f64) -> Result<f64> {
    const NAME: &str = "effective_capacity_quadrature";
    check_exponent(NAME, a)?;
    let x = integrate_fallible(
        NAME,
        |g| Ok(snr_ccdf_exact(params, g)? * (-(a + 1.0) * g.ln_1p()).exp()),
        &QuadOptions::absolute(EFFECTIVE_ABS_TOL),
    )?;
    effcap_from_integral(a, x)
}

/// `Ξ = r/(A+1)·₂F₁(A+1, 1; A+2; 1 − r) = ∫₀^∞ r/((r+γ)(1+γ)^{A+1}) dγ`.
fn effcap_asymptotic_integral(r: f64, a: f64) -> Result<f64> {
    Ok(r / (a + 1.0) * gauss_2f1_ratio(a + 1.0, 1.0 - r)?)
}

/// `λ₁ → ∞` limit of the effective capacity, any `A > 0`.
pub fn effective_capacity_asymptotic(params: &SystemParams, a: f64) -> Result<f64> {
    check_exponent("effective_capacity_asymptotic", a)?;
    let r = if params.is_special_case() { 1.0 } else { params.ratio() };
    effcap_from_integral(a, effcap_asymptotic_integral(r, a)?)
}

/// Integer-`A` closed form built on [`effcap_constants`]. Requires `r ≠ 1`.
pub fn effective_capacity_approx_integer(
    params: &SystemParams,
    a: u32,
    approx: &E1ExpSum,
) -> Result<f64> {
    const NAME: &str = "effective_capacity_approx_integer";
    let constants = match effcap_constants(params, a) {
        Err(Error::NearDegenerate { gap }) => {
            return Err(Error::BranchMismatch(format!(
                "integer-A form requested with |omega*lambda2 - lambda3| relative gap {gap:e}; use the special-case form"
            )))
        }
        other => other?,
    };
    let r = constants.ratio;
    let c = params.cdf_scale();
    let af = a as f64;
    let mut correction = 0.0;
    let mut magnitude = 0.0;
    for term in approx.terms() {
        let rate = term.rate / c;
        let mut inner = constants.c0 * scaled_exp_integral_e1(rate * r)?;
        let mut size = inner.abs();
        for (i, ck) in constants.c.iter().enumerate() {
            // ∫₀^∞ e^{−aγ}(1+γ)^{−k} dγ = eᵃE_k(a) = S(1−k, a)
            let k = (i + 1) as f64;
            let piece = ck * scaled_upper_gamma(1.0 - k, rate)?;
            inner += piece;
            size += piece.abs();
        }
        correction += term.weight * inner;
        magnitude += term.weight * size;
    }
    let scale = r / c;
    let base = effcap_asymptotic_integral(r, af)?;
    let x = base - scale * correction;
    let roundoff = 4.0 * f64::EPSILON * scale * magnitude;
    if roundoff > PARTIAL_FRACTION_MAX_ROUNDOFF * x.abs() {
        return Err(Error::Convergence {
            function: NAME,
            detail: format!(
                "partial-fraction sum loses accuracy at r = {r} (roundoff bound {roundoff:e} against value {x:e})"
            ),
        });
    }
    effcap_from_integral(af, x)
}

/// Closed form for `λ₃ = Ωλ₂`, any `A > 0`:
/// `X = 1/(A+1) − (1/c) Σⱼ wⱼ U(2, 1 − A, ζⱼ/c)`.
pub fn effective_capacity_approx_special(
    params: &SystemParams,
    a: f64,
    approx: &E1ExpSum,
) -> Result<f64> {
    const NAME: &str = "effective_capacity_approx_special";
    check_exponent(NAME, a)?;
    let gap = params.relative_gap();
    if gap >= PARTIAL_FRACTION_MIN_GAP {
        return Err(Error::BranchMismatch(format!(
            "special-case form requested with relative gap {gap:e} between lambda3 and omega*lambda2"
        )));
    }
    let c = params.cdf_scale();
    let mut correction = 0.0;
    for term in approx.terms() {
        correction += term.weight * tricomi_u(2.0, 1.0 - a, term.rate / c)?;
    }
    effcap_from_integral(a, 1.0 / (a + 1.0) - correction / c)
}

/// Effective capacity from the exponential-sum closed forms.
///
/// Routes to [`effective_capacity_approx_special`] when the relative gap
/// between `λ₃` and `Ωλ₂` is below [`PARTIAL_FRACTION_MIN_GAP`], and to
/// [`effective_capacity_approx_integer`] otherwise, which needs integer `A`.
pub fn effective_capacity_approx(params: &SystemParams, a: f64, approx: &E1ExpSum) -> Result<f64> {
    check_exponent("effective_capacity_approx", a)?;
    if params.relative_gap() < PARTIAL_FRACTION_MIN_GAP {
        return effective_capacity_approx_special(params, a, approx);
    }
    if a.fract() != 0.0 || a > u32::MAX as f64 {
        return Err(Error::BranchMismatch(format!(
            "non-integer A = {a} has a closed form only when lambda3 = omega*lambda2"
        )));
    }
    effective_capacity_approx_integer(params, a as u32, approx)
}

fn binary(function: &'static str, modulation: ModulationSpec) -> Result<BinaryModulation> {
    match modulation {
        ModulationSpec::Binary(b) => Ok(b),
        ModulationSpec::Mpsk { order } => Err(Error::domain(
            function,
            format!("needs a binary (p, q) format, got {order}-PSK"),
        )),
    }
}

/// `(p/2) S(−p, x)`, the binary-family average over `γ/(r + γ)` with `x = q r`.
fn ber_kernel(p: f64, x: f64) -> Result<f64> {
    Ok(0.5 * p * scaled_upper_gamma(-p, x)?)
}

fn ber_terms(params: &SystemParams, m: BinaryModulation, approx: Option<&E1ExpSum>) -> Result<f64> {
    let p = m.p();
    let r = params.ratio();
    let x = m.q() * r;
    let mut total = ber_kernel(p, x)?;
    if let Some(approx) = approx {
        let scale = r / params.cdf_scale();
        let mut correction = 0.0;
        for term in approx.terms() {
            let y = term.rate * scale;
            let shifted = x + y;
            correction += term.weight * (p * (x / shifted).ln()).exp() * ber_kernel(p, shifted)?;
        }
        total += scale * correction;
    }
    Ok(total)
}

/// Average BER `E[Γ(p, qΥ)/(2Γ(p))]` from the exponential-sum closed form.
pub fn average_ber_approx(
    params: &SystemParams,
    modulation: ModulationSpec,
    approx: &E1ExpSum,
) -> Result<f64> {
    ber_terms(params, binary("average_ber_approx", modulation)?, Some(approx))
}

/// `λ₁ → ∞` limit of the average BER: `(p/2)(qr)^p e^{qr} Γ(−p, qr)`.
pub fn average_ber_asymptotic(params: &SystemParams, modulation: ModulationSpec) -> Result<f64> {
    ber_terms(params, binary("average_ber_asymptotic", modulation)?, None)
}

/// `E[e^{−sΥ}]`, twice the `p = 1, q = s` BER.
pub fn snr_mgf_approx(params: &SystemParams, s: f64, approx: &E1ExpSum) -> Result<f64> {
    const NAME: &str = "snr_mgf_approx";
    check_positive(NAME, "s", s)?;
    let m = BinaryModulation::new(1.0, s).map_err(|_| Error::domain(NAME, "invalid s"))?;
    Ok(2.0 * ber_terms(params, m, Some(approx))?)
}

/// M-PSK symbol error rate `(1/π) ∫₀^{π−π/M} M_Υ(α_M/sin²θ) dθ`.
pub fn mpsk_ser(params: &SystemParams, order: u32, approx: &E1ExpSum) -> Result<f64> {
    const NAME: &str = "mpsk_ser";
    if order < 2 {
        return Err(Error::domain(NAME, format!("order must be >= 2, got {order}")));
    }
    let alpha = mpsk_alpha(order);
    let upper = PI - PI / order as f64;
    let failure: Cell<Option<Error>> = Cell::new(None);
    let integrand = |theta: f64| {
        let sin = theta.sin();
        if sin == 0.0 {
            return 0.0;
        }
        match snr_mgf_approx(params, alpha / (sin * sin), approx) {
            Ok(v) => v,
            Err(e) => {
                let prev = failure.take();
                failure.set(Some(prev.unwrap_or(e)));
                0.0
            }
        }
    };
    let result = integrate(integrand, 0.0, upper, &QuadOptions::absolute(ERGODIC_ABS_TOL * PI));
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(result.into_value(NAME)? / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{default_expsum, exp_integral_e1};

    fn fig4() -> SystemParams {
        SystemParams::new(1.0, 4.0, 3.0, 1.0, 10.0).unwrap()
    }

    #[test]
    fn cdf_endpoints() {
        let p = SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(snr_cdf_exact(&p, 0.0).unwrap(), 0.0);
        assert!(snr_cdf_exact(&p, 1e8).unwrap() >= 0.999);
        assert!(snr_cdf_exact(&p, 1e10).unwrap() > 1.0 - 1e-6);
        assert_eq!(snr_cdf_approx(&p, 0.0, default_expsum()).unwrap(), 0.0);
        assert!(snr_cdf_exact(&p, -1.0).is_err());
    }

    #[test]
    fn cdf_and_complement_sum_to_one() {
        let p = fig4();
        for g in [1e-4, 0.1, 1.0, 7.0, 300.0, 1e5] {
            let s = snr_cdf_exact(&p, g).unwrap() + snr_ccdf_exact(&p, g).unwrap();
            assert!((s - 1.0).abs() < 1e-13, "γ = {g}");
        }
    }

    #[test]
    fn cdf_matches_unsimplified_form() {
        // [λ₀γ E₁(λ₀γ/(Ωλ₁λ₂)) e^{λ₀γ/(Ωλ₁λ₂)} + λ₁λ₃γ]/(Ωλ₁λ₂ + λ₁λ₃γ)
        let (l0, l1, l2, l3, om) = (0.1, 4.0, 3.0, 1.0, 2.0);
        let p = SystemParams::new(l0, l1, l2, l3, om).unwrap();
        for g in [0.01, 0.5, 3.0, 20.0] {
            let z: f64 = l0 * g / (om * l1 * l2);
            let num = l0 * g * exp_integral_e1(z).unwrap() * z.exp() + l1 * l3 * g;
            let direct = num / (om * l1 * l2 + l1 * l3 * g);
            assert!((snr_cdf_exact(&p, g).unwrap() - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn approx_cdf_close_to_exact() {
        let p = fig4();
        let sum = default_expsum();
        for i in 0..=60 {
            let g = 10f64.powf(-3.0 + 0.1 * i as f64);
            let d = (snr_cdf_approx(&p, g, sum).unwrap() - snr_cdf_exact(&p, g).unwrap()).abs();
            assert!(d < 1e-3, "γ = {g}: {d}");
        }
    }

    #[test]
    fn outage_capacity_inverts_cdf() {
        let p = SystemParams::new(1.0, 2.0, 3.0, 1.0, 10.0).unwrap();
        let mut last = 0.0;
        for eps in [0.01, 0.1, 0.4, 0.9, 0.999] {
            let cap = outage_capacity(&p, eps).unwrap();
            let back = snr_cdf_exact(&p, cap.exp2() - 1.0).unwrap();
            assert!((back - eps).abs() < 1e-8, "ε = {eps}");
            assert!(cap > last);
            last = cap;
        }
        assert!(outage_capacity(&p, 0.0).is_err());
        assert!(outage_capacity(&p, 1.0).is_err());
    }

    #[test]
    fn outage_small_rate() {
        let p = fig4();
        assert!(outage_probability(&p, 1e-9).unwrap() < 1e-7);
        assert!(outage_probability(&p, 0.0).is_err());
    }

    #[test]
    fn ergodic_asymptotic_values() {
        let p = SystemParams::new(1.0, 1.0, 2.0, 2.0, 1.0).unwrap();
        assert!((ergodic_capacity_asymptotic(&p) - 1.0 / LN_2).abs() < 1e-15);
        let p = SystemParams::new(1.0, 1.0, 2.0, 1.0, 1.0).unwrap();
        assert!((ergodic_capacity_asymptotic(&p) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ergodic_approx_tracks_quadrature() {
        let sum = default_expsum();
        for db in [-10.0, 0.0, 10.0, 20.0] {
            for (l0, l3) in [(0.1, 1.0), (1.0, 1.0), (1.0, 3.0)] {
                let p = SystemParams::new(l0, 4.0, 3.0, l3, 1.0).unwrap().with_omega_db(db).unwrap();
                let q = ergodic_capacity_quadrature(&p).unwrap();
                let a = ergodic_capacity_approx(&p, sum).unwrap();
                assert!((q - a).abs() < 5e-3, "{p}: {q} vs {a}");
            }
        }
    }

    #[test]
    fn ergodic_branches_meet() {
        let sum = default_expsum();
        let base = SystemParams::new(0.5, 2.0, 1.0, 1.0, 1.0).unwrap();
        let special = ergodic_capacity_approx(&base, sum).unwrap();
        for f in [1.0 - 1e-4, 1.0 + 1e-4] {
            let near = base.with_omega(f).unwrap();
            let v = ergodic_capacity_approx(&near, sum).unwrap();
            assert!((v - special).abs() < 1e-3);
        }
        let q = ergodic_capacity_quadrature(&base).unwrap();
        assert!((q - special).abs() < 5e-3);
    }

    #[test]
    fn constants_hand_case() {
        // r = 2, A = 1
        let p = SystemParams::new(1.0, 1.0, 2.0, 1.0, 1.0).unwrap();
        let k = effcap_constants(&p, 1).unwrap();
        assert!((k.c0 + 2.0).abs() < 1e-15);
        assert!((k.c[0] - 2.0).abs() < 1e-15);
        assert!((k.c[1] + 1.0).abs() < 1e-15);
        for g in [0.0, 0.3, 5.0, 80.0] {
            assert!((k.reconstruct(g) - k.direct(g)).abs() < 1e-14);
        }
    }

    #[test]
    fn constants_sum_rule() {
        for (omega, a) in [(0.2, 1), (3.0, 2), (7.0, 5), (0.5, 4)] {
            let p = SystemParams::new(1.0, 1.0, 1.0, 1.0, omega).unwrap();
            let k = effcap_constants(&p, a).unwrap();
            assert!((k.c0 + k.c[0]).abs() < 1e-12 * k.c0.abs().max(1.0));
            // the 1/γ coefficients cancel, so γ·f(γ) → 0
            let g = 1e8;
            assert!((k.reconstruct(g) * g).abs() < 1e-6);
        }
    }

    #[test]
    fn constants_refuse_degenerate() {
        let p = SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(effcap_constants(&p, 2), Err(Error::NearDegenerate { .. })));
        assert!(matches!(
            effective_capacity_approx_integer(&p, 2, default_expsum()),
            Err(Error::BranchMismatch(_))
        ));
        let q = p.with_omega(2.0).unwrap();
        assert!(matches!(
            effective_capacity_approx_special(&q, 2.0, default_expsum()),
            Err(Error::BranchMismatch(_))
        ));
        assert!(matches!(
            effective_capacity_approx(&q, 1.5, default_expsum()),
            Err(Error::BranchMismatch(_))
        ));
    }

    #[test]
    fn effective_asymptotic_at_unit_ratio() {
        let p = SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        for a in [0.5, 1.0, 3.0] {
            let v = effective_capacity_asymptotic(&p, a).unwrap();
            assert!((v - (a + 1.0).log2() / a).abs() < 1e-12);
        }
    }

    #[test]
    fn effective_approx_tracks_quadrature() {
        let sum = default_expsum();
        for omega in [0.1, 1.0, 10.0] {
            let p = SystemParams::new(1.0, 2.0, 3.0, 1.0, omega).unwrap();
            for a in [1u32, 2, 3, 5] {
                let q = effective_capacity_quadrature(&p, a as f64).unwrap();
                let x = effective_capacity_approx(&p, a as f64, sum).unwrap();
                assert!((q - x).abs() < 1e-2, "Ω = {omega}, A = {a}: {q} vs {x}");
            }
        }
    }

    #[test]
    fn effective_special_branch() {
        let sum = default_expsum();
        let p = SystemParams::new(1.0, 2.0, 1.0, 1.0, 1.0).unwrap();
        for a in [0.5, 2.5] {
            let q = effective_capacity_quadrature(&p, a).unwrap();
            let x = effective_capacity_approx(&p, a, sum).unwrap();
            assert!((q - x).abs() < 1e-2, "A = {a}: {q} vs {x}");
        }
    }

    #[test]
    fn effective_branches_meet() {
        let sum = default_expsum();
        let base = SystemParams::new(0.5, 2.0, 1.0, 1.0, 1.0).unwrap();
        for (a, offset) in [(1u32, 1e-4), (2, 1e-3)] {
            let special = effective_capacity_approx_special(&base, a as f64, sum).unwrap();
            for f in [1.0 - offset, 1.0 + offset] {
                let near = base.with_omega(f).unwrap();
                let v = effective_capacity_approx_integer(&near, a, sum).unwrap();
                assert!((v - special).abs() < 1e-3, "A = {a}, Ω = {f}: {v} vs {special}");
            }
        }
    }

    #[test]
    fn effective_small_exponent_is_ergodic() {
        let p = fig4();
        let e = effective_capacity_quadrature(&p, 1e-4).unwrap();
        let c = ergodic_capacity_quadrature(&p).unwrap();
        assert!((e - c).abs() < 1e-3);
        let ea = effective_capacity_asymptotic(&p, 1e-4).unwrap();
        assert!((ea - ergodic_capacity_asymptotic(&p)).abs() < 1e-3);
    }

    #[test]
    fn ber_asymptotic_dbpsk_identity() {
        // p = 1: x eˣ Γ(−1, x)/2 with Γ(−1, x) = e^{−x}/x − E₁(x)
        let p = fig4();
        let m = BinaryModulation::DBPSK;
        let x = m.q() * p.ratio();
        let gm1 = (-x).exp() / x - exp_integral_e1(x).unwrap();
        let expected = x * x.exp() * gm1 / 2.0;
        let got = average_ber_asymptotic(&p, m.into()).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn ber_low_snr_limit() {
        let p = fig4().with_omega(1e-9).unwrap();
        for m in [BinaryModulation::BPSK, BinaryModulation::NONCOHERENT_BFSK] {
            let b = average_ber_approx(&p, m.into(), default_expsum()).unwrap();
            assert!((b - 0.5).abs() < 1e-3, "{b}");
        }
    }

    #[test]
    fn ber_rejects_mpsk() {
        let m = ModulationSpec::Mpsk { order: 4 };
        assert!(average_ber_approx(&fig4(), m, default_expsum()).is_err());
    }

    #[test]
    fn mgf_near_zero_and_monotone() {
        let p = fig4();
        let sum = default_expsum();
        assert!((snr_mgf_approx(&p, 1e-6, sum).unwrap() - 1.0).abs() < 1e-4);
        let mut last = 1.0;
        for s in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let m = snr_mgf_approx(&p, s, sum).unwrap();
            assert!(m < last);
            last = m;
        }
    }

    #[test]
    fn binary_psk_ser_is_bpsk_ber() {
        let p = SystemParams::new(0.1, 4.0, 3.0, 1.0, 10.0).unwrap();
        let sum = default_expsum();
        let ser = mpsk_ser(&p, 2, sum).unwrap();
        let ber = average_ber_approx(&p, BinaryModulation::BPSK.into(), sum).unwrap();
        assert!((ser - ber).abs() < 1e-4, "{ser} vs {ber}");
        assert!(mpsk_ser(&p, 4, sum).unwrap() > ser);
    }
}
