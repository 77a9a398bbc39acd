//! Finite exponential sums approximating eˣ·E₁(x).
//!
//! Every approximate closed form in [`crate::analytic`] is written in terms of
//! `eˣE₁(x) ≈ Σⱼ wⱼ e^{−ζⱼ x}` with `wⱼ, ζⱼ > 0`. Two constructions are offered:
//!
//! * [`build_e1_expsum`]: Gauss–Legendre discretisation of
//!   `eˣE₁(x) = ∫₀^∞ e^{−xt}/(1+t) dt` after `t = eˢ`, on an `s`-window that
//!   widens with the term count.
//! * [`e1_expsum_cotangent_recipe`]: the cotangent-based double sum with
//!   `a_N = 1/(2N+2)` and `b_n = [cot θ_{n−1} − cot θ_n]·(N+1)/π`, where
//!   `θ_n = πn/(2N+2)`. Its first coefficient involves `cot θ₀ = cot 0`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

use super::gamma::scaled_exp_integral_e1;

/// Term count of the default sum, `(N+1)(I+1)` with `N = I = 14`.
pub const DEFAULT_TERM_COUNT: usize = 225;
/// Smallest term count accepted by [`build_e1_expsum`].
pub const MIN_TERM_COUNT: usize = 4;
/// Largest validation-grid relative error accepted by [`build_e1_expsum`].
pub const MAX_CONSTRUCTION_ERROR: f64 = 1e-2;

const GRID_POINTS: usize = 200;
const GRID_LOG10_MIN: f64 = -3.0;
const GRID_LOG10_MAX: f64 = 2.0;

/// One term `weight · exp(−rate · x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub weight: f64,
    pub rate: f64,
}

/// A validated exponential-sum surrogate for `eˣE₁(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct E1ExpSum {
    terms: Vec<ExpTerm>,
    validation_error: f64,
}

/// The 200-point log-spaced grid on `[10⁻³, 10²]` on which sums are validated.
pub fn validation_grid() -> Vec<f64> {
    (0..GRID_POINTS)
        .map(|i| {
            let frac = i as f64 / (GRID_POINTS - 1) as f64;
            10f64.powf(GRID_LOG10_MIN + frac * (GRID_LOG10_MAX - GRID_LOG10_MIN))
        })
        .collect()
}

impl E1ExpSum {
    /// Wraps explicit terms after checking `weight > 0`, `rate > 0`, and
    /// measures the validation-grid error.
    pub fn from_terms(terms: Vec<ExpTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Construction("no terms".into()));
        }
        if let Some((j, t)) = terms
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.weight > 0.0 && t.rate > 0.0 && t.weight.is_finite() && t.rate.is_finite()))
        {
            return Err(Error::Construction(format!(
                "term {j} has weight {} and rate {}; both must be finite and > 0",
                t.weight, t.rate
            )));
        }
        let validation_error = max_relative_error(&terms)?;
        Ok(Self {
            terms,
            validation_error,
        })
    }

    /// Gauss–Legendre construction with `term_count` terms and no accuracy gate.
    ///
    /// Small counts are legal here (useful for convergence studies) but may
    /// be far from `eˣE₁(x)`; [`build_e1_expsum`] applies the gate.
    pub fn gauss_legendre(term_count: usize) -> Result<Self> {
        if term_count == 0 {
            return Err(Error::Construction("term count must be positive".into()));
        }
        let root = (term_count as f64).sqrt();
        let s_lo = -(2.2 * root).min(30.0);
        let s_hi = (5.0 + 0.6 * root).min(11.0);
        let half = 0.5 * (s_hi - s_lo);
        let mid = 0.5 * (s_hi + s_lo);
        let (nodes, weights) = gauss_legendre(term_count);
        let terms = nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| {
                let s = mid + half * x;
                let t = s.exp();
                // dt = t ds, integrand 1/(1+t)
                ExpTerm {
                    weight: half * w * t / (1.0 + t),
                    rate: t,
                }
            })
            .collect();
        Self::from_terms(terms)
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum relative error against `eˣE₁(x)` over [`validation_grid`].
    pub fn validation_error(&self) -> f64 {
        self.validation_error
    }

    /// `Σⱼ wⱼ e^{−ζⱼ x}`.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.weight * (-t.rate * x).exp()).sum()
    }
}

impl Default for E1ExpSum {
    fn default() -> Self {
        default_expsum().clone()
    }
}

/// Shared instance of the default 225-term sum.
pub fn default_expsum() -> &'static E1ExpSum {
    static DEFAULT: OnceLock<E1ExpSum> = OnceLock::new();
    DEFAULT.get_or_init(|| {
        build_e1_expsum(DEFAULT_TERM_COUNT).expect("default exponential sum must validate")
    })
}

fn max_relative_error(terms: &[ExpTerm]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in validation_grid() {
        let exact = scaled_exp_integral_e1(x)?;
        let approx: f64 = terms.iter().map(|t| t.weight * (-t.rate * x).exp()).sum();
        worst = worst.max((approx / exact - 1.0).abs());
    }
    Ok(worst)
}

/// Builds the default-family sum with `term_count` terms, failing if its
/// validation error exceeds [`MAX_CONSTRUCTION_ERROR`].
pub fn build_e1_expsum(term_count: usize) -> Result<E1ExpSum> {
    if term_count < MIN_TERM_COUNT {
        return Err(Error::Construction(format!(
            "term count must be >= {MIN_TERM_COUNT}, got {term_count}"
        )));
    }
    let sum = E1ExpSum::gauss_legendre(term_count)?;
    if sum.validation_error > MAX_CONSTRUCTION_ERROR {
        return Err(Error::Construction(format!(
            "{term_count}-term sum has validation error {:.3e} > {MAX_CONSTRUCTION_ERROR:e}",
            sum.validation_error
        )));
    }
    Ok(sum)
}

/// What to do with recipe terms that are non-finite or have `ζ <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DivergentTermPolicy {
    /// Fail with a construction error naming the first bad `(n, i)`.
    #[default]
    Reject,
    /// Silently drop the offending terms.
    Drop,
}

/// `θ_n = πn/(2N+2)`, exact at `n = N+1`.
pub fn recipe_theta(n: usize, big_n: usize) -> f64 {
    FRAC_PI_2 * (n as f64 / (big_n + 1) as f64)
}

fn cot(theta: f64) -> f64 {
    if theta == 0.0 {
        f64::INFINITY
    } else if theta == FRAC_PI_2 {
        0.0
    } else {
        theta.cos() / theta.sin()
    }
}

/// `b_n = [cot θ_{n−1} − cot θ_n] / (π/(N+1))`; infinite for `n = 1`.
pub fn recipe_b(n: usize, big_n: usize) -> f64 {
    let step = PI / (big_n + 1) as f64;
    (cot(recipe_theta(n - 1, big_n)) - cot(recipe_theta(n, big_n))) / step
}

/// The cotangent double-sum recipe, one term per `(n, i)` with weight
/// `4√2·π·a_N·a_I·√b_n` and rate `ζ_{i,n} = 4 b_n b_i − 1`.
pub fn e1_expsum_cotangent_recipe(
    big_n: usize,
    big_i: usize,
    policy: DivergentTermPolicy,
) -> Result<E1ExpSum> {
    if big_n == 0 || big_i == 0 {
        return Err(Error::Construction(format!(
            "N and I must be >= 1, got N = {big_n}, I = {big_i}"
        )));
    }
    let a_n = 1.0 / (2 * big_n + 2) as f64;
    let a_i = 1.0 / (2 * big_i + 2) as f64;
    let prefactor = 4.0 * SQRT_2 * PI * a_n * a_i;

    let mut terms = Vec::with_capacity((big_n + 1) * (big_i + 1));
    for n in 1..=big_n + 1 {
        let b_n = recipe_b(n, big_n);
        for i in 1..=big_i + 1 {
            let b_i = recipe_b(i, big_i);
            let weight = prefactor * b_n.sqrt();
            let rate = 4.0 * b_n * b_i - 1.0;
            let ok = weight.is_finite() && rate.is_finite() && weight > 0.0 && rate > 0.0;
            if ok {
                terms.push(ExpTerm { weight, rate });
            } else if policy == DivergentTermPolicy::Reject {
                return Err(Error::Construction(format!(
                    "term (n = {n}, i = {i}) is invalid: b_n = {b_n}, b_i = {b_i}, weight = {weight}, zeta = {rate}"
                )));
            }
        }
    }
    E1ExpSum::from_terms(terms)
}
