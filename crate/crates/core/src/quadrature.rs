//! Adaptive numerical integration and monotone root bracketing.
//!
//! The integrator is a global adaptive Gauss–Kronrod (7/15) scheme: the
//! interval with the largest error estimate is bisected until the summed
//! estimate meets the tolerance or the evaluation budget runs out. Semi-infinite
//! ranges are mapped onto `(0, 1)` with `t = a + u / (1 - u)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default evaluation budget per integral.
pub const DEFAULT_MAX_EVALS: usize = 1_000_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    /// Returns the value, or a convergence error naming `function` and the
    /// achieved error estimate.
    pub fn into_value(self, function: &'static str) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::convergence(
                function,
                format!(
                    "quadrature stopped after {} evaluations with value {:e} and error estimate {:e}",
                    self.evaluations, self.value, self.error_estimate
                ),
            ))
        }
    }
}

/// Tolerances and budget for [`integrate`].
///
/// The integral is accepted once `error <= max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl QuadOptions {
    pub fn absolute(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol: 0.0,
            max_evals: DEFAULT_MAX_EVALS,
        }
    }

    pub fn relative(rel_tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol,
            max_evals: DEFAULT_MAX_EVALS,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() || !error.is_finite() {
        error = f64::INFINITY;
    }

    Segment { a, b, value, error }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> QuadResult {
    const EVALS_PER_SEGMENT: usize = 15;

    if a == b {
        return QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        };
    }

    let first = kronrod15(&f, a, b);
    let mut evaluations = EVALS_PER_SEGMENT;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // Segments too narrow to bisect in floating point.
    let mut frozen: Vec<Segment> = Vec::new();

    while error.is_finite() && error > opts.target(value) {
        if evaluations + 2 * EVALS_PER_SEGMENT > opts.max_evals {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a.min(worst.b) && mid < worst.a.max(worst.b)) {
            frozen.push(worst);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        evaluations += 2 * EVALS_PER_SEGMENT;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);

        // Running sums drift; resynchronise now and then.
        if evaluations % (EVALS_PER_SEGMENT * 512) < 2 * EVALS_PER_SEGMENT {
            (value, error) = totals(heap.iter().chain(frozen.iter()));
        }
    }

    (value, error) = totals(heap.iter().chain(frozen.iter()));
    let converged = value.is_finite() && error.is_finite() && error <= opts.target(value);
    QuadResult {
        value,
        error_estimate: error,
        evaluations,
        converged,
    }
}

fn totals<'a>(segments: impl Iterator<Item = &'a Segment>) -> (f64, f64) {
    segments.fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> QuadResult {
    integrate(f, a, b, &QuadOptions::absolute(abs_tol))
}

/// Integrates `f` over `[a, ∞)` using the map `t = a + u / (1 - u)`.
pub fn integrate_semi_infinite_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    opts: &QuadOptions,
) -> QuadResult {
    let mapped = |u: f64| {
        let one_minus = 1.0 - u;
        let t = a + u / one_minus;
        if !t.is_finite() {
            return 0.0;
        }
        let jac = 1.0 / (one_minus * one_minus);
        let y = f(t);
        // Integrand decays at infinity; a zero times an infinite Jacobian is zero.
        if y == 0.0 {
            0.0
        } else {
            y * jac
        }
    };
    integrate(mapped, 0.0, 1.0, opts)
}

/// Integrates `f` over `[a, ∞)` to absolute tolerance `abs_tol`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64) -> QuadResult {
    integrate_semi_infinite_with(f, a, &QuadOptions::absolute(abs_tol))
}

/// Maximum number of bracket doublings in [`find_root_increasing`].
pub const MAX_DOUBLINGS: usize = 1024;
/// Maximum number of bisection steps in [`find_root_increasing`].
pub const MAX_BISECTIONS: usize = 200;

/// Solves `f(x) = target` for a non-decreasing `f` on `[lo, ∞)`.
///
/// The upper end is doubled until `f(hi) >= target`, then the bracket is
/// bisected until its width is below `rel_tol * (1 + |x|)`.
pub fn find_root_increasing<F: Fn(f64) -> Result<f64>>(
    f: F,
    target: f64,
    lo: f64,
    rel_tol: f64,
) -> Result<f64> {
    const NAME: &str = "find_root_increasing";
    if !(lo >= 0.0) || !lo.is_finite() {
        return Err(Error::domain(NAME, format!("lower end must be finite and >= 0, got {lo}")));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::domain(NAME, format!("rel_tol must be > 0, got {rel_tol}")));
    }
    let mut lo = lo;
    let mut f_lo = f(lo)?;
    if f_lo > target {
        return Err(Error::domain(
            NAME,
            format!("f(lo) = {f_lo} already exceeds target {target}"),
        ));
    }
    if f_lo == target {
        return Ok(lo);
    }

    let mut hi = if lo > 0.0 { 2.0 * lo } else { 1.0 };
    let mut f_hi = f(hi)?;
    let mut doublings = 0;
    while !(f_hi >= target) {
        if f_hi.is_nan() || f_hi < f_lo {
            return Err(non_monotone(lo, hi, f_lo, f_hi));
        }
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !(2.0 * hi).is_finite() {
            return Err(Error::convergence(
                NAME,
                format!("no bracket for target {target} after {MAX_DOUBLINGS} doublings"),
            ));
        }
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = f(hi)?;
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        let f_mid = f(mid)?;
        if f_mid < f_lo || f_mid > f_hi {
            return Err(non_monotone(lo, hi, f_lo, f_hi));
        }
        if f_mid < target {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    Err(Error::convergence(
        NAME,
        format!("bracket [{lo}, {hi}] still too wide after {MAX_BISECTIONS} bisections"),
    ))
}

fn non_monotone(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Error {
    Error::domain(
        "find_root_increasing",
        format!("function is not non-decreasing: f({lo}) = {f_lo}, f({hi}) = {f_hi}"),
    )
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Newton from the standard asymptotic starting guess.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-300) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_over_half_period() {
        let r = integrate_finite(f64::sin, 0.0, PI, 1e-12);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate_finite(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10);
        assert!(r.converged, "{r:?}");
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn divergent_integral_is_flagged() {
        let r = integrate_finite(|t: f64| 1.0 / t.sin().powi(2), 0.0, PI / 2.0, 1e-8);
        assert!(!r.converged);
        assert!(r.evaluations <= DEFAULT_MAX_EVALS);
    }

    #[test]
    fn converged_implies_estimate_within_tolerance() {
        let opts = QuadOptions::absolute(1e-9).with_rel_tol(1e-12);
        let r = integrate(|x: f64| (x * x).exp() * x.cos(), -1.0, 2.0, &opts);
        assert!(r.converged);
        assert!(r.error_estimate <= opts.target(r.value));
    }

    #[test]
    fn semi_infinite_exponential_and_algebraic() {
        let r = integrate_semi_infinite(|t: f64| (-t).exp(), 0.0, 1e-12);
        assert!((r.value - 1.0).abs() < 1e-10);
        let r = integrate_semi_infinite(|t: f64| 1.0 / ((1.0 + t) * (1.0 + t)), 0.0, 1e-12);
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite_shifted_start() {
        // ∫_2^∞ e^{-t} dt = e^{-2}
        let r = integrate_semi_infinite(|t: f64| (-t).exp(), 2.0, 1e-13);
        assert!((r.value - (-2.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn error_estimate_bounds_true_error() {
        let cases: [(fn(f64) -> f64, f64, f64, f64); 4] = [
            (f64::sin, 0.0, PI, 2.0),
            (|x| x.exp(), 0.0, 1.0, std::f64::consts::E - 1.0),
            (|x| 1.0 / (1.0 + x * x), 0.0, 1.0, PI / 4.0),
            (|x| x.sqrt(), 0.0, 1.0, 2.0 / 3.0),
        ];
        for (f, a, b, exact) in cases {
            for tol in [1e-4, 1e-8, 1e-12] {
                let r = integrate_finite(f, a, b, tol);
                assert!(r.converged);
                assert!(
                    (r.value - exact).abs() <= r.error_estimate.max(1e-15),
                    "estimate {} vs true {}",
                    r.error_estimate,
                    (r.value - exact).abs()
                );
            }
        }
    }

    #[test]
    fn tighter_tolerance_never_hurts() {
        let exact = 2.0 / 3.0;
        let mut last = f64::INFINITY;
        for tol in [1e-3, 5e-4, 2.5e-4, 1e-6, 5e-7, 1e-10] {
            let r = integrate_finite(f64::sqrt, 0.0, 1.0, tol);
            let err = (r.value - exact).abs();
            assert!(err <= last.max(1e-15), "tol {tol}: {err} > {last}");
            last = err;
        }
    }

    #[test]
    fn root_of_identity_and_exponential_cdf() {
        let x = find_root_increasing(|x| Ok(x), 3.0, 0.0, 1e-12).unwrap();
        assert!((x - 3.0).abs() < 1e-10);
        let x = find_root_increasing(|x: f64| Ok(1.0 - (-x).exp()), 0.5, 0.0, 1e-12).unwrap();
        assert!((x - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn root_finder_rejects_decreasing_function() {
        let err = find_root_increasing(|x: f64| Ok(-x), -5.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
        let err = find_root_increasing(|x: f64| Ok(1.0 / (1.0 + x)), 0.9, 0.5, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
    }

    #[test]
    fn root_finder_reports_missing_bracket() {
        let err = find_root_increasing(|x: f64| Ok(x / (1.0 + x)), 1.5, 0.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 225] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            let deg = 2 * n - 1;
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((approx - exact).abs() < 1e-12, "n = {n}");
        }
    }
}
