//! Monte Carlo oracles.
//!
//! Draws are split into chunks of `chunk_size`. Chunk `i` uses a ChaCha8
//! generator seeded from `master_seed` on stream `i`, so every chunk sees
//! the same numbers no matter which thread runs it. Chunk results are
//! collected in index order and merged by a fixed pairwise tree, which makes
//! every estimate bit-identical across thread counts.

use std::f64::consts::{LN_2, PI};

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{instantaneous_snr, mpsk_alpha, sample_channels, ModulationSpec, SystemParams};
use crate::quadrature::gauss_legendre;
use crate::specfun::regularized_upper_gamma;

/// Smallest sample count for which standard errors are reported.
pub const MIN_SAMPLES: u64 = 1_000;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_CHUNK_SIZE: u64 = 65_536;
/// Gauss–Legendre nodes used for the θ-integral of the SER oracle.
pub const SER_NODES: usize = 128;

/// Sample count, seed and work partition for an oracle run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    samples: u64,
    master_seed: u64,
    chunk_size: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            master_seed: 0,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }
}

impl McConfig {
    pub fn new(samples: u64, master_seed: u64, chunk_size: u64) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::invalid(
                "samples",
                format!("must be >= {MIN_SAMPLES}, got {samples}"),
            ));
        }
        if chunk_size == 0 {
            return Err(Error::invalid("chunk_size", "must be > 0"));
        }
        Ok(Self {
            samples,
            master_seed,
            chunk_size,
        })
    }

    pub fn with_seed(self, master_seed: u64) -> Self {
        Self { master_seed, ..self }
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }
    pub fn chunk_size(&self) -> u64 {
        self.chunk_size
    }

    pub fn chunk_count(&self) -> u64 {
        self.samples.div_ceil(self.chunk_size)
    }
}

/// A sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl Estimate {
    /// `|value − mean|` in units of standard error (infinite if the error is zero
    /// and the values differ).
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (value - self.mean).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Running count, mean and centred second moment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let (na, nb, nf) = (self.n as f64, other.n as f64, n as f64);
        Self {
            n,
            mean: self.mean + delta * nb / nf,
            m2: self.m2 + other.m2 + delta * delta * na * nb / nf,
        }
    }

    fn estimate(&self) -> Estimate {
        let nf = self.n as f64;
        let var = if self.n > 1 { self.m2 / (nf - 1.0) } else { 0.0 };
        Estimate {
            mean: self.mean,
            std_error: (var / nf).sqrt(),
            samples: self.n,
        }
    }
}

fn merge_all(a: Vec<Moments>, b: Vec<Moments>) -> Vec<Moments> {
    a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()
}

/// Reduces `items` by merging adjacent halves, a fixed shape for a given length.
fn tree_reduce<A>(mut items: Vec<A>, merge: &impl Fn(A, A) -> A) -> Option<A> {
    if items.len() <= 1 {
        return items.pop();
    }
    let right = items.split_off(items.len() / 2);
    let l = tree_reduce(items, merge)?;
    let r = tree_reduce(right, merge)?;
    Some(merge(l, r))
}

/// Runs `step` once per SNR draw, chunk-parallel, and merges chunk accumulators.
fn run<A, M, S, R>(params: &SystemParams, cfg: &McConfig, make: M, step: S, merge: R) -> A
where
    A: Send,
    M: Fn() -> A + Sync,
    S: Fn(&mut A, f64) + Sync,
    R: Fn(A, A) -> A,
{
    let chunks: Vec<A> = (0..cfg.chunk_count())
        .into_par_iter()
        .map(|i| {
            let start = i * cfg.chunk_size;
            let len = cfg.chunk_size.min(cfg.samples - start);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
            rng.set_stream(i);
            let mut acc = make();
            for _ in 0..len {
                let draw = sample_channels(&mut rng, params);
                step(&mut acc, instantaneous_snr(&draw, params));
            }
            acc
        })
        .collect();
    tree_reduce(chunks, &merge).unwrap_or_else(make)
}

/// Sample moments of `k` per-draw statistics.
fn run_moments<F>(params: &SystemParams, cfg: &McConfig, k: usize, f: F) -> Vec<Moments>
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    run(
        params,
        cfg,
        || (vec![Moments::default(); k], vec![0.0; k]),
        |(moments, buf), snr| {
            f(snr, buf);
            for (m, &x) in moments.iter_mut().zip(buf.iter()) {
                m.push(x);
            }
        },
        |(a, buf), (b, _)| (merge_all(a, b), buf),
    )
    .0
}

fn run_mean<F>(params: &SystemParams, cfg: &McConfig, f: F) -> Estimate
where
    F: Fn(f64) -> f64 + Sync,
{
    run_moments(params, cfg, 1, |snr, out| out[0] = f(snr))[0].estimate()
}

fn check_sorted(field: &'static str, grid: &[f64]) -> Result<()> {
    if grid.iter().any(|g| g.is_nan()) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid(field, "grid must be sorted ascending"));
    }
    Ok(())
}

/// Empirical `P(Υ <= γ)` at each grid point with binomial standard errors,
/// from one pass over the draws.
pub fn mc_cdf(params: &SystemParams, gamma_grid: &[f64], cfg: &McConfig) -> Result<Vec<Estimate>> {
    check_sorted("gamma_grid", gamma_grid)?;
    if gamma_grid.iter().any(|&g| g < 0.0) {
        return Err(Error::invalid("gamma_grid", "points must be >= 0"));
    }
    let counts = run(
        params,
        cfg,
        || vec![0u64; gamma_grid.len() + 1],
        |bins, snr| bins[gamma_grid.partition_point(|&g| g < snr)] += 1,
        |a, b| a.into_iter().zip(b).map(|(x, y)| x + y).collect(),
    );
    let n = cfg.samples as f64;
    let mut below = 0u64;
    Ok(counts[..gamma_grid.len()]
        .iter()
        .map(|&c| {
            below += c;
            let p = below as f64 / n;
            Estimate {
                mean: p,
                std_error: (p * (1.0 - p) / n).sqrt(),
                samples: cfg.samples,
            }
        })
        .collect())
}

/// Sample mean of `log₂(1 + Υ)`.
pub fn mc_ergodic_capacity(params: &SystemParams, cfg: &McConfig) -> Estimate {
    run_mean(params, cfg, |snr| snr.ln_1p() / LN_2)
}

/// `−(1/A) log₂ m̂` with `m̂` the sample mean of `(1 + Υ)^{−A}`; delta-method error.
pub fn mc_effective_capacity(params: &SystemParams, a: f64, cfg: &McConfig) -> Result<Estimate> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain("mc_effective_capacity", format!("A must be > 0, got {a}")));
    }
    let m = run_mean(params, cfg, |snr| (-a * snr.ln_1p()).exp());
    Ok(Estimate {
        mean: -m.mean.ln() / (a * LN_2),
        std_error: m.std_error / (a * m.mean * LN_2),
        samples: m.samples,
    })
}

/// Sample mean of the conditional BER `Γ(p, qΥ)/(2Γ(p))`.
pub fn mc_average_ber(
    params: &SystemParams,
    modulation: ModulationSpec,
    cfg: &McConfig,
) -> Result<Estimate> {
    const NAME: &str = "mc_average_ber";
    let m = match modulation {
        ModulationSpec::Binary(m) => m,
        ModulationSpec::Mpsk { order } => {
            return Err(Error::domain(NAME, format!("needs a binary format, got {order}-PSK")))
        }
    };
    let (p, q) = (m.p(), m.q());
    let est = if p == 1.0 {
        run_mean(params, cfg, |snr| 0.5 * (-q * snr).exp())
    } else if p == 0.5 {
        run_mean(params, cfg, |snr| 0.5 * libm::erfc((q * snr).sqrt()))
    } else {
        run_mean(params, cfg, |snr| {
            0.5 * regularized_upper_gamma(p, q * snr).unwrap_or(f64::NAN)
        })
    };
    if !est.mean.is_finite() {
        return Err(Error::convergence(NAME, "conditional BER evaluation failed"));
    }
    Ok(est)
}

/// Sample means of `e^{−sΥ}` for every `s`, from one pass over the draws.
pub fn mc_mgf(params: &SystemParams, s_values: &[f64], cfg: &McConfig) -> Vec<Estimate> {
    run_moments(params, cfg, s_values.len(), |snr, out| {
        for (o, s) in out.iter_mut().zip(s_values) {
            *o = (-s * snr).exp();
        }
    })
    .iter()
    .map(Moments::estimate)
    .collect()
}

/// M-PSK SER from the empirical MGF at fixed Gauss–Legendre nodes in θ.
///
/// Each draw contributes `(1/π) Σᵢ wᵢ exp(−α_M Υ / sin²θᵢ)`, so the reported
/// standard error accounts for the correlation between nodes.
pub fn mc_mpsk_ser(params: &SystemParams, order: u32, cfg: &McConfig) -> Result<Estimate> {
    if order < 2 {
        return Err(Error::domain("mc_mpsk_ser", format!("order must be >= 2, got {order}")));
    }
    let (coef, weights) = ser_rule(order);
    Ok(run_mean(params, cfg, |snr| {
        coef.iter()
            .zip(&weights)
            .map(|(c, w)| w * (-c * snr).exp())
            .sum()
    }))
}

/// Exponents `α_M / sin²θᵢ` and weights `wᵢ/π` of the θ-rule.
fn ser_rule(order: u32) -> (Vec<f64>, Vec<f64>) {
    let alpha = mpsk_alpha(order);
    let upper = PI - PI / order as f64;
    let (nodes, weights) = gauss_legendre(SER_NODES);
    let half = 0.5 * upper;
    let coef = nodes
        .iter()
        .map(|x| {
            let s = (half * (1.0 + x)).sin();
            alpha / (s * s)
        })
        .collect();
    let w = weights.iter().map(|w| w * half / PI).collect();
    (coef, w)
}

/// Conditional SER `(1/π) ∫₀^{π−π/M} exp(−α_M γ / sin²θ) dθ` at fixed `γ`,
/// evaluated with the rule used by [`mc_mpsk_ser`].
pub fn conditional_mpsk_ser(order: u32, gamma: f64) -> f64 {
    let (coef, weights) = ser_rule(order);
    coef.iter()
        .zip(&weights)
        .map(|(c, w)| w * (-c * gamma).exp())
        .sum()
}

/// Empirical ε-outage capacity `log₂(1 + Υ̂_ε)` from the order statistic
/// `Υ_(⌈εn⌉)`. The standard error is half the spread between the order
/// statistics one binomial standard deviation either side.
pub fn mc_outage_capacity(params: &SystemParams, epsilon: f64, cfg: &McConfig) -> Result<Estimate> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(
            "mc_outage_capacity",
            format!("epsilon must lie in (0, 1), got {epsilon}"),
        ));
    }
    let mut all = run(
        params,
        cfg,
        Vec::new,
        |v, snr| v.push(snr),
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    all.sort_unstable_by(f64::total_cmp);
    let n = all.len();
    let nf = n as f64;
    let idx = |x: f64| (x.ceil() as usize).clamp(1, n) - 1;
    let centre = epsilon * nf;
    let spread = (epsilon * (1.0 - epsilon) * nf).sqrt();
    let cap = |g: f64| g.ln_1p() / LN_2;
    let lo = cap(all[idx(centre - spread)]);
    let hi = cap(all[idx(centre + spread)]);
    Ok(Estimate {
        mean: cap(all[idx(centre)]),
        std_error: 0.5 * (hi - lo),
        samples: cfg.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BinaryModulation;

    fn cfg(n: u64, seed: u64) -> McConfig {
        McConfig::new(n, seed, 4096).unwrap()
    }

    fn fig4() -> SystemParams {
        SystemParams::new(1.0, 4.0, 3.0, 1.0, 10.0).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(999, 0, 10).is_err());
        assert!(McConfig::new(1000, 0, 0).is_err());
        let c = McConfig::new(10_001, 0, 1000).unwrap();
        assert_eq!(c.chunk_count(), 11);
        assert_eq!(McConfig::default().samples(), 1_000_000);
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..333].iter().for_each(|&x| a.push(x));
        xs[333..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(b);
        assert_eq!(merged.n, whole.n);
        assert!((merged.mean - whole.mean).abs() < 1e-12);
        assert!((merged.m2 - whole.m2).abs() < 1e-9 * whole.m2);
    }

    #[test]
    fn cdf_at_zero_and_monotone() {
        let grid = [0.0, 0.1, 1.0, 10.0, 100.0];
        let est = mc_cdf(&fig4(), &grid, &cfg(20_000, 1)).unwrap();
        assert_eq!(est[0].mean, 0.0);
        assert!(est.windows(2).all(|w| w[0].mean <= w[1].mean));
        assert!(mc_cdf(&fig4(), &[1.0, 0.5], &cfg(1000, 1)).is_err());
    }

    #[test]
    fn ergodic_vanishes_at_low_snr() {
        let p = fig4().with_omega(1e-6).unwrap();
        assert!(mc_ergodic_capacity(&p, &cfg(10_000, 3)).mean < 1e-4);
    }

    #[test]
    fn ergodic_increases_with_lambda2_paired() {
        let c = cfg(10_000, 5);
        let a = mc_ergodic_capacity(&fig4(), &c).mean;
        let b = mc_ergodic_capacity(&fig4().with_lambda2(6.0).unwrap(), &c).mean;
        assert!(b > a);
    }

    #[test]
    fn effective_capacity_paired_monotone_and_small_exponent() {
        let c = cfg(20_000, 9);
        let p = fig4();
        let mut last = f64::INFINITY;
        for a in [0.5, 1.0, 2.0, 4.0] {
            let v = mc_effective_capacity(&p, a, &c).unwrap().mean;
            assert!(v <= last);
            last = v;
        }
        let e = mc_effective_capacity(&p, 1e-4, &c).unwrap();
        let g = mc_ergodic_capacity(&p, &c);
        let combined = (e.std_error.powi(2) + g.std_error.powi(2)).sqrt();
        assert!((e.mean - g.mean).abs() < 3.0 * combined);
    }

    #[test]
    fn ber_low_snr_and_dominance() {
        let c = cfg(10_000, 11);
        let low = fig4().with_omega(1e-6).unwrap();
        let b = mc_average_ber(&low, BinaryModulation::BPSK.into(), &c).unwrap();
        assert!((b.mean - 0.5).abs() < 1e-3);
        let p = fig4();
        let bpsk = mc_average_ber(&p, BinaryModulation::BPSK.into(), &c).unwrap().mean;
        let cbfsk = mc_average_ber(&p, BinaryModulation::COHERENT_BFSK.into(), &c).unwrap().mean;
        assert!(bpsk <= cbfsk);
    }

    #[test]
    fn ber_generic_path_agrees_with_fast_path() {
        let c = cfg(5_000, 2);
        let p = fig4();
        let fast = mc_average_ber(&p, BinaryModulation::DBPSK.into(), &c).unwrap().mean;
        let generic = run_mean(&p, &c, |snr| 0.5 * regularized_upper_gamma(1.0, snr).unwrap());
        assert!((fast - generic.mean).abs() < 1e-12);
    }

    #[test]
    fn mgf_limits() {
        let s = [1e-9, 0.1, 1.0, 10.0];
        let est = mc_mgf(&fig4(), &s, &cfg(10_000, 4));
        assert!((est[0].mean - 1.0).abs() < 1e-6);
        assert!(est.windows(2).all(|w| w[1].mean < w[0].mean));
    }

    #[test]
    fn ser_rule_reproduces_gaussian_tail() {
        // M = 2: (1/π)∫₀^{π/2} e^{−x/sin²θ} dθ = erfc(√x)/2
        for x in [1e-3, 0.1, 1.0, 5.0, 30.0] {
            let exact = 0.5 * libm::erfc(f64::sqrt(x));
            assert!((conditional_mpsk_ser(2, x) - exact).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn ser_ordering_paired() {
        let c = cfg(10_000, 8);
        let p = fig4();
        let s2 = mc_mpsk_ser(&p, 2, &c).unwrap().mean;
        let s4 = mc_mpsk_ser(&p, 4, &c).unwrap().mean;
        let s8 = mc_mpsk_ser(&p, 8, &c).unwrap().mean;
        assert!(s2 < s4 && s4 < s8);
    }

    #[test]
    fn outage_capacity_quantile() {
        let c = cfg(50_000, 12);
        let p = fig4();
        let est = mc_outage_capacity(&p, 0.4, &c).unwrap();
        let gamma = est.mean.exp2() - 1.0;
        let f = mc_cdf(&p, &[gamma], &c).unwrap()[0];
        assert!((f.mean - 0.4).abs() < 1e-3);
        assert!(est.std_error > 0.0);
    }

    #[test]
    fn repeatable_for_fixed_seed_and_sensitive_to_seed() {
        let p = fig4();
        let a = mc_ergodic_capacity(&p, &cfg(10_000, 1));
        let b = mc_ergodic_capacity(&p, &cfg(10_000, 1));
        let c = mc_ergodic_capacity(&p, &cfg(10_000, 2));
        assert_eq!(a, b);
        assert_ne!(a.mean, c.mean);
    }
}
