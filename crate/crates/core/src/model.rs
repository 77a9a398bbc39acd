//! System model: parameters, channel draws, power adaptation and SNR.

use std::fmt;

use rand_core::RngCore;

use crate::error::{Error, Result};

/// Relative gap `|λ₃ − Ωλ₂| / max(λ₃, Ωλ₂)` below which the special-case
/// (`λ₃ = Ωλ₂`) closed forms are used.
pub const SPECIAL_CASE_REL_GAP: f64 = 1e-9;

/// Mean channel power gains `λ₀..λ₃` and the peak interference-to-noise
/// ratio `Ω = Q/σ²`.
///
/// `λ₀`: ST→PR, `λ₁`: ST→tag, `λ₂`: tag→SR, `λ₃`: tag→PR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    lambda0: f64,
    lambda1: f64,
    lambda2: f64,
    lambda3: f64,
    omega: f64,
}

fn check(field: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl SystemParams {
    pub fn new(lambda0: f64, lambda1: f64, lambda2: f64, lambda3: f64, omega: f64) -> Result<Self> {
        Ok(Self {
            lambda0: check("lambda0", lambda0)?,
            lambda1: check("lambda1", lambda1)?,
            lambda2: check("lambda2", lambda2)?,
            lambda3: check("lambda3", lambda3)?,
            omega: check("omega", omega)?,
        })
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }
    pub fn lambda3(&self) -> f64 {
        self.lambda3
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn omega_db(&self) -> f64 {
        10.0 * self.omega.log10()
    }

    pub fn with_lambda0(self, v: f64) -> Result<Self> {
        Ok(Self { lambda0: check("lambda0", v)?, ..self })
    }
    pub fn with_lambda1(self, v: f64) -> Result<Self> {
        Ok(Self { lambda1: check("lambda1", v)?, ..self })
    }
    pub fn with_lambda2(self, v: f64) -> Result<Self> {
        Ok(Self { lambda2: check("lambda2", v)?, ..self })
    }
    pub fn with_lambda3(self, v: f64) -> Result<Self> {
        Ok(Self { lambda3: check("lambda3", v)?, ..self })
    }
    pub fn with_omega(self, v: f64) -> Result<Self> {
        Ok(Self { omega: check("omega", v)?, ..self })
    }
    pub fn with_omega_db(self, db: f64) -> Result<Self> {
        self.with_omega(db_to_linear(db))
    }

    /// `r = Ωλ₂/λ₃`; the asymptotic CDF is `γ/(r + γ)`.
    pub fn ratio(&self) -> f64 {
        self.omega * self.lambda2 / self.lambda3
    }

    /// `c = Ωλ₁λ₂/λ₀`; the exponential integral in the CDF is taken at `γ/c`.
    pub fn cdf_scale(&self) -> f64 {
        self.omega * self.lambda1 * self.lambda2 / self.lambda0
    }

    /// True when `λ₃ = Ωλ₂` to within [`SPECIAL_CASE_REL_GAP`].
    pub fn is_special_case(&self) -> bool {
        self.relative_gap() < SPECIAL_CASE_REL_GAP
    }

    /// `|λ₃ − Ωλ₂| / max(λ₃, Ωλ₂)`.
    pub fn relative_gap(&self) -> f64 {
        let a = self.lambda3;
        let b = self.omega * self.lambda2;
        (a - b).abs() / a.max(b)
    }
}

impl fmt::Display for SystemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lambda0={} lambda1={} lambda2={} lambda3={} omega={}",
            self.lambda0, self.lambda1, self.lambda2, self.lambda3, self.omega
        )
    }
}

/// One realisation of `|h₀|², |h₁|², |h₂|², |h₃|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

/// Uniform variate in the open interval (0, 1) from one 64-bit output:
/// `(2k + 1)·2⁻⁵³` with `k` the top 52 bits.
#[inline]
pub fn uniform_open(rng: &mut impl RngCore) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    let k = rng.next_u64() >> 12;
    ((k << 1) | 1) as f64 * SCALE
}

/// Number of `next_u64` calls consumed by [`sample_channels`].
pub const OUTPUTS_PER_DRAW: usize = 4;

/// Draws `g₀, g₁, g₂, g₃` (in that order) by inversion, `−λᵢ ln u`,
/// consuming exactly [`OUTPUTS_PER_DRAW`] generator outputs.
#[inline]
pub fn sample_channels(rng: &mut impl RngCore, params: &SystemParams) -> ChannelDraw {
    let g0 = -params.lambda0 * uniform_open(rng).ln();
    let g1 = -params.lambda1 * uniform_open(rng).ln();
    let g2 = -params.lambda2 * uniform_open(rng).ln();
    let g3 = -params.lambda3 * uniform_open(rng).ln();
    ChannelDraw { g0, g1, g2, g3 }
}

/// Transmit power `P = Q/(g₁g₃ + g₀)` meeting the peak interference
/// constraint `P g₁ g₃ + P g₀ <= Q` with equality.
pub fn adapted_power(
    draw: &ChannelDraw,
    params: &SystemParams,
    noise_power: f64,
    q_threshold: f64,
) -> Result<f64> {
    const NAME: &str = "adapted_power";
    for (name, v) in [
        ("noise_power", noise_power),
        ("q_threshold", q_threshold),
        ("g0", draw.g0),
        ("g1", draw.g1),
        ("g2", draw.g2),
        ("g3", draw.g3),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain(NAME, format!("{name} must be finite and > 0, got {v}")));
        }
    }
    let omega = q_threshold / noise_power;
    if ((omega - params.omega()) / params.omega()).abs() > 1e-12 {
        return Err(Error::domain(
            NAME,
            format!(
                "Q/noise = {omega} disagrees with omega = {}",
                params.omega()
            ),
        ));
    }
    Ok(q_threshold / (draw.g1 * draw.g3 + draw.g0))
}

/// `Υ = Ω g₁ g₂ / (g₁ g₃ + g₀)`.
#[inline]
pub fn instantaneous_snr(draw: &ChannelDraw, params: &SystemParams) -> f64 {
    params.omega() * draw.g1 * draw.g2 / (draw.g1 * draw.g3 + draw.g0)
}

/// Binary formats whose conditional BER is `Γ(p, qΥ)/(2Γ(p))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryModulation {
    p: f64,
    q: f64,
}

impl BinaryModulation {
    pub const BPSK: Self = Self { p: 0.5, q: 1.0 };
    pub const COHERENT_BFSK: Self = Self { p: 0.5, q: 0.5 };
    pub const DBPSK: Self = Self { p: 1.0, q: 1.0 };
    pub const NONCOHERENT_BFSK: Self = Self { p: 1.0, q: 0.5 };

    pub fn new(p: f64, q: f64) -> Result<Self> {
        Ok(Self {
            p: check("p", p)?,
            q: check("q", q)?,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Looks up `bpsk`, `cbfsk`, `dbpsk` or `nbfsk`.
    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "bpsk" => Some(Self::BPSK),
            "cbfsk" => Some(Self::COHERENT_BFSK),
            "dbpsk" => Some(Self::DBPSK),
            "nbfsk" => Some(Self::NONCOHERENT_BFSK),
            _ => None,
        }
    }
}

/// A modulation format: a binary `(p, q)` family member or M-PSK.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModulationSpec {
    Binary(BinaryModulation),
    Mpsk { order: u32 },
}

impl From<BinaryModulation> for ModulationSpec {
    fn from(m: BinaryModulation) -> Self {
        Self::Binary(m)
    }
}

impl ModulationSpec {
    pub fn mpsk(order: u32) -> Result<Self> {
        if order < 2 {
            return Err(Error::invalid("order", format!("M-PSK order must be >= 2, got {order}")));
        }
        Ok(Self::Mpsk { order })
    }
}

/// `α_M = sin²(π/M)`.
pub fn mpsk_alpha(order: u32) -> f64 {
    (std::f64::consts::PI / order as f64).sin().powi(2)
}
