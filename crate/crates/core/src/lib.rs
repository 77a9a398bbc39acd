//! Performance analysis of an underlay spectrum-sharing backscatter link.
//!
//! A continuous-wave source (ST) illuminates a tag whose reflection reaches
//! the secondary receiver (SR). The source scales its power so that the
//! interference it causes at a primary receiver, directly and via the tag,
//! never exceeds `Q`. With `gᵢ = |hᵢ|²` exponential with means `λᵢ` and
//! `Ω = Q/σ²`, the received SNR is `Υ = Ω g₁ g₂ / (g₁ g₃ + g₀)`.
//!
//! * [`model`]: parameters, channel sampling, power adaptation, SNR.
//! * [`analytic`]: CDF, outage, ergodic and effective capacity, BER, MGF and
//!   M-PSK SER in exact (quadrature), approximate (exponential-sum) and
//!   `λ₁ → ∞` asymptotic forms.
//! * [`montecarlo`]: seeded, thread-count-independent Monte Carlo oracles
//!   for each analytic quantity.
//! * [`specfun`], [`quadrature`]: numerical building blocks.

pub mod analytic;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{BinaryModulation, ChannelDraw, ModulationSpec, SystemParams};
pub use montecarlo::{Estimate, McConfig};
pub use specfun::E1ExpSum;
