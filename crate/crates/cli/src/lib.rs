//! Parameter sweeps over the closed forms and their Monte Carlo oracles.
//!
//! * [`specfile`]: the `key = value` sweep description format.
//! * [`sweep`]: evaluation into a table and CSV.
//! * [`compare`]: analytic against Monte Carlo, in standard errors.
//! * [`presets`]: built-in sweep descriptions.
//! * [`selftest`]: special-function identity battery.

pub mod compare;
pub mod presets;
pub mod selftest;
pub mod specfile;
pub mod sweep;

pub use compare::{compare, CompareReport};
pub use specfile::{SpecError, SweepSpec};
pub use sweep::{evaluate, SweepError, SweepTable};
