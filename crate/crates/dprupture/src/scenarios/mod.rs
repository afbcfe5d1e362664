//! Scenario builders producing plain [`RunConfig`](crate::time_driver::RunConfig)s.

pub mod manufactured;
pub mod mms;
pub mod parity;
pub mod spectrum;
pub mod tpv10;

pub use mms::{build_mms_linear, run_mms, MmsRow};
pub use parity::{build_parity_probe, build_parity_probe_with, run_parity_probe, ParityProbe};
pub use spectrum::high_frequency_fraction;
pub use tpv10::{build_tpv10, Tpv10Config};
