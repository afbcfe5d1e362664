pub mod coupling;
pub mod dispersion;
pub mod elastic;
pub mod error;
pub mod friction;
pub mod mesh;
pub mod sbp;
pub mod scenarios;
pub mod system;
pub mod time_driver;

pub use error::{Error, Result};
