pub mod error;
pub mod hashfam;
pub mod adversaries;
pub mod qlinalg;
pub mod schemes;

pub use error::{Error, Result};
