//! Exact simulation of the generalized periodic discrete Toda lattice and
//! machine checks of its spectral-curve structure.

pub mod algebra;
pub mod arrow;
pub mod divisor;
pub mod error;
pub mod lax;
pub mod random;
pub mod theta;
pub mod toda;
pub mod verify;

pub use error::{Error, Result};
pub use toda::TodaState;
