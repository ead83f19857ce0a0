pub mod dynamics;
pub mod error;
pub mod harness;
pub mod inverse;
pub mod reduction;
pub mod spectral;

pub use error::{Error, Result};
