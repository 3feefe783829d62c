pub mod analytics;
pub mod channel;
pub mod cli;
pub mod error;
pub mod mc;
pub mod specfun;
pub mod sum;
pub mod validation;

pub use error::{Axis, Error, Result};
