pub mod analysis;
pub mod error;
pub mod gaussian;
pub mod propagator;
pub mod quad;
pub mod reservoir;
pub mod specfun;

pub use error::{Error, Result};
