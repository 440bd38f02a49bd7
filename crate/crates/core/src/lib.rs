pub mod error;
pub mod harness;
pub mod specfn;
pub mod interval;
pub mod learn;
pub mod regress;
pub mod walk;

pub use error::{Error, Result};
