pub mod channels;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod noise;
pub mod protocol;
pub mod qasm;
pub mod tensor;

pub use error::{Error, Result};
