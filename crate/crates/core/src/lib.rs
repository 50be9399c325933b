pub mod cli;
pub mod dressed;
pub mod emission;
pub mod error;
pub mod sodium;
pub mod special_fn;

pub use error::{Error, Result};
