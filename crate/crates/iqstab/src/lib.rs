pub mod braid;
pub mod checks;
pub mod crystal;
pub mod error;
pub mod gcb;
pub mod iqg;
pub mod lemmas;
pub mod linalg;
pub mod props;
pub mod rep;
pub mod rootdata;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};
