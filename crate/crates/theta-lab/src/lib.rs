//! Weights, Verma modules, mod-p theta operators and Serre weights for GSp₄.

pub mod error;
pub mod linalg;
pub mod serre;
pub mod suite;
pub mod thetalocal;
pub mod uea;
pub mod weights;

pub use error::{Error, Result};
