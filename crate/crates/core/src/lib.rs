pub mod arith;
pub mod bits;
pub mod bohr;
pub mod cayley;
pub mod constructions;
pub mod equation;
pub mod error;
pub mod group;
pub mod kneser;

pub use error::{Error, Result};
