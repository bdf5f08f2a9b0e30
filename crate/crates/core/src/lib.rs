//! p-adic arithmetic and the dynamics of `f(x) = a·x / (x² + a)`.

pub mod analysis;
pub mod dynamics;
pub mod padic;

pub use padic::{FieldDescriptor, NormBound, NormValue, PadicError, PadicNumber, Qp, RandomSource};
