//! Exact arithmetic in `Q_p` and its quadratic extensions.

mod error;
mod field;
mod literal;
pub(crate) mod modular;
mod norm;
mod number;
mod qp;
mod sample;

pub use error::PadicError;
pub use field::{ExtensionKind, FieldDescriptor, QuadraticExtension};
pub use literal::{from_digit_object, parse_literal, parse_radius, parse_rational, DigitObject};
pub use norm::{NormBound, NormValue};
pub use number::{sqrt_in_field, PadicNumber};
pub use qp::Qp;
pub use sample::{sample_in_ball, sample_on_sphere, RandomSource};
