use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::error::DynamicsError;
use crate::padic::{sqrt_in_field, FieldDescriptor, NormValue, PadicError, PadicNumber, Qp};

/// A base-field constant that can be re-expanded at any precision.
///
/// Rationals are exact; digit values carry only the digits they were given and
/// are zero-padded when more are asked for.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactValue {
    Rational(BigRational),
    Digits(Qp),
}

impl ExactValue {
    pub fn int(n: i64) -> Self {
        ExactValue::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(m: BigInt, n: BigInt) -> Result<Self, PadicError> {
        if n.is_zero() {
            return Err(PadicError::ZeroDenominator);
        }
        Ok(ExactValue::Rational(BigRational::new(m, n)))
    }

    pub fn at(&self, p: u64, cap: u32) -> Result<Qp, PadicError> {
        match self {
            ExactValue::Rational(q) => Qp::from_rational(p, cap, q.numer(), q.denom()),
            ExactValue::Digits(x) if x.cap() >= cap => Ok(x.with_cap(cap)),
            ExactValue::Digits(x) => Ok(x.padded(cap)),
        }
    }

    pub fn times(&self, k: i64) -> Self {
        match self {
            ExactValue::Rational(q) => ExactValue::Rational(q * BigRational::from_integer(BigInt::from(k))),
            ExactValue::Digits(x) => {
                ExactValue::Digits(x.mul(&Qp::from_int(x.p(), x.cap(), k)).expect("same prime"))
            }
        }
    }
}

/// Which field the orbit computations run in.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldRecipe {
    Base,
    /// `Q_p` itself when the value is a square there, otherwise `Q_p(√value)`.
    AdjoinSqrt(ExactValue),
}

impl FieldRecipe {
    pub fn build(&self, p: u64, cap: u32) -> Result<FieldDescriptor, PadicError> {
        match self {
            FieldRecipe::Base => FieldDescriptor::base(p),
            FieldRecipe::AdjoinSqrt(v) => {
                let d = v.at(p, cap)?;
                if d.is_exact_zero() || d.is_square()? {
                    FieldDescriptor::base(p)
                } else {
                    FieldDescriptor::quadratic(&d)
                }
            }
        }
    }
}

/// Everything derived from the parameter `a` of `f(x) = a·x / (x² + a)`.
#[derive(Clone, Debug)]
pub struct MapContext {
    a_source: ExactValue,
    recipe: FieldRecipe,
    field: FieldDescriptor,
    cap: u32,
    a: PadicNumber,
    big_a: NormValue,
    sqrt_a: NormValue,
    poles: Option<[PadicNumber; 2]>,
}

impl MapContext {
    pub fn new(p: u64, a: ExactValue, recipe: FieldRecipe, cap: u32) -> Result<Self, DynamicsError> {
        FieldDescriptor::base(p)?;
        let a_qp = a.at(p, cap)?;
        if a_qp.is_exact_zero() || a_qp.is_zero_to_precision() {
            return Err(DynamicsError::ZeroParameter);
        }
        let field = recipe.build(p, cap)?;
        let big_a = a_qp.norm()?;
        let sqrt_a = big_a.sqrt().expect("|a| has an integer exponent");
        let poles = sqrt_in_field(&field, &a_qp.neg())?.map(|r| {
            let r = embed_padded(&field, &r, cap);
            [r.clone(), r.neg()]
        });
        Ok(MapContext {
            a_source: a,
            recipe,
            a: PadicNumber::from_qp(&field, a_qp),
            field,
            cap,
            big_a,
            sqrt_a,
            poles,
        })
    }

    /// The map over `Q_p` itself.
    pub fn over_qp(p: u64, a: ExactValue, cap: u32) -> Result<Self, DynamicsError> {
        Self::new(p, a, FieldRecipe::Base, cap)
    }

    /// Smallest working field holding the poles `±√(−a)`.
    pub fn with_poles(p: u64, a: ExactValue, cap: u32) -> Result<Self, DynamicsError> {
        let recipe = FieldRecipe::AdjoinSqrt(a.times(-1));
        Self::new(p, a, recipe, cap)
    }

    /// Smallest working field holding the 2-cycle `±√(−2a)`.
    pub fn with_two_cycle(p: u64, a: ExactValue, cap: u32) -> Result<Self, DynamicsError> {
        let recipe = FieldRecipe::AdjoinSqrt(a.times(-2));
        Self::new(p, a, recipe, cap)
    }

    /// Same map and field rebuilt at `cap` digits.
    pub fn with_precision(&self, cap: u32) -> Result<Self, DynamicsError> {
        Self::new(self.p(), self.a_source.clone(), self.recipe.clone(), cap)
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn a(&self) -> &PadicNumber {
        &self.a
    }

    pub fn a_source(&self) -> &ExactValue {
        &self.a_source
    }

    pub fn recipe(&self) -> &FieldRecipe {
        &self.recipe
    }

    /// `A = |a|`.
    pub fn big_a(&self) -> NormValue {
        self.big_a
    }

    pub fn sqrt_a(&self) -> NormValue {
        self.sqrt_a
    }

    /// `±√(−a)` when they lie in the working field.
    pub fn poles(&self) -> Option<&[PadicNumber; 2]> {
        self.poles.as_ref()
    }

    /// Index of the pole `x` agrees with at working precision.
    pub fn pole_index(&self, x: &PadicNumber) -> Option<usize> {
        self.poles.as_ref()?.iter().position(|q| q.agrees_with(x))
    }

    pub fn from_rational(&self, m: i64, n: i64) -> Result<PadicNumber, PadicError> {
        PadicNumber::from_rational(m, n, &self.field, self.cap)
    }

    /// `x` moved into this context's field, its known digits zero-padded to `cap`.
    pub fn embed(&self, x: &PadicNumber) -> Result<PadicNumber, PadicError> {
        if x.p() != self.p() || (!x.field().is_base() && *x.field() != self.field) {
            return Err(PadicError::IncompatibleField {
                left: self.field.to_string(),
                right: x.field().to_string(),
            });
        }
        Ok(embed_padded(&self.field, x, self.cap))
    }

    /// Default lift of a point from `from` into this context: a pole of `from`
    /// goes to the matching pole here, anything else is zero-padded.
    pub fn lift_from(&self, from: &MapContext, x: &PadicNumber) -> Result<PadicNumber, PadicError> {
        if let (Some(i), Some(poles)) = (from.pole_index(x), self.poles.as_ref()) {
            let here = &poles[i];
            let there = &from.poles.as_ref().expect("pole index implies poles")[i];
            if here.agrees_with(there) {
                return Ok(here.clone());
            }
        }
        self.embed(x)
    }

    pub fn summary(&self) -> ContextSummary {
        ContextSummary {
            p: self.p(),
            a: self.a.clone(),
            field: self.field.to_string(),
            precision: self.cap,
            big_a: self.big_a,
            sqrt_a: self.sqrt_a,
        }
    }
}

fn embed_padded(field: &FieldDescriptor, x: &PadicNumber, cap: u32) -> PadicNumber {
    let (u, w) = x.coords();
    if field.is_base() {
        PadicNumber::from_qp(field, u.padded(cap))
    } else {
        PadicNumber::from_coords(field, u.padded(cap), w.padded(cap)).expect("extension field")
    }
}

/// Serializable header shared by all reports.
#[derive(Clone, Debug, Serialize)]
pub struct ContextSummary {
    pub p: u64,
    pub a: PadicNumber,
    pub field: String,
    pub precision: u32,
    #[serde(rename = "big_a_exp")]
    pub big_a: NormValue,
    #[serde(rename = "sqrt_a_exp")]
    pub sqrt_a: NormValue,
}
