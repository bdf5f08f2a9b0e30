use num_bigint::BigInt;

use super::error::PadicError;
use super::field::FieldDescriptor;
use super::norm::{NormBound, NormValue};
use super::qp::Qp;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Repr {
    Base(Qp),
    /// `u + w·√d`.
    Quad { u: Qp, w: Qp },
}

/// An element of `Q_p` or of a quadratic extension `Q_p(√d)`.
///
/// Base-field values combine freely with extension values (they are promoted);
/// combining elements of two different extensions is an error.
#[derive(Clone, Debug, PartialEq)]
pub struct PadicNumber {
    field: FieldDescriptor,
    repr: Repr,
}

impl PadicNumber {
    /// Embed a base-field element into `field`.
    pub fn from_qp(field: &FieldDescriptor, x: Qp) -> Self {
        debug_assert_eq!(field.p(), x.p());
        let repr = if field.is_base() {
            Repr::Base(x)
        } else {
            let w = Qp::zero(x.p(), x.cap());
            Repr::Quad { u: x, w }
        };
        PadicNumber { field: field.clone(), repr }
    }

    pub fn from_rational(m: i64, n: i64, field: &FieldDescriptor, cap: u32) -> Result<Self, PadicError> {
        Self::from_big_rational(&BigInt::from(m), &BigInt::from(n), field, cap)
    }

    pub fn from_big_rational(
        m: &BigInt,
        n: &BigInt,
        field: &FieldDescriptor,
        cap: u32,
    ) -> Result<Self, PadicError> {
        Ok(Self::from_qp(field, Qp::from_rational(field.p(), cap, m, n)?))
    }

    pub fn from_int(n: i64, field: &FieldDescriptor, cap: u32) -> Self {
        Self::from_qp(field, Qp::from_int(field.p(), cap, n))
    }

    pub fn zero(field: &FieldDescriptor, cap: u32) -> Self {
        Self::from_qp(field, Qp::zero(field.p(), cap))
    }

    pub fn one(field: &FieldDescriptor, cap: u32) -> Self {
        Self::from_int(1, field, cap)
    }

    /// `u + w√d` in an extension field.
    pub fn from_coords(field: &FieldDescriptor, u: Qp, w: Qp) -> Result<Self, PadicError> {
        if field.is_base() {
            return Err(PadicError::IncompatibleField {
                left: field.to_string(),
                right: "quadratic coordinates".into(),
            });
        }
        Ok(PadicNumber { field: field.clone(), repr: Repr::Quad { u, w } })
    }

    /// The generator `√d` of an extension field.
    pub fn sqrt_d(field: &FieldDescriptor, cap: u32) -> Result<Self, PadicError> {
        let p = field.p();
        Self::from_coords(field, Qp::zero(p, cap), Qp::one(p, cap))
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn cap(&self) -> u32 {
        match &self.repr {
            Repr::Base(x) => x.cap(),
            Repr::Quad { u, w } => u.cap().min(w.cap()),
        }
    }

    /// The underlying base-field element, if this lives in `Q_p`.
    pub fn as_qp(&self) -> Option<&Qp> {
        match &self.repr {
            Repr::Base(x) => Some(x),
            Repr::Quad { .. } => None,
        }
    }

    /// `(u, w)` with `self = u + w√d`; base elements report `w = 0`.
    pub fn coords(&self) -> (Qp, Qp) {
        match &self.repr {
            Repr::Base(x) => (x.clone(), Qp::zero(x.p(), x.cap())),
            Repr::Quad { u, w } => (u.clone(), w.clone()),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        match &self.repr {
            Repr::Base(x) => x.is_exact_zero(),
            Repr::Quad { u, w } => u.is_exact_zero() && w.is_exact_zero(),
        }
    }

    /// Cannot be told apart from zero at the tracked precision.
    pub fn is_zero_to_precision(&self) -> bool {
        match &self.repr {
            Repr::Base(x) => x.is_zero_to_precision(),
            Repr::Quad { u, w } => u.is_zero_to_precision() && w.is_zero_to_precision(),
        }
    }

    fn radicand(&self) -> Option<&Qp> {
        self.field.extension().map(|e| e.d())
    }

    /// Common field of two operands (promoting base values into an extension).
    fn join(&self, other: &PadicNumber) -> Result<FieldDescriptor, PadicError> {
        let incompatible = || PadicError::IncompatibleField {
            left: self.field.to_string(),
            right: other.field.to_string(),
        };
        if self.p() != other.p() {
            return Err(incompatible());
        }
        match (self.field.is_base(), other.field.is_base()) {
            (true, _) => Ok(other.field.clone()),
            (false, true) => Ok(self.field.clone()),
            (false, false) if self.field == other.field => Ok(self.field.clone()),
            _ => Err(incompatible()),
        }
    }

    pub fn add(&self, other: &PadicNumber) -> Result<PadicNumber, PadicError> {
        let field = self.join(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Base(x), Repr::Base(y)) => Repr::Base(x.add(y)?),
            (Repr::Base(x), Repr::Quad { u, w }) | (Repr::Quad { u, w }, Repr::Base(x)) => {
                Repr::Quad { u: u.add(x)?, w: w.clone() }
            }
            (Repr::Quad { u: u1, w: w1 }, Repr::Quad { u: u2, w: w2 }) => {
                Repr::Quad { u: u1.add(u2)?, w: w1.add(w2)? }
            }
        };
        Ok(PadicNumber { field, repr })
    }

    pub fn neg(&self) -> PadicNumber {
        let repr = match &self.repr {
            Repr::Base(x) => Repr::Base(x.neg()),
            Repr::Quad { u, w } => Repr::Quad { u: u.neg(), w: w.neg() },
        };
        PadicNumber { field: self.field.clone(), repr }
    }

    pub fn sub(&self, other: &PadicNumber) -> Result<PadicNumber, PadicError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PadicNumber) -> Result<PadicNumber, PadicError> {
        let field = self.join(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Base(x), Repr::Base(y)) => Repr::Base(x.mul(y)?),
            (Repr::Base(x), Repr::Quad { u, w }) | (Repr::Quad { u, w }, Repr::Base(x)) => {
                Repr::Quad { u: u.mul(x)?, w: w.mul(x)? }
            }
            (Repr::Quad { u: u1, w: w1 }, Repr::Quad { u: u2, w: w2 }) => {
                let d = field.extension().expect("quadratic field").d();
                let re = u1.mul(u2)?.add(&d.mul(&w1.mul(w2)?)?)?;
                let im = u1.mul(w2)?.add(&w1.mul(u2)?)?;
                Repr::Quad { u: re, w: im }
            }
        };
        Ok(PadicNumber { field, repr })
    }

    pub fn square(&self) -> Result<PadicNumber, PadicError> {
        self.mul(self)
    }

    pub fn pow(&self, k: u32) -> Result<PadicNumber, PadicError> {
        let mut acc = PadicNumber::one(&self.field, self.cap());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Field norm `N(u + w√d) = u² − d w²` (the element itself in `Q_p`).
    pub fn field_norm(&self) -> Result<Qp, PadicError> {
        match &self.repr {
            Repr::Base(x) => Ok(x.clone()),
            Repr::Quad { u, w } => {
                let d = self.radicand().expect("quadratic field");
                u.mul(u)?.sub(&d.mul(&w.mul(w)?)?)
            }
        }
    }

    pub fn inv(&self) -> Result<PadicNumber, PadicError> {
        match &self.repr {
            Repr::Base(x) => Ok(PadicNumber { field: self.field.clone(), repr: Repr::Base(x.inv()?) }),
            Repr::Quad { u, w } => {
                if self.is_zero_to_precision() {
                    return Err(PadicError::DivisionByZeroToPrecision);
                }
                let n = self.field_norm()?;
                if n.is_zero_to_precision() {
                    return Err(PadicError::PrecisionExhausted(
                        "field norm of a nonzero divisor lost all precision".into(),
                    ));
                }
                let ninv = n.inv()?;
                Ok(PadicNumber {
                    field: self.field.clone(),
                    repr: Repr::Quad { u: u.mul(&ninv)?, w: w.neg().mul(&ninv)? },
                })
            }
        }
    }

    pub fn div(&self, other: &PadicNumber) -> Result<PadicNumber, PadicError> {
        self.join(other)?;
        self.mul(&other.inv()?)
    }

    /// `|x|_p`; for `u + w√d` this is `|u² − d w²|^(1/2)`.
    pub fn norm(&self) -> Result<NormValue, PadicError> {
        match &self.repr {
            Repr::Base(x) => x.norm(),
            Repr::Quad { .. } => {
                if self.is_exact_zero() {
                    return Ok(NormValue::ZERO);
                }
                let n = self.field_norm()?;
                match n.valuation() {
                    Some(v) => Ok(NormValue::from_twice_exponent(v)),
                    None => Err(PadicError::PrecisionExhausted(format!(
                        "norm of an element of {} is zero to precision",
                        self.field
                    ))),
                }
            }
        }
    }

    /// The norm, or an upper bound when the value is zero to precision.
    pub fn norm_bound(&self) -> NormBound {
        match &self.repr {
            Repr::Base(x) => x.norm_bound(),
            Repr::Quad { .. } => match (self.norm(), self.field_norm()) {
                (Ok(n), _) => NormBound::Exact(n),
                (Err(_), Ok(n)) => match n.abs_precision() {
                    Some(k) => NormBound::AtMost(NormValue::from_twice_exponent(k)),
                    None => NormBound::Exact(NormValue::ZERO),
                },
                (Err(_), Err(_)) => NormBound::AtMost(NormValue::ONE),
            },
        }
    }

    /// `|self − other|`, exact or bounded.
    pub fn distance(&self, other: &PadicNumber) -> Result<NormBound, PadicError> {
        Ok(self.sub(other)?.norm_bound())
    }

    /// `self − other` is zero to the available precision.
    pub fn agrees_with(&self, other: &PadicNumber) -> bool {
        self.sub(other).map(|d| d.is_zero_to_precision()).unwrap_or(false)
    }

    /// Known digits read as an exact number and re-expanded to `cap` digits.
    pub fn padded(&self, cap: u32) -> PadicNumber {
        let field = self.field.padded(cap);
        let repr = match &self.repr {
            Repr::Base(x) => Repr::Base(x.padded(cap)),
            Repr::Quad { u, w } => Repr::Quad { u: u.padded(cap), w: w.padded(cap) },
        };
        PadicNumber { field, repr }
    }

    /// Square test. In `Q_p`: even valuation and a square unit. In an extension:
    /// whether a root exists in the same extension.
    pub fn is_square(&self) -> Result<bool, PadicError> {
        match &self.repr {
            Repr::Base(x) => x.is_square(),
            Repr::Quad { .. } => match self.sqrt() {
                Ok(_) => Ok(true),
                Err(PadicError::NotASquare) => Ok(false),
                Err(e) => Err(e),
            },
        }
    }

    /// A square root in the element's own field (canonical branch in `Q_p`).
    pub fn sqrt(&self) -> Result<PadicNumber, PadicError> {
        match &self.repr {
            Repr::Base(x) => Ok(PadicNumber { field: self.field.clone(), repr: Repr::Base(x.sqrt()?) }),
            Repr::Quad { u, w } if w.is_exact_zero() => {
                sqrt_in_field(&self.field, u)?.ok_or(PadicError::NotASquare)
            }
            Repr::Quad { u, w } => {
                // (s + t√d)² = u + w√d forces s² = (u ± √N)/2 with N = u² − d w²
                // a square of Q_p, and t = w / (2s).
                let n = self.field_norm()?;
                if !n.is_square()? {
                    return Err(PadicError::NotASquare);
                }
                let root_n = n.sqrt()?;
                let p = u.p();
                let two = Qp::from_int(p, u.cap(), 2);
                for candidate in [u.add(&root_n)?, u.sub(&root_n)?] {
                    let s2 = candidate.div(&two)?;
                    if s2.is_zero_to_precision() || !s2.is_square()? {
                        continue;
                    }
                    let s = s2.sqrt()?;
                    let t = w.div(&two.mul(&s)?)?;
                    return PadicNumber::from_coords(&self.field, s, t);
                }
                Err(PadicError::NotASquare)
            }
        }
    }
}

/// `√x` for a base-field `x`, as an element of `field` when one exists there:
/// either `x` is a square of `Q_p`, or `x/d` is and the root is `y√d`.
pub fn sqrt_in_field(field: &FieldDescriptor, x: &Qp) -> Result<Option<PadicNumber>, PadicError> {
    if x.is_square()? {
        return Ok(Some(PadicNumber::from_qp(field, x.sqrt()?)));
    }
    let Some(ext) = field.extension() else { return Ok(None) };
    let ratio = x.div(ext.d())?;
    if !ratio.is_square()? {
        return Ok(None);
    }
    let y = ratio.sqrt()?;
    let zero = Qp::zero(x.p(), y.cap());
    Ok(Some(PadicNumber::from_coords(field, zero, y)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(p: u64, d: i64) -> FieldDescriptor {
        FieldDescriptor::quadratic(&Qp::from_int(p, 32, d)).unwrap()
    }

    #[test]
    fn sqrt_minus_two_squares_to_minus_two() {
        // (0 + 1·√-2)² = -2 and |√-2|_2 = 2^(-1/2).
        let f = ext(2, -2);
        let r = PadicNumber::sqrt_d(&f, 32).unwrap();
        let sq = r.square().unwrap();
        assert!(sq.agrees_with(&PadicNumber::from_int(-2, &f, 32)));
        assert_eq!(sq.norm().unwrap(), NormValue::from_exponent(1));
        assert_eq!(r.norm().unwrap(), NormValue::from_twice_exponent(1));
    }

    #[test]
    fn mixing_extensions_is_rejected() {
        let a = PadicNumber::sqrt_d(&ext(7, 3), 16).unwrap();
        let b = PadicNumber::sqrt_d(&ext(7, 7), 16).unwrap();
        assert!(matches!(a.add(&b), Err(PadicError::IncompatibleField { .. })));
        let base = PadicNumber::from_int(2, &FieldDescriptor::base(7).unwrap(), 16);
        assert!(a.add(&base).is_ok());
    }

    #[test]
    fn inverse_in_extension() {
        let f = ext(5, 2);
        let z = PadicNumber::from_coords(&f, Qp::from_int(5, 24, 3), Qp::from_int(5, 24, 7)).unwrap();
        let one = z.mul(&z.inv().unwrap()).unwrap();
        assert!(one.agrees_with(&PadicNumber::one(&f, 24)));
    }

    #[test]
    fn extension_sqrt_roundtrip() {
        let f = ext(7, 3);
        let z = PadicNumber::from_coords(&f, Qp::from_int(7, 24, 2), Qp::from_int(7, 24, 5)).unwrap();
        let sq = z.square().unwrap();
        let r = sq.sqrt().unwrap();
        assert!(r.square().unwrap().agrees_with(&sq));
        assert!(r.agrees_with(&z) || r.agrees_with(&z.neg()));
    }

    #[test]
    fn sqrt_through_radicand() {
        // -a with a = 1 in Q_2(√-2): -1/-2 = 1/2 has odd valuation, so no root.
        let f = ext(2, -2);
        assert!(sqrt_in_field(&f, &Qp::from_int(2, 32, -1)).unwrap().is_none());
        let r = sqrt_in_field(&f, &Qp::from_int(2, 32, -8)).unwrap().unwrap();
        assert!(r.square().unwrap().agrees_with(&PadicNumber::from_int(-8, &f, 32)));
    }
}
