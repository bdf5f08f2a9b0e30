use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::error::PadicError;
use super::modular::{self, residue};
use super::norm::NormValue;
use super::qp::Qp;

/// How the extension sits over `Q_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionKind {
    Unramified,
    Ramified,
}

/// Second element `ω` of an integral basis `{1, ω}`, chosen so that
/// `|α + βω| = max(|α|, |β|·|ω|)` for all `α, β ∈ Q_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum IntegralBasis {
    /// `ω = √d` (odd `p`, or `d` of odd valuation).
    SqrtD,
    /// `ω = (1 + √d)/2` for 2-adic `d ≡ 5 (mod 8)`.
    HalfOnePlusSqrtD,
    /// `ω = 1 + √d` for 2-adic units `d ≡ 3 (mod 4)`.
    OnePlusSqrtD,
}

#[derive(Debug)]
pub struct QuadraticExtension {
    /// Non-square radicand, normalized to valuation 0 or 1.
    d: Qp,
    kind: ExtensionKind,
    basis: IntegralBasis,
}

impl QuadraticExtension {
    pub fn d(&self) -> &Qp {
        &self.d
    }

    pub fn kind(&self) -> ExtensionKind {
        self.kind
    }

    pub(crate) fn basis(&self) -> IntegralBasis {
        self.basis
    }
}

/// `Q_p` or a single quadratic extension `Q_p(√d)`.
#[derive(Clone, Debug)]
pub struct FieldDescriptor {
    p: u64,
    ext: Option<Arc<QuadraticExtension>>,
}

impl FieldDescriptor {
    pub fn base(p: u64) -> Result<Self, PadicError> {
        if !modular::is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        Ok(FieldDescriptor { p, ext: None })
    }

    /// `Q_p(√d)`. The radicand is divided by the largest even power of `p`
    /// it contains, so `√d_given = p^k √d_stored`.
    pub fn quadratic(d: &Qp) -> Result<Self, PadicError> {
        let p = d.p();
        if !modular::is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        let v = d.valuation().ok_or_else(|| {
            PadicError::PrecisionExhausted("extension radicand is zero to precision".into())
        })?;
        let d = d.shift(-2 * v.div_euclid(2));
        if d.is_square()? {
            return Err(PadicError::SquareExtensionParameter(p));
        }
        let (kind, basis) = if d.valuation() == Some(1) {
            (ExtensionKind::Ramified, IntegralBasis::SqrtD)
        } else if p != 2 {
            (ExtensionKind::Unramified, IntegralBasis::SqrtD)
        } else {
            let r8 = residue(&d.unit_mod(3).expect("checked by is_square"), 8);
            if r8 == 5 {
                (ExtensionKind::Unramified, IntegralBasis::HalfOnePlusSqrtD)
            } else {
                (ExtensionKind::Ramified, IntegralBasis::OnePlusSqrtD)
            }
        };
        Ok(FieldDescriptor { p, ext: Some(Arc::new(QuadraticExtension { d, kind, basis })) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn extension(&self) -> Option<&QuadraticExtension> {
        self.ext.as_deref()
    }

    pub fn is_base(&self) -> bool {
        self.ext.is_none()
    }

    pub fn base_field(&self) -> FieldDescriptor {
        FieldDescriptor { p: self.p, ext: None }
    }

    pub fn is_ramified(&self) -> bool {
        matches!(self.extension(), Some(e) if e.kind == ExtensionKind::Ramified)
    }

    /// Whether `r` is a norm of some element of the field.
    pub fn value_group_contains(&self, r: NormValue) -> bool {
        r.is_zero() || r.is_integral_exponent() || self.is_ramified()
    }

    /// Same field with the radicand padded to `cap` digits.
    pub fn padded(&self, cap: u32) -> FieldDescriptor {
        match &self.ext {
            None => self.clone(),
            Some(e) => FieldDescriptor {
                p: self.p,
                ext: Some(Arc::new(QuadraticExtension {
                    d: e.d.padded(cap),
                    kind: e.kind,
                    basis: e.basis,
                })),
            },
        }
    }
}

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        match (&self.ext, &other.ext) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a.d.agrees_with(&b.d),
            _ => false,
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.ext {
            None => write!(f, "Q_{}", self.p),
            Some(e) => write!(f, "Q_{}(sqrt({}))", self.p, short_qp(&e.d)),
        }
    }
}

/// Compact rendering of small integers, falling back to the digit expansion.
pub(crate) fn short_qp(x: &Qp) -> String {
    use num_bigint::BigUint;
    use num_traits::ToPrimitive;
    let Some(abs) = x.abs_precision() else { return "0".into() };
    if let (Some(n), true) = (x.to_integer_residue(), abs >= 0) {
        let m = super::modular::pow_p(x.p(), abs as u32);
        let m: &BigUint = m.as_ref();
        if let Some(small) = n.to_i64().filter(|v| *v < 1_000_000) {
            return small.to_string();
        }
        if let Some(neg) = (m - &n).to_i64().filter(|v| *v < 1_000_000) {
            return format!("-{neg}");
        }
    }
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_extensions() {
        let q = |p, n| Qp::from_int(p, 20, n);
        assert!(FieldDescriptor::base(4).is_err());
        assert_eq!(
            FieldDescriptor::quadratic(&q(2, -2)).unwrap().extension().unwrap().kind(),
            ExtensionKind::Ramified
        );
        let f = FieldDescriptor::quadratic(&q(2, 5)).unwrap();
        assert_eq!(f.extension().unwrap().basis(), IntegralBasis::HalfOnePlusSqrtD);
        let f = FieldDescriptor::quadratic(&q(2, -1)).unwrap();
        assert_eq!(f.extension().unwrap().basis(), IntegralBasis::OnePlusSqrtD);
        assert_eq!(
            FieldDescriptor::quadratic(&q(5, 2)).unwrap().extension().unwrap().kind(),
            ExtensionKind::Unramified
        );
        // -4 ≡ 1 (mod 5) is a square.
        assert!(FieldDescriptor::quadratic(&q(5, -4)).is_err());
        let f = FieldDescriptor::quadratic(&q(3, 2 * 9)).unwrap();
        assert_eq!(f.extension().unwrap().d().valuation(), Some(0));
        assert_eq!(f.to_string(), "Q_3(sqrt(2))");
    }
}
