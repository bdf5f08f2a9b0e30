//! Text forms of p-adic values.
//!
//! Input is either a rational string (`"-5/24"`, `"7"`) or a digit object:
//!
//! ```json
//! {"p": 5, "valuation": "1/1", "digits": [4, 0, 1], "precision": 3}
//! ```
//!
//! Extension elements add the radicand `d` and the coordinates `u`, `w`
//! (themselves base digit objects) of `u + w·√d`; their `valuation` is the
//! norm exponent, which may be a half-integer. Output is always a digit object.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};

use super::error::PadicError;
use super::field::FieldDescriptor;
use super::modular;
use super::norm::{NormBound, NormValue};
use super::number::PadicNumber;
use super::qp::{Qp, QpValue};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DigitObject {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Box<DigitObject>>,
    pub valuation: String,
    #[serde(default)]
    pub digits: Vec<u64>,
    #[serde(default)]
    pub precision: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Box<DigitObject>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Box<DigitObject>>,
}

impl DigitObject {
    pub fn from_qp(x: &Qp) -> Self {
        let valuation = match x.value() {
            QpValue::Zero { abs: None } => "inf".to_string(),
            QpValue::Zero { abs: Some(k) } => format!(">={k}/1"),
            QpValue::Unit { val, .. } => format!("{val}/1"),
        };
        DigitObject {
            p: x.p(),
            d: None,
            valuation,
            digits: x.unit_digits(),
            precision: x.relative_precision(),
            u: None,
            w: None,
        }
    }

    pub fn from_number(x: &PadicNumber) -> Self {
        match x.as_qp() {
            Some(q) => Self::from_qp(q),
            None => {
                let (u, w) = x.coords();
                let valuation = match x.norm_bound() {
                    NormBound::Exact(n) => n.exponent_string(),
                    NormBound::AtMost(n) => format!(">={}", n.exponent_string()),
                };
                let d = x.field().extension().map(|e| Box::new(Self::from_qp(e.d())));
                DigitObject {
                    p: x.p(),
                    d,
                    valuation,
                    digits: Vec::new(),
                    precision: u.relative_precision().min(w.relative_precision()),
                    u: Some(Box::new(Self::from_qp(&u))),
                    w: Some(Box::new(Self::from_qp(&w))),
                }
            }
        }
    }

    /// Base-field value described by this object, with `cap` significant digits.
    pub fn to_qp(&self, cap: u32) -> Result<Qp, PadicError> {
        let bad = |why: &str| PadicError::MalformedLiteral(why.to_string());
        if !modular::is_prime(self.p) {
            return Err(PadicError::NotPrime(self.p));
        }
        let v = self.valuation.trim();
        if v == "inf" {
            return Ok(Qp::zero(self.p, cap));
        }
        if let Some(rest) = v.strip_prefix(">=") {
            let k = NormValue::parse_exponent(rest)
                .and_then(|n| n.integer_exponent())
                .ok_or_else(|| bad("zero bound must be an integer exponent"))?;
            return Ok(Qp::zero_to_precision(self.p, cap, k));
        }
        let val = NormValue::parse_exponent(v)
            .and_then(|n| n.integer_exponent())
            .ok_or_else(|| bad("base-field valuation must be an integer"))?;
        let known = (self.precision as usize).min(self.digits.len());
        if known == 0 {
            return Err(bad("digit object needs at least one known digit"));
        }
        if self.digits[0] == 0 {
            return Err(bad("leading unit digit must be nonzero"));
        }
        let mut unit = BigUint::zero();
        for &dig in self.digits[..known].iter().rev() {
            if dig >= self.p {
                return Err(bad("digit out of range"));
            }
            unit = unit * self.p + dig;
        }
        Ok(Qp::from_digits_value(self.p, cap, val, unit, known as u32))
    }
}

impl Serialize for PadicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DigitObject::from_number(self).serialize(s)
    }
}

impl Serialize for Qp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DigitObject::from_qp(self).serialize(s)
    }
}

/// Parse a rational `"m/n"` / `"m"` into `(m, n)`.
pub fn parse_rational(text: &str) -> Result<(BigInt, BigInt), PadicError> {
    let bad = || PadicError::MalformedLiteral(text.to_string());
    let (m, n) = match text.trim().split_once('/') {
        Some((m, n)) => (m.trim(), n.trim()),
        None => (text.trim(), "1"),
    };
    let m: BigInt = m.parse().map_err(|_| bad())?;
    let n: BigInt = n.parse().map_err(|_| bad())?;
    if n.is_zero() {
        return Err(PadicError::ZeroDenominator);
    }
    Ok((m, n))
}

/// Parse a literal (rational string or digit-object JSON) into `field`.
pub fn parse_literal(text: &str, field: &FieldDescriptor, cap: u32) -> Result<PadicNumber, PadicError> {
    let text = text.trim();
    if !text.starts_with('{') {
        let (m, n) = parse_rational(text)?;
        return PadicNumber::from_big_rational(&m, &n, field, cap);
    }
    let obj: DigitObject =
        serde_json::from_str(text).map_err(|e| PadicError::MalformedLiteral(e.to_string()))?;
    from_digit_object(&obj, field, cap)
}

pub fn from_digit_object(obj: &DigitObject, field: &FieldDescriptor, cap: u32) -> Result<PadicNumber, PadicError> {
    if obj.p != field.p() {
        return Err(PadicError::IncompatibleField {
            left: field.to_string(),
            right: format!("literal over Q_{}", obj.p),
        });
    }
    match (&obj.u, &obj.w) {
        (None, None) => Ok(PadicNumber::from_qp(field, obj.to_qp(cap)?)),
        (Some(u), Some(w)) => {
            let ext = field.extension().ok_or_else(|| PadicError::IncompatibleField {
                left: field.to_string(),
                right: "extension literal".into(),
            })?;
            if let Some(d) = &obj.d {
                if !d.to_qp(cap)?.agrees_with(ext.d()) {
                    return Err(PadicError::IncompatibleField {
                        left: field.to_string(),
                        right: "literal with a different radicand".into(),
                    });
                }
            }
            PadicNumber::from_coords(field, u.to_qp(cap)?, w.to_qp(cap)?)
        }
        _ => Err(PadicError::MalformedLiteral("extension literal needs both u and w".into())),
    }
}

/// Parse a radius: `"1/25"`, `"5"`, `"0"`, `"5^-2"` or `"2^-3/2"` (also `"2^(-3/2)"`).
pub fn parse_radius(text: &str, p: u64) -> Result<NormValue, PadicError> {
    let t = text.trim();
    let bad = || PadicError::MalformedLiteral(format!("radius {text:?}"));
    if let Some((base, exp)) = t.split_once('^') {
        let base: u64 = base.trim().parse().map_err(|_| bad())?;
        if base != p {
            return Err(bad());
        }
        let exp = exp.trim().trim_start_matches('(').trim_end_matches(')');
        // norm = p^exp, exponent field stores -exp
        let (n, d) = match exp.split_once('/') {
            Some((n, d)) => (n.trim().parse::<i64>().map_err(|_| bad())?, d.trim()),
            None => (exp.parse::<i64>().map_err(|_| bad())?, "1"),
        };
        return match d {
            "1" => Ok(NormValue::from_exponent(-n)),
            "2" => Ok(NormValue::from_twice_exponent(-n)),
            _ => Err(bad()),
        };
    }
    let (m, n) = parse_rational(t)?;
    if m.is_zero() {
        return Ok(NormValue::ZERO);
    }
    if m < BigInt::zero() || n < BigInt::zero() {
        return Err(bad());
    }
    let strip = |x: BigInt| -> (u32, BigInt) {
        let (k, rest) = modular::strip_p(x.to_biguint().unwrap(), p);
        (k, BigInt::from(rest))
    };
    let (km, rm) = strip(m);
    let (kn, rn) = strip(n);
    if !rm.is_one() || !rn.is_one() {
        return Err(PadicError::RadiusNotRepresentable(format!("{t} is not a power of {p}")));
    }
    Ok(NormValue::from_exponent(kn as i64 - km as i64))
}
