use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A p-adic absolute value `p^(-e)` stored through its exponent `e`, which is an
/// integer or a half-integer. The zero norm has exponent `+∞`.
///
/// Ordering follows the size of the norm, not of the exponent: `p^-2 < p^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NormValue {
    /// Twice the exponent; `None` is the zero norm.
    twice_exp: Option<i64>,
}

#[allow(clippy::should_implement_trait)]
impl NormValue {
    pub const ZERO: NormValue = NormValue { twice_exp: None };
    pub const ONE: NormValue = NormValue { twice_exp: Some(0) };

    /// `p^(-e)` for an integer exponent.
    pub fn from_exponent(e: i64) -> Self {
        NormValue { twice_exp: Some(2 * e) }
    }

    /// `p^(-t/2)`.
    pub fn from_twice_exponent(t: i64) -> Self {
        NormValue { twice_exp: Some(t) }
    }

    pub fn is_zero(&self) -> bool {
        self.twice_exp.is_none()
    }

    pub fn twice_exponent(&self) -> Option<i64> {
        self.twice_exp
    }

    /// The exponent as an integer when it is one.
    pub fn integer_exponent(&self) -> Option<i64> {
        self.twice_exp.filter(|t| t % 2 == 0).map(|t| t / 2)
    }

    pub fn is_integral_exponent(&self) -> bool {
        matches!(self.twice_exp, Some(t) if t % 2 == 0)
    }

    pub fn mul(self, other: NormValue) -> NormValue {
        match (self.twice_exp, other.twice_exp) {
            (Some(a), Some(b)) => NormValue::from_twice_exponent(a + b),
            _ => NormValue::ZERO,
        }
    }

    /// `self / other`; `None` when dividing by the zero norm.
    pub fn div(self, other: NormValue) -> Option<NormValue> {
        let b = other.twice_exp?;
        Some(match self.twice_exp {
            Some(a) => NormValue::from_twice_exponent(a - b),
            None => NormValue::ZERO,
        })
    }

    pub fn pow(self, k: u32) -> NormValue {
        match self.twice_exp {
            Some(t) => NormValue::from_twice_exponent(t * k as i64),
            None if k == 0 => NormValue::ONE,
            None => NormValue::ZERO,
        }
    }

    /// Square root, defined when the halved exponent stays a half-integer.
    pub fn sqrt(self) -> Option<NormValue> {
        match self.twice_exp {
            None => Some(NormValue::ZERO),
            Some(t) if t % 2 == 0 => Some(NormValue::from_twice_exponent(t / 2)),
            Some(_) => None,
        }
    }

    /// Multiply by `p^(-k/2)`: `scale_half(2)` divides the norm by `p`.
    pub fn scale_half(self, k: i64) -> NormValue {
        NormValue { twice_exp: self.twice_exp.map(|t| t + k) }
    }

    /// Exponent rendered as `"num/den"` (den 1 or 2), or `"inf"` for zero.
    pub fn exponent_string(&self) -> String {
        match self.twice_exp {
            None => "inf".to_string(),
            Some(t) if t % 2 == 0 => format!("{}/1", t / 2),
            Some(t) => format!("{t}/2"),
        }
    }

    pub fn parse_exponent(s: &str) -> Option<NormValue> {
        let s = s.trim();
        if s == "inf" {
            return Some(NormValue::ZERO);
        }
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().ok()?;
                match d.trim() {
                    "1" => Some(NormValue::from_exponent(n)),
                    "2" => Some(NormValue::from_twice_exponent(n)),
                    _ => None,
                }
            }
            None => s.parse().ok().map(NormValue::from_exponent),
        }
    }

    /// Human-readable form for a given prime, e.g. `5^-2`.
    pub fn display_with(&self, p: u64) -> String {
        match self.twice_exp {
            None => "0".to_string(),
            Some(0) => "1".to_string(),
            Some(t) if t % 2 == 0 => format!("{p}^{}", -t / 2),
            Some(t) => format!("{p}^({}/2)", -t),
        }
    }

    pub fn to_f64(&self, p: u64) -> f64 {
        match self.twice_exp {
            None => 0.0,
            Some(t) => (p as f64).powf(-(t as f64) / 2.0),
        }
    }
}

impl Ord for NormValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.twice_exp, other.twice_exp) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => b.cmp(&a),
        }
    }
}

impl PartialOrd for NormValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p^-({})", self.exponent_string())
    }
}

impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.exponent_string())
    }
}

impl<'de> Deserialize<'de> for NormValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        NormValue::parse_exponent(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("bad norm exponent {s:?}")))
    }
}

/// A norm that is either known exactly or only bounded above (the value was
/// zero to working precision).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormBound {
    Exact(NormValue),
    AtMost(NormValue),
}

impl NormBound {
    pub fn exact(&self) -> Option<NormValue> {
        match self {
            NormBound::Exact(n) => Some(*n),
            NormBound::AtMost(_) => None,
        }
    }

    /// The norm itself, or the bound it is known to satisfy.
    pub fn value(&self) -> NormValue {
        match self {
            NormBound::Exact(n) | NormBound::AtMost(n) => *n,
        }
    }

    /// Exponent string, prefixed with `>=` for a bound.
    pub fn exponent_string(&self) -> String {
        match self {
            NormBound::Exact(n) => n.exponent_string(),
            NormBound::AtMost(n) => format!(">={}", n.exponent_string()),
        }
    }
}
