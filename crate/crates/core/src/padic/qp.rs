//! Elements of `Q_p` in the capped-relative-precision model.
//!
//! A nonzero element is `p^val * unit` with the unit known modulo `p^prec`
//! (`1 <= prec <= cap`). Arithmetic on the known digits is exact, so every digit
//! a value reports is correct; precision only shrinks through cancellation.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::error::PadicError;
use super::modular::{self, pow_p, residue};
use super::norm::{NormBound, NormValue};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum QpValue {
    /// Zero. `abs = None` is an exact zero; `Some(k)` means "≡ 0 mod p^k".
    Zero { abs: Option<i64> },
    Unit { val: i64, unit: BigUint, prec: u32 },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Qp {
    p: u64,
    cap: u32,
    value: QpValue,
}

impl fmt::Debug for Qp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            QpValue::Zero { abs: None } => write!(f, "0"),
            QpValue::Zero { abs: Some(k) } => write!(f, "O({}^{k})", self.p),
            QpValue::Unit { val, unit, prec } => {
                write!(f, "{}^{val}*{unit} + O({}^{})", self.p, self.p, val + *prec as i64)
            }
        }
    }
}

impl Qp {
    pub fn zero(p: u64, cap: u32) -> Self {
        Qp { p, cap, value: QpValue::Zero { abs: None } }
    }

    /// A value known only to be `≡ 0 (mod p^abs)`.
    pub fn zero_to_precision(p: u64, cap: u32, abs: i64) -> Self {
        Qp { p, cap, value: QpValue::Zero { abs: Some(abs) } }
    }

    pub fn one(p: u64, cap: u32) -> Self {
        Qp::from_int(p, cap, 1)
    }

    pub fn from_int(p: u64, cap: u32, n: i64) -> Self {
        Qp::from_bigint(p, cap, &BigInt::from(n))
    }

    pub fn from_bigint(p: u64, cap: u32, n: &BigInt) -> Self {
        if n.is_zero() {
            return Qp::zero(p, cap);
        }
        let (val, unit) = modular::strip_p(n.abs().to_biguint().unwrap(), p);
        let m = pow_p(p, cap);
        let mut u = unit % m.as_ref();
        if n.sign() == Sign::Minus {
            u = m.as_ref() - u;
        }
        Qp { p, cap, value: QpValue::Unit { val: val as i64, unit: u, prec: cap } }
    }

    /// The rational `m/n` to `cap` significant digits.
    pub fn from_rational(p: u64, cap: u32, m: &BigInt, n: &BigInt) -> Result<Self, PadicError> {
        if n.is_zero() {
            return Err(PadicError::ZeroDenominator);
        }
        let num = Qp::from_bigint(p, cap, m);
        let den = Qp::from_bigint(p, cap, n);
        num.div(&den)
    }

    /// `p^val * unit`, where `unit` (possibly divisible by `p`) is known modulo
    /// `p^digits`.
    pub(crate) fn from_digits_value(p: u64, cap: u32, val: i64, unit: BigUint, digits: u32) -> Self {
        Qp::normalize(p, cap, val, unit, digits)
    }

    fn normalize(p: u64, cap: u32, base_val: i64, s: BigUint, m: u32) -> Self {
        let s = s % pow_p(p, m).as_ref();
        if s.is_zero() {
            return Qp { p, cap, value: QpValue::Zero { abs: Some(base_val + m as i64) } };
        }
        let (k, cofactor) = modular::strip_p(s, p);
        let prec = (m - k).min(cap);
        let unit = cofactor % pow_p(p, prec).as_ref();
        Qp { p, cap, value: QpValue::Unit { val: base_val + k as i64, unit, prec } }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub(crate) fn value(&self) -> &QpValue {
        &self.value
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.value, QpValue::Zero { abs: None })
    }

    /// True for every zero, exact or up to precision.
    pub fn is_zero_to_precision(&self) -> bool {
        matches!(self.value, QpValue::Zero { .. })
    }

    pub fn valuation(&self) -> Option<i64> {
        match self.value {
            QpValue::Unit { val, .. } => Some(val),
            QpValue::Zero { .. } => None,
        }
    }

    /// Absolute precision: digits are known below `p^abs`. `None` for exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match self.value {
            QpValue::Zero { abs } => abs,
            QpValue::Unit { val, prec, .. } => Some(val + prec as i64),
        }
    }

    /// Number of known significant digits (0 for zeros).
    pub fn relative_precision(&self) -> u32 {
        match self.value {
            QpValue::Unit { prec, .. } => prec,
            QpValue::Zero { .. } => 0,
        }
    }

    /// Unit digits, least significant first.
    pub fn unit_digits(&self) -> Vec<u64> {
        match &self.value {
            QpValue::Zero { .. } => Vec::new(),
            QpValue::Unit { unit, prec, .. } => {
                let mut out = Vec::with_capacity(*prec as usize);
                let mut cur = unit.clone();
                let p = BigUint::from(self.p);
                for _ in 0..*prec {
                    let (q, r) = cur.div_rem(&p);
                    out.push(residue(&r, self.p));
                    cur = q;
                }
                out
            }
        }
    }

    /// Unit residue modulo `p^k` (requires `k <= prec`).
    pub(crate) fn unit_mod(&self, k: u32) -> Option<BigUint> {
        match &self.value {
            QpValue::Unit { unit, prec, .. } if k <= *prec => Some(unit % pow_p(self.p, k).as_ref()),
            _ => None,
        }
    }

    pub fn norm(&self) -> Result<NormValue, PadicError> {
        match self.value {
            QpValue::Unit { val, .. } => Ok(NormValue::from_exponent(val)),
            QpValue::Zero { abs: None } => Ok(NormValue::ZERO),
            QpValue::Zero { abs: Some(k) } => Err(PadicError::PrecisionExhausted(format!(
                "value is zero modulo {}^{k}; norm is at most {}^-{k}",
                self.p, self.p
            ))),
        }
    }

    pub fn norm_bound(&self) -> NormBound {
        match self.value {
            QpValue::Unit { val, .. } => NormBound::Exact(NormValue::from_exponent(val)),
            QpValue::Zero { abs: None } => NormBound::Exact(NormValue::ZERO),
            QpValue::Zero { abs: Some(k) } => NormBound::AtMost(NormValue::from_exponent(k)),
        }
    }

    fn check_same_prime(&self, other: &Qp) -> Result<(), PadicError> {
        if self.p != other.p {
            return Err(PadicError::IncompatibleField {
                left: format!("Q_{}", self.p),
                right: format!("Q_{}", other.p),
            });
        }
        Ok(())
    }

    /// Copy with a different cap; relative precision is truncated when shrinking.
    pub fn with_cap(&self, cap: u32) -> Qp {
        let value = match &self.value {
            QpValue::Unit { val, unit, prec } if *prec > cap => QpValue::Unit {
                val: *val,
                unit: unit % pow_p(self.p, cap).as_ref(),
                prec: cap,
            },
            v => v.clone(),
        };
        Qp { p: self.p, cap, value }
    }

    /// Reads the known digits as an exact rational and re-expands it to `cap`
    /// digits, padding with zeros. A zero to precision becomes an exact zero.
    pub fn padded(&self, cap: u32) -> Qp {
        match &self.value {
            QpValue::Zero { .. } => Qp::zero(self.p, cap),
            QpValue::Unit { val, unit, prec } => Qp {
                p: self.p,
                cap,
                value: QpValue::Unit {
                    val: *val,
                    unit: unit % pow_p(self.p, (*prec).min(cap)).as_ref(),
                    prec: cap,
                },
            },
        }
    }

    pub fn add(&self, other: &Qp) -> Result<Qp, PadicError> {
        self.check_same_prime(other)?;
        let p = self.p;
        let cap = self.cap.min(other.cap);
        use QpValue::*;
        let out = match (&self.value, &other.value) {
            (Zero { abs: None }, _) => other.with_cap(cap),
            (_, Zero { abs: None }) => self.with_cap(cap),
            (Zero { abs: Some(a) }, Zero { abs: Some(b) }) => {
                Qp { p, cap, value: Zero { abs: Some(*a.min(b)) } }
            }
            (Zero { abs: Some(k) }, Unit { val, unit, prec })
            | (Unit { val, unit, prec }, Zero { abs: Some(k) }) => {
                if val >= k {
                    Qp { p, cap, value: Zero { abs: Some(*k) } }
                } else {
                    let keep = (*prec as i64).min(k - val) as u32;
                    Qp::normalize(p, cap, *val, unit.clone(), keep)
                }
            }
            (
                Unit { val: v1, unit: u1, prec: p1 },
                Unit { val: v2, unit: u2, prec: p2 },
            ) => {
                let vmin = *v1.min(v2);
                let abs = (v1 + *p1 as i64).min(v2 + *p2 as i64);
                let m = (abs - vmin) as u32;
                let modulus = pow_p(p, m);
                let term = |v: i64, u: &BigUint| -> BigUint {
                    let shift = (v - vmin) as u32;
                    if shift >= m {
                        BigUint::zero()
                    } else {
                        (u * pow_p(p, shift).as_ref()) % modulus.as_ref()
                    }
                };
                let s = term(*v1, u1) + term(*v2, u2);
                Qp::normalize(p, cap, vmin, s, m)
            }
        };
        Ok(out)
    }

    pub fn neg(&self) -> Qp {
        match &self.value {
            QpValue::Zero { .. } => self.clone(),
            QpValue::Unit { val, unit, prec } => {
                let m = pow_p(self.p, *prec);
                Qp {
                    p: self.p,
                    cap: self.cap,
                    value: QpValue::Unit { val: *val, unit: m.as_ref() - unit, prec: *prec },
                }
            }
        }
    }

    pub fn sub(&self, other: &Qp) -> Result<Qp, PadicError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Qp) -> Result<Qp, PadicError> {
        self.check_same_prime(other)?;
        let p = self.p;
        let cap = self.cap.min(other.cap);
        use QpValue::*;
        let value = match (&self.value, &other.value) {
            (Zero { abs: None }, _) | (_, Zero { abs: None }) => Zero { abs: None },
            (Zero { abs: Some(a) }, Zero { abs: Some(b) }) => Zero { abs: Some(a + b) },
            (Zero { abs: Some(k) }, Unit { val, .. }) | (Unit { val, .. }, Zero { abs: Some(k) }) => {
                Zero { abs: Some(k + val) }
            }
            (Unit { val: v1, unit: u1, prec: p1 }, Unit { val: v2, unit: u2, prec: p2 }) => {
                let prec = (*p1).min(*p2).min(cap);
                Unit { val: v1 + v2, unit: (u1 * u2) % pow_p(p, prec).as_ref(), prec }
            }
        };
        Ok(Qp { p, cap, value })
    }

    pub fn inv(&self) -> Result<Qp, PadicError> {
        match &self.value {
            QpValue::Zero { .. } => Err(PadicError::DivisionByZeroToPrecision),
            QpValue::Unit { val, unit, prec } => Ok(Qp {
                p: self.p,
                cap: self.cap,
                value: QpValue::Unit {
                    val: -val,
                    unit: modular::inv_unit(unit, self.p, *prec),
                    prec: *prec,
                },
            }),
        }
    }

    pub fn div(&self, other: &Qp) -> Result<Qp, PadicError> {
        self.check_same_prime(other)?;
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, k: u32) -> Qp {
        let mut acc = Qp::one(self.p, self.cap);
        for _ in 0..k {
            acc = acc.mul(self).expect("same prime");
        }
        acc
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i64) -> Qp {
        let value = match &self.value {
            QpValue::Zero { abs: Some(a) } => QpValue::Zero { abs: Some(a + k) },
            QpValue::Zero { abs: None } => QpValue::Zero { abs: None },
            QpValue::Unit { val, unit, prec } => {
                QpValue::Unit { val: val + k, unit: unit.clone(), prec: *prec }
            }
        };
        Qp { p: self.p, cap: self.cap, value }
    }

    /// `self - other` is zero to the available precision.
    pub fn agrees_with(&self, other: &Qp) -> bool {
        self.sub(other).map(|d| d.is_zero_to_precision()).unwrap_or(false)
    }

    /// Square test in `Q_p`: even valuation and a square unit (a quadratic residue
    /// for odd `p`, `≡ 1 mod 8` for `p = 2`).
    pub fn is_square(&self) -> Result<bool, PadicError> {
        match &self.value {
            QpValue::Zero { abs: None } => Ok(true),
            QpValue::Zero { abs: Some(_) } => Err(PadicError::PrecisionExhausted(
                "square test on a value that is zero to precision".into(),
            )),
            QpValue::Unit { val, unit, prec } => {
                if val.rem_euclid(2) != 0 {
                    return Ok(false);
                }
                if self.p == 2 {
                    if *prec < 3 {
                        return Err(PadicError::PrecisionExhausted(
                            "2-adic square test needs three known digits".into(),
                        ));
                    }
                    Ok(residue(&(unit % 8u32), 8) == 1)
                } else {
                    Ok(modular::is_qr_mod_prime(residue(unit, self.p), self.p))
                }
            }
        }
    }

    /// Square root on the canonical branch (smaller residue mod `p`, mod 8 for
    /// `p = 2`). For `p = 2` the root carries one digit less than the input.
    pub fn sqrt(&self) -> Result<Qp, PadicError> {
        if !self.is_square()? {
            return Err(PadicError::NotASquare);
        }
        match &self.value {
            QpValue::Zero { .. } => Ok(Qp::zero(self.p, self.cap)),
            QpValue::Unit { val, unit, prec } => {
                let (root, rprec) = if self.p == 2 {
                    (modular::sqrt_unit_two(unit, *prec), prec - 1)
                } else {
                    (modular::sqrt_unit_odd(unit, self.p, *prec), *prec)
                };
                let root = root.ok_or(PadicError::NotASquare)?;
                Ok(Qp {
                    p: self.p,
                    cap: self.cap,
                    value: QpValue::Unit { val: val / 2, unit: root, prec: rprec },
                })
            }
        }
    }

    /// The integer `unit * p^val` when `val >= 0`, reduced mod `p^(val+prec)`.
    pub fn to_integer_residue(&self) -> Option<BigUint> {
        match &self.value {
            QpValue::Unit { val, unit, .. } if *val >= 0 => {
                Some(unit * pow_p(self.p, *val as u32).as_ref())
            }
            QpValue::Zero { .. } => Some(BigUint::zero()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64, m: i64, n: i64) -> Qp {
        Qp::from_rational(p, 16, &BigInt::from(m), &BigInt::from(n)).unwrap()
    }

    #[test]
    fn rational_valuations() {
        assert_eq!(q(5, 1, 1).valuation(), Some(0));
        assert_eq!(q(5, 5, 1).valuation(), Some(1));
        assert_eq!(q(5, 1, 25).valuation(), Some(-2));
        let x = q(5, -5, 24);
        assert_eq!(x.valuation(), Some(1));
        // Oracle: 24 ≡ -1 (mod 5), so -1/24 ≡ 1 (mod 5).
        assert_eq!(24 % 5, 5 - 1);
        assert_eq!(x.unit_digits()[0], 1);
    }

    #[test]
    fn cancellation_is_zero_to_precision() {
        let one = q(5, 1, 1);
        let s = one.add(&one.neg()).unwrap();
        assert!(s.is_zero_to_precision());
        assert!(!s.is_exact_zero());
        assert_eq!(s.norm_bound(), NormBound::AtMost(NormValue::from_exponent(16)));
        assert!(s.norm().is_err());
    }

    #[test]
    fn partial_cancellation_loses_digits() {
        let a = q(5, 1, 1);
        let b = q(5, -1 + 125, 1);
        let s = a.add(&b).unwrap();
        assert_eq!(s.valuation(), Some(3));
        assert_eq!(s.relative_precision(), 13);
    }

    #[test]
    fn division_by_zero_to_precision() {
        let z = q(7, 3, 1).sub(&q(7, 3, 1)).unwrap();
        assert_eq!(q(7, 1, 1).div(&z), Err(PadicError::DivisionByZeroToPrecision));
    }

    #[test]
    fn sqrt_branches() {
        let r = q(3, -2, 1).sqrt().unwrap();
        assert_eq!(r.to_integer_residue().unwrap() % 27u32, BigUint::from(22u32));
        let r = q(7, 2, 1).sqrt().unwrap();
        assert_eq!(r.to_integer_residue().unwrap() % 49u32, BigUint::from(10u32));
        assert!(q(5, 2, 1).sqrt().is_err());
        assert!(q(2, 17, 1).sqrt().unwrap().mul(&q(2, 17, 1).sqrt().unwrap()).unwrap()
            .agrees_with(&q(2, 17, 1)));
    }

    #[test]
    fn padding_reads_digits_as_exact() {
        let x = q(5, 1, 3).with_cap(4);
        let y = x.padded(10);
        assert_eq!(y.relative_precision(), 10);
        assert_eq!(y.unit_digits()[..4], x.unit_digits()[..]);
        assert!(y.unit_digits()[4..].iter().all(|&d| d == 0));
    }
}
