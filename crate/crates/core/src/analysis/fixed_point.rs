use serde::Serialize;

use super::error::AnalysisError;
use super::report::SCHEMA_VERSION;
use crate::padic::{NormValue, PadicError, PadicNumber};

/// Coefficients of `(a·x + b) / (x² + c·x + d)` with `a ≠ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct RationalMapParams {
    a: PadicNumber,
    b: PadicNumber,
    c: PadicNumber,
    d: PadicNumber,
}

impl RationalMapParams {
    pub fn new(a: PadicNumber, b: PadicNumber, c: PadicNumber, d: PadicNumber) -> Result<Self, AnalysisError> {
        if a.is_zero_to_precision() {
            return Err(AnalysisError::ZeroLeadingCoefficient);
        }
        for other in [&b, &c, &d] {
            a.add(other)?;
        }
        Ok(RationalMapParams { a, b, c, d })
    }

    /// The family with a single fixed point: `b = (−c/3)³`, `d = a + c²/3`.
    pub fn with_unique_fixed_point(a: PadicNumber, c: PadicNumber) -> Result<Self, AnalysisError> {
        let x0 = c.neg().div(&small(&a, 3))?;
        let b = x0.pow(3)?;
        let d = a.add(&c.square()?.div(&small(&a, 3))?)?;
        Self::new(a, b, c, d)
    }

    pub fn coefficients(&self) -> [&PadicNumber; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn with_b(&self, b: PadicNumber) -> Self {
        RationalMapParams { b, ..self.clone() }
    }

    fn denominator_at(&self, x: &PadicNumber) -> Result<PadicNumber, PadicError> {
        x.square()?.add(&self.c.mul(x)?)?.add(&self.d)
    }
}

fn small(like: &PadicNumber, n: i64) -> PadicNumber {
    PadicNumber::from_int(n, like.field(), like.cap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    Attractive,
    Indifferent,
    Repelling,
}

impl FixedPointKind {
    pub fn of_multiplier(norm: NormValue) -> Self {
        match norm.cmp(&NormValue::ONE) {
            std::cmp::Ordering::Less => FixedPointKind::Attractive,
            std::cmp::Ordering::Equal => FixedPointKind::Indifferent,
            std::cmp::Ordering::Greater => FixedPointKind::Repelling,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointReport {
    pub schema_version: u32,
    pub unique: bool,
    /// Coefficients `(c, d − a, −b)` of the monic fixed-point cubic.
    pub cubic: [PadicNumber; 3],
    pub x0: Option<PadicNumber>,
    pub x0_is_pole: Option<bool>,
    pub multiplier: Option<PadicNumber>,
    pub classification: Option<FixedPointKind>,
}

/// Uniqueness holds exactly when the fixed-point cubic `x³ + c x² + (d − a) x − b`
/// is a perfect cube `(x − x0)³`, i.e. `x0 = −c/3`, `b = x0³`, `d − a = 3 x0²`.
pub fn unique_fixed_point_test(params: &RationalMapParams) -> Result<FixedPointReport, AnalysisError> {
    let RationalMapParams { a, b, c, d } = params;
    let three = small(a, 3);
    let cubic = [c.clone(), d.sub(a)?, b.neg()];
    let x0 = c.neg().div(&three)?;
    let unique = b.agrees_with(&x0.pow(3)?) && cubic[1].agrees_with(&three.mul(&x0.square()?)?);
    if !unique {
        return Ok(FixedPointReport {
            schema_version: SCHEMA_VERSION,
            unique,
            cubic,
            x0: None,
            x0_is_pole: None,
            multiplier: None,
            classification: None,
        });
    }
    let den = params.denominator_at(&x0)?;
    let is_pole = den.is_zero_to_precision();
    let multiplier = if is_pole {
        None
    } else {
        // f' = (a·den − (a x + b)(2x + c)) / den²
        let num_val = a.mul(&x0)?.add(b)?;
        let slope = x0.add(&x0)?.add(c)?;
        Some(a.mul(&den)?.sub(&num_val.mul(&slope)?)?.div(&den.square()?)?)
    };
    let classification = match &multiplier {
        Some(m) => Some(FixedPointKind::of_multiplier(m.norm()?)),
        None => None,
    };
    Ok(FixedPointReport {
        schema_version: SCHEMA_VERSION,
        unique,
        cubic,
        x0: Some(x0),
        x0_is_pole: Some(is_pole),
        multiplier,
        classification,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CanonicalForm {
    /// `a·x / (x² + a)`.
    Fe { a: PadicNumber },
    /// `c ≠ 0`: a (2,2)-rational map, not treated here.
    OutOfScopeTwoTwo { c: PadicNumber, note: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Reduction {
    pub schema_version: u32,
    pub x0: PadicNumber,
    /// `[t², t, 1]` coefficients of `f(t + x0) − x0`, numerator over denominator.
    pub numerator: [PadicNumber; 3],
    pub denominator: [PadicNumber; 3],
    pub canonical: CanonicalForm,
}

/// Conjugate by `h(t) = t + x0`, moving the fixed point to 0.
///
/// The shifted map is computed by direct substitution and compared against the
/// closed form `((c/3) t² + (a + c²/9) t) / (t² + (c/3) t + a + c²/9)`.
pub fn conjugate_reduce(params: &RationalMapParams) -> Result<Reduction, AnalysisError> {
    let report = unique_fixed_point_test(params)?;
    let x0 = report.x0.ok_or(AnalysisError::NotUniqueFixedPoint)?;
    let RationalMapParams { a, b, c, .. } = params;

    // a(t + x0) + b − x0·((t + x0)² + c(t + x0) + d)
    let x0sq = x0.square()?;
    let numerator = [
        x0.neg(),
        a.sub(&x0sq.add(&x0sq)?)?.sub(&c.mul(&x0)?)?,
        a.mul(&x0)?.add(b)?.sub(&x0.mul(&params.denominator_at(&x0)?)?)?,
    ];
    let denominator = [small(a, 1), x0.add(&x0)?.add(c)?, params.denominator_at(&x0)?];

    let c3 = c.div(&small(a, 3))?;
    let k = a.add(&c.square()?.div(&small(a, 9))?)?;
    let zero = small(a, 0);
    let closed_num = [&c3, &k, &zero];
    let closed_den = [&denominator[0], &c3, &k];
    let agrees = numerator.iter().zip(closed_num).chain(denominator.iter().zip(closed_den)).all(|(x, y)| x.agrees_with(y));
    if !agrees {
        return Err(crate::dynamics::DynamicsError::CrossCheckFailed(
            "shifted map differs from the closed conjugate form".into(),
        )
        .into());
    }
    let canonical = if c.is_zero_to_precision() {
        CanonicalForm::Fe { a: a.clone() }
    } else {
        CanonicalForm::OutOfScopeTwoTwo {
            c: c.clone(),
            note: "c != 0 gives a (2,2)-rational map; only c = 0 is handled".into(),
        }
    };
    Ok(Reduction { schema_version: SCHEMA_VERSION, x0, numerator, denominator, canonical })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::FieldDescriptor;

    fn params(p: u64, coeffs: [i64; 4]) -> RationalMapParams {
        let f = FieldDescriptor::base(p).unwrap();
        let [a, b, c, d] = coeffs.map(|n| PadicNumber::from_int(n, &f, 32));
        RationalMapParams::new(a, b, c, d).unwrap()
    }

    #[test]
    fn canonical_map_has_unique_indifferent_fixed_point() {
        let rep = unique_fixed_point_test(&params(5, [1, 0, 0, 1])).unwrap();
        assert!(rep.unique);
        assert!(rep.x0.unwrap().is_exact_zero());
        assert_eq!(rep.classification, Some(FixedPointKind::Indifferent));
        assert!(rep.multiplier.unwrap().agrees_with(&PadicNumber::from_int(1, &FieldDescriptor::base(5).unwrap(), 32)));
        let red = conjugate_reduce(&params(5, [2, 0, 0, 2])).unwrap();
        assert!(matches!(red.canonical, CanonicalForm::Fe { .. }));
    }

    #[test]
    fn shifted_cube() {
        // (x − 1)³ = x³ − 3x² + 3x − 1 matches (c, d − a, −b) = (−3, 3, −1).
        let f = FieldDescriptor::base(5).unwrap();
        let rep = unique_fixed_point_test(&params(5, [1, 1, -3, 4])).unwrap();
        assert!(rep.unique);
        assert_eq!(rep.x0.unwrap(), PadicNumber::from_int(1, &f, 32));
        assert_eq!(rep.x0_is_pole, Some(false));
        let red = conjugate_reduce(&params(5, [1, 1, -3, 4])).unwrap();
        assert!(matches!(red.canonical, CanonicalForm::OutOfScopeTwoTwo { .. }));
    }

    #[test]
    fn three_distinct_roots_are_not_unique() {
        let rep = unique_fixed_point_test(&params(5, [1, 1, 0, 1])).unwrap();
        assert!(!rep.unique);
        assert!(matches!(conjugate_reduce(&params(5, [1, 1, 0, 1])), Err(AnalysisError::NotUniqueFixedPoint)));
    }

    #[test]
    fn zero_leading_coefficient_rejected() {
        let f = FieldDescriptor::base(5).unwrap();
        let z = PadicNumber::zero(&f, 8);
        assert!(RationalMapParams::new(z.clone(), z.clone(), z.clone(), z).is_err());
    }
}
