use serde::Serialize;

use super::context::MapContext;
use super::error::DynamicsError;
use super::map::eval_f;
use super::orbit::{iterate_orbit, Termination};
use crate::padic::{NormBound, NormValue, PadicNumber};

/// How `A*` is resolved at the boundary radius `r = √A`.
#[derive(Clone, Debug)]
pub enum AstarPolicy {
    /// `A*(x) = |f(x)|` for the point `x ∈ S_√A(0)` at hand.
    PerPoint(Box<MapContext>),
    /// A fixed value `A* ≥ √A`, for pure radius-dynamics experiments.
    Supplied(NormValue),
}

/// The radius map `φ_A`: `r ↦ r` below `√A`, `r ↦ A/r` above it, `√A ↦ A*`.
#[derive(Clone, Debug)]
pub struct RadiusOracle {
    big_a: NormValue,
    sqrt_a: NormValue,
    policy: AstarPolicy,
}

impl RadiusOracle {
    pub fn new(big_a: NormValue, policy: AstarPolicy) -> Result<Self, DynamicsError> {
        let sqrt_a = big_a
            .sqrt()
            .filter(|s| !s.is_zero())
            .ok_or_else(|| DynamicsError::OutOfDomain(format!("A = p^-({big_a}) has no square root")))?;
        if let AstarPolicy::Supplied(astar) = policy {
            if astar < sqrt_a {
                return Err(DynamicsError::AstarBelowSqrtA { astar, sqrt_a });
            }
        }
        Ok(RadiusOracle { big_a, sqrt_a, policy })
    }

    pub fn per_point(ctx: &MapContext) -> Self {
        RadiusOracle { big_a: ctx.big_a(), sqrt_a: ctx.sqrt_a(), policy: AstarPolicy::PerPoint(Box::new(ctx.clone())) }
    }

    pub fn supplied(big_a: NormValue, astar: NormValue) -> Result<Self, DynamicsError> {
        Self::new(big_a, AstarPolicy::Supplied(astar))
    }

    pub fn big_a(&self) -> NormValue {
        self.big_a
    }

    pub fn sqrt_a(&self) -> NormValue {
        self.sqrt_a
    }

    /// `A*` for the given point (per-point policy) or the supplied constant.
    pub fn astar(&self, at: Option<&PadicNumber>) -> Result<NormValue, DynamicsError> {
        match &self.policy {
            AstarPolicy::Supplied(v) => Ok(*v),
            AstarPolicy::PerPoint(ctx) => {
                let x = at.ok_or(DynamicsError::AstarUnresolvable)?;
                if x.norm()? != self.sqrt_a {
                    return Err(DynamicsError::OutOfDomain("A*(x) is defined on S_sqrt(A)(0) only".into()));
                }
                Ok(eval_f(ctx, x)?.norm()?)
            }
        }
    }
}

pub fn phi_a(oracle: &RadiusOracle, r: NormValue, at: Option<&PadicNumber>) -> Result<NormValue, DynamicsError> {
    let s = oracle.sqrt_a;
    if r < s {
        Ok(r)
    } else if r > s {
        Ok(oracle.big_a.div(r).expect("r > 0"))
    } else {
        oracle.astar(at)
    }
}

/// `lim φ_Aⁿ(r)`.
pub fn phi_a_limit(
    oracle: &RadiusOracle,
    r: NormValue,
    at: Option<&PadicNumber>,
) -> Result<NormValue, DynamicsError> {
    let s = oracle.sqrt_a;
    if r != s {
        return phi_a(oracle, r, at);
    }
    let astar = oracle.astar(at)?;
    if astar < s {
        return Err(DynamicsError::AstarBelowSqrtA { astar, sqrt_a: s });
    }
    Ok(if astar == s { s } else { oracle.big_a.div(astar).expect("A* > 0") })
}

/// One step of the `p = 3` cycle radius map: if `|x − t₁| = r` with
/// `0 < r < √A`, then `|f(x) − t₂|` is
///
/// * `r²/√A` for `√A/3 < r < √A`,
/// * at most `√A/9` for `r = √A/3`,
/// * `r/3` for `r < √A/3`.
///
/// Two steps bring the orbit back near `t₁`.
pub fn two_step_radius_map_p3(big_a: NormValue, r: NormValue) -> Result<NormBound, DynamicsError> {
    let s = big_a
        .sqrt()
        .and_then(|v| v.twice_exponent())
        .ok_or_else(|| DynamicsError::OutOfDomain("A must be a nonzero norm with a square root".into()))?;
    let t = match r.twice_exponent() {
        Some(t) if t > s => t,
        _ => return Err(DynamicsError::OutOfDomain(format!("need 0 < r < sqrt(A), got r = 3^-({r})"))),
    };
    let boundary = s + 2;
    Ok(if t < boundary {
        NormBound::Exact(NormValue::from_twice_exponent(2 * t - s))
    } else if t == boundary {
        NormBound::AtMost(NormValue::from_twice_exponent(s + 4))
    } else {
        NormBound::Exact(NormValue::from_twice_exponent(t + 2))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LawVerdict {
    Holds,
    Violated,
    HitPole,
    PrecisionExhausted,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawViolation {
    pub step: usize,
    pub x: PadicNumber,
    pub observed: NormValue,
    /// `φ_A(|x|)`; absent when the step crossed `√A` with `A* < √A`.
    pub expected: Option<NormValue>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusLawReport {
    pub start: PadicNumber,
    pub steps_checked: usize,
    pub verdict: LawVerdict,
    pub violation: Option<LawViolation>,
    /// `A*(x_k)` for every iterate on `S_√A(0)`.
    pub boundary_astar: Vec<NormValue>,
    pub termination: Termination,
}

impl RadiusLawReport {
    pub fn holds(&self) -> bool {
        self.verdict == LawVerdict::Holds
    }
}

/// Check `|f^{k+1}(x)| = φ_A(|f^k(x)|)` for `k < n`, resolving `A*` per point.
pub fn radius_law_check(ctx: &MapContext, x: &PadicNumber, n: usize) -> Result<RadiusLawReport, DynamicsError> {
    let orbit = iterate_orbit(ctx, x, n, &[])?;
    let oracle = RadiusOracle::per_point(ctx);
    let mut report = RadiusLawReport {
        start: orbit.start.clone(),
        steps_checked: 0,
        verdict: LawVerdict::Holds,
        violation: None,
        boundary_astar: Vec::new(),
        termination: orbit.termination,
    };
    for pair in orbit.entries.windows(2) {
        let (cur, next) = (&pair[0], &pair[1]);
        let (Some(r), Some(observed)) = (cur.norm.exact(), next.norm.exact()) else {
            report.verdict = LawVerdict::PrecisionExhausted;
            return Ok(report);
        };
        let expected = if r == oracle.sqrt_a() {
            // A*(x_k) = |f(x_k)| is the observed norm; what can fail is A* ≥ √A.
            report.boundary_astar.push(observed);
            (observed >= oracle.sqrt_a()).then_some(observed)
        } else {
            Some(phi_a(&oracle, r, None)?)
        };
        if expected != Some(observed) {
            report.verdict = LawVerdict::Violated;
            report.violation = Some(LawViolation { step: cur.n, x: cur.x.clone(), observed, expected });
            return Ok(report);
        }
        report.steps_checked += 1;
    }
    report.verdict = match orbit.termination {
        Termination::Completed => LawVerdict::Holds,
        Termination::HitPoleAtStep(_) => LawVerdict::HitPole,
        Termination::PrecisionExhaustedAtStep(_) => LawVerdict::PrecisionExhausted,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ExactValue;

    fn e(k: i64) -> NormValue {
        NormValue::from_exponent(k)
    }

    #[test]
    fn phi_pieces() {
        let o = RadiusOracle::supplied(e(0), e(0)).unwrap();
        assert_eq!(phi_a(&o, e(1), None).unwrap(), e(1));
        assert_eq!(phi_a(&o, e(-2), None).unwrap(), e(2));
        assert_eq!(phi_a(&o, e(0), None).unwrap(), e(0));
        assert!(RadiusOracle::supplied(e(0), e(1)).is_err());
    }

    #[test]
    fn phi_limits() {
        let o = RadiusOracle::supplied(e(0), e(-1)).unwrap();
        assert_eq!(phi_a_limit(&o, e(1), None).unwrap(), e(1));
        assert_eq!(phi_a_limit(&o, e(-2), None).unwrap(), e(2));
        assert_eq!(phi_a_limit(&o, e(0), None).unwrap(), e(1));
        let o = RadiusOracle::supplied(e(0), e(0)).unwrap();
        assert_eq!(phi_a_limit(&o, e(0), None).unwrap(), e(0));
    }

    #[test]
    fn per_point_needs_a_point() {
        let ctx = MapContext::over_qp(5, ExactValue::int(-1), 32).unwrap();
        let o = RadiusOracle::per_point(&ctx);
        assert_eq!(phi_a(&o, e(0), None), Err(DynamicsError::AstarUnresolvable));
        // f(2) = -2/3, a unit, so A*(2) = 1; f(6) = -6/35 has norm 5.
        assert_eq!(phi_a(&o, e(0), Some(&ctx.from_rational(2, 1).unwrap())).unwrap(), e(0));
        assert_eq!(phi_a(&o, e(0), Some(&ctx.from_rational(6, 1).unwrap())).unwrap(), e(-1));
    }

    #[test]
    fn p3_radius_map() {
        assert_eq!(two_step_radius_map_p3(e(0), e(2)).unwrap(), NormBound::Exact(e(3)));
        assert_eq!(two_step_radius_map_p3(e(0), e(1)).unwrap(), NormBound::AtMost(e(2)));
        assert_eq!(two_step_radius_map_p3(e(2), e(3)).unwrap(), NormBound::Exact(e(4)));
        // Middle range needs a ramified radius: √A = 1, r = 3^(-1/2) maps to 3^-1.
        let r = NormValue::from_twice_exponent(1);
        assert_eq!(two_step_radius_map_p3(e(0), r).unwrap(), NormBound::Exact(e(1)));
        assert!(two_step_radius_map_p3(e(0), e(0)).is_err());
        assert!(two_step_radius_map_p3(e(0), NormValue::ZERO).is_err());
    }

    #[test]
    fn law_holds_on_examples() {
        let ctx = MapContext::over_qp(5, ExactValue::int(-1), 64).unwrap();
        for (m, n) in [(5, 1), (1, 25), (0, 1), (2, 1), (7, 3)] {
            let rep = radius_law_check(&ctx, &ctx.from_rational(m, n).unwrap(), 50).unwrap();
            assert!(rep.holds(), "{m}/{n}: {rep:?}");
        }
    }
}
