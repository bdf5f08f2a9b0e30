use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::error::AnalysisError;
use super::report::{norm_to_rational, par_samples, serialize_rational, BallDescriptor, BallKind, Counterexample, SCHEMA_VERSION};
use crate::dynamics::{eval_f, iterate_orbit, ContextSummary, MapContext};
use crate::padic::{sample_in_ball, sample_on_sphere, NormBound, NormValue, PadicNumber, RandomSource};

fn require_delta(ctx: &MapContext, r: NormValue) -> Result<(), AnalysisError> {
    if r.is_zero() || r >= ctx.sqrt_a() {
        return Err(AnalysisError::OutOfDomain(format!(
            "r = p^-({r}) is not in (0, sqrt(A)) with sqrt(A) = p^-({})",
            ctx.sqrt_a()
        )));
    }
    Ok(())
}

/// `ρ(r) = r³/A`, the distance `|f(c) − c|` for any `c ∈ S_r(0)`, `0 < r < √A`.
pub fn rho_of_r(ctx: &MapContext, r: NormValue) -> Result<NormValue, AnalysisError> {
    require_delta(ctx, r)?;
    Ok(r.pow(3).div(ctx.big_a()).expect("A > 0"))
}

#[derive(Clone, Debug, Serialize)]
pub struct IsometryReport {
    pub schema_version: u32,
    pub context: ContextSummary,
    pub ball: BallDescriptor,
    pub samples: usize,
    pub preserved: usize,
    pub counterexample: Option<Counterexample>,
}

impl IsometryReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none() && self.preserved == self.samples
    }
}

/// Sample `x ∈ V_ρ(c)` and check `|f(x) − f(c)| = |x − c|`.
pub fn ball_image_check(
    ctx: &MapContext,
    center: &PadicNumber,
    rho: NormValue,
    samples: usize,
    src: RandomSource,
) -> Result<IsometryReport, AnalysisError> {
    let c = ctx.embed(center)?;
    let r = c.norm()?;
    require_delta(ctx, r)?;
    if rho > r {
        return Err(AnalysisError::BallNotInSphere { r: r.exponent_string(), rho: rho.exponent_string() });
    }
    let fc = eval_f(ctx, &c)?;
    let outcomes = par_samples(src, samples, |sub, rng| -> Result<Option<Counterexample>, AnalysisError> {
        let x = sample_in_ball(&c, rho, rng)?;
        let before = x.distance(&c)?;
        let after = eval_f(ctx, &x)?.distance(&fc)?;
        let same = match (before, after) {
            (NormBound::Exact(b), NormBound::Exact(a)) => a == b,
            // x agrees with c: both sides are zero to working precision.
            (NormBound::AtMost(_), NormBound::AtMost(_)) => true,
            _ => false,
        };
        Ok((!same).then(|| {
            let detail = format!(
                "|x - c| = p^-({}) but |f(x) - f(c)| = p^-({})",
                before.exponent_string(),
                after.exponent_string()
            );
            Counterexample::new("ball_isometry", ctx, &x, 1, sub, detail)
        }))
    });
    let mut report = IsometryReport {
        schema_version: SCHEMA_VERSION,
        context: ctx.summary(),
        ball: BallDescriptor { center: c, radius: rho, kind: BallKind::Closed },
        samples,
        preserved: 0,
        counterexample: None,
    };
    for o in outcomes {
        match o? {
            None => report.preserved += 1,
            Some(ce) => {
                report.counterexample.get_or_insert(ce);
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoReport {
    pub schema_version: u32,
    pub context: ContextSummary,
    #[serde(rename = "radius_exp")]
    pub radius: NormValue,
    #[serde(rename = "rho_exp")]
    pub rho: NormValue,
    pub samples: usize,
    pub matched: usize,
    pub counterexample: Option<Counterexample>,
}

impl RhoReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none() && self.matched == self.samples
    }
}

/// Sample `c ∈ S_r(0)` and check `|f(c) − c| = ρ(r)`.
pub fn rho_check(ctx: &MapContext, r: NormValue, samples: usize, src: RandomSource) -> Result<RhoReport, AnalysisError> {
    let rho = rho_of_r(ctx, r)?;
    let zero = PadicNumber::zero(ctx.field(), ctx.cap());
    let outcomes = par_samples(src, samples, |sub, rng| -> Result<Option<Counterexample>, AnalysisError> {
        let c = sample_on_sphere(&zero, r, rng)?;
        let d = eval_f(ctx, &c)?.distance(&c)?;
        Ok((d != NormBound::Exact(rho)).then(|| {
            let detail = format!("|f(c) - c| = p^-({}), expected p^-({rho})", d.exponent_string());
            Counterexample::new("rho_of_r", ctx, &c, 1, sub, detail)
        }))
    });
    let mut report = RhoReport {
        schema_version: SCHEMA_VERSION,
        context: ctx.summary(),
        radius: r,
        rho,
        samples,
        matched: 0,
        counterexample: None,
    };
    for o in outcomes {
        match o? {
            None => report.matched += 1,
            Some(ce) => {
                report.counterexample.get_or_insert(ce);
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalBallReport {
    pub schema_version: u32,
    pub context: ContextSummary,
    pub ball: BallDescriptor,
    /// Steps `n` with `|f^{n+1}(c) − f^n(c)| = ρ(r)` verified.
    pub increments_checked: usize,
    pub increments_hold: bool,
    /// `f(c) ∈ V_ρ(c)`, which with the isometry gives `f(V_ρ(c)) = V_ρ(c)`.
    pub image_inside: bool,
    pub isometry: IsometryReport,
    /// Radius of the smaller balls tested for invariance.
    #[serde(rename = "theta_exp")]
    pub theta: NormValue,
    pub smaller_balls_tested: usize,
    /// Smaller balls whose center escapes under one step.
    pub smaller_balls_escaped: usize,
    pub counterexample: Option<Counterexample>,
}

impl MinimalBallReport {
    pub fn passed(&self) -> bool {
        self.increments_hold
            && self.image_inside
            && self.isometry.passed()
            && self.smaller_balls_escaped == self.smaller_balls_tested
            && self.counterexample.is_none()
    }
}

/// `V_ρ(r)(c)` for `c ∈ S_r(0)`, with certificates that it is invariant and that
/// no ball of radius `ρ(r)/p` around a point of it is.
pub fn minimal_invariant_ball(
    ctx: &MapContext,
    center: &PadicNumber,
    steps: usize,
    samples: usize,
    src: RandomSource,
) -> Result<MinimalBallReport, AnalysisError> {
    let c = ctx.embed(center)?;
    let r = c.norm()?;
    let rho = rho_of_r(ctx, r)?;
    let ball = BallDescriptor { center: c.clone(), radius: rho, kind: BallKind::Closed };
    let mut counterexample = None;

    let orbit = iterate_orbit(ctx, &c, steps.max(1), &[])?;
    let mut increments_checked = 0;
    let mut increments_hold = true;
    for (n, pair) in orbit.entries.windows(2).enumerate() {
        let d = pair[1].x.distance(&pair[0].x)?;
        if d != NormBound::Exact(rho) {
            increments_hold = false;
            let detail = format!("|f^{}(c) - f^{n}(c)| = p^-({})", n + 1, d.exponent_string());
            counterexample.get_or_insert(Counterexample::new("orbit_increment", ctx, &c, n, src, detail));
            break;
        }
        increments_checked += 1;
    }
    let image_inside = ball.contains(&orbit.entries[1].x) == Some(true);

    let isometry = ball_image_check(ctx, &c, rho, samples, src.substream(1))?;

    let theta = rho.scale_half(if ctx.field().is_ramified() { 1 } else { 2 });
    let escapes = par_samples(src.substream(2), samples, |sub, rng| -> Result<Option<Counterexample>, AnalysisError> {
        let c2 = sample_in_ball(&c, rho, rng)?;
        let small = BallDescriptor { center: c2.clone(), radius: theta, kind: BallKind::Closed };
        let image = eval_f(ctx, &c2)?;
        Ok((small.contains(&image) != Some(false)).then(|| {
            Counterexample::new("minimality", ctx, &c2, 1, sub, "f(c') stayed inside V_theta(c')".into())
        }))
    });
    let mut smaller_balls_escaped = 0;
    for e in escapes {
        match e? {
            None => smaller_balls_escaped += 1,
            Some(ce) => {
                counterexample.get_or_insert(ce);
            }
        }
    }
    Ok(MinimalBallReport {
        schema_version: SCHEMA_VERSION,
        context: ctx.summary(),
        ball,
        increments_checked,
        increments_hold,
        image_inside,
        isometry,
        theta,
        smaller_balls_tested: samples,
        smaller_balls_escaped,
        counterexample,
    })
}

/// Normalized Haar measure `p·ρ / (r(p − 1))` of a ball `V_ρ(c)` inside `S_r(0)`.
///
/// The ball must be a proper part of the sphere (`0 < ρ < r`) and both radii
/// integral powers of `p`.
pub fn haar_measure_ball(p: u64, r: NormValue, rho: NormValue) -> Result<BigRational, AnalysisError> {
    if rho.is_zero() || rho >= r {
        return Err(AnalysisError::OutOfDomain(format!("need 0 < rho < r, got rho = p^-({rho}), r = p^-({r})")));
    }
    let (Some(r_q), Some(rho_q)) = (norm_to_rational(p, r), norm_to_rational(p, rho)) else {
        return Err(AnalysisError::OutOfDomain("Haar measure needs integral powers of p".into()));
    };
    let p_q = BigRational::from_integer(BigInt::from(p));
    Ok(&p_q * rho_q / (r_q * (&p_q - BigRational::one())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErgodicityVerdict {
    NotErgodic,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErgodicityReport {
    pub schema_version: u32,
    pub context: ContextSummary,
    pub p: u64,
    #[serde(rename = "big_a_exp")]
    pub big_a: NormValue,
    #[serde(rename = "r_exp")]
    pub r: NormValue,
    #[serde(rename = "rho_exp")]
    pub rho: NormValue,
    /// Measure of the ball from the Haar formula.
    #[serde(serialize_with = "serialize_rational")]
    pub measure: BigRational,
    /// `p r² / (A (p − 1))`, computed independently.
    #[serde(serialize_with = "serialize_rational")]
    pub closed_form: BigRational,
    /// `1 / (p (p − 1))`.
    #[serde(serialize_with = "serialize_rational")]
    pub bound: BigRational,
    pub bound_attained: bool,
    pub witness: BallDescriptor,
    pub samples: usize,
    pub steps: usize,
    /// Sampled orbits that never left the witness ball.
    pub confined: usize,
    pub verdict: ErgodicityVerdict,
    pub counterexample: Option<Counterexample>,
}

/// Non-ergodicity on `S_r(0)`: the invariant ball `V_ρ(r)(c)` has measure strictly
/// between 0 and 1. Orbits started inside the ball are sampled to confirm it
/// really is invariant.
pub fn ergodicity_report(
    ctx: &MapContext,
    r: NormValue,
    samples: usize,
    steps: usize,
    src: RandomSource,
) -> Result<ErgodicityReport, AnalysisError> {
    let p = ctx.p();
    let minus_a = ctx.a().coords().0.neg();
    if !minus_a.is_square()? {
        return Err(AnalysisError::SqrtOfMinusANotInQp);
    }
    let rho = rho_of_r(ctx, r)?;
    let measure = haar_measure_ball(p, r, rho)?;
    let p_q = BigRational::from_integer(BigInt::from(p));
    let one = BigRational::one();
    let r_q = norm_to_rational(p, r).expect("checked by the measure");
    let a_q = norm_to_rational(p, ctx.big_a()).expect("|a| is an integral power");
    let closed_form = &p_q * &r_q * &r_q / (&a_q * (&p_q - &one));
    let bound = &one / (&p_q * (&p_q - &one));
    let sqrt_a_q = norm_to_rational(p, ctx.sqrt_a()).expect("-a is a square, so v(a) is even");
    let bound_attained = &p_q * &r_q == sqrt_a_q;

    let zero = PadicNumber::zero(ctx.field(), ctx.cap());
    let c = sample_on_sphere(&zero, r, &mut src.substream(u64::MAX).rng())?;
    let witness = BallDescriptor { center: c.clone(), radius: rho, kind: BallKind::Closed };
    let runs = par_samples(src, samples, |sub, rng| -> Result<Option<Counterexample>, AnalysisError> {
        let x = sample_in_ball(&c, rho, rng)?;
        let mut y = x.clone();
        for n in 1..=steps {
            y = eval_f(ctx, &y)?;
            if witness.contains(&y) != Some(true) {
                let detail = "orbit left the invariant ball".to_string();
                return Ok(Some(Counterexample::new("ball_confinement", ctx, &x, n, sub, detail)));
            }
        }
        Ok(None)
    });
    let mut confined = 0;
    let mut counterexample = None;
    for run in runs {
        match run? {
            None => confined += 1,
            Some(ce) => {
                counterexample.get_or_insert(ce);
            }
        }
    }
    let zero_q = BigRational::zero();
    let verdict = if measure == closed_form && measure > zero_q && measure <= bound && confined == samples {
        ErgodicityVerdict::NotErgodic
    } else {
        ErgodicityVerdict::Inconclusive
    };
    Ok(ErgodicityReport {
        schema_version: SCHEMA_VERSION,
        context: ctx.summary(),
        p,
        big_a: ctx.big_a(),
        r,
        rho,
        measure,
        closed_form,
        bound,
        bound_attained,
        witness,
        samples,
        steps,
        confined,
        verdict,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ExactValue;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn e(k: i64) -> NormValue {
        NormValue::from_exponent(k)
    }

    #[test]
    fn haar_examples() {
        assert_eq!(haar_measure_ball(5, e(1), e(3)).unwrap(), q(1, 20));
        assert_eq!(haar_measure_ball(2, e(1), e(3)).unwrap(), q(1, 2));
        assert_eq!(haar_measure_ball(5, e(1), e(2)).unwrap(), q(1, 4));
        assert!(haar_measure_ball(5, e(1), e(1)).is_err());
        assert!(haar_measure_ball(5, e(1), NormValue::from_twice_exponent(5)).is_err());
    }

    #[test]
    fn rho_examples() {
        let ctx = MapContext::over_qp(5, ExactValue::int(-1), 64).unwrap();
        assert_eq!(rho_of_r(&ctx, e(1)).unwrap(), e(3));
        let ctx25 = MapContext::over_qp(5, ExactValue::int(25), 64).unwrap();
        assert_eq!(rho_of_r(&ctx25, e(2)).unwrap(), e(4));
        assert!(rho_of_r(&ctx, e(0)).is_err());
        // f(5) − 5 = −5/24 − 5 = −125/24.
        let five = ctx.from_rational(5, 1).unwrap();
        let diff = eval_f(&ctx, &five).unwrap().sub(&five).unwrap();
        assert!(diff.agrees_with(&ctx.from_rational(-125, 24).unwrap()));
    }

    #[test]
    fn isometry_and_minimality_at_five() {
        let ctx = MapContext::over_qp(5, ExactValue::int(-1), 64).unwrap();
        let five = ctx.from_rational(5, 1).unwrap();
        let rep = ball_image_check(&ctx, &five, e(2), 200, RandomSource::new(3)).unwrap();
        assert!(rep.passed());
        let rep = ball_image_check(&ctx, &five, e(1), 100, RandomSource::new(4)).unwrap();
        assert!(rep.passed());
        let rep = minimal_invariant_ball(&ctx, &five, 50, 100, RandomSource::new(5)).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.ball.radius, e(3));
        assert_eq!(rep.theta, e(4));
    }

    #[test]
    fn ergodicity_examples() {
        let ctx = MapContext::over_qp(5, ExactValue::int(-1), 64).unwrap();
        let rep = ergodicity_report(&ctx, e(1), 50, 20, RandomSource::new(0xA)).unwrap();
        assert_eq!(rep.measure, q(1, 20));
        assert!(rep.bound_attained);
        assert_eq!(rep.verdict, ErgodicityVerdict::NotErgodic);
        let rep = ergodicity_report(&ctx, e(2), 50, 20, RandomSource::new(0xA)).unwrap();
        assert_eq!(rep.measure, q(1, 500));
        assert!(!rep.bound_attained);
        let ctx2 = MapContext::over_qp(5, ExactValue::int(2), 64).unwrap();
        assert_eq!(ergodicity_report(&ctx2, e(1), 1, 1, RandomSource::new(0)).unwrap_err(), AnalysisError::SqrtOfMinusANotInQp);
        let json = serde_json::to_value(ergodicity_report(&ctx, e(1), 2, 2, RandomSource::new(0)).unwrap()).unwrap();
        assert_eq!(json["measure"]["num"], "1");
        assert_eq!(json["measure"]["den"], "20");
    }
}
