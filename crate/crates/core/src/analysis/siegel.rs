use std::collections::BTreeMap;

use serde::Serialize;

use super::error::AnalysisError;
use super::report::{par_samples, BallDescriptor, BallKind, Counterexample, SCHEMA_VERSION};
use crate::dynamics::{eval_f, pole_confirmed, ContextSummary, DynamicsError, MapContext};
use crate::padic::{sample_on_sphere, NormBound, NormValue, PadicError, PadicNumber, RandomSource};

/// The Siegel disk of the fixed point 0: the open ball `U_√A(0)`.
pub fn siegel_disk(ctx: &MapContext) -> BallDescriptor {
    BallDescriptor {
        center: PadicNumber::zero(ctx.field(), ctx.cap()),
        radius: ctx.sqrt_a(),
        kind: BallKind::Open,
    }
}

/// Radii of the working field's value group around `√A`: `below` of them
/// strictly inside, `above` strictly outside, nearest first.
pub fn radii_around(ctx: &MapContext, below: usize, above: usize) -> (Vec<NormValue>, Vec<NormValue>) {
    let step = if ctx.field().is_ramified() { 1 } else { 2 };
    let s = ctx.sqrt_a().twice_exponent().expect("a ≠ 0");
    let first_in = (s.div_euclid(step) + 1) * step;
    let first_out = if s.rem_euclid(step) == 0 { s - step } else { s.div_euclid(step) * step };
    let inner = (0..below as i64).map(|k| NormValue::from_twice_exponent(first_in + k * step)).collect();
    let outer = (0..above as i64).map(|k| NormValue::from_twice_exponent(first_out - k * step)).collect();
    (inner, outer)
}

/// Where `φ_A` sends a sphere radius other than `√A`.
fn image_radius(ctx: &MapContext, r: NormValue) -> NormValue {
    if r < ctx.sqrt_a() {
        r
    } else {
        ctx.big_a().div(r).expect("r > 0")
    }
}

/// Membership in the exclusion set of points whose orbit reaches a pole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Membership {
    /// `f^n(x)` is a pole.
    Member(usize),
    NonMember,
    Unknown(UnknownReason),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownReason {
    DepthBudget,
    Precision,
}

/// Decide whether the orbit of `x` hits `±√(−a)` within `depth` steps.
///
/// The exclusion set lies on `S_√A(0)` and orbits never return to that sphere
/// once they leave it, so leaving certifies non-membership. Poles outside the
/// working field cannot be reached from inside it.
pub fn exclusion_membership(ctx: &MapContext, x: &PadicNumber, depth: usize) -> Result<Membership, AnalysisError> {
    let x = ctx.embed(x)?;
    let lift = |c: &MapContext| -> Result<PadicNumber, DynamicsError> {
        if c.cap() == ctx.cap() {
            Ok(x.clone())
        } else {
            Ok(c.lift_from(ctx, &x)?)
        }
    };
    exclusion_membership_lifted(ctx, lift, depth)
}

/// As [`exclusion_membership`], with the point produced by `start_at` at any
/// requested precision.
pub fn exclusion_membership_lifted<F>(ctx: &MapContext, start_at: F, depth: usize) -> Result<Membership, AnalysisError>
where
    F: Fn(&MapContext) -> Result<PadicNumber, DynamicsError>,
{
    let mut x = start_at(ctx)?;
    for n in 0..=depth {
        match x.norm_bound() {
            NormBound::Exact(r) if r != ctx.sqrt_a() => return Ok(Membership::NonMember),
            NormBound::Exact(_) => {}
            NormBound::AtMost(_) => return Ok(Membership::Unknown(UnknownReason::Precision)),
        }
        if ctx.poles().is_none() {
            return Ok(Membership::NonMember);
        }
        match eval_f(ctx, &x) {
            Ok(y) => x = y,
            Err(DynamicsError::PoleHit) if pole_confirmed(ctx, &start_at, n) => return Ok(Membership::Member(n)),
            Err(DynamicsError::PoleHit) | Err(DynamicsError::Padic(PadicError::PrecisionExhausted(_))) => {
                return Ok(Membership::Unknown(UnknownReason::Precision))
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Membership::Unknown(UnknownReason::DepthBudget))
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereTally {
    #[serde(rename = "radius_exp")]
    pub radius: NormValue,
    /// Sphere every iterate `n ≥ 1` must lie on.
    #[serde(rename = "image_radius_exp")]
    pub image_radius: NormValue,
    pub samples: usize,
    pub confined: usize,
    pub excluded: usize,
    pub counterexample: Option<Counterexample>,
}

impl SphereTally {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none() && self.confined + self.excluded == self.samples
    }
}

enum Trace {
    Confined,
    Excluded,
    Escaped(Box<Counterexample>),
}

fn trace_sphere(
    ctx: &MapContext,
    r: NormValue,
    target: NormValue,
    steps: usize,
    src: RandomSource,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Trace, AnalysisError> {
    let center = PadicNumber::zero(ctx.field(), ctx.cap());
    let start = sample_on_sphere(&center, r, rng)?;
    let mut x = start.clone();
    for n in 1..=steps {
        x = match eval_f(ctx, &x) {
            Ok(y) => y,
            Err(DynamicsError::PoleHit) | Err(DynamicsError::Padic(PadicError::PrecisionExhausted(_))) => {
                return Ok(Trace::Excluded)
            }
            Err(e) => return Err(e.into()),
        };
        if x.norm_bound() != NormBound::Exact(target) {
            let detail = format!("|f^{n}(x)| = p^-({}), expected p^-({target})", x.norm_bound().exponent_string());
            return Ok(Trace::Escaped(Box::new(Counterexample::new("sphere_confinement", ctx, &start, n, src, detail))));
        }
    }
    Ok(Trace::Confined)
}

/// Sample `S_r(0)` and check every iterate `n ≥ 1` lies on `S_φ(r)(0)`.
pub fn sphere_tally(
    ctx: &MapContext,
    r: NormValue,
    samples: usize,
    steps: usize,
    src: RandomSource,
) -> Result<SphereTally, AnalysisError> {
    if r == ctx.sqrt_a() || r.is_zero() {
        return Err(AnalysisError::OutOfDomain("sphere tallies need 0 < r ≠ sqrt(A)".into()));
    }
    let target = image_radius(ctx, r);
    let traces = par_samples(src, samples, |sub, rng| trace_sphere(ctx, r, target, steps, sub, rng));
    let mut tally = SphereTally { radius: r, image_radius: target, samples, confined: 0, excluded: 0, counterexample: None };
    for t in traces {
        match t? {
            Trace::Confined => tally.confined += 1,
            Trace::Excluded => tally.excluded += 1,
            Trace::Escaped(c) => {
                tally.counterexample.get_or_insert(*c);
            }
        }
    }
    Ok(tally)
}

#[derive(Clone, Debug, Serialize)]
pub struct SiegelReport {
    pub schema_version: u32,
    pub context: ContextSummary,
    pub disk: BallDescriptor,
    /// Spheres inside the disk: orbits stay on their sphere.
    pub inner: Vec<SphereTally>,
    /// Spheres outside: orbits jump to `S_{A/r}(0)` and stay there.
    pub outer: Vec<SphereTally>,
    pub passed: bool,
}

/// Monte Carlo certificate for the Siegel disk `U_√A(0)`.
pub fn siegel_certify(
    ctx: &MapContext,
    inner_radii: &[NormValue],
    outer_radii: &[NormValue],
    samples: usize,
    steps: usize,
    src: RandomSource,
) -> Result<SiegelReport, AnalysisError> {
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for (k, &r) in inner_radii.iter().chain(outer_radii).enumerate() {
        if !ctx.field().value_group_contains(r) {
            return Err(PadicError::RadiusNotRepresentable(r.exponent_string()).into());
        }
        let tally = sphere_tally(ctx, r, samples, steps, src.substream(k as u64))?;
        if r < ctx.sqrt_a() {
            inner.push(tally);
        } else {
            outer.push(tally);
        }
    }
    let passed = inner.iter().chain(&outer).all(SphereTally::passed);
    Ok(SiegelReport { schema_version: SCHEMA_VERSION, context: ctx.summary(), disk: siegel_disk(ctx), inner, outer, passed })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereVerdict {
    Invariant,
    NotInvariant,
    /// `r = √A`: invariance depends on `A*(x)` point by point.
    Boundary,
}

#[derive(Clone, Debug, Serialize)]
pub struct AstarCount {
    #[serde(rename = "astar_exp")]
    pub astar: NormValue,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereInvarianceReport {
    pub schema_version: u32,
    pub context: ContextSummary,
    #[serde(rename = "radius_exp")]
    pub radius: NormValue,
    pub sqrt_minus_a_in_qp: bool,
    pub theoretical: SphereVerdict,
    pub samples: usize,
    /// Samples whose whole orbit stayed on `S_r(0)`.
    pub stayed: usize,
    pub left: usize,
    pub excluded: usize,
    /// Distribution of `A*(x) = |f(x)|` over the samples (boundary radius only).
    pub astar_histogram: Vec<AstarCount>,
    pub confirmed: bool,
    pub counterexample: Option<Counterexample>,
}

enum SphereRun {
    Excluded,
    Ran { stayed: bool, first_image: NormValue, start: PadicNumber, src: RandomSource },
}

/// Invariance of `S_r(0)`: predicted for exactly `0 < r < √A`, checked by
/// sampling orbits.
pub fn invariant_sphere_test(
    ctx: &MapContext,
    r: NormValue,
    samples: usize,
    steps: usize,
    src: RandomSource,
) -> Result<SphereInvarianceReport, AnalysisError> {
    if r.is_zero() || !ctx.field().value_group_contains(r) {
        return Err(PadicError::RadiusNotRepresentable(r.exponent_string()).into());
    }
    let s = ctx.sqrt_a();
    let theoretical = match r.cmp(&s) {
        std::cmp::Ordering::Less => SphereVerdict::Invariant,
        std::cmp::Ordering::Greater => SphereVerdict::NotInvariant,
        std::cmp::Ordering::Equal => SphereVerdict::Boundary,
    };
    let minus_a = ctx.a().coords().0.neg();
    let sqrt_minus_a_in_qp = minus_a.is_square()?;
    let center = PadicNumber::zero(ctx.field(), ctx.cap());
    let runs = par_samples(src, samples, |sub, rng| -> Result<SphereRun, AnalysisError> {
        let start = sample_on_sphere(&center, r, rng)?;
        let mut x = start.clone();
        let mut first_image = None;
        let mut stayed = true;
        for _ in 0..steps {
            x = match eval_f(ctx, &x) {
                Ok(y) => y,
                Err(DynamicsError::PoleHit) | Err(DynamicsError::Padic(PadicError::PrecisionExhausted(_))) => {
                    return Ok(SphereRun::Excluded)
                }
                Err(e) => return Err(e.into()),
            };
            let Some(n) = x.norm_bound().exact() else { return Ok(SphereRun::Excluded) };
            first_image.get_or_insert(n);
            if n != r {
                stayed = false;
                break;
            }
        }
        Ok(SphereRun::Ran { stayed, first_image: first_image.unwrap_or(r), start, src: sub })
    });

    let mut report = SphereInvarianceReport {
        schema_version: SCHEMA_VERSION,
        context: ctx.summary(),
        radius: r,
        sqrt_minus_a_in_qp,
        theoretical,
        samples,
        stayed: 0,
        left: 0,
        excluded: 0,
        astar_histogram: Vec::new(),
        confirmed: true,
        counterexample: None,
    };
    let mut histogram: BTreeMap<NormValue, usize> = BTreeMap::new();
    for run in runs {
        match run? {
            SphereRun::Excluded => report.excluded += 1,
            SphereRun::Ran { stayed, first_image, start, src } => {
                if stayed {
                    report.stayed += 1;
                } else {
                    report.left += 1;
                }
                let bad = match theoretical {
                    SphereVerdict::Invariant => (!stayed).then(|| "orbit left an invariant sphere".to_string()),
                    SphereVerdict::NotInvariant => (first_image != ctx.big_a().div(r).expect("r > 0"))
                        .then(|| format!("first image on p^-({first_image}), expected A/r")),
                    SphereVerdict::Boundary => {
                        *histogram.entry(first_image).or_default() += 1;
                        (first_image < s).then(|| format!("A*(x) = p^-({first_image}) is below sqrt(A)"))
                    }
                };
                if let Some(detail) = bad {
                    report.confirmed = false;
                    report
                        .counterexample
                        .get_or_insert_with(|| Counterexample::new("sphere_invariance", ctx, &start, 1, src, detail));
                }
            }
        }
    }
    report.astar_histogram = histogram.into_iter().rev().map(|(astar, count)| AstarCount { astar, count }).collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ExactValue;

    fn q5() -> MapContext {
        MapContext::over_qp(5, ExactValue::int(-1), 64).unwrap()
    }

    #[test]
    fn disk_radius_is_sqrt_a() {
        assert_eq!(siegel_disk(&q5()).radius, NormValue::ONE);
        let ctx = MapContext::over_qp(5, ExactValue::int(25), 32).unwrap();
        assert_eq!(siegel_disk(&ctx).radius, NormValue::from_exponent(1));
    }

    #[test]
    fn radii_straddle_sqrt_a() {
        let (inner, outer) = radii_around(&q5(), 2, 2);
        assert_eq!(inner, vec![NormValue::from_exponent(1), NormValue::from_exponent(2)]);
        assert_eq!(outer, vec![NormValue::from_exponent(-1), NormValue::from_exponent(-2)]);
        let ctx = MapContext::over_qp(5, ExactValue::int(5), 32).unwrap();
        let (inner, outer) = radii_around(&ctx, 1, 1);
        assert_eq!(inner, vec![NormValue::from_exponent(1)]);
        assert_eq!(outer, vec![NormValue::from_exponent(0)]);
    }

    #[test]
    fn membership_examples() {
        let ctx = q5();
        let pole = ctx.poles().unwrap()[0].clone();
        assert_eq!(exclusion_membership(&ctx, &pole, 4).unwrap(), Membership::Member(0));
        let five = ctx.from_rational(5, 1).unwrap();
        assert_eq!(exclusion_membership(&ctx, &five, 4).unwrap(), Membership::NonMember);
    }

    #[test]
    fn preimage_of_pole_is_member_one() {
        // f(x) = q with q² = −a gives x = a(1 ± √5)/(2q); √5 lies in Q_11.
        let ctx = MapContext::with_poles(11, ExactValue::int(-1), 32).unwrap();
        let preimage = |c: &MapContext| -> Result<PadicNumber, DynamicsError> {
            let q = c.poles().expect("poles in Q_11")[0].clone();
            let root5 = c.from_rational(5, 1)?.sqrt()?;
            let num = c.a().mul(&c.from_rational(1, 1)?.add(&root5)?)?;
            Ok(num.div(&q.add(&q)?)?)
        };
        let x = preimage(&ctx).unwrap();
        assert!(eval_f(&ctx, &x).unwrap().agrees_with(&ctx.poles().unwrap()[0]));
        assert_eq!(exclusion_membership_lifted(&ctx, preimage, 4).unwrap(), Membership::Member(1));
    }

    #[test]
    fn sphere_verdicts() {
        let ctx = q5();
        let src = RandomSource::new(0xA);
        let rep = invariant_sphere_test(&ctx, NormValue::from_exponent(1), 100, 30, src).unwrap();
        assert_eq!(rep.theoretical, SphereVerdict::Invariant);
        assert!(rep.confirmed && rep.stayed == 100);
        let rep = invariant_sphere_test(&ctx, NormValue::from_exponent(-1), 100, 30, src).unwrap();
        assert_eq!(rep.theoretical, SphereVerdict::NotInvariant);
        assert!(rep.confirmed && rep.left == 100);
        let rep = invariant_sphere_test(&ctx, NormValue::ONE, 200, 30, src).unwrap();
        assert_eq!(rep.theoretical, SphereVerdict::Boundary);
        assert!(rep.confirmed);
        assert!(rep.astar_histogram.len() > 1, "{:?}", rep.astar_histogram);
    }

    #[test]
    fn siegel_certificate() {
        let ctx = q5();
        let (inner, outer) = radii_around(&ctx, 2, 2);
        let rep = siegel_certify(&ctx, &inner, &outer, 50, 20, RandomSource::new(1)).unwrap();
        assert!(rep.passed, "{rep:?}");
    }
}
