use serde::{Serialize, Serializer};

use super::context::MapContext;
use super::error::DynamicsError;
use super::map::eval_f;
use crate::padic::{NormBound, PadicNumber};

fn bound_as_exp<S: Serializer>(b: &NormBound, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&b.exponent_string())
}

fn bounds_as_exp<S: Serializer>(bs: &[NormBound], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(bs.iter().map(|b| b.exponent_string()))
}

/// Why an orbit computation stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "step", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// `x_n` is a pole: `x_n² + a` vanishes at working precision and still does
    /// when the computation is repeated at twice the precision.
    HitPoleAtStep(usize),
    /// `x_n² + a` vanished at working precision but not at twice the precision,
    /// or some other operation ran out of digits.
    PrecisionExhaustedAtStep(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitEntry {
    pub n: usize,
    pub x: PadicNumber,
    #[serde(rename = "norm_exp", serialize_with = "bound_as_exp")]
    pub norm: NormBound,
    #[serde(serialize_with = "bounds_as_exp")]
    pub ref_dists: Vec<NormBound>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub start: PadicNumber,
    pub a: PadicNumber,
    pub p: u64,
    pub field: String,
    pub precision: u32,
    pub entries: Vec<OrbitEntry>,
    pub termination: Termination,
}

impl OrbitRecord {
    pub fn points(&self) -> impl Iterator<Item = &PadicNumber> {
        self.entries.iter().map(|e| &e.x)
    }

    pub fn norms(&self) -> Vec<NormBound> {
        self.entries.iter().map(|e| e.norm).collect()
    }

    pub fn last(&self) -> &PadicNumber {
        &self.entries.last().expect("orbit records hold the start point").x
    }
}

enum Stop {
    Done,
    Pole(usize),
    Precision(usize),
}

fn run(
    ctx: &MapContext,
    start: PadicNumber,
    n_max: usize,
    refs: &[PadicNumber],
    entries: &mut Vec<OrbitEntry>,
) -> Result<Stop, DynamicsError> {
    let entry = |n: usize, x: PadicNumber| -> Result<OrbitEntry, DynamicsError> {
        let ref_dists = refs.iter().map(|r| x.distance(r)).collect::<Result<Vec<_>, _>>()?;
        Ok(OrbitEntry { n, norm: x.norm_bound(), ref_dists, x })
    };
    let mut x = start;
    entries.push(entry(0, x.clone())?);
    for n in 0..n_max {
        match eval_f(ctx, &x) {
            Ok(y) => {
                x = y;
                entries.push(entry(n + 1, x.clone())?);
            }
            Err(DynamicsError::PoleHit) => return Ok(Stop::Pole(n)),
            Err(DynamicsError::Padic(crate::padic::PadicError::IncompatibleField { left, right })) => {
                return Err(crate::padic::PadicError::IncompatibleField { left, right }.into())
            }
            Err(_) => return Ok(Stop::Precision(n)),
        }
    }
    Ok(Stop::Done)
}

/// Re-run at twice the precision and report whether `x_n` is still a pole.
pub(crate) fn pole_confirmed<F>(ctx: &MapContext, start_at: &F, n: usize) -> bool
where
    F: Fn(&MapContext) -> Result<PadicNumber, DynamicsError>,
{
    let Ok(big) = ctx.with_precision(2 * ctx.cap()) else { return false };
    let Ok(mut x) = start_at(&big) else { return false };
    for _ in 0..n {
        match eval_f(&big, &x) {
            Ok(y) => x = y,
            Err(DynamicsError::PoleHit) => return true,
            Err(_) => return false,
        }
    }
    matches!(eval_f(&big, &x), Err(DynamicsError::PoleHit))
}

/// Iterate `f` from `start` for up to `n_max` steps.
///
/// A pole hit at working precision is re-checked at twice the precision, with
/// the start point zero-padded (or, if it is one of the poles, replaced by the
/// same pole computed to the higher precision).
pub fn iterate_orbit(
    ctx: &MapContext,
    start: &PadicNumber,
    n_max: usize,
    refs: &[PadicNumber],
) -> Result<OrbitRecord, DynamicsError> {
    let start = ctx.embed(start)?;
    let lift = |c: &MapContext| -> Result<PadicNumber, DynamicsError> {
        if c.cap() == ctx.cap() {
            Ok(start.clone())
        } else {
            Ok(c.lift_from(ctx, &start)?)
        }
    };
    iterate_orbit_lifted(ctx, lift, n_max, refs)
}

/// As [`iterate_orbit`], with the start point produced by `start_at` at whatever
/// precision the context asks for. Use this for points known by a formula, such
/// as preimages of a pole.
pub fn iterate_orbit_lifted<F>(
    ctx: &MapContext,
    start_at: F,
    n_max: usize,
    refs: &[PadicNumber],
) -> Result<OrbitRecord, DynamicsError>
where
    F: Fn(&MapContext) -> Result<PadicNumber, DynamicsError>,
{
    if n_max == 0 {
        return Err(DynamicsError::OutOfDomain("an orbit needs at least one step".into()));
    }
    let start = start_at(ctx)?;
    let mut entries = Vec::with_capacity(n_max + 1);
    let termination = match run(ctx, start.clone(), n_max, refs, &mut entries)? {
        Stop::Done => Termination::Completed,
        Stop::Precision(n) => Termination::PrecisionExhaustedAtStep(n),
        Stop::Pole(n) if pole_confirmed(ctx, &start_at, n) => Termination::HitPoleAtStep(n),
        Stop::Pole(n) => Termination::PrecisionExhaustedAtStep(n),
    };
    Ok(OrbitRecord {
        start,
        a: ctx.a().clone(),
        p: ctx.p(),
        field: ctx.field().to_string(),
        precision: ctx.cap(),
        entries,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ExactValue;
    use crate::padic::NormValue;

    fn ctx() -> MapContext {
        MapContext::over_qp(5, ExactValue::int(-1), 64).unwrap()
    }

    #[test]
    fn inside_the_disk_norms_freeze() {
        let ctx = ctx();
        let rec = iterate_orbit(&ctx, &ctx.from_rational(25, 1).unwrap(), 100, &[]).unwrap();
        assert_eq!(rec.termination, Termination::Completed);
        assert_eq!(rec.entries.len(), 101);
        assert!(rec.norms().iter().all(|n| *n == NormBound::Exact(NormValue::from_exponent(2))));
    }

    #[test]
    fn outside_the_disk_lands_on_the_reflected_sphere() {
        let ctx = ctx();
        let rec = iterate_orbit(&ctx, &ctx.from_rational(1, 5).unwrap(), 100, &[]).unwrap();
        assert_eq!(rec.termination, Termination::Completed);
        assert!(rec.norms()[1..].iter().all(|n| *n == NormBound::Exact(NormValue::from_exponent(1))));
    }

    #[test]
    fn pole_start_is_confirmed() {
        let ctx = ctx();
        let rec = iterate_orbit(&ctx, &ctx.from_rational(1, 1).unwrap(), 10, &[]).unwrap();
        assert_eq!(rec.termination, Termination::HitPoleAtStep(0));
        let ctx = MapContext::with_poles(7, ExactValue::int(-2), 32).unwrap();
        let pole = ctx.poles().unwrap()[0].clone();
        let rec = iterate_orbit(&ctx, &pole, 10, &[]).unwrap();
        assert_eq!(rec.termination, Termination::HitPoleAtStep(0));
    }

    #[test]
    fn near_pole_is_only_precision_loss() {
        // 1 + 5^20 agrees with the pole 1 to 16 digits but not to 32.
        let ctx = MapContext::over_qp(5, ExactValue::int(-1), 16).unwrap();
        let near = |c: &MapContext| -> Result<PadicNumber, DynamicsError> {
            Ok(c.from_rational(1 + 5i64.pow(20), 1)?)
        };
        let rec = iterate_orbit_lifted(&ctx, near, 5, &[]).unwrap();
        assert_eq!(rec.termination, Termination::PrecisionExhaustedAtStep(0));
    }

    #[test]
    fn record_serializes() {
        let ctx = ctx();
        let refs = [ctx.from_rational(0, 1).unwrap()];
        let rec = iterate_orbit(&ctx, &ctx.from_rational(5, 1).unwrap(), 2, &refs).unwrap();
        let json = serde_json::to_value(&rec).unwrap();
        assert_eq!(json["entries"][1]["norm_exp"], "1/1");
        assert_eq!(json["entries"][0]["ref_dists"][0], "1/1");
        assert_eq!(json["termination"]["kind"], "completed");
    }
}
