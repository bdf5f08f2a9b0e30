use super::context::MapContext;
use super::error::DynamicsError;
use crate::padic::{PadicError, PadicNumber};

fn checked_div(num: &PadicNumber, den: &PadicNumber) -> Result<PadicNumber, DynamicsError> {
    if den.is_zero_to_precision() {
        return Err(DynamicsError::PoleHit);
    }
    match num.div(den) {
        Err(PadicError::DivisionByZeroToPrecision) => Err(DynamicsError::PoleHit),
        other => Ok(other?),
    }
}

/// `f(x) = a·x / (x² + a)`.
pub fn eval_f(ctx: &MapContext, x: &PadicNumber) -> Result<PadicNumber, DynamicsError> {
    let a = ctx.a();
    let den = x.square()?.add(a)?;
    checked_div(&a.mul(x)?, &den)
}

/// `g = f∘f` through its closed form `(a x³ + a² x) / (x⁴ + 3a x² + a²)`.
pub fn eval_g_closed(ctx: &MapContext, x: &PadicNumber) -> Result<PadicNumber, DynamicsError> {
    let a = ctx.a();
    let x2 = x.square()?;
    let a2 = a.square()?;
    let num = a.mul(&x2)?.add(&a2)?.mul(x)?;
    let three_a = a.mul(&ctx.from_rational(3, 1)?)?;
    let den = x2.square()?.add(&three_a.mul(&x2)?)?.add(&a2)?;
    checked_div(&num, &den)
}

/// `g(x) = f(f(x))`, computed by composition and by the closed form; the two must
/// agree to the surviving precision.
pub fn eval_g(ctx: &MapContext, x: &PadicNumber) -> Result<PadicNumber, DynamicsError> {
    let composed = eval_f(ctx, &eval_f(ctx, x)?)?;
    let closed = eval_g_closed(ctx, x)?;
    if !composed.agrees_with(&closed) {
        return Err(DynamicsError::CrossCheckFailed(format!(
            "f(f(x)) = {composed:?} but the closed form gives {closed:?}"
        )));
    }
    Ok(composed)
}

/// `f'(x) = a (a − x²) / (x² + a)²`.
pub fn derivative_f(ctx: &MapContext, x: &PadicNumber) -> Result<PadicNumber, DynamicsError> {
    let a = ctx.a();
    let x2 = x.square()?;
    let den = x2.add(a)?.square()?;
    checked_div(&a.mul(&a.sub(&x2)?)?, &den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ExactValue;
    use crate::padic::{sample_on_sphere, NormValue, RandomSource};

    fn q5() -> MapContext {
        MapContext::over_qp(5, ExactValue::int(-1), 32).unwrap()
    }

    #[test]
    fn f_on_rationals() {
        // a = -1: f(x) = -x/(x² - 1), so f(5) = -5/24 and f(1/5) = 5/24.
        let ctx = q5();
        let fx = eval_f(&ctx, &ctx.from_rational(5, 1).unwrap()).unwrap();
        assert_eq!(fx, ctx.from_rational(-5, 24).unwrap());
        assert_eq!(fx.norm().unwrap(), NormValue::from_exponent(1));
        let fx = eval_f(&ctx, &ctx.from_rational(1, 5).unwrap()).unwrap();
        assert!(fx.agrees_with(&ctx.from_rational(5, 24).unwrap()));
        let zero = ctx.from_rational(0, 1).unwrap();
        assert!(eval_f(&ctx, &zero).unwrap().is_exact_zero());
    }

    #[test]
    fn poles_are_reported() {
        let ctx = q5();
        let one = ctx.from_rational(1, 1).unwrap();
        assert_eq!(eval_f(&ctx, &one), Err(DynamicsError::PoleHit));
    }

    #[test]
    fn g_paths_agree() {
        let ctx = MapContext::over_qp(7, ExactValue::int(-1), 40).unwrap();
        let src = RandomSource::new(0xA);
        let center = ctx.from_rational(0, 1).unwrap();
        for i in 0..200 {
            let r = NormValue::from_exponent((i % 5) as i64 - 2);
            let x = sample_on_sphere(&center, r, &mut src.substream(i).rng()).unwrap();
            match eval_g(&ctx, &x) {
                Ok(_) | Err(DynamicsError::PoleHit) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn derivative_at_fixed_point_is_one() {
        let ctx = q5();
        let d = derivative_f(&ctx, &ctx.from_rational(0, 1).unwrap()).unwrap();
        assert_eq!(d, ctx.from_rational(1, 1).unwrap());
    }
}
