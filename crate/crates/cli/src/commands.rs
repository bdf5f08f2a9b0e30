use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use padic_dyn::analysis::{
    conjugate_reduce, haar_measure_ball, rho_of_r, unique_fixed_point_test, FixedPointReport, RationalMapParams, Reduction,
};
use padic_dyn::dynamics::{
    iterate_orbit_lifted, phi_a, phi_a_limit, two_step_radius_map_p3, DynamicsError, MapContext, RadiusOracle,
    Termination,
};
use padic_dyn::padic::{parse_literal, DigitObject};
use padic_dyn::NormValue;

use crate::config::ExperimentConfig;
use crate::error::{CliError, ExitStatus};
use crate::output::{row, Report};

fn digits(x: &padic_dyn::PadicNumber) -> String {
    serde_json::to_string(&DigitObject::from_number(x)).expect("digit objects serialize")
}

pub fn orbit(cfg: &ExperimentConfig, x: &str, refs: &[String]) -> Result<Report, CliError> {
    let ctx = cfg.context()?;
    cfg.literal(&ctx, x)?;
    let refs = refs.iter().map(|r| cfg.literal(&ctx, r)).collect::<Result<Vec<_>, _>>()?;
    let start = |c: &MapContext| -> Result<_, DynamicsError> { Ok(parse_literal(x, c.field(), c.cap())?) };
    let record = iterate_orbit_lifted(&ctx, start, cfg.steps, &refs)?;
    let status = match record.termination {
        Termination::PrecisionExhaustedAtStep(_) => ExitStatus::PrecisionExhausted,
        _ => ExitStatus::Pass,
    };
    let rows = record
        .entries
        .iter()
        .map(|entry| {
            let mut r = row([
                ("n", entry.n.to_string()),
                ("x", digits(&entry.x)),
                ("norm_exp", entry.norm.exponent_string()),
            ]);
            for (i, d) in entry.ref_dists.iter().enumerate() {
                r.insert(format!("ref_dist_{i}"), d.exponent_string());
            }
            r
        })
        .collect();
    Ok(Report::new("orbit", status, &record)?.with_rows(rows))
}

#[derive(Serialize)]
struct ReduceOutput {
    fixed_point: FixedPointReport,
    reduction: Option<Reduction>,
}

pub fn reduce(cfg: &ExperimentConfig, coeffs: &str) -> Result<Report, CliError> {
    let field = cfg.base_field();
    let parts: Vec<&str> = coeffs.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::Invalid(format!("--coeffs needs four values a,b,c,d, got {coeffs:?}")));
    }
    let values = parts
        .iter()
        .map(|t| parse_literal(t, &field, cfg.precision))
        .collect::<Result<Vec<_>, _>>()?;
    let [a, b, c, d]: [_; 4] = values.try_into().expect("four parts");
    let params = RationalMapParams::new(a, b, c, d)?;
    let fixed_point = unique_fixed_point_test(&params)?;
    let reduction = if fixed_point.unique { Some(conjugate_reduce(&params)?) } else { None };
    Report::new("reduce", ExitStatus::Pass, ReduceOutput { fixed_point, reduction })
}

#[derive(Serialize)]
struct PhiOutput {
    big_a_exp: NormValue,
    sqrt_a_exp: NormValue,
    r_exp: NormValue,
    phi_exp: NormValue,
    limit_exp: NormValue,
    /// One step of the p = 3 cycle radius map, when `r < √A`.
    cycle_step_p3: Option<String>,
}

pub fn phi(cfg: &ExperimentConfig, r: Option<&str>, astar: Option<&str>, x: Option<&str>) -> Result<Report, CliError> {
    let ctx = cfg.context()?;
    let point = x.map(|t| cfg.literal(&ctx, t)).transpose()?;
    let r = match (r, &point) {
        (Some(t), _) => cfg.radius(t)?,
        (None, Some(x)) => x.norm()?,
        (None, None) => return Err(CliError::Invalid("phi needs --r or --x".into())),
    };
    let oracle = match astar {
        Some(t) => RadiusOracle::supplied(ctx.big_a(), cfg.radius(t)?)?,
        None => RadiusOracle::per_point(&ctx),
    };
    let cycle_step_p3 = if cfg.p == 3 && !r.is_zero() && r < ctx.sqrt_a() {
        Some(two_step_radius_map_p3(ctx.big_a(), r)?.exponent_string())
    } else {
        None
    };
    let out = PhiOutput {
        big_a_exp: ctx.big_a(),
        sqrt_a_exp: ctx.sqrt_a(),
        r_exp: r,
        phi_exp: phi_a(&oracle, r, point.as_ref())?,
        limit_exp: phi_a_limit(&oracle, r, point.as_ref())?,
        cycle_step_p3,
    };
    Report::new("phi", ExitStatus::Pass, out)
}

fn rational(q: &BigRational) -> serde_json::Value {
    json!({ "num": q.numer().to_string(), "den": q.denom().to_string() })
}

pub fn measure(cfg: &ExperimentConfig, r: &str, rho: Option<&str>) -> Result<Report, CliError> {
    let r = cfg.radius(r)?;
    let (rho, ctx) = match (rho, &cfg.a) {
        (Some(t), _) => (cfg.radius(t)?, None),
        (None, Some(_)) => {
            let ctx = cfg.context()?;
            (rho_of_r(&ctx, r)?, Some(ctx))
        }
        (None, None) => return Err(CliError::Invalid("measure needs --rho or --a".into())),
    };
    let mu = haar_measure_ball(cfg.p, r, rho)?;
    let p = BigRational::from_integer(cfg.p.into());
    let bound = BigRational::from_integer(1.into()) / (&p * (&p - BigRational::from_integer(1.into())));
    let mut body = json!({
        "r_exp": r,
        "rho_exp": rho,
        "measure": rational(&mu),
        "measure_f64": mu.to_f64(),
    });
    if let Some(ctx) = ctx {
        body["bound"] = rational(&bound);
        body["within_bound"] = json!(mu <= bound);
        body["bound_attained"] = json!(r.scale_half(-2) == ctx.sqrt_a());
    }
    Report::new("measure", ExitStatus::Pass, body)
}
