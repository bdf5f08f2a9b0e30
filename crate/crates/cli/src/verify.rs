use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use padic_dyn::analysis::{
    ball_image_check, conjugate_reduce, cycle_attraction_check_p3, cycle_sphere_swap_check, ergodicity_report,
    invariant_sphere_test, minimal_invariant_ball, radii_around, rho_check, rho_of_r, siegel_certify, solve_two_cycle,
    unique_fixed_point_test, AnalysisError, CanonicalForm, Counterexample, ErgodicityVerdict, RationalMapParams,
    TwoCycleContext,
};
use padic_dyn::dynamics::{radius_law_check, LawVerdict, MapContext};
use padic_dyn::padic::sample_on_sphere;
use padic_dyn::{NormValue, PadicNumber, Qp, RandomSource};

use crate::config::ExperimentConfig;
use crate::error::{CliError, ExitStatus};
use crate::output::{row, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    RadiusLaw,
    Spheres,
    BallImage,
    Ergodicity,
    CyclesP2,
    CyclesP3,
    CyclesP5,
    FixedPoint,
}

impl Suite {
    fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

/// Inputs a suite may use beyond the shared configuration.
pub struct SuiteInputs<'a> {
    pub r: Option<&'a str>,
    pub x: Option<&'a str>,
}

fn pass_if(ok: bool) -> ExitStatus {
    if ok {
        ExitStatus::Pass
    } else {
        ExitStatus::Counterexample
    }
}

pub fn run(cfg: &ExperimentConfig, suite: Suite, inputs: &SuiteInputs) -> Result<Report, CliError> {
    let src = RandomSource::new(cfg.seed);
    let name = format!("verify {}", suite.name());
    match suite {
        Suite::RadiusLaw => radius_law(cfg, inputs, src, &name),
        Suite::Spheres => spheres(cfg, inputs, src, &name),
        Suite::BallImage => ball_image(cfg, inputs, src, &name),
        Suite::Ergodicity => ergodicity(cfg, inputs, src, &name),
        Suite::CyclesP2 | Suite::CyclesP3 | Suite::CyclesP5 => cycles(cfg, suite, inputs, src, &name),
        Suite::FixedPoint => fixed_point(cfg, src, &name),
    }
}

#[derive(Serialize)]
struct RadiusLawSummary {
    radii: Vec<NormValue>,
    samples: usize,
    steps: usize,
    holds: usize,
    hit_pole: usize,
    precision_exhausted: usize,
    violated: usize,
    counterexample: Option<Counterexample>,
}

fn radius_law(cfg: &ExperimentConfig, inputs: &SuiteInputs, src: RandomSource, name: &str) -> Result<Report, CliError> {
    let ctx = cfg.context()?;
    let radii: Vec<NormValue> = match inputs.r {
        Some(t) => vec![cfg.radius(t)?],
        None => (-3..=3).map(NormValue::from_exponent).collect(),
    };
    let zero = PadicNumber::zero(ctx.field(), ctx.cap());
    let results: Vec<_> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| -> Result<_, CliError> {
            let sub = src.substream(i);
            let r = radii[i as usize % radii.len()];
            let x = sample_on_sphere(&zero, r, &mut sub.rng())?;
            Ok((sub, r, radius_law_check(&ctx, &x, cfg.steps)?))
        })
        .collect();
    let mut summary = RadiusLawSummary {
        radii: radii.clone(),
        samples: cfg.samples,
        steps: cfg.steps,
        holds: 0,
        hit_pole: 0,
        precision_exhausted: 0,
        violated: 0,
        counterexample: None,
    };
    let mut rows = Vec::new();
    for (i, res) in results.into_iter().enumerate() {
        let (sub, r, rep) = res?;
        match rep.verdict {
            LawVerdict::Holds => summary.holds += 1,
            LawVerdict::HitPole => summary.hit_pole += 1,
            LawVerdict::PrecisionExhausted => summary.precision_exhausted += 1,
            LawVerdict::Violated => {
                summary.violated += 1;
                if summary.counterexample.is_none() {
                    let v = rep.violation.as_ref().expect("violations carry details");
                    let detail = format!(
                        "|f(x_k)| = p^-({}), radius law predicts {}",
                        v.observed,
                        v.expected.map_or("A* >= sqrt(A)".to_string(), |e| format!("p^-({e})"))
                    );
                    summary.counterexample = Some(Counterexample::new("radius_law", &ctx, &rep.start, v.step, sub, detail));
                }
            }
        }
        rows.push(row([
            ("sample", i.to_string()),
            ("stream", sub.stream.to_string()),
            ("radius_exp", r.exponent_string()),
            ("verdict", format!("{:?}", rep.verdict)),
            ("steps_checked", rep.steps_checked.to_string()),
        ]));
    }
    let status = pass_if(summary.violated == 0);
    Ok(Report::new(name, status, summary)?.with_rows(rows))
}

fn spheres(cfg: &ExperimentConfig, inputs: &SuiteInputs, src: RandomSource, name: &str) -> Result<Report, CliError> {
    let ctx = cfg.context()?;
    if let Some(t) = inputs.r {
        let rep = invariant_sphere_test(&ctx, cfg.radius(t)?, cfg.samples, cfg.steps, src)?;
        return Report::new(name, pass_if(rep.confirmed), rep);
    }
    let (inner, outer) = radii_around(&ctx, 3, 3);
    let rep = siegel_certify(&ctx, &inner, &outer, cfg.samples, cfg.steps, src)?;
    let rows = rep
        .inner
        .iter()
        .chain(&rep.outer)
        .map(|t| {
            row([
                ("radius_exp", t.radius.exponent_string()),
                ("image_radius_exp", t.image_radius.exponent_string()),
                ("samples", t.samples.to_string()),
                ("confined", t.confined.to_string()),
                ("excluded", t.excluded.to_string()),
                ("passed", t.passed().to_string()),
            ])
        })
        .collect();
    Ok(Report::new(name, pass_if(rep.passed), &rep)?.with_rows(rows))
}

/// The largest radius inside the Siegel disk, the default sphere for ball suites.
fn default_radius(ctx: &MapContext) -> NormValue {
    radii_around(ctx, 1, 0).0[0]
}

fn ball_image(cfg: &ExperimentConfig, inputs: &SuiteInputs, src: RandomSource, name: &str) -> Result<Report, CliError> {
    let ctx = cfg.context()?;
    let center = match (inputs.x, inputs.r) {
        (Some(t), _) => cfg.literal(&ctx, t)?,
        (None, r) => {
            let r = r.map(|t| cfg.radius(t)).transpose()?.unwrap_or_else(|| default_radius(&ctx));
            let zero = PadicNumber::zero(ctx.field(), ctx.cap());
            sample_on_sphere(&zero, r, &mut src.substream(u64::MAX).rng())?
        }
    };
    let r = center.norm()?;
    let rho = rho_of_r(&ctx, r)?;
    let isometry = ball_image_check(&ctx, &center, rho, cfg.samples, src.substream(1))?;
    let rho_report = rho_check(&ctx, r, cfg.samples, src.substream(2))?;
    let minimal = minimal_invariant_ball(&ctx, &center, cfg.steps, cfg.samples, src.substream(3))?;
    let ok = isometry.passed() && rho_report.passed() && minimal.passed();
    Report::new(name, pass_if(ok), serde_json::json!({
        "isometry": isometry,
        "rho": rho_report,
        "minimal_ball": minimal,
    }))
}

fn ergodicity(cfg: &ExperimentConfig, inputs: &SuiteInputs, src: RandomSource, name: &str) -> Result<Report, CliError> {
    let ctx = cfg.context()?;
    let r = inputs.r.map(|t| cfg.radius(t)).transpose()?.unwrap_or_else(|| default_radius(&ctx));
    let rep = ergodicity_report(&ctx, r, cfg.samples, cfg.steps, src)?;
    let ok = rep.verdict == ErgodicityVerdict::NotErgodic && rep.counterexample.is_none();
    Report::new(name, pass_if(ok), rep)
}

/// Radii the suite samples by default: the first four admissible ones.
fn cycle_radii(cyc: &TwoCycleContext, suite: Suite) -> Vec<NormValue> {
    let ctx = &cyc.ctx;
    let s = ctx.sqrt_a().twice_exponent().expect("a != 0");
    let step = if ctx.field().is_ramified() { 1 } else { 2 };
    let first = if suite == Suite::CyclesP2 { s + 3 } else { s + 1 };
    let first = first + (step - first.rem_euclid(step)) % step;
    (0..4).map(|j| NormValue::from_twice_exponent(first + j * step)).collect()
}

fn cycles(
    cfg: &ExperimentConfig,
    suite: Suite,
    inputs: &SuiteInputs,
    src: RandomSource,
    name: &str,
) -> Result<Report, CliError> {
    let fits = match suite {
        Suite::CyclesP2 => cfg.p == 2,
        Suite::CyclesP3 => cfg.p == 3,
        _ => cfg.p >= 5,
    };
    if !fits {
        return Err(CliError::Invalid(format!("suite {} does not apply to p = {}", suite.name(), cfg.p)));
    }
    let cyc = solve_two_cycle(&cfg.context()?)?;
    let radii = match inputs.r {
        Some(t) => vec![cfg.radius(t)?],
        None => cycle_radii(&cyc, suite),
    };
    let mut ok = cyc.verified();
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (k, &r) in radii.iter().enumerate() {
        let sub = src.substream(k as u64);
        if suite == Suite::CyclesP3 {
            let n_double = cfg.steps.div_ceil(2);
            let rep = cycle_attraction_check_p3(&cyc, r, cfg.samples, n_double, sub, cfg.depth)?;
            ok &= rep.passed();
            rows.push(row([
                ("radius_exp", r.exponent_string()),
                ("checked", rep.checked.to_string()),
                ("excluded", (rep.excluded_members + rep.excluded_unknown).to_string()),
                ("boundary_visits", rep.boundary_visits.to_string()),
                ("passed", rep.passed().to_string()),
            ]));
            checks.push(serde_json::to_value(rep)?);
        } else {
            let rep = cycle_sphere_swap_check(&cyc, r, cfg.samples, sub, cfg.depth)?;
            ok &= rep.passed();
            for d in &rep.directions {
                rows.push(row([
                    ("radius_exp", r.exponent_string()),
                    ("from", d.from.clone()),
                    ("checked", d.checked.to_string()),
                    ("excluded", (d.excluded_members + d.excluded_unknown).to_string()),
                    ("passed", d.counterexample.is_none().to_string()),
                ]));
            }
            checks.push(serde_json::to_value(rep)?);
        }
    }
    let body = serde_json::json!({ "cycle": cyc, "checks": checks });
    Ok(Report::new(name, pass_if(ok), body)?.with_rows(rows))
}

#[derive(Serialize)]
struct FixedPointSummary {
    samples: usize,
    unique: usize,
    reduced_to_canonical: usize,
    perturbation_flipped: usize,
    failures: Vec<String>,
}

fn fixed_point(cfg: &ExperimentConfig, src: RandomSource, name: &str) -> Result<Report, CliError> {
    let field = cfg.base_field();
    let zero = PadicNumber::zero(&field, cfg.precision);
    let outcomes: Vec<_> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| -> Result<(bool, bool, bool, Option<String>), AnalysisError> {
            let mut rng = src.substream(i).rng();
            let a = sample_on_sphere(&zero, NormValue::from_exponent(i as i64 % 5 - 2), &mut rng)?;
            let c = if i % 5 == 0 {
                zero.clone()
            } else {
                sample_on_sphere(&zero, NormValue::from_exponent((i as i64 / 5) % 5 - 2), &mut rng)?
            };
            let params = RationalMapParams::with_unique_fixed_point(a.clone(), c.clone())?;
            let unique = unique_fixed_point_test(&params)?.unique;
            let canonical = match conjugate_reduce(&params)?.canonical {
                CanonicalForm::Fe { a: got } => c.is_exact_zero() && got.agrees_with(&a),
                CanonicalForm::OutOfScopeTwoTwo { .. } => !c.is_exact_zero(),
            };
            let b = params.coefficients()[1].clone();
            let pos = b.as_qp().and_then(Qp::valuation).unwrap_or(0);
            let bumped = b.add(&PadicNumber::from_qp(&field, Qp::one(cfg.p, cfg.precision).shift(pos)))?;
            let flipped = !unique_fixed_point_test(&params.with_b(bumped))?.unique;
            let failure = (!(unique && canonical && flipped)).then(|| {
                format!("sample {i} (stream {}): unique={unique} canonical={canonical} flipped={flipped}", src.substream(i).stream)
            });
            Ok((unique, canonical, flipped, failure))
        })
        .collect();
    let mut summary = FixedPointSummary {
        samples: cfg.samples,
        unique: 0,
        reduced_to_canonical: 0,
        perturbation_flipped: 0,
        failures: Vec::new(),
    };
    for o in outcomes {
        let (unique, canonical, flipped, failure) = o?;
        summary.unique += unique as usize;
        summary.reduced_to_canonical += canonical as usize;
        summary.perturbation_flipped += flipped as usize;
        summary.failures.extend(failure);
    }
    let status = pass_if(summary.failures.is_empty());
    Report::new(name, status, summary)
}

