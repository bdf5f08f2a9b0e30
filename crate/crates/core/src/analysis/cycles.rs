use serde::Serialize;

use super::error::AnalysisError;
use super::report::{par_samples, Counterexample, SCHEMA_VERSION};
use super::siegel::{exclusion_membership, Membership, UnknownReason};
use crate::dynamics::{derivative_f, eval_f, eval_g, two_step_radius_map_p3, ContextSummary, MapContext};
use crate::padic::{sample_on_sphere, sqrt_in_field, NormBound, NormValue, PadicNumber, Qp, RandomSource};

/// One of the six points where `g = f∘f` is undefined.
#[derive(Clone, Debug, Serialize)]
pub struct PoleEntry {
    /// `±√(−a)` or `±√((−3 ± √5)a/2)`.
    pub label: String,
    pub value: Option<PadicNumber>,
    pub in_working_field: bool,
    /// For the four preimage poles: `f` of the point is a pole of `f`.
    pub maps_to_pole: Option<bool>,
    pub note: Option<String>,
}

/// The 2-cycle `t₁ = √(−2a) ↦ t₂ = −√(−2a) ↦ t₁` and its certificates.
#[derive(Clone, Debug, Serialize)]
pub struct TwoCycleContext {
    pub schema_version: u32,
    #[serde(skip)]
    pub ctx: MapContext,
    pub context: ContextSummary,
    pub t1: PadicNumber,
    pub t2: PadicNumber,
    /// `f(t₁) = t₂` and `f(t₂) = t₁` to working precision.
    pub swaps: bool,
    /// `g(tᵢ) = tᵢ` to working precision.
    pub g_fixed: bool,
    #[serde(rename = "cycle_norm_exp")]
    pub cycle_norm: NormValue,
    /// `√A`, or `√(A/2)` when `p = 2`.
    #[serde(rename = "expected_norm_exp")]
    pub expected_norm: NormValue,
    /// `f'(t₁)·f'(t₂)`.
    pub multiplier: PadicNumber,
    pub multiplier_is_nine: bool,
    /// `(g(t₁ + h) − g(t₁)) / h` for a small power `h` of `p`.
    pub probe_quotient: PadicNumber,
    /// `|probe − 9|`, which shrinks with `|h|`.
    pub probe_error: NormBound,
    pub probe_agrees: bool,
    #[serde(rename = "multiplier_norm_exp")]
    pub multiplier_norm: NormValue,
    #[serde(rename = "expected_multiplier_norm_exp")]
    pub expected_multiplier_norm: NormValue,
    pub poles: Vec<PoleEntry>,
}

impl TwoCycleContext {
    /// Every certificate of the construction holds.
    pub fn verified(&self) -> bool {
        self.swaps
            && self.g_fixed
            && self.cycle_norm == self.expected_norm
            && self.multiplier_is_nine
            && self.probe_agrees
            && self.multiplier_norm == self.expected_multiplier_norm
            && self.poles.iter().all(|pole| pole.maps_to_pole != Some(false))
    }
}

fn base_qp(ctx: &MapContext, n: i64) -> Qp {
    Qp::from_int(ctx.p(), ctx.cap(), n)
}

/// Construct the 2-cycle by Hensel lifting `√(−2a)`, in `ctx`'s field when it
/// already holds the root, otherwise in `Q_p(√(−2a))`.
pub fn solve_two_cycle(ctx: &MapContext) -> Result<TwoCycleContext, AnalysisError> {
    let a_qp = ctx.a().coords().0;
    let minus_two_a = a_qp.mul(&base_qp(ctx, -2))?;
    let ctx = match sqrt_in_field(ctx.field(), &minus_two_a)? {
        Some(_) => ctx.clone(),
        None => MapContext::with_two_cycle(ctx.p(), ctx.a_source().clone(), ctx.cap())?,
    };
    let t1 = sqrt_in_field(ctx.field(), &minus_two_a)?.expect("field built to hold the root");
    let t2 = t1.neg();

    let swaps = eval_f(&ctx, &t1)?.agrees_with(&t2) && eval_f(&ctx, &t2)?.agrees_with(&t1);
    let g_fixed = eval_g(&ctx, &t1)?.agrees_with(&t1) && eval_g(&ctx, &t2)?.agrees_with(&t2);

    let cycle_norm = t1.norm()?;
    let expected_norm = if ctx.p() == 2 { ctx.sqrt_a().scale_half(1) } else { ctx.sqrt_a() };

    let nine = PadicNumber::from_int(9, ctx.field(), ctx.cap());
    let multiplier = derivative_f(&ctx, &t1)?.mul(&derivative_f(&ctx, &t2)?)?;
    let multiplier_is_nine = multiplier.agrees_with(&nine);

    // The quotient differs from g'(t₁) by O(|h|/|t₁|), so h is taken a third of
    // the working digits below |t₁|.
    let t_exp = cycle_norm.twice_exponent().expect("t₁ ≠ 0").div_euclid(2) + 1;
    let h_exp = t_exp + ctx.cap() as i64 / 3;
    let h = PadicNumber::from_qp(ctx.field(), Qp::one(ctx.p(), ctx.cap()).shift(h_exp));
    let moved = eval_g(&ctx, &t1.add(&h)?)?;
    let probe_quotient = moved.sub(&eval_g(&ctx, &t1)?)?.div(&h)?;
    let probe_error = probe_quotient.distance(&nine)?;
    let tolerance = NormValue::from_exponent(ctx.cap() as i64 / 6);
    let probe_agrees = probe_error.value() <= tolerance;

    let multiplier_norm = multiplier.norm()?;
    let expected_multiplier_norm = if ctx.p() == 3 { NormValue::from_exponent(2) } else { NormValue::ONE };

    let poles = pole_list(&ctx, &a_qp)?;
    Ok(TwoCycleContext {
        schema_version: SCHEMA_VERSION,
        context: ctx.summary(),
        t1,
        t2,
        swaps,
        g_fixed,
        cycle_norm,
        expected_norm,
        multiplier,
        multiplier_is_nine,
        probe_quotient,
        probe_error,
        probe_agrees,
        multiplier_norm,
        expected_multiplier_norm,
        poles,
        ctx,
    })
}

fn pole_list(ctx: &MapContext, a_qp: &Qp) -> Result<Vec<PoleEntry>, AnalysisError> {
    let mut out = Vec::with_capacity(6);
    for (i, sign) in ["+", "-"].iter().enumerate() {
        let value = ctx.poles().map(|poles| poles[i].clone());
        out.push(PoleEntry {
            label: format!("{sign}sqrt(-a)"),
            in_working_field: value.is_some(),
            note: value.is_none().then(|| "not in working field".to_string()),
            value,
            maps_to_pole: None,
        });
    }
    let root5 = sqrt_in_field(ctx.field(), &base_qp(ctx, 5))?;
    for inner in ["+", "-"] {
        for outer in ["+", "-"] {
            let label = format!("{outer}sqrt((-3{inner}sqrt5)a/2)");
            let Some(root5) = &root5 else {
                out.push(PoleEntry {
                    label,
                    value: None,
                    in_working_field: false,
                    maps_to_pole: None,
                    note: Some("sqrt5 not in working field".into()),
                });
                continue;
            };
            let signed = if inner == "+" { root5.clone() } else { root5.neg() };
            let a = PadicNumber::from_qp(ctx.field(), a_qp.clone());
            let three = PadicNumber::from_int(3, ctx.field(), ctx.cap());
            let two = PadicNumber::from_int(2, ctx.field(), ctx.cap());
            let square = signed.sub(&three)?.mul(&a)?.div(&two)?;
            let root = if square.is_square()? { Some(square.sqrt()?) } else { None };
            let value = root.map(|r| if outer == "+" { r } else { r.neg() });
            let maps_to_pole = match &value {
                Some(x) => Some(lands_on_pole(ctx, x)?),
                None => None,
            };
            out.push(PoleEntry {
                label,
                in_working_field: value.is_some(),
                note: value.is_none().then(|| "not in working field".to_string()),
                value,
                maps_to_pole,
            });
        }
    }
    Ok(out)
}

/// `f(x)² + a` vanishes to working precision.
fn lands_on_pole(ctx: &MapContext, x: &PadicNumber) -> Result<bool, AnalysisError> {
    let y = eval_f(ctx, x)?;
    Ok(y.square()?.add(ctx.a())?.is_zero_to_precision())
}

#[derive(Clone, Debug, Serialize)]
pub struct SwapDirection {
    pub from: String,
    pub samples: usize,
    pub checked: usize,
    pub excluded_members: usize,
    pub excluded_unknown: usize,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SwapReport {
    pub schema_version: u32,
    pub context: ContextSummary,
    #[serde(rename = "radius_exp")]
    pub radius: NormValue,
    pub directions: [SwapDirection; 2],
}

impl SwapReport {
    pub fn passed(&self) -> bool {
        self.directions.iter().all(|d| d.counterexample.is_none())
    }
}

enum SampleOutcome {
    Checked,
    Member,
    Unknown,
    Failed(Box<Counterexample>),
}

/// Whether a sampled start lies in the exclusion set. Depth-budget unknowns are
/// kept: the set lies on finitely many preimage levels for any bounded orbit
/// computation, and a pole reached later still shows up as an error.
fn screen(ctx: &MapContext, x: &PadicNumber, depth: usize) -> Result<Option<SampleOutcome>, AnalysisError> {
    Ok(match exclusion_membership(ctx, x, depth)? {
        Membership::Member(_) => Some(SampleOutcome::Member),
        Membership::Unknown(UnknownReason::Precision) => Some(SampleOutcome::Unknown),
        Membership::Unknown(UnknownReason::DepthBudget) | Membership::NonMember => None,
    })
}

/// `f(S_r(t₁)) ⊆ S_r(t₂)` and back, sampled, for `p = 2` with
/// `r ≤ √A/(2√2)` and for `p ≥ 5` with `r < √A`.
pub fn cycle_sphere_swap_check(
    cyc: &TwoCycleContext,
    r: NormValue,
    samples: usize,
    src: RandomSource,
    depth: usize,
) -> Result<SwapReport, AnalysisError> {
    let ctx = &cyc.ctx;
    let s = ctx.sqrt_a().twice_exponent().expect("a ≠ 0");
    let admissible = match (ctx.p(), r.twice_exponent()) {
        (_, None) => false,
        (2, Some(t)) => t >= s + 3,
        (3, _) => false,
        (_, Some(t)) => t > s,
    };
    if !admissible {
        return Err(AnalysisError::OutOfDomain(format!(
            "sphere swap needs p = 2 with r <= sqrt(A)/(2 sqrt 2) or p >= 5 with r < sqrt(A); got p = {}, r = p^-({r})",
            ctx.p()
        )));
    }
    let one_way = |from: &PadicNumber, to: &PadicNumber, label: &str, src: RandomSource| {
        let outcomes = par_samples(src, samples, |sub, rng| -> Result<SampleOutcome, AnalysisError> {
            let x = sample_on_sphere(from, r, rng)?;
            if let Some(skip) = screen(ctx, &x, depth)? {
                return Ok(skip);
            }
            let d = eval_f(ctx, &x)?.distance(to)?;
            Ok(if d == NormBound::Exact(r) {
                SampleOutcome::Checked
            } else {
                let detail = format!("|f(x) - t| = p^-({}), expected p^-({r})", d.exponent_string());
                SampleOutcome::Failed(Box::new(Counterexample::new("sphere_swap", ctx, &x, 1, sub, detail)))
            })
        });
        tally(label, samples, outcomes)
    };
    let forward = one_way(&cyc.t1, &cyc.t2, "t1", src.substream(1))?;
    let backward = one_way(&cyc.t2, &cyc.t1, "t2", src.substream(2))?;
    Ok(SwapReport {
        schema_version: SCHEMA_VERSION,
        context: ctx.summary(),
        radius: r,
        directions: [forward, backward],
    })
}

fn tally(
    label: &str,
    samples: usize,
    outcomes: Vec<Result<SampleOutcome, AnalysisError>>,
) -> Result<SwapDirection, AnalysisError> {
    let mut dir = SwapDirection {
        from: label.to_string(),
        samples,
        checked: 0,
        excluded_members: 0,
        excluded_unknown: 0,
        counterexample: None,
    };
    for o in outcomes {
        match o? {
            SampleOutcome::Checked => dir.checked += 1,
            SampleOutcome::Member => dir.excluded_members += 1,
            SampleOutcome::Unknown => dir.excluded_unknown += 1,
            SampleOutcome::Failed(ce) => {
                dir.counterexample.get_or_insert(*ce);
            }
        }
    }
    Ok(dir)
}

#[derive(Clone, Debug, Serialize)]
pub struct AttractionReport {
    pub schema_version: u32,
    pub context: ContextSummary,
    #[serde(rename = "radius_exp")]
    pub radius: NormValue,
    pub samples: usize,
    pub double_steps: usize,
    pub checked: usize,
    pub excluded_members: usize,
    pub excluded_unknown: usize,
    /// Samples that hit the boundary radius `√A/3` at some step.
    pub boundary_visits: usize,
    /// Fewest double steps any checked sample completed before its distance fell
    /// below working precision.
    pub min_double_steps: Option<usize>,
    /// Samples whose distance fell below working precision (converged to it).
    pub reached_precision_floor: usize,
    /// Distances from one sampled start to `t₁` after each double step.
    pub trace: Vec<NormBound>,
    pub counterexample: Option<Counterexample>,
}

impl AttractionReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

struct Trajectory {
    double_steps: usize,
    floor: bool,
    boundary: bool,
    trace: Vec<NormBound>,
}

/// Follow `x` for `2·n_double` steps, comparing `|fⁿ(x) − tₙ|` (targets
/// alternating `t₂, t₁, …`) with the one-step radius map.
fn follow(cyc: &TwoCycleContext, x: &PadicNumber, n_double: usize) -> Result<Result<Trajectory, (usize, String)>, AnalysisError> {
    let ctx = &cyc.ctx;
    let mut y = x.clone();
    let mut dist = y.distance(&cyc.t1)?;
    let mut traj = Trajectory { double_steps: 0, floor: false, boundary: false, trace: vec![dist] };
    let boundary = ctx.sqrt_a().scale_half(2);
    for n in 1..=2 * n_double {
        let r = match dist {
            NormBound::Exact(r) => r,
            NormBound::AtMost(_) => {
                traj.floor = true;
                break;
            }
        };
        if r == boundary {
            traj.boundary = true;
        }
        let predicted = two_step_radius_map_p3(ctx.big_a(), r)?;
        y = eval_f(ctx, &y)?;
        let target = if n % 2 == 1 { &cyc.t2 } else { &cyc.t1 };
        let observed = y.distance(target)?;
        let ok = match (predicted, observed) {
            (NormBound::Exact(v), NormBound::Exact(o)) => v == o,
            // Below working precision: consistent as long as the bound allows it.
            (NormBound::Exact(v), NormBound::AtMost(b)) => v <= b,
            (NormBound::AtMost(v), o) => o.value() <= v,
        };
        if !ok {
            return Ok(Err((n, format!(
                "step {n}: distance p^-({}) but the radius map predicts p^-({})",
                observed.exponent_string(),
                predicted.exponent_string()
            ))));
        }
        if n % 2 == 0 {
            let before = *traj.trace.last().expect("seeded");
            if let (NormBound::Exact(b), NormBound::Exact(o)) = (before, observed) {
                if o >= b {
                    return Ok(Err((n, "double-step distance did not decrease".to_string())));
                }
            }
            traj.trace.push(observed);
            traj.double_steps += 1;
        }
        dist = observed;
    }
    Ok(Ok(traj))
}

/// For `p = 3`: orbits from `S_r(t₁)` follow the radius map step by step and
/// converge to the cycle, monotonically on even steps.
pub fn cycle_attraction_check_p3(
    cyc: &TwoCycleContext,
    r: NormValue,
    samples: usize,
    n_double: usize,
    src: RandomSource,
    depth: usize,
) -> Result<AttractionReport, AnalysisError> {
    let ctx = &cyc.ctx;
    if ctx.p() != 3 {
        return Err(AnalysisError::OutOfDomain(format!("attraction check needs p = 3, got {}", ctx.p())));
    }
    if r.is_zero() || r >= ctx.sqrt_a() {
        return Err(AnalysisError::OutOfDomain(format!("need 0 < r < sqrt(A), got r = 3^-({r})")));
    }
    let runs = par_samples(src, samples, |sub, rng| -> Result<(SampleOutcome, Option<Trajectory>), AnalysisError> {
        let x = sample_on_sphere(&cyc.t1, r, rng)?;
        if let Some(skip) = screen(ctx, &x, depth)? {
            return Ok((skip, None));
        }
        Ok(match follow(cyc, &x, n_double)? {
            Ok(traj) => (SampleOutcome::Checked, Some(traj)),
            Err((step, detail)) => {
                (SampleOutcome::Failed(Box::new(Counterexample::new("cycle_attraction", ctx, &x, step, sub, detail))), None)
            }
        })
    });
    let mut report = AttractionReport {
        schema_version: SCHEMA_VERSION,
        context: ctx.summary(),
        radius: r,
        samples,
        double_steps: n_double,
        checked: 0,
        excluded_members: 0,
        excluded_unknown: 0,
        boundary_visits: 0,
        min_double_steps: None,
        reached_precision_floor: 0,
        trace: Vec::new(),
        counterexample: None,
    };
    for run in runs {
        let (outcome, traj) = run?;
        match outcome {
            SampleOutcome::Checked => report.checked += 1,
            SampleOutcome::Member => report.excluded_members += 1,
            SampleOutcome::Unknown => report.excluded_unknown += 1,
            SampleOutcome::Failed(ce) => {
                report.counterexample.get_or_insert(*ce);
            }
        }
        if let Some(traj) = traj {
            report.boundary_visits += traj.boundary as usize;
            report.reached_precision_floor += traj.floor as usize;
            let m = report.min_double_steps.map_or(traj.double_steps, |m| m.min(traj.double_steps));
            report.min_double_steps = Some(m);
            if report.trace.is_empty() {
                report.trace = traj.trace;
            }
        }
    }
    Ok(report)
}

/// For a cycle of `f`: every point has the same norm, at most `√A`.
///
/// The points must close up under `f` in the order given; the cycle length is
/// the number of points.
pub fn periodic_norm_property(ctx: &MapContext, points: &[PadicNumber]) -> Result<bool, AnalysisError> {
    if points.is_empty() {
        return Err(AnalysisError::NotACycle("no points".into()));
    }
    // Computed points keep their own precision; padding would invent digits.
    let points: Vec<PadicNumber> = points
        .iter()
        .map(|x| if x.field() == ctx.field() { Ok(x.clone()) } else { ctx.embed(x) })
        .collect::<Result<_, _>>()?;
    for (i, x) in points.iter().enumerate() {
        let next = &points[(i + 1) % points.len()];
        if !eval_f(ctx, x)?.agrees_with(next) {
            return Err(AnalysisError::NotACycle(format!("f of point {i} is not point {}", (i + 1) % points.len())));
        }
    }
    let norms: Vec<NormValue> = points.iter().map(|x| x.norm_bound().value()).collect();
    Ok(norms.iter().all(|n| *n == norms[0]) && norms[0] <= ctx.sqrt_a())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ExactValue;

    fn cycle(p: u64, a: i64) -> TwoCycleContext {
        let ctx = MapContext::over_qp(p, ExactValue::int(a), 64).unwrap();
        solve_two_cycle(&ctx).unwrap()
    }

    #[test]
    fn seven_minus_one() {
        let cyc = cycle(7, -1);
        assert!(cyc.verified(), "{cyc:?}");
        // √2 ≡ 10 or 39 mod 49.
        let residue = cyc.t1.coords().0.to_integer_residue().unwrap() % 49u32;
        assert!(residue == 10u32.into() || residue == 39u32.into());
        assert_eq!(cyc.cycle_norm, NormValue::ONE);
        assert!(cyc.ctx.field().is_base());
    }

    #[test]
    fn two_one_needs_extension() {
        let cyc = cycle(2, 1);
        assert!(!cyc.ctx.field().is_base());
        assert_eq!(cyc.cycle_norm, NormValue::from_twice_exponent(1));
        assert!(cyc.verified(), "{cyc:?}");
    }

    #[test]
    fn multiplier_is_nine_everywhere() {
        for p in [2u64, 3, 5, 7, 11] {
            for a in [1i64, -1, 2, -3, 5, 6, -10, p as i64, -(p as i64) * (p as i64)] {
                let cyc = cycle(p, a);
                assert!(cyc.verified(), "p={p} a={a}: {cyc:?}");
            }
        }
    }

    #[test]
    fn preimage_poles_over_eleven() {
        // 5 = 4² mod 11, so √5 ∈ Q_11; with a = −1 the poles are ±1.
        let cyc = cycle(11, -1);
        assert!(cyc.poles[0].in_working_field);
        assert!(cyc.poles[2..].iter().any(|pole| pole.maps_to_pole == Some(true)));
        let cyc = cycle(7, -1);
        assert!(cyc.poles[2..].iter().all(|pole| !pole.in_working_field));
    }

    #[test]
    fn swap_examples() {
        let cyc = cycle(7, -1);
        let x = cyc.t1.add(&cyc.ctx.from_rational(7, 1).unwrap()).unwrap();
        let d = eval_f(&cyc.ctx, &x).unwrap().distance(&cyc.t2).unwrap();
        assert_eq!(d, NormBound::Exact(NormValue::from_exponent(1)));
        let rep = cycle_sphere_swap_check(&cyc, NormValue::from_exponent(1), 200, RandomSource::new(0xA), 32).unwrap();
        assert!(rep.passed(), "{rep:?}");

        let cyc = cycle(2, 1);
        let four = PadicNumber::from_int(4, cyc.ctx.field(), 64);
        let d = eval_f(&cyc.ctx, &cyc.t1.add(&four).unwrap()).unwrap().distance(&cyc.t2).unwrap();
        assert_eq!(d, NormBound::Exact(NormValue::from_exponent(2)));
        for t in [3, 4, 5, 8] {
            let rep = cycle_sphere_swap_check(&cyc, NormValue::from_twice_exponent(t), 200, RandomSource::new(1), 32).unwrap();
            assert!(rep.passed(), "t={t} {rep:?}");
        }
        assert!(cycle_sphere_swap_check(&cyc, NormValue::from_twice_exponent(2), 10, RandomSource::new(1), 8).is_err());
    }

    #[test]
    fn attraction_at_three() {
        let cyc = cycle(3, 1);
        assert!(cyc.verified());
        let x = cyc.t1.add(&cyc.ctx.from_rational(27, 1).unwrap()).unwrap();
        let fx = eval_f(&cyc.ctx, &x).unwrap();
        assert_eq!(fx.distance(&cyc.t2).unwrap(), NormBound::Exact(NormValue::from_exponent(4)));
        let ffx = eval_f(&cyc.ctx, &fx).unwrap();
        assert_eq!(ffx.distance(&cyc.t1).unwrap(), NormBound::Exact(NormValue::from_exponent(5)));
        for e in [1, 2, 3] {
            let rep = cycle_attraction_check_p3(&cyc, NormValue::from_exponent(e), 100, 20, RandomSource::new(2), 32).unwrap();
            assert!(rep.passed(), "{rep:?}");
            assert!(rep.min_double_steps.unwrap() >= 20 || rep.reached_precision_floor > 0);
        }
    }

    #[test]
    fn attraction_in_ramified_cycle_field() {
        // −2·3 has odd valuation: the middle range √A/3 < r < √A is populated.
        let cyc = cycle(3, 3);
        assert!(cyc.ctx.field().is_ramified());
        let s = cyc.ctx.sqrt_a().twice_exponent().unwrap();
        for t in [s + 1, s + 2, s + 3] {
            let rep =
                cycle_attraction_check_p3(&cyc, NormValue::from_twice_exponent(t), 100, 20, RandomSource::new(3), 32).unwrap();
            assert!(rep.passed(), "t={t} {rep:?}");
        }
    }

    #[test]
    fn periodic_norms() {
        let cyc = cycle(7, -1);
        assert!(periodic_norm_property(&cyc.ctx, &[cyc.t1.clone(), cyc.t2.clone()]).unwrap());
        let cyc2 = cycle(2, 1);
        assert!(periodic_norm_property(&cyc2.ctx, &[cyc2.t1.clone(), cyc2.t2.clone()]).unwrap());
        let zero = PadicNumber::zero(cyc.ctx.field(), 64);
        assert!(periodic_norm_property(&cyc.ctx, &[zero]).unwrap());
        assert!(matches!(
            periodic_norm_property(&cyc.ctx, std::slice::from_ref(&cyc.t1)),
            Err(AnalysisError::NotACycle(_))
        ));
    }
}
