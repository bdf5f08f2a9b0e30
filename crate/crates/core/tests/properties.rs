use num_bigint::BigInt;
use proptest::prelude::*;

use padic_dyn::analysis::{haar_measure_ball, unique_fixed_point_test, RationalMapParams};
use padic_dyn::dynamics::{eval_f, eval_g_closed, iterate_orbit, ExactValue, MapContext, RadiusOracle};
use padic_dyn::padic::{sample_in_ball, sample_on_sphere};
use padic_dyn::{FieldDescriptor, NormBound, NormValue, PadicNumber, Qp, RandomSource};

const CAP: u32 = 40;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11])
}

fn rational() -> impl Strategy<Value = (i64, i64)> {
    (-1_000_000i64..1_000_000, 1i64..1_000_000)
}

fn qp(p: u64, (m, n): (i64, i64)) -> Qp {
    Qp::from_rational(p, CAP, &BigInt::from(m), &BigInt::from(n)).unwrap()
}

fn bound(x: &Qp) -> NormValue {
    x.norm_bound().value()
}

/// `n` is a square in `Z_p` iff its unit part is a square mod `p³` (mod 8 for
/// `p = 2`) and its valuation is even; found by exhaustive search.
fn square_by_search(p: u64, n: i64) -> bool {
    let mut n = n;
    let mut v = 0;
    while n % p as i64 == 0 {
        n /= p as i64;
        v += 1;
    }
    let m = (p * p * p) as i64;
    let target = n.rem_euclid(m);
    v % 2 == 0 && (0..m).any(|y| (y * y) % m == target)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ultrametric(p in prime(), x in rational(), y in rational()) {
        let (x, y) = (qp(p, x), qp(p, y));
        let sum = x.add(&y).unwrap();
        prop_assert!(bound(&sum) <= bound(&x).max(bound(&y)));
        if bound(&x) != bound(&y) && !x.is_zero_to_precision() && !y.is_zero_to_precision() {
            prop_assert_eq!(sum.norm().unwrap(), bound(&x).max(bound(&y)));
        }
    }

    #[test]
    fn norm_is_multiplicative(p in prime(), x in rational(), y in rational()) {
        prop_assume!(x.0 != 0 && y.0 != 0);
        let (x, y) = (qp(p, x), qp(p, y));
        prop_assert_eq!(x.mul(&y).unwrap().norm().unwrap(), x.norm().unwrap().mul(y.norm().unwrap()));
    }

    #[test]
    fn sqrt_of_square_is_plus_or_minus(p in prime(), x in rational()) {
        prop_assume!(x.0 != 0);
        let x = qp(p, x);
        let root = x.mul(&x).unwrap().sqrt().unwrap();
        prop_assert!(root.agrees_with(&x) || root.agrees_with(&x.neg()));
        prop_assert!(root.mul(&root).unwrap().agrees_with(&x.mul(&x).unwrap()));
    }

    #[test]
    fn square_test_matches_search(p in prime(), n in 1i64..1_000_000) {
        prop_assert_eq!(Qp::from_int(p, CAP, n).is_square().unwrap(), square_by_search(p, n));
    }

    #[test]
    fn extension_norm_is_multiplicative(
        (p, d) in prop::sample::select(vec![(2u64, -1i64), (2, -2), (2, 3), (2, 5), (3, -1), (3, 3), (5, 2), (7, -7)]),
        tx in -4i64..6,
        ty in -4i64..6,
        seed in any::<u64>(),
    ) {
        let field = FieldDescriptor::quadratic(&Qp::from_int(p, CAP, d)).unwrap();
        let step = if field.is_ramified() { 1 } else { 2 };
        let zero = PadicNumber::zero(&field, CAP);
        let mut rng = RandomSource::new(seed).rng();
        let x = sample_on_sphere(&zero, NormValue::from_twice_exponent(tx * step), &mut rng).unwrap();
        let y = sample_on_sphere(&zero, NormValue::from_twice_exponent(ty * step), &mut rng).unwrap();
        prop_assert_eq!(x.mul(&y).unwrap().norm().unwrap(), x.norm().unwrap().mul(y.norm().unwrap()));
        let q = x.div(&y).unwrap();
        prop_assert!(q.mul(&y).unwrap().agrees_with(&x));
    }

    #[test]
    fn second_iterate_matches_composition(p in prime(), a in rational(), x in rational()) {
        prop_assume!(a.0 != 0);
        let ctx = MapContext::over_qp(p, ExactValue::ratio(a.0.into(), a.1.into()).unwrap(), CAP).unwrap();
        let x = ctx.from_rational(x.0, x.1).unwrap();
        let composed = eval_f(&ctx, &x).and_then(|y| eval_f(&ctx, &y));
        match composed {
            Ok(y) => prop_assert!(eval_g_closed(&ctx, &x).unwrap().agrees_with(&y)),
            Err(_) => prop_assert!(eval_g_closed(&ctx, &x).is_err()),
        }
    }

    #[test]
    fn boundary_image_is_at_least_sqrt_a(p in prime(), a in rational(), seed in any::<u64>()) {
        prop_assume!(a.0 != 0);
        let ctx = MapContext::over_qp(p, ExactValue::ratio(a.0.into(), a.1.into()).unwrap(), CAP).unwrap();
        prop_assume!(ctx.sqrt_a().is_integral_exponent());
        let zero = PadicNumber::zero(ctx.field(), CAP);
        let x = sample_on_sphere(&zero, ctx.sqrt_a(), &mut RandomSource::new(seed).rng()).unwrap();
        if let Ok(astar) = RadiusOracle::per_point(&ctx).astar(Some(&x)) {
            prop_assert!(astar >= ctx.sqrt_a());
        }
    }

    #[test]
    fn orbit_norms_bounded_off_the_boundary(p in prime(), a in rational(), k in -3i64..4, seed in any::<u64>()) {
        prop_assume!(a.0 != 0);
        let ctx = MapContext::over_qp(p, ExactValue::ratio(a.0.into(), a.1.into()).unwrap(), CAP).unwrap();
        let r = NormValue::from_exponent(k);
        prop_assume!(r != ctx.sqrt_a());
        let zero = PadicNumber::zero(ctx.field(), CAP);
        let x = sample_on_sphere(&zero, r, &mut RandomSource::new(seed).rng()).unwrap();
        let ceiling = r.max(ctx.big_a().div(r).unwrap());
        let orbit = iterate_orbit(&ctx, &x, 20, &[]).unwrap();
        for n in orbit.norms() {
            prop_assert!(n.value() <= ceiling);
        }
    }

    #[test]
    fn forced_cubic_has_unique_fixed_point(p in prime(), a in rational(), c in rational()) {
        prop_assume!(a.0 != 0);
        let field = FieldDescriptor::base(p).unwrap();
        let a = PadicNumber::from_rational(a.0, a.1, &field, CAP).unwrap();
        let c = PadicNumber::from_rational(c.0, c.1, &field, CAP).unwrap();
        let params = RationalMapParams::with_unique_fixed_point(a, c).unwrap();
        prop_assert!(unique_fixed_point_test(&params).unwrap().unique);
    }

    #[test]
    fn measure_bound_holds(p in prime(), va in -3i64..4, gap in 1i64..6) {
        // A = p^(-2·va), r strictly inside √A.
        let big_a = NormValue::from_exponent(2 * va);
        let sqrt_a = NormValue::from_exponent(va);
        let r = NormValue::from_exponent(va + gap);
        let rho = r.pow(3).div(big_a).unwrap();
        let mu = haar_measure_ball(p, r, rho).unwrap();
        let pq = num_rational::BigRational::from_integer(BigInt::from(p));
        let one = num_rational::BigRational::from_integer(BigInt::from(1));
        let bound = &one / (&pq * (&pq - &one));
        prop_assert!(mu <= bound);
        prop_assert_eq!(mu == bound, r.scale_half(-2) == sqrt_a);
    }
}

fn chi_square(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

#[test]
fn sphere_digits_are_uniform() {
    // Critical values of chi-square at 0.999 for 1..10 degrees of freedom.
    const CRIT: [f64; 11] = [0.0, 10.83, 13.82, 16.27, 18.47, 20.52, 22.46, 24.32, 26.12, 27.88, 29.59];
    for p in [3u64, 5, 7, 11] {
        let field = FieldDescriptor::base(p).unwrap();
        let zero = PadicNumber::zero(&field, 8);
        let mut rng = RandomSource::new(0xA).rng();
        let mut first = vec![0u64; (p - 1) as usize];
        let mut second = vec![0u64; p as usize];
        for _ in 0..5000 {
            let x = sample_on_sphere(&zero, NormValue::ONE, &mut rng).unwrap();
            let digits = x.as_qp().unwrap().unit_digits();
            first[(digits[0] - 1) as usize] += 1;
            second[digits[1] as usize] += 1;
        }
        assert!(chi_square(&first) < CRIT[(p - 2) as usize], "p={p} leading digit {first:?}");
        assert!(chi_square(&second) < CRIT[(p - 1) as usize], "p={p} second digit {second:?}");
    }
}

#[test]
fn ball_splits_into_sphere_and_smaller_ball() {
    // V_r = S_r ∪ V_{r/p}, with Haar weights (p − 1)/p and 1/p.
    for p in [2u64, 3, 5, 7] {
        let field = FieldDescriptor::base(p).unwrap();
        let zero = PadicNumber::zero(&field, 16);
        let mut rng = RandomSource::new(7).rng();
        let n = 6000;
        let r = NormValue::from_exponent(1);
        let on_sphere = (0..n)
            .filter(|_| sample_in_ball(&zero, r, &mut rng).unwrap().norm_bound() == NormBound::Exact(r))
            .count();
        let expected = n as f64 * (p - 1) as f64 / p as f64;
        let sigma = (n as f64 * (p - 1) as f64 / (p * p) as f64).sqrt();
        assert!((on_sphere as f64 - expected).abs() < 4.0 * sigma, "p={p}: {on_sphere} of {n}");
    }
}
