//! Seeded Haar-uniform sampling of spheres and balls.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::error::PadicError;
use super::field::{FieldDescriptor, IntegralBasis};
use super::norm::NormValue;
use super::number::PadicNumber;
use super::qp::Qp;

/// Reproducible random stream: `(seed, stream)` always yields the same draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed, stream: 0 }
    }

    /// An independent stream for parallel work item `index`.
    pub fn substream(&self, index: u64) -> Self {
        RandomSource {
            seed: self.seed,
            stream: self.stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// `p^val · U` with `U` a uniformly random unit of `cap` digits.
fn qp_on_sphere<R: Rng + ?Sized>(p: u64, cap: u32, val: i64, rng: &mut R) -> Qp {
    let mut digits: Vec<u64> = (0..cap).map(|_| rng.gen_range(0..p)).collect();
    digits[0] = rng.gen_range(1..p);
    build(p, cap, val, &digits)
}

/// Uniform point of `p^val Z_p`, `cap` random digits from position `val` on.
fn qp_in_ball<R: Rng + ?Sized>(p: u64, cap: u32, val: i64, rng: &mut R) -> Qp {
    let digits: Vec<u64> = (0..cap).map(|_| rng.gen_range(0..p)).collect();
    build(p, cap, val, &digits)
}

fn build(p: u64, cap: u32, val: i64, digits: &[u64]) -> Qp {
    let mut unit = BigUint::zero();
    for &d in digits.iter().rev() {
        unit = unit * p + d;
    }
    Qp::from_digits_value(p, cap, val, unit, digits.len() as u32)
}

fn check_radius(field: &FieldDescriptor, r: NormValue) -> Result<i64, PadicError> {
    match r.twice_exponent() {
        Some(t) if field.value_group_contains(r) => Ok(t),
        _ => Err(PadicError::RadiusNotRepresentable(r.exponent_string())),
    }
}

/// `α + β·ω` in the coordinates `u + w√d`.
fn combine(field: &FieldDescriptor, alpha: Qp, beta: Qp) -> Result<PadicNumber, PadicError> {
    let ext = field.extension().expect("extension field");
    let (u, w) = match ext.basis() {
        IntegralBasis::SqrtD => (alpha, beta),
        IntegralBasis::OnePlusSqrtD => (alpha.add(&beta)?, beta),
        IntegralBasis::HalfOnePlusSqrtD => {
            let half = beta.div(&Qp::from_int(field.p(), beta.cap(), 2))?;
            (alpha.add(&half)?, half)
        }
    };
    PadicNumber::from_coords(field, u, w)
}

/// Uniform offset of norm exactly `p^(-t/2)`.
fn sphere_offset<R: Rng + ?Sized>(
    field: &FieldDescriptor,
    cap: u32,
    t: i64,
    rng: &mut R,
) -> Result<PadicNumber, PadicError> {
    let p = field.p();
    if field.is_base() {
        return Ok(PadicNumber::from_qp(field, qp_on_sphere(p, cap, t / 2, rng)));
    }
    if field.is_ramified() {
        // |α + βω| = max(|α|, |β| p^(-1/2)); exactly one term carries the norm.
        let (alpha, beta) = if t % 2 == 0 {
            (qp_on_sphere(p, cap, t / 2, rng), qp_in_ball(p, cap, t / 2, rng))
        } else {
            let k = (t - 1) / 2;
            (qp_in_ball(p, cap, k + 1, rng), qp_on_sphere(p, cap, k, rng))
        };
        return combine(field, alpha, beta);
    }
    // Unramified: |α + βω| = max(|α|, |β|); reject pairs lying in the smaller ball.
    let k = t / 2;
    loop {
        let alpha = qp_in_ball(p, cap, k, rng);
        let beta = qp_in_ball(p, cap, k, rng);
        if alpha.valuation() == Some(k) || beta.valuation() == Some(k) {
            return combine(field, alpha, beta);
        }
    }
}

fn ball_offset<R: Rng + ?Sized>(
    field: &FieldDescriptor,
    cap: u32,
    t: i64,
    rng: &mut R,
) -> Result<PadicNumber, PadicError> {
    let p = field.p();
    if field.is_base() {
        return Ok(PadicNumber::from_qp(field, qp_in_ball(p, cap, t / 2, rng)));
    }
    let (ka, kb) = if field.is_ramified() {
        (t.div_euclid(2) + t.rem_euclid(2), t.div_euclid(2))
    } else {
        (t / 2, t / 2)
    };
    combine(field, qp_in_ball(p, cap, ka, rng), qp_in_ball(p, cap, kb, rng))
}

/// Uniform point of the sphere `S_r(center)` in the center's field, with `cap`
/// random offset digits. `r = 0` returns the center.
pub fn sample_on_sphere<R: Rng + ?Sized>(
    center: &PadicNumber,
    r: NormValue,
    rng: &mut R,
) -> Result<PadicNumber, PadicError> {
    if r.is_zero() {
        return Ok(center.clone());
    }
    let t = check_radius(center.field(), r)?;
    let offset = sphere_offset(center.field(), center.cap(), t, rng)?;
    center.add(&offset)
}

/// Uniform point of the closed ball `V_r(center)`. `r = 0` returns the center.
pub fn sample_in_ball<R: Rng + ?Sized>(
    center: &PadicNumber,
    r: NormValue,
    rng: &mut R,
) -> Result<PadicNumber, PadicError> {
    if r.is_zero() {
        return Ok(center.clone());
    }
    let t = check_radius(center.field(), r)?;
    let offset = ball_offset(center.field(), center.cap(), t, rng)?;
    center.add(&offset)
}
