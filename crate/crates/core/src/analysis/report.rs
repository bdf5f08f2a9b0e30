use num_bigint::BigInt;
use num_rational::BigRational;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dynamics::MapContext;
use crate::padic::{NormBound, NormValue, PadicNumber, RandomSource};

/// Version of the JSON layout of every report.
pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to replay a failed assertion.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub check: String,
    pub field: String,
    pub a: PadicNumber,
    pub point: PadicNumber,
    pub step: usize,
    pub seed: u64,
    pub stream: u64,
    pub detail: String,
}

impl Counterexample {
    pub fn new(
        check: &str,
        ctx: &MapContext,
        point: &PadicNumber,
        step: usize,
        src: RandomSource,
        detail: String,
    ) -> Self {
        Counterexample {
            check: check.to_string(),
            field: ctx.field().to_string(),
            a: ctx.a().clone(),
            point: point.clone(),
            step,
            seed: src.seed,
            stream: src.stream,
            detail,
        }
    }
}

pub(crate) fn serialize_rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Exact {
        num: String,
        den: String,
    }
    Exact { num: q.numer().to_string(), den: q.denom().to_string() }.serialize(s)
}

/// `p^(-e)` as an exact rational, for norms with an integer exponent.
pub(crate) fn norm_to_rational(p: u64, n: NormValue) -> Option<BigRational> {
    if n.is_zero() {
        return Some(BigRational::from_integer(BigInt::from(0)));
    }
    let e = n.integer_exponent()?;
    let pk = BigInt::from(p).pow(e.unsigned_abs() as u32);
    Some(if e >= 0 {
        BigRational::new(BigInt::from(1), pk)
    } else {
        BigRational::from_integer(pk)
    })
}

/// Run `job` on `n` independent random streams derived from `src`, in parallel,
/// returning results in stream order.
pub(crate) fn par_samples<T, F>(src: RandomSource, n: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(RandomSource, &mut ChaCha8Rng) -> T + Sync,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let sub = src.substream(i);
            job(sub, &mut sub.rng())
        })
        .collect()
}

/// Kind of region in a [`BallDescriptor`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BallKind {
    /// `U_r(c) = {x : |x − c| < r}`
    Open,
    /// `V_r(c) = {x : |x − c| ≤ r}`
    Closed,
    /// `S_r(c) = {x : |x − c| = r}`
    Sphere,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallDescriptor {
    pub center: PadicNumber,
    #[serde(rename = "radius_exp")]
    pub radius: NormValue,
    pub kind: BallKind,
}

impl BallDescriptor {
    /// Membership test; `None` when the distance to the center is not known
    /// well enough to decide.
    pub fn contains(&self, x: &PadicNumber) -> Option<bool> {
        match x.distance(&self.center).ok()? {
            NormBound::Exact(d) => Some(match self.kind {
                BallKind::Open => d < self.radius,
                BallKind::Closed => d <= self.radius,
                BallKind::Sphere => d == self.radius,
            }),
            NormBound::AtMost(b) => match self.kind {
                BallKind::Open if b < self.radius => Some(true),
                BallKind::Closed if b <= self.radius => Some(true),
                BallKind::Sphere if b < self.radius => Some(false),
                _ => None,
            },
        }
    }
}
