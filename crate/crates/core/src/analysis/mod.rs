//! Certificates for the structure of the dynamics: fixed points, the Siegel
//! disk, invariant spheres and balls, measure, and the 2-cycle.

mod cycles;
mod ergodic;
mod error;
mod fixed_point;
mod report;
mod siegel;

pub use cycles::{
    cycle_attraction_check_p3, cycle_sphere_swap_check, periodic_norm_property, solve_two_cycle, AttractionReport,
    PoleEntry, SwapDirection, SwapReport, TwoCycleContext,
};
pub use ergodic::{
    ball_image_check, ergodicity_report, haar_measure_ball, minimal_invariant_ball, rho_check, rho_of_r,
    ErgodicityReport, ErgodicityVerdict, IsometryReport, MinimalBallReport, RhoReport,
};
pub use error::AnalysisError;
pub use fixed_point::{
    conjugate_reduce, unique_fixed_point_test, CanonicalForm, FixedPointKind, FixedPointReport, RationalMapParams,
    Reduction,
};
pub use report::{BallDescriptor, BallKind, Counterexample, SCHEMA_VERSION};
pub use siegel::{
    exclusion_membership, exclusion_membership_lifted, invariant_sphere_test, radii_around, siegel_certify,
    siegel_disk, sphere_tally, AstarCount, Membership, SiegelReport, SphereInvarianceReport, SphereTally,
    SphereVerdict, UnknownReason,
};
