//! The map `f(x) = a·x / (x² + a)`: evaluation, orbits and radius dynamics.

mod context;
mod error;
mod map;
mod orbit;
mod radius;

pub use context::{ContextSummary, ExactValue, FieldRecipe, MapContext};
pub use error::DynamicsError;
pub use map::{derivative_f, eval_f, eval_g, eval_g_closed};
pub(crate) use orbit::pole_confirmed;
pub use orbit::{iterate_orbit, iterate_orbit_lifted, OrbitEntry, OrbitRecord, Termination};
pub use radius::{
    phi_a, phi_a_limit, radius_law_check, two_step_radius_map_p3, AstarPolicy, LawVerdict,
    RadiusLawReport, RadiusOracle,
};
