//! Reference methods: exhaustive labeling search, the L1 grasp wrench space
//! and a purely linear contact compliance.

mod brute_force;
mod gws;
mod linear;

pub use brute_force::{brute_force_verdict, contact_alphabet, MAX_BRUTE_FORCE_CONTACTS};
pub use gws::{
    convex_hull_2d, edge_wrenches, gws_l1, gws_slice, wrench_achievable, HullFacet, SliceError,
    SlicePolygon, WrenchPolytope,
};
pub use linear::{linear_compliance_verdict, LinearVerdict};
