//! Passive static equilibrium of planar frictional grasps.
//!
//! A grasp is stable under a wrench if some rigid virtual motion of the
//! object, together with contact forces obeying normal springs, unilateral
//! contact and maximum-dissipation Coulomb friction, balances that wrench.
//! [`arrangement`] enumerates the polynomially many slip states a rigid
//! motion can produce; [`stability`] solves one linear system per state.

pub mod arrangement;
pub mod baselines;
pub mod equilibrium;
pub mod io;
pub mod lp;
pub mod model;
pub mod random;
pub mod stability;

pub use arrangement::{enumerate_slip_states, ContactLabel, EnumerationOptions, SlipState, SlipStateSet};
pub use equilibrium::{check_solution, solve_state, EquilibriumSolution, Tolerances};
pub use model::{Contact, ContactForce, GraspModel, Wrench};
pub use stability::{check_stability, max_resistible, resistible_region, StabilityAnalyzer, Verdict};

use thiserror::Error;

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Arrangement(#[from] arrangement::ArrangementError),
    #[error(transparent)]
    Stability(#[from] stability::StabilityError),
    #[error(transparent)]
    File(#[from] io::GraspFileError),
    #[error(transparent)]
    Slice(#[from] baselines::SliceError),
}
