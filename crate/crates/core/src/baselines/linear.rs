use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::model::{build_maps, ContactForce, GraspModel, Wrench};
use crate::stability::StabilityError;

/// Outcome of the linear-spring model. `d` and `forces` are absent when the
/// stiffness matrix is singular.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearVerdict {
    pub stable: bool,
    pub d: Option<Vector3<f64>>,
    pub forces: Vec<ContactForce>,
    /// Largest `|c_t| - mu c_n` over contacts.
    pub cone_violation: f64,
    /// Smallest normal force.
    pub min_normal: f64,
}

/// Springs in both contact directions: `c_n = c0_n + k delta_n`,
/// `c_t = c0_t - k_t delta_t`. The tangential spring restores, so its force
/// opposes tangential motion.
pub fn linear_compliance_verdict(
    model: &GraspModel,
    w: &Wrench,
    tangent_stiffness: &[f64],
) -> Result<LinearVerdict, StabilityError> {
    if tangent_stiffness.len() != model.len() {
        return Err(StabilityError::InvalidParameter("one tangential stiffness per contact is required"));
    }
    if tangent_stiffness.iter().any(|&k| !(k > 0.0 && k.is_finite())) {
        return Err(StabilityError::InvalidParameter("tangential stiffness must be positive"));
    }
    let maps = build_maps(model);
    let mut stiffness = Matrix3::zeros();
    // preload contribution to the net wrench, which balances to zero for
    // valid models but is kept for completeness
    let mut rhs = w.as_vector();
    for (i, r) in maps.rows.iter().enumerate() {
        let (k, kt) = (model.stiffness[i], tangent_stiffness[i]);
        stiffness += k * r.normal * r.normal.transpose() + kt * r.tangent * r.tangent.transpose();
        let p = model.preload[i];
        rhs += -r.normal * p.normal + r.tangent * p.tangential;
    }
    let unstable = LinearVerdict {
        stable: false,
        d: None,
        forces: Vec::new(),
        cone_violation: f64::INFINITY,
        min_normal: f64::NEG_INFINITY,
    };
    let Some(inv) = stiffness.try_inverse() else {
        return Ok(unstable);
    };
    // sum_i (-N c_n + T c_t) + w = 0 with the spring laws gives K d = w + preload wrench
    let d = inv * rhs;
    if (stiffness * d - rhs).amax() > 1e-9 * (1.0 + rhs.amax()) {
        return Ok(unstable);
    }
    let mut forces = Vec::with_capacity(model.len());
    let mut cone_violation = f64::NEG_INFINITY;
    let mut min_normal = f64::INFINITY;
    for (i, r) in maps.rows.iter().enumerate() {
        let p = model.preload[i];
        let f = ContactForce::new(
            p.normal + model.stiffness[i] * r.normal.dot(&d),
            p.tangential - tangent_stiffness[i] * r.tangent.dot(&d),
        );
        cone_violation = cone_violation.max(f.tangential.abs() - model.contacts[i].mu * f.normal);
        min_normal = min_normal.min(f.normal);
        forces.push(f);
    }
    Ok(LinearVerdict {
        stable: cone_violation <= 1e-9 && min_normal >= -1e-9,
        d: Some(d),
        forces,
        cone_violation,
        min_normal,
    })
}
