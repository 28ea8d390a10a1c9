use nalgebra::Vector3;
use serde::Serialize;

use crate::model::{GraspMaps, GraspModel};

/// Two unit normals closer than this (up to sign) describe the same plane.
pub const COINCIDENCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneRole {
    /// `delta_t = 0`: the contact sticks.
    Tangent,
    /// `delta_n = 0`: the contact is about to lose contact.
    Separation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PlaneMember {
    pub contact: usize,
    pub role: PlaneRole,
    /// `+1` if the member's own constraint row points along the stored
    /// normal, `-1` if it points against it.
    pub orientation: i8,
}

/// A plane through the origin of motion space `(x, y, r)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrientedPlane {
    pub normal: Vector3<f64>,
    pub members: Vec<PlaneMember>,
}

impl OrientedPlane {
    pub fn side(&self, d: &Vector3<f64>) -> f64 {
        self.normal.dot(d)
    }
}

/// Distinct oriented planes, in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PlaneArrangement {
    pub planes: Vec<OrientedPlane>,
}

impl PlaneArrangement {
    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    /// Merges the constraint `row . d = 0` into the arrangement. Returns the
    /// index of the plane it landed on.
    pub fn insert(&mut self, row: Vector3<f64>, contact: usize, role: PlaneRole) -> usize {
        let n = row.normalize();
        for (j, p) in self.planes.iter_mut().enumerate() {
            let dot = p.normal.dot(&n);
            if dot.abs() > 1.0 - COINCIDENCE_TOL {
                p.members.push(PlaneMember {
                    contact,
                    role,
                    orientation: if dot > 0.0 { 1 } else { -1 },
                });
                return j;
            }
        }
        self.planes.push(OrientedPlane {
            normal: n,
            members: vec![PlaneMember { contact, role, orientation: 1 }],
        });
        self.planes.len() - 1
    }

    /// Signs of `d` against every plane, with `|p . d| <= tol` mapped to 0.
    pub fn sign_vector(&self, d: &Vector3<f64>, tol: f64) -> Vec<i8> {
        self.planes
            .iter()
            .map(|p| {
                let s = p.side(d);
                if s > tol {
                    1
                } else if s < -tol {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }
}

/// One plane per distinct stick constraint `delta_t = 0`.
pub fn tangent_planes(maps: &GraspMaps) -> PlaneArrangement {
    let mut arr = PlaneArrangement::default();
    for (i, rows) in maps.rows.iter().enumerate() {
        arr.insert(rows.tangent, i, PlaneRole::Tangent);
    }
    arr
}

/// Adds `delta_n = 0` for every contact without normal preload.
pub fn separation_planes(
    model: &GraspModel,
    maps: &GraspMaps,
    mut arr: PlaneArrangement,
) -> PlaneArrangement {
    for (i, rows) in maps.rows.iter().enumerate() {
        if model.is_unloaded(i) {
            arr.insert(rows.normal, i, PlaneRole::Separation);
        }
    }
    arr
}
