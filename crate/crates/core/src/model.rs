//! Planar grasp instances and the maps relating object motion to contact
//! motion and contact forces to object wrench.
//!
//! Conventions used throughout the crate:
//!
//! * `normal` is the unit outward normal of the object surface, pointing
//!   from the object toward the hand.
//! * The contact tangent is the normal rotated by -90 degrees:
//!   `(x, y) -> (y, -x)`.
//! * A virtual object motion `d = (x, y, r)` moves the contact point with
//!   velocity `v_i = (x, y) + r * (-r_y, r_x)`. Its normal projection
//!   `delta_n` is positive when the object presses into the hand.
//! * The force a contact applies to the object is `-normal * c_n +
//!   tangent * c_t`, and static equilibrium reads `sum_i F_i + w = 0`.

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Tolerance on `|normal| = 1`.
pub const NORMAL_TOL: f64 = 1e-12;
/// Tolerance on the preload balance residual and the preload cone check.
pub const PRELOAD_TOL: f64 = 1e-9;

/// Planar cross product `a x b = a_x b_y - a_y b_x`.
#[inline]
pub fn cross2(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Tangent direction of a contact with the given outward normal.
#[inline]
pub fn tangent_of(normal: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(normal.y, -normal.x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Contact {
    pub position: Vector2<f64>,
    pub normal: Vector2<f64>,
    pub mu: f64,
}

impl Contact {
    pub fn new(position: [f64; 2], normal: [f64; 2], mu: f64) -> Self {
        Self {
            position: Vector2::from(position),
            normal: Vector2::from(normal),
            mu,
        }
    }

    pub fn tangent(&self) -> Vector2<f64> {
        tangent_of(&self.normal)
    }
}

/// Contact force in the local contact frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ContactForce {
    pub normal: f64,
    pub tangential: f64,
}

impl ContactForce {
    pub const ZERO: ContactForce = ContactForce {
        normal: 0.0,
        tangential: 0.0,
    };

    pub fn new(normal: f64, tangential: f64) -> Self {
        Self { normal, tangential }
    }
}

/// External wrench `(w_x, w_y, w_tau)` applied to the object.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Wrench {
    pub fx: f64,
    pub fy: f64,
    pub torque: f64,
}

impl Wrench {
    pub fn new(fx: f64, fy: f64, torque: f64) -> Self {
        Self { fx, fy, torque }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.fx, self.fy, self.torque)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.fx * s, self.fy * s, self.torque * s)
    }

    pub fn is_finite(&self) -> bool {
        self.fx.is_finite() && self.fy.is_finite() && self.torque.is_finite()
    }
}

impl From<[f64; 3]> for Wrench {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

/// A grasp: contacts, normal stiffness per contact and optional preload.
#[derive(Clone, Debug, PartialEq)]
pub struct GraspModel {
    pub contacts: Vec<Contact>,
    pub stiffness: Vec<f64>,
    /// Contact-frame preload forces; all zero when the grasp is not preloaded.
    pub preload: Vec<ContactForce>,
}

impl GraspModel {
    /// Unit stiffness and no preload.
    pub fn new(contacts: Vec<Contact>) -> Self {
        let m = contacts.len();
        Self {
            contacts,
            stiffness: vec![1.0; m],
            preload: vec![ContactForce::ZERO; m],
        }
    }

    pub fn with_preload(mut self, preload: Vec<ContactForce>) -> Self {
        self.preload = preload;
        self
    }

    pub fn with_stiffness(mut self, stiffness: Vec<f64>) -> Self {
        self.stiffness = stiffness;
        self
    }

    pub fn len(&self) -> usize {
        self.contacts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contacts.is_empty()
    }

    /// A contact can detach only if it carries no normal preload.
    pub fn is_unloaded(&self, i: usize) -> bool {
        self.preload[i].normal == 0.0
    }

    pub fn has_preload(&self) -> bool {
        self.preload
            .iter()
            .any(|p| p.normal != 0.0 || p.tangential != 0.0)
    }
}

/// One violated invariant of a [`GraspModel`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NoContacts,
    LengthMismatch { field: &'static str, expected: usize, found: usize },
    NonFinite { contact: usize },
    NonUnitNormal { contact: usize, norm: f64 },
    NegativeFriction { contact: usize, mu: f64 },
    NonPositiveStiffness { contact: usize, stiffness: f64 },
    NegativePreload { contact: usize, normal: f64 },
    PreloadOutsideCone { contact: usize, tangential: f64, limit: f64 },
    UnbalancedPreload { residual: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoContacts => write!(f, "grasp has no contacts"),
            Violation::LengthMismatch { field, expected, found } => {
                write!(f, "{field} has {found} entries, expected {expected}")
            }
            Violation::NonFinite { contact } => {
                write!(f, "contact {}: non-finite value", contact + 1)
            }
            Violation::NonUnitNormal { contact, norm } => {
                write!(f, "contact {}: normal has length {norm}, expected 1", contact + 1)
            }
            Violation::NegativeFriction { contact, mu } => {
                write!(f, "contact {}: negative friction coefficient {mu}", contact + 1)
            }
            Violation::NonPositiveStiffness { contact, stiffness } => {
                write!(f, "contact {}: stiffness {stiffness} must be positive", contact + 1)
            }
            Violation::NegativePreload { contact, normal } => {
                write!(f, "contact {}: negative normal preload {normal}", contact + 1)
            }
            Violation::PreloadOutsideCone { contact, tangential, limit } => write!(
                f,
                "contact {}: preload tangential {tangential} exceeds friction limit {limit}",
                contact + 1
            ),
            Violation::UnbalancedPreload { residual } => {
                write!(f, "preload is not self-balancing (residual {residual:e})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid grasp: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ModelError(pub Vec<Violation>);

/// Checks every invariant of the grasp and reports all violations found.
pub fn validate_model(model: &GraspModel) -> Result<(), ModelError> {
    let m = model.contacts.len();
    let mut out = Vec::new();
    if m == 0 {
        out.push(Violation::NoContacts);
    }
    if model.stiffness.len() != m {
        out.push(Violation::LengthMismatch {
            field: "stiffness",
            expected: m,
            found: model.stiffness.len(),
        });
    }
    if model.preload.len() != m {
        out.push(Violation::LengthMismatch {
            field: "preload",
            expected: m,
            found: model.preload.len(),
        });
    }
    if !out.is_empty() {
        return Err(ModelError(out));
    }

    for (i, c) in model.contacts.iter().enumerate() {
        let finite = c.position.iter().chain(c.normal.iter()).all(|v| v.is_finite())
            && c.mu.is_finite()
            && model.stiffness[i].is_finite()
            && model.preload[i].normal.is_finite()
            && model.preload[i].tangential.is_finite();
        if !finite {
            out.push(Violation::NonFinite { contact: i });
            continue;
        }
        let norm = c.normal.norm();
        if (norm - 1.0).abs() > NORMAL_TOL {
            out.push(Violation::NonUnitNormal { contact: i, norm });
        }
        if c.mu < 0.0 {
            out.push(Violation::NegativeFriction { contact: i, mu: c.mu });
        }
        if model.stiffness[i] <= 0.0 {
            out.push(Violation::NonPositiveStiffness {
                contact: i,
                stiffness: model.stiffness[i],
            });
        }
        let p = model.preload[i];
        if p.normal < 0.0 {
            out.push(Violation::NegativePreload { contact: i, normal: p.normal });
        }
        let limit = c.mu * p.normal.max(0.0);
        if p.tangential.abs() > limit + PRELOAD_TOL {
            out.push(Violation::PreloadOutsideCone {
                contact: i,
                tangential: p.tangential,
                limit,
            });
        }
    }
    if out.iter().all(|v| !matches!(v, Violation::NonFinite { .. })) {
        let mut total = Vector3::zeros();
        for (c, p) in model.contacts.iter().zip(&model.preload) {
            total += world_force(c, p).as_wrench_vector();
        }
        let residual = total.amax();
        if residual > PRELOAD_TOL {
            out.push(Violation::UnbalancedPreload { residual });
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(ModelError(out))
    }
}

/// World-frame force and torque a contact applies to the object.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldForce {
    pub force: Vector2<f64>,
    pub torque: f64,
}

impl WorldForce {
    pub fn as_wrench_vector(&self) -> Vector3<f64> {
        Vector3::new(self.force.x, self.force.y, self.torque)
    }
}

pub fn world_force(contact: &Contact, f: &ContactForce) -> WorldForce {
    let force = -contact.normal * f.normal + contact.tangent() * f.tangential;
    WorldForce {
        force,
        torque: cross2(&contact.position, &force),
    }
}

/// Motion-space rows of one contact: `normal_row . d = delta_n` and
/// `tangent_row . d = delta_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactRows {
    pub normal: Vector3<f64>,
    pub tangent: Vector3<f64>,
}

/// The motion map, stored column-pair per contact. Normal and tangential
/// components are addressed by index, which stands in for a selection matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GraspMaps {
    pub tangents: Vec<Vector2<f64>>,
    pub rows: Vec<ContactRows>,
}

impl GraspMaps {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Column `2i` is contact `i`'s normal column, `2i + 1` its tangent column.
    pub fn column(&self, j: usize) -> Vector3<f64> {
        let r = &self.rows[j / 2];
        if j % 2 == 0 {
            r.normal
        } else {
            r.tangent
        }
    }

    pub fn normal_indices(&self) -> impl Iterator<Item = usize> {
        (0..self.len()).map(|i| 2 * i)
    }

    pub fn tangent_indices(&self) -> impl Iterator<Item = usize> {
        (0..self.len()).map(|i| 2 * i + 1)
    }

    /// Dense 3 x 2m motion map.
    pub fn matrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(3, 2 * self.len(), |r, c| self.column(c)[r])
    }
}

pub fn build_maps(model: &GraspModel) -> GraspMaps {
    let tangents: Vec<_> = model.contacts.iter().map(Contact::tangent).collect();
    let rows = model
        .contacts
        .iter()
        .zip(&tangents)
        .map(|(c, t)| ContactRows {
            normal: Vector3::new(c.normal.x, c.normal.y, cross2(&c.position, &c.normal)),
            tangent: Vector3::new(t.x, t.y, cross2(&c.position, t)),
        })
        .collect();
    GraspMaps { tangents, rows }
}

/// Relative contact motion `(delta_n, delta_t)` induced by object motion `d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactMotion {
    pub normal: f64,
    pub tangential: f64,
}

pub fn contact_motion(maps: &GraspMaps, d: &Vector3<f64>) -> Vec<ContactMotion> {
    maps.rows
        .iter()
        .map(|r| ContactMotion {
            normal: r.normal.dot(d),
            tangential: r.tangent.dot(d),
        })
        .collect()
}

/// Fixtures used by the documentation, tests and bundled grasp files.
pub mod fixtures {
    use super::*;

    /// Left, bottom and right contacts on a unit object, `mu = 0.5`.
    pub fn three_contact() -> GraspModel {
        GraspModel::new(vec![
            Contact::new([-1.0, 0.0], [-1.0, 0.0], 0.5),
            Contact::new([0.0, -1.0], [0.0, -1.0], 0.5),
            Contact::new([1.0, 0.0], [1.0, 0.0], 0.5),
        ])
    }

    /// Three-contact grasp preloaded so every normal force is 1.
    pub fn three_contact_preloaded() -> GraspModel {
        three_contact().with_preload(vec![
            ContactForce::new(1.0, -0.5),
            ContactForce::new(1.0, 0.0),
            ContactForce::new(1.0, 0.5),
        ])
    }

    /// Contacts at the corners of a square, pinched from left and right.
    pub fn four_contact() -> GraspModel {
        GraspModel::new(vec![
            Contact::new([-1.0, 1.0], [-1.0, 0.0], 0.5),
            Contact::new([-1.0, -1.0], [-1.0, 0.0], 0.5),
            Contact::new([1.0, -1.0], [1.0, 0.0], 0.5),
            Contact::new([1.0, 1.0], [1.0, 0.0], 0.5),
        ])
    }

    pub fn four_contact_preloaded() -> GraspModel {
        four_contact().with_preload(vec![ContactForce::new(1.0, 0.0); 4])
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn single_origin_contact_columns() {
        let model = GraspModel::new(vec![Contact::new([0.0, 0.0], [0.0, -1.0], 0.5)]);
        let maps = build_maps(&model);
        assert_eq!(maps.column(0), Vector3::new(0.0, -1.0, 0.0));
        assert_eq!(maps.column(1), Vector3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn three_contact_first_columns() {
        let maps = build_maps(&three_contact());
        assert_eq!(maps.column(0), Vector3::new(-1.0, 0.0, 0.0));
        assert_eq!(maps.column(1), Vector3::new(0.0, 1.0, -1.0));
        assert_eq!(maps.matrix().ncols(), 6);
    }

    #[test]
    fn four_contact_top_left_columns() {
        let maps = build_maps(&four_contact());
        assert_eq!(maps.column(0), Vector3::new(-1.0, 0.0, 1.0));
        assert_eq!(maps.column(1), Vector3::new(0.0, 1.0, -1.0));
    }

    #[test]
    fn validation_accepts_fixtures() {
        for m in [three_contact(), three_contact_preloaded(), four_contact(), four_contact_preloaded()] {
            validate_model(&m).unwrap();
        }
    }

    #[test]
    fn validation_flags_cone_violation_at_first_contact() {
        let mut m = three_contact_preloaded();
        m.preload[0].tangential = -0.6;
        let err = validate_model(&m).unwrap_err();
        assert!(err
            .0
            .iter()
            .any(|v| matches!(v, Violation::PreloadOutsideCone { contact: 0, .. })));
    }

    #[test]
    fn validation_collects_every_violation() {
        let mut m = three_contact();
        m.contacts[1].normal = Vector2::new(0.0, -0.9);
        m.contacts[2].mu = -0.1;
        m.stiffness[0] = 0.0;
        let err = validate_model(&m).unwrap_err();
        assert_eq!(err.0.len(), 3, "{err}");
        assert!(err.to_string().contains("contact 2"));

        let empty = GraspModel::new(vec![]);
        assert_eq!(validate_model(&empty).unwrap_err().0, vec![Violation::NoContacts]);
    }

    #[test]
    fn validation_flags_unbalanced_preload() {
        let m = three_contact().with_preload(vec![ContactForce::new(1.0, 0.0); 3]);
        let err = validate_model(&m).unwrap_err();
        assert!(matches!(err.0[0], Violation::UnbalancedPreload { .. }));
    }

    #[test]
    fn contact_motion_examples() {
        let maps = build_maps(&three_contact());
        let zero = contact_motion(&maps, &Vector3::zeros());
        assert!(zero.iter().all(|m| m.normal == 0.0 && m.tangential == 0.0));

        let down = contact_motion(&maps, &Vector3::new(0.0, -1.0, 0.0));
        assert!(close(down[1].normal, 1.0));
        assert!(close(down[0].normal, 0.0) && close(down[2].normal, 0.0));

        let maps = build_maps(&four_contact());
        let mv = contact_motion(&maps, &Vector3::new(0.0, -1.0, 1.0));
        assert!(close(mv[0].normal, 1.0) && close(mv[0].tangential, -2.0));
        assert!(close(mv[2].normal, 1.0) && close(mv[2].tangential, 0.0));
    }

    #[test]
    fn world_force_examples() {
        let m = three_contact();
        let f = world_force(&m.contacts[1], &ContactForce::new(1.0, 0.0));
        assert_eq!(f.force, Vector2::new(0.0, 1.0));
        assert!(close(f.torque, 0.0));

        let f = world_force(&m.contacts[0], &ContactForce::new(1.0, -0.5));
        assert_eq!(f.force, Vector2::new(1.0, -0.5));
        assert!(close(f.torque, 0.5));

        let f = world_force(&m.contacts[2], &ContactForce::ZERO);
        assert_eq!(f.as_wrench_vector(), Vector3::zeros());
    }

    #[test]
    fn preload_balances_to_zero() {
        for m in [three_contact_preloaded(), four_contact_preloaded()] {
            let total: Vector3<f64> = m
                .contacts
                .iter()
                .zip(&m.preload)
                .map(|(c, p)| world_force(c, p).as_wrench_vector())
                .sum();
            assert!(total.amax() < 1e-9);
        }
    }
}
