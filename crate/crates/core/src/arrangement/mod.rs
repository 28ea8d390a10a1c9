//! Enumeration of the slip states consistent with a rigid object motion.
//!
//! Every contact contributes a stick plane `delta_t = 0` (and, when
//! detachment is enabled and the contact has no preload, a separation plane
//! `delta_n = 0`) to a central arrangement in motion space. Regions, facets
//! and rays of that arrangement are exactly the achievable combinations of
//! contact states, so their number grows quadratically with the number of
//! contacts.

mod cells;
mod dual;
mod mcb;
mod planes;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use cells::{
    enumerate_regions, realization, region_feasible, zaslavsky_bound, CellClass, CellState,
    InvalidBound, Realization, GEOM_EPS,
};
pub use dual::{build_dual_graph, face_basis, line_states, ArrangementError, DualEdge, DualGraph};
pub use mcb::{minimum_cycle_basis, minimum_cycle_basis_by, symmetric_sum, Cycle, EdgeSet, GraphError};
pub use planes::{
    separation_planes, tangent_planes, OrientedPlane, PlaneArrangement, PlaneMember, PlaneRole,
    COINCIDENCE_TOL,
};

use crate::model::{build_maps, GraspModel};

/// State of a single contact. The declaration order is the canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContactLabel {
    #[serde(rename = "detached")]
    Detached,
    #[serde(rename = "slip-")]
    SlipNeg,
    #[serde(rename = "stick")]
    Stick,
    #[serde(rename = "slip+")]
    SlipPos,
}

impl ContactLabel {
    pub fn from_sign(s: i8) -> Self {
        match s.signum() {
            -1 => ContactLabel::SlipNeg,
            0 => ContactLabel::Stick,
            _ => ContactLabel::SlipPos,
        }
    }

    /// Slip direction, `None` for detached contacts.
    pub fn slip_sign(self) -> Option<f64> {
        match self {
            ContactLabel::Detached => None,
            ContactLabel::SlipNeg => Some(-1.0),
            ContactLabel::Stick => Some(0.0),
            ContactLabel::SlipPos => Some(1.0),
        }
    }

    pub fn is_attached(self) -> bool {
        self != ContactLabel::Detached
    }
}

impl fmt::Display for ContactLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContactLabel::Detached => "detached",
            ContactLabel::SlipNeg => "slip-",
            ContactLabel::Stick => "stick",
            ContactLabel::SlipPos => "slip+",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlipState {
    pub labels: Vec<ContactLabel>,
    /// Highest-dimensional kind of cell the labels were first seen on.
    pub provenance: CellClass,
    /// Position in the canonical order of the owning set.
    pub index: usize,
}

impl SlipState {
    pub fn all_stick(m: usize) -> Self {
        Self {
            labels: vec![ContactLabel::Stick; m],
            provenance: CellClass::Origin,
            index: 0,
        }
    }

    pub fn slip_count(&self) -> usize {
        self.labels
            .iter()
            .filter(|l| matches!(l, ContactLabel::SlipNeg | ContactLabel::SlipPos))
            .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Add separation planes for contacts without normal preload.
    pub detachment: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self { detachment: true }
    }
}

/// Cell counts; `cells()` excludes the origin.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    pub planes: usize,
    pub regions: usize,
    pub facets: usize,
    pub lines: usize,
}

impl CellCounts {
    pub fn cells(&self) -> usize {
        self.regions + self.facets + self.lines
    }
}

/// Everything produced while enumerating the arrangement.
#[derive(Clone, Debug)]
pub struct CellEnumeration {
    pub arrangement: PlaneArrangement,
    pub regions: Vec<CellState>,
    pub facets: Vec<CellState>,
    pub lines: Vec<CellState>,
    pub dual: DualGraph,
    pub basis: Vec<Cycle>,
}

impl CellEnumeration {
    pub fn counts(&self) -> CellCounts {
        CellCounts {
            planes: self.arrangement.len(),
            regions: self.regions.len(),
            facets: self.facets.len(),
            lines: self.lines.len(),
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = &CellState> {
        self.regions.iter().chain(&self.facets).chain(&self.lines)
    }
}

pub fn enumerate_cells(
    model: &GraspModel,
    options: EnumerationOptions,
) -> Result<CellEnumeration, ArrangementError> {
    let maps = build_maps(model);
    let mut arrangement = tangent_planes(&maps);
    if options.detachment {
        arrangement = separation_planes(model, &maps, arrangement);
    }
    let regions = enumerate_regions(&arrangement);
    let (mut dual, facets) = build_dual_graph(&regions, &arrangement);
    let basis = face_basis(&dual, &arrangement)?;
    let lines = line_states(&mut dual, &basis, &arrangement)?;
    Ok(CellEnumeration {
        arrangement,
        regions,
        facets,
        lines,
        dual,
        basis,
    })
}

/// Contact labels of a cell. A contact on the negative side of its
/// separation plane is detached regardless of its tangential sign.
pub fn cell_labels(signs: &[i8], arr: &PlaneArrangement, m: usize) -> Vec<ContactLabel> {
    let mut tangent = vec![0i8; m];
    let mut normal: Vec<Option<i8>> = vec![None; m];
    for (&s, plane) in signs.iter().zip(&arr.planes) {
        for member in &plane.members {
            let v = s * member.orientation;
            match member.role {
                PlaneRole::Tangent => tangent[member.contact] = v,
                PlaneRole::Separation => normal[member.contact] = Some(v),
            }
        }
    }
    tangent
        .into_iter()
        .zip(normal)
        .map(|(t, n)| {
            if n == Some(-1) {
                ContactLabel::Detached
            } else {
                ContactLabel::from_sign(t)
            }
        })
        .collect()
}

/// The enumerated slip states of a grasp: all-stick first, then the rest in
/// lexicographic label order.
#[derive(Clone, Debug, Serialize)]
pub struct SlipStateSet {
    pub states: Vec<SlipState>,
    pub counts: CellCounts,
    pub options_detachment: bool,
}

impl SlipStateSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SlipState> {
        self.states.iter()
    }

    pub fn contains(&self, labels: &[ContactLabel]) -> bool {
        self.states.iter().any(|s| s.labels == labels)
    }

    /// Number of arrangement cells, excluding the origin.
    pub fn cell_count(&self) -> usize {
        self.counts.cells()
    }
}

pub fn slip_states_from_cells(enumeration: &CellEnumeration, m: usize, detachment: bool) -> SlipStateSet {
    let mut unique: BTreeMap<Vec<ContactLabel>, CellClass> = BTreeMap::new();
    for cell in enumeration.cells() {
        let labels = cell_labels(&cell.signs, &enumeration.arrangement, m);
        unique.entry(labels).or_insert(cell.class);
    }
    let origin = vec![ContactLabel::Stick; m];
    unique.remove(&origin);
    let mut states = vec![SlipState::all_stick(m)];
    states.extend(unique.into_iter().enumerate().map(|(i, (labels, provenance))| SlipState {
        labels,
        provenance,
        index: i + 1,
    }));
    SlipStateSet {
        states,
        counts: enumeration.counts(),
        options_detachment: detachment,
    }
}

pub fn enumerate_slip_states(
    model: &GraspModel,
    options: EnumerationOptions,
) -> Result<SlipStateSet, ArrangementError> {
    let enumeration = enumerate_cells(model, options)?;
    Ok(slip_states_from_cells(&enumeration, model.len(), options.detachment))
}
