use nalgebra::Vector3;
use serde::Serialize;

use super::planes::PlaneArrangement;
use crate::lp::{LinearProgram, Relation};

/// Minimum margin for a sign vector to count as realizable.
pub const GEOM_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellClass {
    Region,
    Facet,
    Line,
    Origin,
}

/// A cell of the arrangement, identified by its sign against every plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CellState {
    pub signs: Vec<i8>,
    pub class: CellClass,
}

impl CellState {
    pub fn new(signs: Vec<i8>, class: CellClass) -> Self {
        Self { signs, class }
    }
}

/// Best realization of a sign vector inside the unit box.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub margin: f64,
    pub witness: Vector3<f64>,
}

/// Maximizes `s` subject to `sign_j (p_j . d) >= s` on nonzero signs,
/// `p_j . d = 0` on zero signs and `|d|_inf <= 1`. The margin is capped at 1,
/// which is also what an all-zero sign vector reports.
pub fn realization(signs: &[i8], arr: &PlaneArrangement) -> Realization {
    debug_assert!(signs.len() <= arr.len());
    let mut lp = LinearProgram::new(4);
    lp.maximize(vec![0.0, 0.0, 0.0, 1.0]);
    for k in 0..3 {
        lp.bounds(k, -1.0, 1.0);
    }
    lp.bounds(3, -2.0, 1.0);
    for (&s, p) in signs.iter().zip(&arr.planes) {
        let n = p.normal;
        match s {
            0 => {
                lp.constraint(vec![n.x, n.y, n.z, 0.0], Relation::Eq, 0.0);
            }
            _ => {
                let s = f64::from(s);
                lp.constraint(vec![s * n.x, s * n.y, s * n.z, -1.0], Relation::Ge, 0.0);
            }
        }
    }
    match lp.solve() {
        Ok(sol) => Realization {
            margin: sol.objective,
            witness: Vector3::new(sol.x[0], sol.x[1], sol.x[2]),
        },
        // d = 0 satisfies the equalities, so this only happens numerically
        Err(_) => Realization {
            margin: f64::NEG_INFINITY,
            witness: Vector3::zeros(),
        },
    }
}

/// Whether some motion realizes `signs` on the leading planes of `arr`.
pub fn region_feasible(signs: &[i8], arr: &PlaneArrangement) -> bool {
    realization(signs, arr).margin > GEOM_EPS
}

/// Full-dimensional cells, built by inserting one plane at a time and
/// splitting every region the plane passes through.
pub fn enumerate_regions(arr: &PlaneArrangement) -> Vec<CellState> {
    let mut states: Vec<Vec<i8>> = vec![Vec::new()];
    for _ in 0..arr.len() {
        let mut next = Vec::with_capacity(states.len() * 2);
        for s in states {
            for side in [1i8, -1] {
                let mut candidate = s.clone();
                candidate.push(side);
                if region_feasible(&candidate, arr) {
                    next.push(candidate);
                }
            }
        }
        states = next;
    }
    states
        .into_iter()
        .map(|s| CellState::new(s, CellClass::Region))
        .collect()
}

fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("face dimension {k} exceeds space dimension {d}")]
pub struct InvalidBound {
    pub d: u64,
    pub k: u64,
}

/// Upper bound on the number of `k`-faces of an arrangement of `n`
/// hyperplanes in `d` dimensions.
pub fn zaslavsky_bound(n: u64, d: u64, k: u64) -> Result<u64, InvalidBound> {
    if k > d {
        return Err(InvalidBound { d, k });
    }
    let tail = (n + k).checked_sub(d);
    let sum = match tail {
        Some(t) => (0..=k).map(|i| binomial(t, i)).sum(),
        // fewer planes than the codimension: no such faces
        None => 0,
    };
    Ok(binomial(n, d - k) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::planes::{tangent_planes, PlaneRole};
    use crate::model::{build_maps, fixtures};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn arrangement_of(normals: &[[f64; 3]]) -> PlaneArrangement {
        let mut arr = PlaneArrangement::default();
        for (i, n) in normals.iter().enumerate() {
            arr.insert(Vector3::from(*n), i, PlaneRole::Tangent);
        }
        arr
    }

    #[test]
    fn single_plane() {
        let arr = arrangement_of(&[[0.0, 0.0, 1.0]]);
        assert!(region_feasible(&[1], &arr));
        assert_eq!(enumerate_regions(&arr).len(), 2);
    }

    #[test]
    fn two_planes_and_contradictory_members() {
        let arr = arrangement_of(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        assert!(region_feasible(&[1, 1], &arr));
        assert_eq!(enumerate_regions(&arr).len(), 4);

        // a coincident plane with opposite orientation: member signs must agree
        let mut arr = arrangement_of(&[[1.0, 0.0, 0.0]]);
        arr.insert(Vector3::new(-2.0, 0.0, 0.0), 1, PlaneRole::Tangent);
        assert_eq!(arr.len(), 1);
        assert_eq!(arr.planes[0].members[1].orientation, -1);
    }

    /// Sign patterns seen by dense sampling of the unit cube.
    fn sampled_patterns(arr: &PlaneArrangement, samples: usize) -> BTreeSet<Vec<i8>> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        (0..samples)
            .map(|_| {
                let d = Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                arr.sign_vector(&d, 0.0)
            })
            .collect()
    }

    #[test]
    fn three_contact_regions_match_sampling() {
        let arr = tangent_planes(&build_maps(&fixtures::three_contact()));
        let regions: BTreeSet<Vec<i8>> =
            enumerate_regions(&arr).into_iter().map(|c| c.signs).collect();
        assert_eq!(regions.len(), 8);
        assert_eq!(regions, sampled_patterns(&arr, 20_000));
        for s in [[1, 1, 1], [-1, -1, -1], [1, -1, 1]] {
            assert_eq!(region_feasible(&s, &arr), regions.contains(&s.to_vec()));
        }
    }

    #[test]
    fn facets_and_lines_checked_with_zeros() {
        let arr = arrangement_of(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(region_feasible(&[0, 1, -1], &arr));
        assert!(region_feasible(&[0, 0, 1], &arr));
        // origin only: no nonzero sign left to certify a direction
        assert!(region_feasible(&[0, 0, 0], &arr));
        let r = realization(&[0, 0, 1], &arr);
        assert!((r.margin - 1.0).abs() < 1e-12);
        assert!(r.witness.x.abs() < 1e-12 && r.witness.y.abs() < 1e-12);
    }

    #[test]
    fn zaslavsky_examples() {
        assert_eq!(zaslavsky_bound(3, 3, 3).unwrap(), 8);
        assert_eq!(zaslavsky_bound(2, 3, 3).unwrap(), 4);
        assert_eq!(zaslavsky_bound(3, 3, 0).unwrap(), 1);
        assert_eq!(zaslavsky_bound(3, 3, 2).unwrap(), 12);
        assert_eq!(zaslavsky_bound(1, 3, 0).unwrap(), 0);
        assert!(zaslavsky_bound(3, 3, 4).is_err());
    }
}
