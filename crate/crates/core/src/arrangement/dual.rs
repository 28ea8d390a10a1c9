//! The dual graph of a central plane arrangement: one vertex per region, one
//! edge per facet. Its faces correspond to the one-dimensional cells (rays)
//! of the arrangement and are recovered from a minimum cycle basis.

use std::collections::{BTreeSet, HashMap};

use nalgebra::Vector3;
use serde::Serialize;

use super::cells::{region_feasible, CellClass, CellState};
use super::mcb::{minimum_cycle_basis_by, symmetric_sum, Cycle, GraphError};
use super::planes::PlaneArrangement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DualEdge {
    pub a: usize,
    pub b: usize,
    /// Plane separating the two regions.
    pub plane: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualGraph {
    pub vertices: Vec<CellState>,
    pub edges: Vec<DualEdge>,
    /// Faces as edge lists; filled by [`line_states`].
    pub faces: Vec<Vec<usize>>,
}

impl DualGraph {
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.a, e.b)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ArrangementError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cycle {cycle:?} does not bound a face: {reason}")]
    InconsistentCycle { cycle: Vec<usize>, reason: &'static str },
}

/// Connects regions whose sign vectors differ in exactly one entry, provided
/// the shared facet is realizable. Returns the graph and one facet cell per
/// edge.
pub fn build_dual_graph(
    regions: &[CellState],
    arr: &PlaneArrangement,
) -> (DualGraph, Vec<CellState>) {
    let index: HashMap<&[i8], usize> = regions
        .iter()
        .enumerate()
        .map(|(i, r)| (r.signs.as_slice(), i))
        .collect();
    let mut edges = Vec::new();
    let mut facets = Vec::new();
    for (a, region) in regions.iter().enumerate() {
        for plane in 0..region.signs.len() {
            let mut flipped = region.signs.clone();
            flipped[plane] = -flipped[plane];
            let Some(&b) = index.get(flipped.as_slice()) else {
                continue;
            };
            if b < a {
                continue;
            }
            flipped[plane] = 0;
            if region_feasible(&flipped, arr) {
                edges.push(DualEdge { a, b, plane });
                facets.push(CellState::new(flipped, CellClass::Facet));
            }
        }
    }
    let graph = DualGraph {
        vertices: regions.to_vec(),
        edges,
        faces: Vec::new(),
    };
    (graph, facets)
}

/// Signs of the ray bounded by `cycle`, if the cycle is a face of the dual:
/// every vertex agrees off the traversed planes, the traversed planes meet
/// in a common line, and the cycle crosses each of them exactly twice.
fn face_signs(
    graph: &DualGraph,
    cycle: &[usize],
    arr: &PlaneArrangement,
) -> Result<Vec<i8>, &'static str> {
    let mut crossings: HashMap<usize, usize> = HashMap::new();
    for &e in cycle {
        *crossings.entry(graph.edges[e].plane).or_default() += 1;
    }
    if crossings.values().any(|&c| c != 2) {
        return Err("a plane is not crossed exactly twice");
    }
    let zeroed: BTreeSet<usize> = crossings.keys().copied().collect();
    if zeroed.len() < 2 {
        return Err("fewer than two planes traversed");
    }

    let first = graph.edges[cycle[0]].a;
    let mut signs = graph.vertices[first].signs.clone();
    for &z in &zeroed {
        signs[z] = 0;
    }
    for &e in cycle {
        for v in [graph.edges[e].a, graph.edges[e].b] {
            let agrees = graph.vertices[v]
                .signs
                .iter()
                .zip(&signs)
                .all(|(&s, &t)| t == 0 || s == t);
            if !agrees {
                return Err("vertices disagree off the traversed planes");
            }
        }
    }

    // traversed planes must share one line
    let normals: Vec<Vector3<f64>> = zeroed.iter().map(|&z| arr.planes[z].normal).collect();
    let line = normals[1..]
        .iter()
        .map(|n| normals[0].cross(n))
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    if line.norm() < 1e-9 {
        return Err("traversed planes are parallel");
    }
    let line = line.normalize();
    if normals.iter().any(|n| n.dot(&line).abs() > 1e-9) {
        return Err("traversed planes do not share a line");
    }
    Ok(signs)
}

/// Minimum cycle basis of the dual graph. Among equal-length cycles, those
/// that bound a face are preferred; this keeps the basis minimum and makes
/// it consist of faces whenever such a minimum basis exists.
pub fn face_basis(graph: &DualGraph, arr: &PlaneArrangement) -> Result<Vec<Cycle>, GraphError> {
    let pairs = graph.edge_pairs();
    minimum_cycle_basis_by(graph.vertices.len(), &pairs, |c| {
        face_signs(graph, &c.edges, arr).is_err()
    })
}

/// One line cell per face of the dual: the basis cycles plus their
/// symmetric sum. Each face zeroes the planes it traverses.
///
/// When every plane passes through one common line the dual is flat and its
/// two faces (the two rays of that line) share a sign vector; both are kept.
pub fn line_states(
    graph: &mut DualGraph,
    basis: &[Cycle],
    arr: &PlaneArrangement,
) -> Result<Vec<CellState>, ArrangementError> {
    graph.faces.clear();
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let mut faces: Vec<Cycle> = basis.to_vec();
    faces.push(symmetric_sum(basis, graph.edges.len()));

    let mut lines = Vec::with_capacity(faces.len());
    let mut seen: BTreeSet<Vec<i8>> = BTreeSet::new();
    for face in &faces {
        let signs = face_signs(graph, &face.edges, arr).map_err(|reason| {
            ArrangementError::InconsistentCycle { cycle: face.edges.clone(), reason }
        })?;
        let flat = signs.iter().all(|&s| s == 0);
        if !flat && !region_feasible(&signs, arr) {
            return Err(ArrangementError::InconsistentCycle {
                cycle: face.edges.clone(),
                reason: "ray is not realizable",
            });
        }
        if !seen.insert(signs.clone()) && !flat {
            return Err(ArrangementError::InconsistentCycle {
                cycle: face.edges.clone(),
                reason: "duplicate face",
            });
        }
        graph.faces.push(face.edges.clone());
        lines.push(CellState::new(signs, CellClass::Line));
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::cells::enumerate_regions;
    use crate::arrangement::planes::{separation_planes, tangent_planes, PlaneRole};
    use crate::model::{build_maps, fixtures};

    fn arrangement_of(normals: &[[f64; 3]]) -> PlaneArrangement {
        let mut arr = PlaneArrangement::default();
        for (i, n) in normals.iter().enumerate() {
            arr.insert(Vector3::from(*n), i, PlaneRole::Tangent);
        }
        arr
    }

    fn full(arr: &PlaneArrangement) -> (DualGraph, Vec<CellState>, Vec<CellState>) {
        let regions = enumerate_regions(arr);
        let (mut g, facets) = build_dual_graph(&regions, arr);
        let basis = face_basis(&g, arr).unwrap();
        let lines = line_states(&mut g, &basis, arr).unwrap();
        (g, facets, lines)
    }

    #[test]
    fn one_plane() {
        let arr = arrangement_of(&[[1.0, 0.0, 0.0]]);
        let (g, facets, lines) = full(&arr);
        assert_eq!((g.vertices.len(), g.edges.len()), (2, 1));
        assert_eq!(facets[0].signs, vec![0]);
        assert!(lines.is_empty());
    }

    #[test]
    fn two_planes_square() {
        let arr = arrangement_of(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let (g, facets, lines) = full(&arr);
        assert_eq!((g.vertices.len(), g.edges.len(), facets.len()), (4, 4, 4));
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| l.signs == vec![0, 0]));
        assert_eq!(g.euler_characteristic(), 2);
    }

    #[test]
    fn three_general_planes() {
        let arr = tangent_planes(&build_maps(&fixtures::three_contact()));
        let (g, facets, lines) = full(&arr);
        assert_eq!((g.vertices.len(), g.edges.len()), (8, 12));
        assert_eq!(facets.len(), 12);
        assert_eq!(lines.len(), 6);
        assert_eq!(g.euler_characteristic(), 2);
        for e in &g.edges {
            let diff = g.vertices[e.a]
                .signs
                .iter()
                .zip(&g.vertices[e.b].signs)
                .filter(|(a, b)| a != b)
                .count();
            assert_eq!(diff, 1);
        }
    }

    #[test]
    fn concurrent_planes_give_hexagonal_faces() {
        // three-contact grasp with separation planes: three planes share the x axis
        let model = fixtures::three_contact();
        let maps = build_maps(&model);
        let arr = separation_planes(&model, &maps, tangent_planes(&maps));
        assert_eq!(arr.len(), 5);
        let (g, _, lines) = full(&arr);
        assert_eq!(g.euler_characteristic(), 2);
        assert!(g.faces.iter().any(|f| f.len() == 6));
        // independent count: rays from pairwise plane intersections
        let mut rays = BTreeSet::new();
        for a in 0..arr.len() {
            for b in a + 1..arr.len() {
                let l = arr.planes[a].normal.cross(&arr.planes[b].normal);
                for dir in [l, -l] {
                    rays.insert(arr.sign_vector(&dir, 1e-9));
                }
            }
        }
        let got: BTreeSet<Vec<i8>> = lines.iter().map(|l| l.signs.clone()).collect();
        assert_eq!(got, rays);
    }
}
