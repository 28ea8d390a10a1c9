//! L1 grasp wrench space: the convex hull of the origin and the cone-edge
//! wrenches of every contact at unit normal force.

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::lp::{LinearProgram, Relation};
use crate::model::{build_maps, world_force, ContactForce, GraspModel};

const HULL_EPS: f64 = 1e-9;

/// Supporting plane `normal . x <= offset` with outward unit normal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullFacet {
    pub normal: Vector3<f64>,
    pub offset: f64,
    /// Indices into the polytope's vertex list.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WrenchPolytope {
    /// Extreme points in `(f_x, f_y, tau)`.
    pub vertices: Vec<Vector3<f64>>,
    /// Empty unless the hull is full-dimensional.
    pub facets: Vec<HullFacet>,
    /// Affine dimension of the hull.
    pub dimension: usize,
}

impl WrenchPolytope {
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        if self.dimension == 3 {
            return self.facets.iter().all(|f| f.normal.dot(p) <= f.offset + HULL_EPS);
        }
        convex_weights(&self.vertices, p).is_some()
    }
}

/// Wrenches at the two edges of each contact's friction cone, unit normal force.
pub fn edge_wrenches(model: &GraspModel) -> Vec<Vector3<f64>> {
    model
        .contacts
        .iter()
        .flat_map(|c| {
            [1.0, -1.0].map(|s| world_force(c, &ContactForce::new(1.0, s * c.mu)).as_wrench_vector())
        })
        .collect()
}

/// Weights `lambda >= 0`, `sum lambda = 1` with `sum lambda_i p_i = x`.
fn convex_weights(points: &[Vector3<f64>], x: &Vector3<f64>) -> Option<Vec<f64>> {
    let n = points.len();
    let mut lp = LinearProgram::new(n);
    for j in 0..n {
        lp.bounds(j, 0.0, f64::INFINITY);
    }
    for k in 0..3 {
        lp.constraint(points.iter().map(|p| p[k]).collect(), Relation::Eq, x[k]);
    }
    lp.constraint(vec![1.0; n], Relation::Eq, 1.0);
    lp.solve().ok().map(|s| s.x)
}

fn dedup_points(points: Vec<Vector3<f64>>) -> Vec<Vector3<f64>> {
    let mut out: Vec<Vector3<f64>> = Vec::new();
    for p in points {
        if out.iter().all(|q| (q - p).amax() > HULL_EPS) {
            out.push(p);
        }
    }
    out
}

fn affine_dimension(points: &[Vector3<f64>]) -> usize {
    let c = points[0];
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - c;
        cov += d * d.transpose();
    }
    let sv = cov.symmetric_eigenvalues();
    let scale = sv.amax().max(1.0);
    sv.iter().filter(|&&s| s > HULL_EPS * scale).count()
}

pub fn gws_l1(model: &GraspModel) -> WrenchPolytope {
    let mut points = vec![Vector3::zeros()];
    points.extend(edge_wrenches(model));
    let points = dedup_points(points);
    let dimension = affine_dimension(&points);

    // a point is a vertex iff it is not a convex combination of the others
    let vertices: Vec<Vector3<f64>> = (0..points.len())
        .filter(|&i| {
            let others: Vec<_> = points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| *p).collect();
            others.is_empty() || convex_weights(&others, &points[i]).is_none()
        })
        .map(|i| points[i])
        .collect();

    let facets = if dimension == 3 { hull_facets(&vertices) } else { Vec::new() };
    WrenchPolytope { vertices, facets, dimension }
}

/// Facets of a full-dimensional hull by testing every vertex triple.
fn hull_facets(vertices: &[Vector3<f64>]) -> Vec<HullFacet> {
    let n = vertices.len();
    let mut facets: Vec<HullFacet> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let normal = (vertices[b] - vertices[a]).cross(&(vertices[c] - vertices[a]));
                if normal.norm() < HULL_EPS {
                    continue;
                }
                let mut normal = normal.normalize();
                let mut offset = normal.dot(&vertices[a]);
                let side: Vec<f64> = vertices.iter().map(|v| normal.dot(v) - offset).collect();
                if side.iter().all(|&s| s >= -HULL_EPS) {
                    normal = -normal;
                    offset = -offset;
                } else if !side.iter().all(|&s| s <= HULL_EPS) {
                    continue;
                }
                let known = facets
                    .iter()
                    .any(|f| (f.normal - normal).amax() < 1e-9 && (f.offset - offset).abs() < 1e-9);
                if !known {
                    let on: Vec<usize> = (0..n)
                        .filter(|&i| (normal.dot(&vertices[i]) - offset).abs() <= HULL_EPS)
                        .collect();
                    facets.push(HullFacet { normal, offset, vertices: on });
                }
            }
        }
    }
    facets
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SliceError {
    #[error("the plane tau = {0} does not meet the wrench space")]
    Empty(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlicePolygon {
    pub tau: f64,
    /// Counterclockwise vertices `(f_x, f_y)`.
    pub vertices: Vec<Vector2<f64>>,
    /// Fewer than three vertices or zero area.
    pub degenerate: bool,
}

impl SlicePolygon {
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        (0..n)
            .map(|i| {
                let (p, q) = (v[i], v[(i + 1) % n]);
                p.x * q.y - p.y * q.x
            })
            .sum::<f64>()
            * 0.5
    }

    /// Distance from `p` to the boundary when `p` lies inside, negative
    /// otherwise. Only meaningful for non-degenerate polygons.
    pub fn inradius_at(&self, p: &Vector2<f64>) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                let e = b - a;
                (e.x * (p.y - a.y) - e.y * (p.x - a.x)) / e.norm()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Cross-section of the polytope with the plane `tau = t`.
pub fn gws_slice(poly: &WrenchPolytope, t: f64) -> Result<SlicePolygon, SliceError> {
    let pts = &poly.vertices;
    let mut cut: Vec<Vector2<f64>> = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        if (p.z - t).abs() <= HULL_EPS {
            cut.push(p.xy());
        }
        for q in &pts[i + 1..] {
            let (a, b) = (p.z - t, q.z - t);
            if (a < -HULL_EPS && b > HULL_EPS) || (a > HULL_EPS && b < -HULL_EPS) {
                let s = a / (a - b);
                cut.push((p + (q - p) * s).xy());
            }
        }
    }
    if cut.is_empty() {
        return Err(SliceError::Empty(format!("{t}")));
    }
    let vertices = convex_hull_2d(cut);
    let mut poly = SlicePolygon { tau: t, vertices, degenerate: false };
    poly.degenerate = poly.vertices.len() < 3 || poly.area() <= HULL_EPS;
    Ok(poly)
}

/// Monotone-chain hull, counterclockwise, collinear points dropped.
pub fn convex_hull_2d(mut pts: Vec<Vector2<f64>>) -> Vec<Vector2<f64>> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| (*a - *b).amax() <= HULL_EPS);
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>| {
        (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
    };
    let mut hull: Vec<Vector2<f64>> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vector2<f64>>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for p in iter {
            while hull.len() >= start + 2
                && turn(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= HULL_EPS
            {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

/// Whether `target` is produced by cone-feasible forces with `c_n <= 1` at
/// every contact.
pub fn wrench_achievable(model: &GraspModel, target: &Vector3<f64>) -> bool {
    let m = model.len();
    let maps = build_maps(model);
    let mut lp = LinearProgram::new(2 * m);
    for (i, c) in model.contacts.iter().enumerate() {
        lp.bounds(2 * i, 0.0, 1.0);
        let mut up = vec![0.0; 2 * m];
        up[2 * i] = c.mu;
        up[2 * i + 1] = -1.0;
        lp.constraint(up, Relation::Ge, 0.0);
        let mut down = vec![0.0; 2 * m];
        down[2 * i] = c.mu;
        down[2 * i + 1] = 1.0;
        lp.constraint(down, Relation::Ge, 0.0);
    }
    for k in 0..3 {
        let mut a = vec![0.0; 2 * m];
        for (i, r) in maps.rows.iter().enumerate() {
            a[2 * i] = -r.normal[k];
            a[2 * i + 1] = r.tangent[k];
        }
        lp.constraint(a, Relation::Eq, target[k]);
    }
    lp.solve().is_ok()
}
