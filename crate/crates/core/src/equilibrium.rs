//! Per-slip-state force and motion solve.
//!
//! Unknowns are stacked as `x = (d_x, d_y, d_r, c_1n, c_1t, ..., c_mn, c_mt)`.
//! For a fixed labeling of the contacts the conditions on `x` are linear:
//! equalities from equilibrium, the normal springs and the per-label rules,
//! plus sign conditions that keep the labeling honest.

use nalgebra::{DMatrix, DVector, Vector2, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{ContactLabel, SlipState};
use crate::lp::{LinearProgram, Relation};
use crate::model::{build_maps, cross2, ContactForce, GraspModel, Wrench};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Maximum equality residual accepted from a solve.
    pub equality: f64,
    /// Minimum inequality slack, `-eps_lp`.
    pub slack: f64,
    /// Relative singular-value threshold below which the direct solve is skipped.
    pub singular: f64,
    /// Box bound on every unknown in the feasibility program.
    pub box_bound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equality: 1e-9,
            slack: 1e-8,
            singular: 1e-10,
            box_bound: 1e6,
        }
    }
}

/// Origin of an equality row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EqualityKind {
    Equilibrium,
    Constitutive(usize),
    SlipFriction(usize),
    Stick(usize),
    DetachedNormal(usize),
    DetachedTangent(usize),
    Other,
}

/// Origin of an inequality row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityKind {
    Unilateral(usize),
    ConeUpper(usize),
    ConeLower(usize),
    SlipSign(usize),
    Separation(usize),
    Other,
}

/// `eq * x = eq_rhs`, `ineq * x >= ineq_rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSystem {
    pub eq: DMatrix<f64>,
    pub eq_rhs: DVector<f64>,
    pub eq_kinds: Vec<EqualityKind>,
    pub ineq: DMatrix<f64>,
    pub ineq_rhs: DVector<f64>,
    pub ineq_kinds: Vec<InequalityKind>,
    pub slip_count: usize,
}

impl StateSystem {
    /// A system without bookkeeping, mostly for tests.
    pub fn from_parts(
        eq: DMatrix<f64>,
        eq_rhs: DVector<f64>,
        ineq: DMatrix<f64>,
        ineq_rhs: DVector<f64>,
    ) -> Self {
        assert_eq!(eq.nrows(), eq_rhs.len());
        assert_eq!(ineq.nrows(), ineq_rhs.len());
        assert!(eq.nrows() == 0 || ineq.nrows() == 0 || eq.ncols() == ineq.ncols());
        Self {
            eq_kinds: vec![EqualityKind::Other; eq.nrows()],
            ineq_kinds: vec![InequalityKind::Other; ineq.nrows()],
            eq,
            eq_rhs,
            ineq,
            ineq_rhs,
            slip_count: 0,
        }
    }

    pub fn num_unknowns(&self) -> usize {
        self.eq.ncols().max(self.ineq.ncols())
    }

    pub fn equality_residual(&self, x: &DVector<f64>) -> f64 {
        if self.eq.nrows() == 0 {
            return 0.0;
        }
        (&self.eq * x - &self.eq_rhs).amax()
    }

    /// Smallest inequality slack; `+inf` without inequalities.
    pub fn min_slack(&self, x: &DVector<f64>) -> f64 {
        if self.ineq.nrows() == 0 {
            return f64::INFINITY;
        }
        (&self.ineq * x - &self.ineq_rhs).min()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EquilibriumError {
    #[error("state has {got} labels but the grasp has {expected} contacts")]
    LabelCount { expected: usize, got: usize },
    #[error("contact {0} carries a normal preload and cannot be detached")]
    PreloadedDetached(usize),
}

struct Rows {
    n: usize,
    eq: Vec<(Vec<f64>, f64, EqualityKind)>,
    ineq: Vec<(Vec<f64>, f64, InequalityKind)>,
}

impl Rows {
    fn zero(&self) -> Vec<f64> {
        vec![0.0; self.n]
    }

    fn into_system(self, slip_count: usize) -> StateSystem {
        let n = self.n;
        let eq = DMatrix::from_fn(self.eq.len(), n, |r, c| self.eq[r].0[c]);
        let eq_rhs = DVector::from_iterator(self.eq.len(), self.eq.iter().map(|r| r.1));
        let ineq = DMatrix::from_fn(self.ineq.len(), n, |r, c| self.ineq[r].0[c]);
        let ineq_rhs = DVector::from_iterator(self.ineq.len(), self.ineq.iter().map(|r| r.1));
        StateSystem {
            eq,
            eq_rhs,
            eq_kinds: self.eq.iter().map(|r| r.2).collect(),
            ineq,
            ineq_rhs,
            ineq_kinds: self.ineq.iter().map(|r| r.2).collect(),
            slip_count,
        }
    }
}

fn cn(i: usize) -> usize {
    3 + 2 * i
}

fn ct(i: usize) -> usize {
    4 + 2 * i
}

pub fn assemble_state_system(
    model: &GraspModel,
    w: &Wrench,
    labels: &[ContactLabel],
) -> Result<StateSystem, EquilibriumError> {
    let m = model.len();
    if labels.len() != m {
        return Err(EquilibriumError::LabelCount { expected: m, got: labels.len() });
    }
    if let Some(i) = (0..m).find(|&i| labels[i] == ContactLabel::Detached && !model.is_unloaded(i)) {
        return Err(EquilibriumError::PreloadedDetached(i));
    }
    let maps = build_maps(model);
    let mut rows = Rows { n: 3 + 2 * m, eq: Vec::new(), ineq: Vec::new() };

    // sum_i (-N_i c_n + T_i c_t) = -w
    let wv = w.as_vector();
    for k in 0..3 {
        let mut a = rows.zero();
        for (i, r) in maps.rows.iter().enumerate() {
            a[cn(i)] = -r.normal[k];
            a[ct(i)] = r.tangent[k];
        }
        rows.eq.push((a, -wv[k], EqualityKind::Equilibrium));
    }

    let mut slip_count = 0;
    for (i, (&label, r)) in labels.iter().zip(&maps.rows).enumerate() {
        let k = model.stiffness[i];
        let mu = model.contacts[i].mu;
        if label == ContactLabel::Detached {
            let mut a = rows.zero();
            a[cn(i)] = 1.0;
            rows.eq.push((a, 0.0, EqualityKind::DetachedNormal(i)));
            let mut a = rows.zero();
            a[ct(i)] = 1.0;
            rows.eq.push((a, 0.0, EqualityKind::DetachedTangent(i)));
            let mut a = rows.zero();
            for j in 0..3 {
                a[j] = -r.normal[j];
            }
            rows.ineq.push((a, 0.0, InequalityKind::Separation(i)));
            continue;
        }

        let mut a = rows.zero();
        a[cn(i)] = 1.0;
        for j in 0..3 {
            a[j] = -k * r.normal[j];
        }
        rows.eq.push((a, model.preload[i].normal, EqualityKind::Constitutive(i)));
        let mut a = rows.zero();
        a[cn(i)] = 1.0;
        rows.ineq.push((a, 0.0, InequalityKind::Unilateral(i)));

        match label {
            ContactLabel::Stick => {
                let mut a = rows.zero();
                a[..3].copy_from_slice(r.tangent.as_slice());
                rows.eq.push((a, 0.0, EqualityKind::Stick(i)));
                let mut a = rows.zero();
                a[cn(i)] = mu;
                a[ct(i)] = -1.0;
                rows.ineq.push((a, 0.0, InequalityKind::ConeUpper(i)));
                let mut a = rows.zero();
                a[cn(i)] = mu;
                a[ct(i)] = 1.0;
                rows.ineq.push((a, 0.0, InequalityKind::ConeLower(i)));
            }
            ContactLabel::SlipNeg | ContactLabel::SlipPos => {
                slip_count += 1;
                let s = label.slip_sign().unwrap_or(0.0);
                // friction opposes slip: c_t = -s mu c_n
                let mut a = rows.zero();
                a[ct(i)] = 1.0;
                a[cn(i)] = s * mu;
                rows.eq.push((a, 0.0, EqualityKind::SlipFriction(i)));
                let mut a = rows.zero();
                for j in 0..3 {
                    a[j] = s * r.tangent[j];
                }
                rows.ineq.push((a, 0.0, InequalityKind::SlipSign(i)));
            }
            ContactLabel::Detached => unreachable!(),
        }
    }
    Ok(rows.into_system(slip_count))
}

/// Maximizes the smallest inequality slack `t <= 1` over the equality
/// polyhedron intersected with `|x_j| <= box_bound`. Returns the point if the
/// optimum is at least `-tol.slack`.
pub fn linear_feasibility(sys: &StateSystem, tol: &Tolerances) -> Option<DVector<f64>> {
    let n = sys.num_unknowns();
    let mut lp = LinearProgram::new(n + 1);
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    lp.maximize(objective);
    for j in 0..n {
        lp.bounds(j, -tol.box_bound, tol.box_bound);
    }
    lp.bounds(n, f64::NEG_INFINITY, 1.0);
    for r in 0..sys.eq.nrows() {
        let mut a: Vec<f64> = sys.eq.row(r).iter().copied().collect();
        a.push(0.0);
        lp.constraint(a, Relation::Eq, sys.eq_rhs[r]);
    }
    for r in 0..sys.ineq.nrows() {
        let mut a: Vec<f64> = sys.ineq.row(r).iter().copied().collect();
        a.push(-1.0);
        lp.constraint(a, Relation::Ge, sys.ineq_rhs[r]);
    }
    let sol = lp.solve().ok()?;
    if sol.objective < -tol.slack {
        return None;
    }
    let x = DVector::from_iterator(n, sol.x.into_iter().take(n));
    (sys.equality_residual(&x) <= tol.equality).then_some(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    /// Square, well-conditioned system solved directly.
    Direct,
    /// Rank-deficient system handled by the feasibility program.
    Feasibility,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolveResiduals {
    pub equality: f64,
    pub min_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumSolution {
    /// Virtual object motion `(x, y, r)`.
    pub d: Vector3<f64>,
    pub forces: Vec<ContactForce>,
    pub labels: Vec<ContactLabel>,
    /// Index of the state in its slip-state set, when known.
    pub state: Option<usize>,
    pub residuals: SolveResiduals,
    pub mode: SolveMode,
}

/// Solves the system of one labeling. `Ok(None)` means infeasible.
pub fn solve_labels(
    model: &GraspModel,
    w: &Wrench,
    labels: &[ContactLabel],
    tol: &Tolerances,
) -> Result<Option<EquilibriumSolution>, EquilibriumError> {
    let sys = assemble_state_system(model, w, labels)?;
    let n = sys.num_unknowns();

    let mut mode = SolveMode::Feasibility;
    let mut x = None;
    if sys.eq.nrows() == n {
        let sv = sys.eq.clone().svd(false, false).singular_values;
        let (smax, smin) = (sv.max(), sv.min());
        if smax > 0.0 && smin > tol.singular * smax {
            mode = SolveMode::Direct;
            x = sys.eq.clone().lu().solve(&sys.eq_rhs);
        }
    }
    let x = match (mode, x) {
        (SolveMode::Direct, Some(x)) => {
            if sys.min_slack(&x) < -tol.slack || sys.equality_residual(&x) > tol.equality {
                return Ok(None);
            }
            x
        }
        _ => {
            mode = SolveMode::Feasibility;
            match linear_feasibility(&sys, tol) {
                Some(x) => x,
                None => return Ok(None),
            }
        }
    };

    let m = model.len();
    Ok(Some(EquilibriumSolution {
        d: Vector3::new(x[0], x[1], x[2]),
        forces: (0..m).map(|i| ContactForce::new(x[cn(i)], x[ct(i)])).collect(),
        labels: labels.to_vec(),
        state: None,
        residuals: SolveResiduals {
            equality: sys.equality_residual(&x),
            min_slack: sys.min_slack(&x),
        },
        mode,
    }))
}

pub fn solve_state(
    model: &GraspModel,
    w: &Wrench,
    state: &SlipState,
    tol: &Tolerances,
) -> Result<Option<EquilibriumSolution>, EquilibriumError> {
    let sol = solve_labels(model, w, &state.labels, tol)?;
    Ok(sol.map(|s| EquilibriumSolution { state: Some(state.index), ..s }))
}

/// Violations found by [`check_solution`]; every entry is a non-negative
/// magnitude, zero when the condition holds exactly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ResidualReport {
    pub equilibrium: f64,
    pub unilateral: f64,
    pub cone: f64,
    pub constitutive: f64,
    pub stick_motion: f64,
    pub slip_direction: f64,
    pub slip_friction: f64,
    pub detached_force: f64,
    pub detached_motion: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        [
            self.equilibrium,
            self.unilateral,
            self.cone,
            self.constitutive,
            self.stick_motion,
            self.slip_direction,
            self.slip_friction,
            self.detached_force,
            self.detached_motion,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Recomputes every physical condition of a solution from the geometry,
/// without the assembly code.
pub fn check_solution(model: &GraspModel, w: &Wrench, sol: &EquilibriumSolution) -> ResidualReport {
    let mut rep = ResidualReport::default();
    let mut total = Vector3::new(w.fx, w.fy, w.torque);
    let d_lin = Vector2::new(sol.d.x, sol.d.y);
    for (i, c) in model.contacts.iter().enumerate() {
        let f = sol.forces.get(i).copied().unwrap_or(ContactForce::ZERO);
        let label = sol.labels.get(i).copied().unwrap_or(ContactLabel::Stick);
        let tangent = Vector2::new(c.normal.y, -c.normal.x);
        let force = -c.normal * f.normal + tangent * f.tangential;
        total += Vector3::new(force.x, force.y, cross2(&c.position, &force));

        let v = d_lin + sol.d.z * Vector2::new(-c.position.y, c.position.x);
        let (dn, dt) = (c.normal.dot(&v), tangent.dot(&v));
        rep.cone = rep.cone.max(f.tangential.abs() - c.mu * f.normal);

        if label == ContactLabel::Detached {
            rep.detached_force = rep.detached_force.max(f.normal.abs()).max(f.tangential.abs());
            rep.detached_motion = rep.detached_motion.max(dn);
            continue;
        }
        rep.unilateral = rep.unilateral.max(-f.normal);
        let spring = model.preload[i].normal + model.stiffness[i] * dn;
        rep.constitutive = rep.constitutive.max((f.normal - spring).abs());
        match label.slip_sign() {
            Some(s) if s != 0.0 => {
                rep.slip_direction = rep.slip_direction.max(-s * dt);
                rep.slip_friction = rep.slip_friction.max((f.tangential + s * c.mu * f.normal).abs());
            }
            _ => rep.stick_motion = rep.stick_motion.max(dt.abs()),
        }
    }
    rep.equilibrium = total.amax();
    rep.cone = rep.cone.max(0.0);
    rep
}
