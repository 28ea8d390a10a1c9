//! Small dense linear programs.
//!
//! Two-phase tableau simplex with Bland's pivoting rule. The problems solved
//! here have a few dozen variables at most, so a dense tableau is adequate
//! and Bland's rule keeps the pivot sequence deterministic and cycle-free.

use thiserror::Error;

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

/// `maximize c . x` subject to linear rows and per-variable bounds.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex iteration limit reached")]
    IterationLimit,
}

impl LinearProgram {
    /// A program over `n` free variables with zero objective.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn maximize(&mut self, objective: Vec<f64>) -> &mut Self {
        assert_eq!(objective.len(), self.num_vars());
        self.objective = objective;
        self
    }

    pub fn bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        assert!(lower <= upper, "empty bounds for variable {var}");
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars());
        self.rows.push(Row { coeffs, relation, rhs });
        self
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        let std = StandardForm::build(self);
        let y = std.solve()?;
        let x = std.recover(&y);
        let objective = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { x, objective })
    }
}

/// How an original variable is expressed with non-negative columns.
#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// `x = offset + y[col]`
    Shifted { col: usize, offset: f64 },
    /// `x = offset - y[col]`
    Mirrored { col: usize, offset: f64 },
    /// `x = y[pos] - y[neg]`
    Split { pos: usize, neg: usize },
}

/// `minimize cost . y` s.t. `a y = b`, `y >= 0`, with `b >= 0`.
struct StandardForm {
    maps: Vec<VarMap>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    cost: Vec<f64>,
    /// Column that can start the basis for each row (a slack with +1), if any.
    initial: Vec<Option<usize>>,
    num_cols: usize,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut maps = Vec::with_capacity(lp.num_vars());
        let mut num_cols = 0;
        // extra rows y <= bound, expressed over structural columns
        let mut bound_rows: Vec<(usize, f64)> = Vec::new();
        for (&lo, &hi) in lp.lower.iter().zip(&lp.upper) {
            if lo < 0.0 && hi > 0.0 {
                let (pos, neg) = (num_cols, num_cols + 1);
                num_cols += 2;
                if hi.is_finite() {
                    bound_rows.push((pos, hi));
                }
                if lo.is_finite() {
                    bound_rows.push((neg, -lo));
                }
                maps.push(VarMap::Split { pos, neg });
            } else if lo.is_finite() {
                let col = num_cols;
                num_cols += 1;
                if hi.is_finite() {
                    bound_rows.push((col, hi - lo));
                }
                maps.push(VarMap::Shifted { col, offset: lo });
            } else {
                // lo = -inf and hi <= 0
                let col = num_cols;
                num_cols += 1;
                maps.push(VarMap::Mirrored { col, offset: hi });
            }
        }
        let structural = num_cols;

        struct Pending {
            coeffs: Vec<f64>,
            relation: Relation,
            rhs: f64,
        }
        let mut pending = Vec::new();
        for row in &lp.rows {
            let mut coeffs = vec![0.0; structural];
            let mut rhs = row.rhs;
            for (j, &a) in row.coeffs.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                match maps[j] {
                    VarMap::Shifted { col, offset } => {
                        coeffs[col] += a;
                        rhs -= a * offset;
                    }
                    VarMap::Mirrored { col, offset } => {
                        coeffs[col] -= a;
                        rhs -= a * offset;
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs[pos] += a;
                        coeffs[neg] -= a;
                    }
                }
            }
            pending.push(Pending { coeffs, relation: row.relation, rhs });
        }
        for (col, bound) in bound_rows {
            let mut coeffs = vec![0.0; structural];
            coeffs[col] = 1.0;
            pending.push(Pending { coeffs, relation: Relation::Le, rhs: bound });
        }

        let num_slack = pending.iter().filter(|p| p.relation != Relation::Eq).count();
        let total = structural + num_slack;
        let mut a = Vec::with_capacity(pending.len());
        let mut b = Vec::with_capacity(pending.len());
        let mut initial = Vec::with_capacity(pending.len());
        let mut slack_col = structural;
        for p in pending {
            let mut row = p.coeffs;
            row.resize(total, 0.0);
            let mut slack = None;
            match p.relation {
                Relation::Le => {
                    row[slack_col] = 1.0;
                    slack = Some(slack_col);
                    slack_col += 1;
                }
                Relation::Ge => {
                    row[slack_col] = -1.0;
                    slack = Some(slack_col);
                    slack_col += 1;
                }
                Relation::Eq => {}
            }
            let mut rhs = p.rhs;
            if rhs < 0.0 {
                row.iter_mut().for_each(|v| *v = -*v);
                rhs = -rhs;
            }
            initial.push(slack.filter(|&s| row[s] > 0.0));
            a.push(row);
            b.push(rhs);
        }

        let mut cost = vec![0.0; total];
        for (j, &c) in lp.objective.iter().enumerate() {
            // minimize -c . x
            match maps[j] {
                VarMap::Shifted { col, .. } => cost[col] -= c,
                VarMap::Mirrored { col, .. } => cost[col] += c,
                VarMap::Split { pos, neg } => {
                    cost[pos] -= c;
                    cost[neg] += c;
                }
            }
        }

        Self { maps, a, b, cost, initial, num_cols: total }
    }

    fn recover(&self, y: &[f64]) -> Vec<f64> {
        self.maps
            .iter()
            .map(|m| match *m {
                VarMap::Shifted { col, offset } => offset + y[col],
                VarMap::Mirrored { col, offset } => offset - y[col],
                VarMap::Split { pos, neg } => y[pos] - y[neg],
            })
            .collect()
    }

    fn solve(&self) -> Result<Vec<f64>, LpError> {
        let rows = self.a.len();
        let n = self.num_cols;
        if rows == 0 {
            // only y >= 0; bounded iff no negative cost
            if self.cost.iter().any(|&c| c < -COST_EPS) {
                return Err(LpError::Unbounded);
            }
            return Ok(vec![0.0; n]);
        }

        // artificial columns for rows without a usable slack
        let mut art_cols = Vec::new();
        let mut basis = Vec::with_capacity(rows);
        let mut width = n;
        for init in &self.initial {
            match init {
                Some(c) => basis.push(*c),
                None => {
                    basis.push(width);
                    art_cols.push(width);
                    width += 1;
                }
            }
        }
        let mut t = Tableau::new(rows, width);
        let mut next_art = n;
        for (i, init) in self.initial.iter().enumerate() {
            t.row_mut(i)[..n].copy_from_slice(&self.a[i]);
            if init.is_none() {
                t.row_mut(i)[next_art] = 1.0;
                next_art += 1;
            }
            *t.rhs_mut(i) = self.b[i];
        }
        t.basis = basis;

        if !art_cols.is_empty() {
            let mut phase1 = vec![0.0; width];
            for &c in &art_cols {
                phase1[c] = 1.0;
            }
            t.set_objective(&phase1);
            t.optimize(width)?;
            let scale = 1.0 + self.b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if t.objective_value() > 1e-9 * scale {
                return Err(LpError::Infeasible);
            }
            // pivot artificials out of the basis, drop redundant rows
            let mut r = 0;
            while r < t.rows {
                if t.basis[r] >= n {
                    let col = (0..n).find(|&j| t.at(r, j).abs() > 1e-9);
                    match col {
                        Some(j) => t.pivot(r, j),
                        None => {
                            t.remove_row(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
        }

        let mut cost = self.cost.clone();
        cost.resize(width, 0.0);
        t.set_objective(&cost);
        // artificial columns may not re-enter
        t.optimize(n)?;

        let mut y = vec![0.0; n];
        for (r, &col) in t.basis.iter().enumerate() {
            if col < n {
                y[col] = t.rhs(r).max(0.0);
            }
        }
        Ok(y)
    }
}

/// Row-major tableau; the last row holds reduced costs, the last column the
/// right-hand side.
struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(rows: usize, width: usize) -> Self {
        Self {
            rows,
            width,
            data: vec![0.0; (rows + 1) * (width + 1)],
            basis: Vec::new(),
        }
    }

    #[inline]
    fn stride(&self) -> usize {
        self.width + 1
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.stride() + c]
    }

    fn row_mut(&mut self, r: usize) -> &mut [f64] {
        let s = self.stride();
        &mut self.data[r * s..(r + 1) * s]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width)
    }

    fn rhs_mut(&mut self, r: usize) -> &mut f64 {
        let s = self.stride();
        &mut self.data[r * s + self.width]
    }

    fn objective_value(&self) -> f64 {
        // cost row stores -z in its rhs slot
        -self.at(self.rows, self.width)
    }

    fn set_objective(&mut self, cost: &[f64]) {
        let s = self.stride();
        let obj = self.rows * s;
        for j in 0..=self.width {
            self.data[obj + j] = if j < self.width { cost[j] } else { 0.0 };
        }
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for j in 0..=self.width {
                    self.data[obj + j] -= cb * self.data[r * s + j];
                }
            }
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let s = self.stride();
        let p = self.at(pr, pc);
        for j in 0..s {
            self.data[pr * s + j] /= p;
        }
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.data[r * s + pc];
            if f != 0.0 {
                for j in 0..s {
                    let v = self.data[pr * s + j];
                    if v != 0.0 {
                        self.data[r * s + j] -= f * v;
                    }
                }
                self.data[r * s + pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    fn remove_row(&mut self, r: usize) {
        let s = self.stride();
        self.data.drain(r * s..(r + 1) * s);
        self.basis.remove(r);
        self.rows -= 1;
    }

    /// Bland's rule over columns `< allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<(), LpError> {
        for _ in 0..MAX_ITERATIONS {
            let entering = (0..allowed).find(|&j| self.at(self.rows, j) < -COST_EPS);
            let Some(pc) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r).max(0.0) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bv)) => {
                            if ratio < bv - 1e-12
                                || (ratio <= bv + 1e-12 && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bv))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = best else {
                return Err(LpError::Unbounded);
            };
            self.pivot(pr, pc);
        }
        Err(LpError::IterationLimit)
    }
}
