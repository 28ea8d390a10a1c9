//! Passive stability queries over the enumerated slip states.

use nalgebra::Vector2;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{
    enumerate_slip_states, ArrangementError, EnumerationOptions, SlipStateSet,
};
use crate::equilibrium::{solve_state, EquilibriumError, EquilibriumSolution, Tolerances};
use crate::model::{validate_model, GraspModel, ModelError, Wrench};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    State(#[from] EquilibriumError),
    #[error("wrench has non-finite components")]
    NonFiniteWrench,
    #[error("{0}")]
    InvalidParameter(&'static str),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub stable: bool,
    pub witness: Option<EquilibriumSolution>,
    /// States examined up to and including the witness, or all of them.
    pub states_tried: usize,
    pub detachment: bool,
}

/// A grasp with its slip-state set computed once and reused across wrenches.
#[derive(Clone, Debug)]
pub struct StabilityAnalyzer {
    model: GraspModel,
    states: SlipStateSet,
    options: EnumerationOptions,
    tol: Tolerances,
}

impl StabilityAnalyzer {
    pub fn new(model: GraspModel, options: EnumerationOptions) -> Result<Self, StabilityError> {
        validate_model(&model)?;
        let states = enumerate_slip_states(&model, options)?;
        Ok(Self { model, states, options, tol: Tolerances::default() })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn model(&self) -> &GraspModel {
        &self.model
    }

    pub fn states(&self) -> &SlipStateSet {
        &self.states
    }

    pub fn options(&self) -> EnumerationOptions {
        self.options
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// First state in canonical order admitting a solution. States are
    /// solved in parallel; the witness is the same as a sequential scan.
    pub fn check(&self, w: &Wrench) -> Result<Verdict, StabilityError> {
        if !w.is_finite() {
            return Err(StabilityError::NonFiniteWrench);
        }
        let found = self
            .states
            .states
            .par_iter()
            .map(|s| solve_state(&self.model, w, s, &self.tol))
            .find_map_first(|r| match r {
                Ok(Some(sol)) => Some(Ok(sol)),
                Ok(None) => None,
                Err(e) => Some(Err(e)),
            })
            .transpose()?;
        Ok(match found {
            Some(sol) => Verdict {
                stable: true,
                states_tried: sol.state.map_or(0, |i| i + 1),
                witness: Some(sol),
                detachment: self.options.detachment,
            },
            None => Verdict {
                stable: false,
                witness: None,
                states_tried: self.states.len(),
                detachment: self.options.detachment,
            },
        })
    }

    fn stable_at(&self, direction: &Vector2<f64>, magnitude: f64) -> Result<bool, StabilityError> {
        let w = Wrench::new(direction.x * magnitude, direction.y * magnitude, 0.0);
        Ok(self.check(&w)?.stable)
    }

    /// Largest force along `direction` (no torque) the grasp resists, found
    /// by bisection on `[0, cap]` down to width `tol`.
    pub fn max_resistible(
        &self,
        direction: Vector2<f64>,
        tol: f64,
        cap: f64,
    ) -> Result<Resistible, StabilityError> {
        if !(tol > 0.0 && cap > 0.0) {
            return Err(StabilityError::InvalidParameter("tolerance and cap must be positive"));
        }
        let norm = direction.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(StabilityError::InvalidParameter("direction must be a nonzero vector"));
        }
        let dir = direction / norm;
        if self.stable_at(&dir, cap)? {
            return Ok(Resistible { bound: ForceBound::AtLeastCap, non_monotone: false, probes: 1 });
        }
        let (mut lo, mut hi) = (0.0, cap);
        let mut probes = 1;
        let mut non_monotone = !self.stable_at(&dir, 0.0)?;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            probes += 1;
            if self.stable_at(&dir, mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let m = 0.5 * (lo + hi);
        // verify the bracket the bisection relied on
        let below = (m - tol).max(0.0);
        if !self.stable_at(&dir, below)? || self.stable_at(&dir, (m + tol).min(cap))? {
            non_monotone = true;
        }
        Ok(Resistible { bound: ForceBound::Magnitude(m), non_monotone, probes: probes + 2 })
    }

    /// [`max_resistible`](Self::max_resistible) over `n` uniformly spaced directions,
    /// starting at `(1, 0)` and turning counterclockwise.
    pub fn resistible_region(
        &self,
        n_directions: usize,
        tol: f64,
        cap: f64,
    ) -> Result<RegionSweep, StabilityError> {
        if n_directions < 4 {
            return Err(StabilityError::InvalidParameter("at least 4 directions are required"));
        }
        let rows = sweep_directions(n_directions)
            .into_par_iter()
            .map(|dir| {
                self.max_resistible(dir, tol, cap).map(|r| SweepRow {
                    direction: [dir.x, dir.y],
                    bound: r.bound,
                    non_monotone: r.non_monotone,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RegionSweep { rows, n_directions, tol, cap })
    }
}

/// Unit directions at angles `2 pi k / n`, with components that are zero up
/// to rounding snapped to exactly zero.
pub fn sweep_directions(n: usize) -> Vec<Vector2<f64>> {
    let snap = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
    (0..n)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            Vector2::new(snap(a.cos()), snap(a.sin()))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForceBound {
    Magnitude(f64),
    AtLeastCap,
}

impl ForceBound {
    pub fn magnitude(self) -> Option<f64> {
        match self {
            ForceBound::Magnitude(m) => Some(m),
            ForceBound::AtLeastCap => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Resistible {
    pub bound: ForceBound,
    /// Set when a probe contradicted radial monotonicity.
    pub non_monotone: bool,
    pub probes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub direction: [f64; 2],
    pub bound: ForceBound,
    pub non_monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionSweep {
    pub rows: Vec<SweepRow>,
    pub n_directions: usize,
    pub tol: f64,
    pub cap: f64,
}

impl RegionSweep {
    /// `dir_x,dir_y,max_force` with `inf` for directions resisted at the cap.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dir_x,dir_y,max_force\n");
        for r in &self.rows {
            let f = match r.bound {
                ForceBound::Magnitude(m) => format!("{m}"),
                ForceBound::AtLeastCap => "inf".to_string(),
            };
            out.push_str(&format!("{},{},{}\n", r.direction[0], r.direction[1], f));
        }
        out
    }
}

pub fn check_stability(model: &GraspModel, w: &Wrench) -> Result<Verdict, StabilityError> {
    check_stability_with(model, w, EnumerationOptions::default())
}

pub fn check_stability_with(
    model: &GraspModel,
    w: &Wrench,
    options: EnumerationOptions,
) -> Result<Verdict, StabilityError> {
    StabilityAnalyzer::new(model.clone(), options)?.check(w)
}

pub fn max_resistible(
    model: &GraspModel,
    direction: Vector2<f64>,
    tol: f64,
    cap: f64,
) -> Result<Resistible, StabilityError> {
    StabilityAnalyzer::new(model.clone(), EnumerationOptions::default())?
        .max_resistible(direction, tol, cap)
}

pub fn resistible_region(
    model: &GraspModel,
    n_directions: usize,
    tol: f64,
    cap: f64,
) -> Result<RegionSweep, StabilityError> {
    StabilityAnalyzer::new(model.clone(), EnumerationOptions::default())?
        .resistible_region(n_directions, tol, cap)
}
