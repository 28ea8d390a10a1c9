//! Grasp files and result documents.
//!
//! A grasp file is TOML:
//!
//! ```toml
//! name = "three_contact"
//! stiffness = 1.0            # or one value per contact
//! preload = "none"           # or [[c_n, c_t], ...]
//!
//! [options]
//! detachment = true
//!
//! [[contacts]]
//! position = [-1.0, 0.0]
//! normal = [-1.0, 0.0]
//! mu = 0.5
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::{CellCounts, ContactLabel, EnumerationOptions};
use crate::equilibrium::{check_solution, EquilibriumSolution};
use crate::model::{validate_model, world_force, Contact, ContactForce, GraspModel, ModelError, Wrench};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Stiffness {
    Uniform(f64),
    PerContact(Vec<f64>),
}

impl Default for Stiffness {
    fn default() -> Self {
        Stiffness::Uniform(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PreloadKeyword {
    #[serde(rename = "none")]
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Preload {
    Keyword(PreloadKeyword),
    Forces(Vec<[f64; 2]>),
}

impl Default for Preload {
    fn default() -> Self {
        Preload::Keyword(PreloadKeyword::None)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOptions {
    #[serde(default = "default_true")]
    pub detachment: bool,
}

fn default_true() -> bool {
    true
}

impl Default for FileOptions {
    fn default() -> Self {
        Self { detachment: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactEntry {
    pub position: [f64; 2],
    /// Outward normal.
    pub normal: [f64; 2],
    pub mu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraspFile {
    pub name: String,
    #[serde(default)]
    pub stiffness: Stiffness,
    #[serde(default)]
    pub preload: Preload,
    #[serde(default)]
    pub options: FileOptions,
    #[serde(default)]
    pub contacts: Vec<ContactEntry>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraspFileError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Validation(#[from] ModelError),
}

/// A parsed and validated grasp file.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedGrasp {
    pub name: String,
    pub model: GraspModel,
    pub options: EnumerationOptions,
}

impl GraspFile {
    pub fn to_model(&self) -> GraspModel {
        let m = self.contacts.len();
        let contacts = self
            .contacts
            .iter()
            .map(|c| Contact::new(c.position, c.normal, c.mu))
            .collect();
        let stiffness = match &self.stiffness {
            Stiffness::Uniform(k) => vec![*k; m],
            Stiffness::PerContact(ks) => ks.clone(),
        };
        let preload = match &self.preload {
            Preload::Keyword(PreloadKeyword::None) => vec![ContactForce::ZERO; m],
            Preload::Forces(fs) => fs.iter().map(|f| ContactForce::new(f[0], f[1])).collect(),
        };
        GraspModel::new(contacts).with_stiffness(stiffness).with_preload(preload)
    }

    pub fn from_model(name: &str, model: &GraspModel, detachment: bool) -> Self {
        let k0 = model.stiffness.first().copied().unwrap_or(1.0);
        let stiffness = if model.stiffness.iter().all(|&k| k == k0) {
            Stiffness::Uniform(k0)
        } else {
            Stiffness::PerContact(model.stiffness.clone())
        };
        let preload = if model.has_preload() {
            Preload::Forces(model.preload.iter().map(|p| [p.normal, p.tangential]).collect())
        } else {
            Preload::default()
        };
        Self {
            name: name.to_string(),
            stiffness,
            preload,
            options: FileOptions { detachment },
            contacts: model
                .contacts
                .iter()
                .map(|c| ContactEntry {
                    position: [c.position.x, c.position.y],
                    normal: [c.normal.x, c.normal.y],
                    mu: c.mu,
                })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("grasp files always serialize")
    }
}

pub fn parse_grasp_file(text: &str) -> Result<LoadedGrasp, GraspFileError> {
    let file: GraspFile = toml::from_str(text).map_err(|e| GraspFileError::Parse(e.to_string()))?;
    let model = file.to_model();
    validate_model(&model)?;
    Ok(LoadedGrasp {
        name: file.name,
        model,
        options: EnumerationOptions { detachment: file.options.detachment },
    })
}

/// Contact force in the contact frame and its effect on the object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceEntry {
    /// `(c_n, c_t)`.
    pub local: [f64; 2],
    pub world: [f64; 2],
    pub torque: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub equality: f64,
    pub min_slack: f64,
    /// Largest violation found by the independent verifier.
    pub verifier: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub method: String,
    pub detachment: bool,
    pub strict_eq4: bool,
    /// How the witness system was solved, `direct` or `feasibility`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states_tried: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<CellCounts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<[usize; 3]>,
}

/// Output of every analysis command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub command: String,
    pub grasp: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wrench: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<ContactLabel>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forces: Option<Vec<ForceEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub motion: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Residuals>,
    pub mode: Mode,
    #[serde(default)]
    pub counts: Counts,
    /// Free-form payload of commands without a verdict, e.g. polygons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
    pub timing_ms: f64,
}

impl ResultDocument {
    pub fn new(command: &str, grasp: &str, mode: Mode) -> Self {
        Self {
            command: command.to_string(),
            grasp: grasp.to_string(),
            wrench: None,
            stable: None,
            state: None,
            forces: None,
            motion: None,
            residuals: None,
            mode,
            counts: Counts::default(),
            data: None,
            timing_ms: 0.0,
        }
    }

    /// Fills verdict, state, forces, motion and residuals from a solution.
    pub fn set_solution(&mut self, model: &GraspModel, w: &Wrench, sol: &EquilibriumSolution) {
        self.state = Some(sol.labels.clone());
        self.forces = Some(force_entries(model, &sol.forces));
        self.motion = Some([clean(sol.d.x), clean(sol.d.y), clean(sol.d.z)]);
        self.residuals = Some(Residuals {
            equality: sol.residuals.equality,
            min_slack: sol.residuals.min_slack,
            verifier: check_solution(model, w, sol).max(),
        });
        self.mode.solve = Some(
            match sol.mode {
                crate::equilibrium::SolveMode::Direct => "direct",
                crate::equilibrium::SolveMode::Feasibility => "feasibility",
            }
            .to_string(),
        );
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result documents always serialize")
    }
}

/// Maps `-0.0` to `0.0` so documents do not depend on rounding signs.
fn clean(v: f64) -> f64 {
    v + 0.0
}

pub fn force_entries(model: &GraspModel, forces: &[ContactForce]) -> Vec<ForceEntry> {
    model
        .contacts
        .iter()
        .zip(forces)
        .map(|(c, f)| {
            let wf = world_force(c, f);
            ForceEntry {
                local: [clean(f.normal), clean(f.tangential)],
                world: [clean(wf.force.x), clean(wf.force.y)],
                torque: clean(wf.torque),
            }
        })
        .collect()
}

/// Parses `wx,wy,tau`.
pub fn parse_wrench(text: &str) -> Result<Wrench, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected wx,wy,tau but got `{text}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("bad wrench component `{p}`: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("wrench component `{p}` is not finite"));
        }
    }
    Ok(v.into())
}
