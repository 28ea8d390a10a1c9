//! Random grasps for tests, benchmarks and the `gen` command.

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lp::{LinearProgram, Relation};
use crate::model::{world_force, Contact, ContactForce, GraspModel, Wrench};

/// Preload entries smaller than this are set to exactly zero.
const PRELOAD_ZERO: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomGraspOptions {
    pub contacts: usize,
    /// Try to add a self-balancing preload; falls back to none if the
    /// contacts admit no internal force.
    pub preload: bool,
    pub mu: (f64, f64),
}

impl RandomGraspOptions {
    pub fn new(contacts: usize) -> Self {
        Self { contacts, preload: false, mu: (0.2, 0.9) }
    }

    pub fn with_preload(mut self, preload: bool) -> Self {
        self.preload = preload;
        self
    }
}

/// Contacts with positions in `[-1, 1]^2` and uniformly random outward
/// normals, so plane coincidences have probability zero.
pub fn random_grasp<R: Rng>(rng: &mut R, opts: &RandomGraspOptions) -> GraspModel {
    let contacts = (0..opts.contacts)
        .map(|_| {
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            Contact {
                position: Vector2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                normal: Vector2::new(a.cos(), a.sin()),
                mu: rng.random_range(opts.mu.0..opts.mu.1),
            }
        })
        .collect();
    let model = GraspModel::new(contacts);
    if !opts.preload {
        return model;
    }
    match balanced_preload(&model, rng) {
        Some(p) => model.with_preload(p),
        None => model,
    }
}

pub fn seeded_grasp(seed: u64, opts: &RandomGraspOptions) -> GraspModel {
    random_grasp(&mut ChaCha8Rng::seed_from_u64(seed), opts)
}

/// A self-balancing preload built from friction-cone edges, scaled so the
/// largest normal force is 1. `None` if only the zero preload balances.
pub fn balanced_preload<R: Rng>(model: &GraspModel, rng: &mut R) -> Option<Vec<ContactForce>> {
    let m = model.len();
    let edges: Vec<_> = model
        .contacts
        .iter()
        .flat_map(|c| [1.0, -1.0].map(|s| world_force(c, &ContactForce::new(1.0, s * c.mu)).as_wrench_vector()))
        .collect();
    let mut lp = LinearProgram::new(2 * m);
    lp.maximize((0..2 * m).map(|_| rng.random::<f64>()).collect());
    for j in 0..2 * m {
        lp.bounds(j, 0.0, f64::INFINITY);
    }
    for k in 0..3 {
        lp.constraint(edges.iter().map(|e| e[k]).collect(), Relation::Eq, 0.0);
    }
    lp.constraint(vec![1.0; 2 * m], Relation::Eq, 1.0);
    let sol = lp.solve().ok()?;
    let lambda: Vec<f64> = sol.x.iter().map(|&v| if v < PRELOAD_ZERO { 0.0 } else { v }).collect();
    let mut forces: Vec<ContactForce> = model
        .contacts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (up, down) = (lambda[2 * i], lambda[2 * i + 1]);
            ContactForce::new(up + down, c.mu * (up - down))
        })
        .collect();
    let scale = forces.iter().map(|f| f.normal).fold(0.0, f64::max);
    if scale <= PRELOAD_ZERO {
        return None;
    }
    for f in &mut forces {
        f.normal /= scale;
        f.tangential /= scale;
    }
    Some(forces)
}

/// Wrench with components uniform in `[-scale, scale]`.
pub fn random_wrench<R: Rng>(rng: &mut R, scale: f64) -> Wrench {
    Wrench::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}
