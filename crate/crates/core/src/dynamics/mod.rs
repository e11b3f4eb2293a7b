//! The coupled system
//!
//! ```text
//! (i∂t + αΔ)u = −(∇·w)v,   (i∂t + βΔ)v = −(∇·w̄)u,   (i∂t + γΔ)w = ∇(u·v̄)
//! ```
//!
//! with its Duhamel map, Picard iteration, a Lawson RK4 stepper, conserved
//! quantities, scaling and residuals.

mod conservation;
mod duhamel;
mod nonlinearity;
mod picard;
mod reduction;
mod residual;
mod scaling;
mod stepper;

pub use conservation::{energy, mass};
pub use duhamel::{duhamel_cumulative, duhamel_i1, duhamel_i2, phi_map};
pub use nonlinearity::{nonlinearity, u_equation_forcing};
pub use picard::{picard_solve, PicardOptions, PicardReport};
pub use reduction::{scalar_forcing, slaved_triple, solve_scalar, solve_slaved};
pub use residual::{pde_residual, time_derivative};
pub use scaling::scaling_transform;
pub use stepper::{lawson_rk4, step_evolve, StepOptions};

use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::norms::hs_norm;
use crate::state::FieldTriple;
use crate::trajectory::Trajectory;

/// Three trajectories (u, v, w) on one time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleTrajectory {
    pub u: Trajectory,
    pub v: Trajectory,
    pub w: Trajectory,
}

impl TripleTrajectory {
    pub fn new(u: Trajectory, v: Trajectory, w: Trajectory) -> Result<Self> {
        if u.len() != v.len() || u.len() != w.len() || u.dt() != v.dt() || u.dt() != w.dt() {
            return Err(invalid("triple trajectories must share a time grid"));
        }
        if u.lattice() != v.lattice() || u.lattice() != w.lattice() {
            return Err(Error::LatticeMismatch);
        }
        Ok(TripleTrajectory { u, v, w })
    }

    pub fn from_states(states: Vec<FieldTriple>, dt: f64, sigmas: [f64; 3]) -> Result<Self> {
        let mut us = Vec::with_capacity(states.len());
        let mut vs = Vec::with_capacity(states.len());
        let mut ws = Vec::with_capacity(states.len());
        for s in states {
            us.push(s.u);
            vs.push(s.v);
            ws.push(s.w);
        }
        TripleTrajectory::new(
            Trajectory::new(us, dt, Some(sigmas[0]))?,
            Trajectory::new(vs, dt, Some(sigmas[1]))?,
            Trajectory::new(ws, dt, Some(sigmas[2]))?,
        )
    }

    /// Free evolution of `data` on t_k = k·dt, k = 0..=steps.
    pub fn free(data: &FieldTriple, sigmas: [f64; 3], dt: f64, steps: usize) -> Result<Self> {
        let mk = |f: &SpectralField, s: f64| Trajectory::free(f, s, dt, steps + 1);
        TripleTrajectory::new(mk(&data.u, sigmas[0])?, mk(&data.v, sigmas[1])?, mk(&data.w, sigmas[2])?)
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.u.dt()
    }

    /// Time of the last sample.
    pub fn final_time(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt()
    }

    pub fn at(&self, k: usize) -> FieldTriple {
        FieldTriple {
            u: self.u.fields()[k].clone(),
            v: self.v.fields()[k].clone(),
            w: self.w.fields()[k].clone(),
        }
    }

    pub fn last(&self) -> FieldTriple {
        self.at(self.len() - 1)
    }

    pub fn parts(&self) -> [&Trajectory; 3] {
        [&self.u, &self.v, &self.w]
    }
}

/// (Σ over u, v, w of ‖·‖²_{H^s})^{1/2} at one time.
pub fn triple_hs_norm(state: [&SpectralField; 3], s: f64) -> f64 {
    state.iter().map(|f| hs_norm(f, s).powi(2)).sum::<f64>().sqrt()
}

/// sup_k ‖a(t_k) − b(t_k)‖ in the triple H^s norm.
pub fn sup_distance(a: &TripleTrajectory, b: &TripleTrajectory, s: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid("trajectories differ in length"));
    }
    let mut sup = 0.0f64;
    for k in 0..a.len() {
        let mut acc = 0.0;
        for (x, y) in a.parts().iter().zip(b.parts()) {
            acc += hs_norm(&x.fields()[k].sub(&y.fields()[k])?, s).powi(2);
        }
        sup = sup.max(acc.sqrt());
    }
    Ok(sup)
}

/// Scaling-critical index d/2 − 1.
pub fn critical_index(dim: usize) -> f64 {
    dim as f64 / 2.0 - 1.0
}

/// Number of steps of size `dt` covering [0, T]; T must be a multiple of dt.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(invalid("time step and horizon must be positive"));
    }
    let n = (t_final / dt).round();
    if (n * dt - t_final).abs() > 1e-9 * t_final.max(dt) {
        return Err(invalid(format!("T = {t_final} is not a multiple of dt = {dt}")));
    }
    Ok(n as usize)
}
