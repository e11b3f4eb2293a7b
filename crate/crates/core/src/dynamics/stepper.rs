use num_complex::Complex64;

use super::nonlinearity::nonlinearity;
use super::{critical_index, step_count, TripleTrajectory};
use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::norms::hs_norm;
use crate::resonance::CoefficientTriple;
use crate::state::FieldTriple;

#[derive(Clone, Debug)]
pub struct StepOptions {
    pub dt: f64,
    /// Keep every `stride`-th step in the output.
    pub stride: usize,
    pub guard_factor: f64,
    /// Sobolev index for the blow-up guard; `None` means d/2 − 1.
    pub sobolev: Option<f64>,
    /// Test hook: drop the nonlinearity so the flow is the free evolution.
    pub linear_only: bool,
}

impl StepOptions {
    pub fn new(dt: f64) -> Self {
        StepOptions { dt, stride: 1, guard_factor: 1e6, sobolev: None, linear_only: false }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }
}

fn evolve_all(xs: &[SpectralField], sigmas: &[f64], t: f64) -> Vec<SpectralField> {
    xs.iter().zip(sigmas).map(|(x, &s)| x.free_evolution(s, t)).collect()
}

fn axpy_all(ys: &mut [SpectralField], a: f64, xs: &[SpectralField]) -> Result<()> {
    let a = Complex64::new(a, 0.0);
    for (y, x) in ys.iter_mut().zip(xs) {
        y.axpy(a, x)?;
    }
    Ok(())
}

/// Lawson (integrating-factor) RK4 for ∂t y_j = iσ_jΔ y_j + F_j(y), with the linear part
/// applied exactly. Returns the samples at t = 0, stride·dt, …, T.
pub fn lawson_rk4<F>(
    initial: Vec<SpectralField>,
    sigmas: &[f64],
    t_final: f64,
    opts: &StepOptions,
    mut rhs: F,
) -> Result<Vec<Vec<SpectralField>>>
where
    F: FnMut(&[SpectralField]) -> Result<Vec<SpectralField>>,
{
    if initial.len() != sigmas.len() {
        return Err(invalid("one dispersion coefficient per field"));
    }
    let steps = step_count(t_final, opts.dt)?;
    if opts.stride == 0 || steps % opts.stride != 0 {
        return Err(invalid(format!("stride {} does not divide {steps} steps", opts.stride)));
    }
    let h = opts.dt;
    let s = opts.sobolev.unwrap_or_else(|| critical_index(initial[0].lattice().dim()));
    let size = |xs: &[SpectralField]| xs.iter().map(|x| hs_norm(x, s).powi(2)).sum::<f64>().sqrt();
    let limit = opts.guard_factor * size(&initial);
    let mut y = initial;
    let mut out = vec![y.clone()];
    for n in 0..steps {
        let k1 = rhs(&y)?;
        let mut a = y.clone();
        axpy_all(&mut a, h / 2.0, &k1)?;
        let u2 = evolve_all(&a, sigmas, h / 2.0);
        let k2 = rhs(&u2)?;
        let y_half = evolve_all(&y, sigmas, h / 2.0);
        let mut u3 = y_half.clone();
        axpy_all(&mut u3, h / 2.0, &k2)?;
        let k3 = rhs(&u3)?;
        let mut u4 = evolve_all(&y, sigmas, h);
        axpy_all(&mut u4, h, &evolve_all(&k3, sigmas, h / 2.0))?;
        let k4 = rhs(&u4)?;
        let mut next = evolve_all(&y, sigmas, h);
        axpy_all(&mut next, h / 6.0, &evolve_all(&k1, sigmas, h))?;
        let mut mid = k2;
        axpy_all(&mut mid, 1.0, &k3)?;
        axpy_all(&mut next, h / 3.0, &evolve_all(&mid, sigmas, h / 2.0))?;
        axpy_all(&mut next, h / 6.0, &k4)?;
        y = next;
        let norm = size(&y);
        let t = (n + 1) as f64 * h;
        if !norm.is_finite() || (limit > 0.0 && norm > limit) {
            return Err(Error::BlowUp { t, norm, limit });
        }
        if (n + 1) % opts.stride == 0 {
            out.push(y.clone());
        }
    }
    Ok(out)
}

/// Fourth-order exponential integrator for the system, sampled every `stride` steps
/// including t = T.
pub fn step_evolve(
    data: &FieldTriple,
    coeffs: &CoefficientTriple,
    t_final: f64,
    opts: &StepOptions,
) -> Result<TripleTrajectory> {
    let sig = coeffs.as_f64();
    let minus_i = Complex64::new(0.0, -1.0);
    let linear_only = opts.linear_only;
    let samples = lawson_rk4(data.clone().into_vec(), &sig, t_final, opts, |y| {
        if linear_only {
            return Ok(y.iter().map(|f| SpectralField::zeros(f.lattice(), f.components())).collect());
        }
        let st = FieldTriple { u: y[0].clone(), v: y[1].clone(), w: y[2].clone() };
        let n = nonlinearity(&st)?;
        Ok(n.into_vec().into_iter().map(|f| f.scaled(minus_i)).collect())
    })?;
    let states = samples.into_iter().map(FieldTriple::from_vec).collect::<Result<Vec<_>>>()?;
    TripleTrajectory::from_states(states, opts.dt * opts.stride as f64, sig)
}
