use num_complex::Complex64;

use super::nonlinearity::nonlinearity;
use super::{critical_index, triple_hs_norm, TripleTrajectory};
use crate::error::{invalid, Result};
use crate::field::SpectralField;
use crate::resonance::CoefficientTriple;
use crate::trajectory::Trajectory;

/// ∂t of sampled data at sample k: 4th-order central differences, one-sided near the ends.
pub fn time_derivative(samples: &[SpectralField], dt: f64, k: usize) -> Result<SpectralField> {
    let n = samples.len();
    if n < 5 {
        return Err(invalid("time derivative needs at least 5 samples"));
    }
    let (idx, w): ([usize; 5], [f64; 5]) = if k >= 2 && k + 2 < n {
        ([k - 2, k - 1, k, k + 1, k + 2], [1.0, -8.0, 0.0, 8.0, -1.0])
    } else if k == 0 {
        ([0, 1, 2, 3, 4], [-25.0, 48.0, -36.0, 16.0, -3.0])
    } else if k == 1 {
        ([0, 1, 2, 3, 4], [-3.0, -10.0, 18.0, -6.0, 1.0])
    } else if k == n - 1 {
        ([n - 1, n - 2, n - 3, n - 4, n - 5], [25.0, -48.0, 36.0, -16.0, 3.0])
    } else {
        ([n - 1, n - 2, n - 3, n - 4, n - 5], [3.0, 10.0, -18.0, 6.0, -1.0])
    };
    let mut out = SpectralField::zeros(samples[0].lattice(), samples[0].components());
    for (&i, &c) in idx.iter().zip(&w) {
        if c != 0.0 {
            out.axpy(Complex64::new(c / (12.0 * dt), 0.0), &samples[i])?;
        }
    }
    Ok(out)
}

/// (i∂t + σΔ)u at every sample, via the twisted frame e^{−itσΔ}u.
fn linear_part(traj: &Trajectory, sigma: f64) -> Result<Vec<SpectralField>> {
    let twisted: Vec<SpectralField> = traj
        .fields()
        .iter()
        .enumerate()
        .map(|(k, f)| f.free_evolution(sigma, -traj.time(k)))
        .collect();
    (0..traj.len())
        .map(|k| {
            let d = time_derivative(&twisted, traj.dt(), k)?;
            Ok(d.scaled(Complex64::new(0.0, 1.0)).free_evolution(sigma, traj.time(k)))
        })
        .collect()
}

/// sup over samples of the H^{d/2−1} norm of the three equation defects.
pub fn pde_residual(traj: &TripleTrajectory, coeffs: &CoefficientTriple) -> Result<f64> {
    if traj.len() < 5 {
        return Err(invalid("residual needs at least 5 time samples"));
    }
    let sig = coeffs.as_f64();
    let s = critical_index(traj.u.lattice().dim());
    let lin: Vec<Vec<SpectralField>> = traj
        .parts()
        .iter()
        .zip(sig)
        .map(|(t, sg)| linear_part(t, sg))
        .collect::<Result<_>>()?;
    let mut sup = 0.0f64;
    for k in 0..traj.len() {
        let n = nonlinearity(&traj.at(k))?;
        let r: Vec<SpectralField> = [&n.u, &n.v, &n.w]
            .iter()
            .enumerate()
            .map(|(j, nj)| lin[j][k].sub(nj))
            .collect::<Result<_>>()?;
        sup = sup.max(triple_hs_norm([&r[0], &r[1], &r[2]], s));
    }
    Ok(sup)
}
