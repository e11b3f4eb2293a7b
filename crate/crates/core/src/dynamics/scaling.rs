use num_complex::Complex64;

use super::TripleTrajectory;
use crate::error::{invalid, Result};
use crate::field::SpectralField;
use crate::trajectory::Trajectory;

/// A_λ(t, x) = λ⁻¹A(λ⁻²t, λ⁻¹x): torus side 2πL becomes 2πλL, Δt becomes λ²Δt and
/// every coefficient is divided by λ.
pub fn scaling_transform(traj: &TripleTrajectory, lambda: f64) -> Result<TripleTrajectory> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("scaling factor {lambda} must be positive")));
    }
    let lat = traj.u.lattice().rescaled(traj.u.lattice().scale() * lambda)?;
    let inv = Complex64::new(1.0 / lambda, 0.0);
    let map = |t: &Trajectory| -> Result<Trajectory> {
        let fields = t
            .fields()
            .iter()
            .map(|f| {
                let c = f.coeffs().iter().map(|z| z * inv).collect();
                SpectralField::new(lat.clone(), f.components(), c)
            })
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(fields, t.dt() * lambda * lambda, t.sigma())
    };
    TripleTrajectory::new(map(&traj.u)?, map(&traj.v)?, map(&traj.w)?)
}
