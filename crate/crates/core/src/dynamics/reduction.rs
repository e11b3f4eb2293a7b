//! The single equation i∂t u − Δu = ∂_j(ū²) and its embedding in the u-equation of the
//! system with (α, β, γ) = (−1, 1, 1), where v = ū e_j and w = −2ū e_j give
//! −(∇·w)v = ∂_j(ū²) e_j.

use num_complex::Complex64;

use super::nonlinearity::u_equation_forcing;
use super::stepper::{lawson_rk4, StepOptions};
use crate::error::{invalid, Result};
use crate::field::{pointwise_product, ProductKind, SpectralField};
use crate::state::FieldTriple;
use crate::trajectory::Trajectory;

/// ∂_j(ū²) of a scalar field.
pub fn scalar_forcing(u: &SpectralField, axis: usize) -> Result<SpectralField> {
    if u.components() != 1 || axis >= u.lattice().dim() {
        return Err(invalid("scalar forcing needs a scalar field and a valid axis"));
    }
    let ub = u.conj();
    let sq = pointwise_product(&ub, &ub, false, ProductKind::Broadcast)?;
    Ok(sq.gradient()?.component_field(axis))
}

/// (u, ū, −2ū) for a ℂ^d-valued u.
pub fn slaved_triple(u: &SpectralField) -> Result<FieldTriple> {
    let ub = u.conj();
    FieldTriple::new(u.clone(), ub.clone(), ub.scaled(Complex64::new(-2.0, 0.0)))
}

/// Evolve i∂t u − Δu = ∂_j(ū²) for scalar data.
pub fn solve_scalar(u0: &SpectralField, axis: usize, t_final: f64, opts: &StepOptions) -> Result<Trajectory> {
    let minus_i = Complex64::new(0.0, -1.0);
    let samples = lawson_rk4(vec![u0.clone()], &[-1.0], t_final, opts, |y| {
        Ok(vec![scalar_forcing(&y[0], axis)?.scaled(minus_i)])
    })?;
    Trajectory::new(
        samples.into_iter().map(|mut s| s.remove(0)).collect(),
        opts.dt * opts.stride as f64,
        Some(-1.0),
    )
}

/// Evolve the u-equation (i∂t + αΔ)u = −(∇·w)v with (v, w) slaved to u as above.
pub fn solve_slaved(u0: &SpectralField, alpha: f64, t_final: f64, opts: &StepOptions) -> Result<Trajectory> {
    let minus_i = Complex64::new(0.0, -1.0);
    let samples = lawson_rk4(vec![u0.clone()], &[alpha], t_final, opts, |y| {
        let s = slaved_triple(&y[0])?;
        Ok(vec![u_equation_forcing(&s.w, &s.v)?.scaled(minus_i)])
    })?;
    Trajectory::new(
        samples.into_iter().map(|mut s| s.remove(0)).collect(),
        opts.dt * opts.stride as f64,
        Some(alpha),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FrequencyLattice;

    #[test]
    fn slaved_forcing_is_scalar_forcing() {
        let lat = FrequencyLattice::new(2, 4, 1.0).unwrap();
        let mut u = SpectralField::single_mode(&lat, 1, 0, &[1, -1], Complex64::new(0.3, 0.2)).unwrap();
        u.axpy(
            Complex64::new(1.0, 0.0),
            &SpectralField::single_mode(&lat, 1, 0, &[0, 2], Complex64::new(-0.1, 0.5)).unwrap(),
        )
        .unwrap();
        for axis in 0..2 {
            let mut parts = vec![SpectralField::zeros(&lat, 1); 2];
            parts[axis] = u.clone();
            let uv = SpectralField::stack(&parts).unwrap();
            let s = slaved_triple(&uv).unwrap();
            let f = u_equation_forcing(&s.w, &s.v).unwrap();
            let g = scalar_forcing(&u, axis).unwrap();
            assert!(f.component_field(axis).max_abs_diff(&g) < 1e-15);
            assert!(f.component_field(1 - axis).coeff_norm2() < 1e-30);
        }
    }
}
