use crate::error::Result;
use crate::field::{pointwise_product, ProductKind, SpectralField};
use crate::resonance::CoefficientTriple;
use crate::state::FieldTriple;

fn grad_norm2(f: &SpectralField) -> f64 {
    let lat = f.lattice();
    let mut acc = 0.0;
    for j in 0..f.components() {
        for (i, z) in f.component(j).iter().enumerate() {
            acc += lat.wavenumber2(i) * z.norm_sqr();
        }
    }
    acc * lat.volume()
}

/// M = 2‖u‖² + ‖v‖² + ‖w‖².
pub fn mass(state: &FieldTriple) -> f64 {
    let vol = state.lattice().volume();
    vol * (2.0 * state.u.coeff_norm2() + state.v.coeff_norm2() + state.w.coeff_norm2())
}

/// H = α‖∇u‖² + β‖∇v‖² + γ‖∇w‖² + 2Re(w, ∇(u·v̄)).
pub fn energy(state: &FieldTriple, coeffs: &CoefficientTriple) -> Result<f64> {
    let [a, b, g] = coeffs.as_f64();
    let quad = a * grad_norm2(&state.u) + b * grad_norm2(&state.v) + g * grad_norm2(&state.w);
    let uv = pointwise_product(&state.u, &state.v, true, ProductKind::Dot)?.gradient()?;
    let cubic = 2.0 * state.w.inner(&uv)?.re;
    Ok(quad + cubic)
}
