use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::state::FieldTriple;

/// Right-hand sides (−(∇·w)v, −(∇·w̄)u, ∇(u·v̄)).
pub fn nonlinearity(state: &FieldTriple) -> Result<FieldTriple> {
    let lat = state.lattice();
    if state.v.lattice() != lat || state.w.lattice() != lat {
        return Err(Error::LatticeMismatch);
    }
    let d = lat.dim();
    let div = state.w.divergence()?.to_physical();
    let pu = state.u.to_physical();
    let pv = state.v.to_physical();
    let n = div.points();
    let zero = Complex64::new(0.0, 0.0);
    let mut n1 = PhysicalField { values: vec![zero; d * n], ..pv.clone() };
    let mut n2 = PhysicalField { values: vec![zero; d * n], ..pu.clone() };
    let mut dot = PhysicalField { components: 1, values: vec![zero; n], ..div.clone() };
    let dw = div.component(0);
    for j in 0..d {
        let (uj, vj) = (pu.component(j), pv.component(j));
        let o1 = n1.component_mut(j);
        for ((o, a), b) in o1.iter_mut().zip(dw).zip(vj) {
            *o = -a * b;
        }
        let o2 = n2.component_mut(j);
        for ((o, a), b) in o2.iter_mut().zip(dw).zip(uj) {
            *o = -a.conj() * b;
        }
        for ((o, a), b) in dot.values.iter_mut().zip(uj).zip(vj) {
            *o += a * b.conj();
        }
    }
    Ok(FieldTriple {
        u: SpectralField::from_physical(&n1, lat)?,
        v: SpectralField::from_physical(&n2, lat)?,
        w: SpectralField::from_physical(&dot, lat)?.gradient()?,
    })
}

/// −(∇·w)v alone.
pub fn u_equation_forcing(w: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let div = w.divergence()?;
    let p = crate::field::pointwise_product(&div, v, false, crate::field::ProductKind::Broadcast)?;
    Ok(p.scaled(Complex64::new(-1.0, 0.0)))
}
