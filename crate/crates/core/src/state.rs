use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lattice::FrequencyLattice;

/// The unknowns (u, v, w), each ℂ^d-valued on a shared lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldTriple {
    pub u: SpectralField,
    pub v: SpectralField,
    pub w: SpectralField,
}

impl FieldTriple {
    pub fn new(u: SpectralField, v: SpectralField, w: SpectralField) -> Result<Self> {
        let d = u.lattice().dim();
        if u.lattice() != v.lattice() || u.lattice() != w.lattice() {
            return Err(Error::LatticeMismatch);
        }
        for f in [&u, &v, &w] {
            if f.components() != d {
                return Err(Error::ShapeMismatch(format!(
                    "triple fields need {d} components, got {}",
                    f.components()
                )));
            }
        }
        Ok(FieldTriple { u, v, w })
    }

    pub fn zeros(lattice: &FrequencyLattice) -> Self {
        let d = lattice.dim();
        FieldTriple {
            u: SpectralField::zeros(lattice, d),
            v: SpectralField::zeros(lattice, d),
            w: SpectralField::zeros(lattice, d),
        }
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        self.u.lattice()
    }

    pub fn fields(&self) -> [&SpectralField; 3] {
        [&self.u, &self.v, &self.w]
    }

    pub fn into_vec(self) -> Vec<SpectralField> {
        vec![self.u, self.v, self.w]
    }

    pub fn from_vec(mut v: Vec<SpectralField>) -> Result<Self> {
        if v.len() != 3 {
            return Err(Error::ShapeMismatch(format!("expected 3 fields, got {}", v.len())));
        }
        let w = v.pop().unwrap();
        let vv = v.pop().unwrap();
        let u = v.pop().unwrap();
        FieldTriple::new(u, vv, w)
    }
}
