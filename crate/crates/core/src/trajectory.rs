use std::io::{Read, Write};

use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::lattice::FrequencyLattice;
use crate::snapshot::{read_snapshot, write_snapshot};

const MAGIC: &[u8; 6] = b"QDTRJ1";

/// Fields sampled at t_j = j·Δt, j = 0..n.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    fields: Vec<SpectralField>,
    dt: f64,
    sigma: Option<f64>,
}

impl Trajectory {
    pub fn new(fields: Vec<SpectralField>, dt: f64, sigma: Option<f64>) -> Result<Self> {
        if fields.len() < 2 {
            return Err(invalid("trajectory needs at least 2 samples"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid(format!("time step {dt} must be positive")));
        }
        let first = &fields[0];
        for f in &fields[1..] {
            first.same_shape(f)?;
        }
        Ok(Trajectory { fields, dt, sigma })
    }

    /// Free evolution e^{itσΔ}φ sampled at n points covering [0, n·dt).
    pub fn free(datum: &SpectralField, sigma: f64, dt: f64, n: usize) -> Result<Self> {
        let fields = (0..n).map(|j| datum.free_evolution(sigma, j as f64 * dt)).collect();
        Trajectory::new(fields, dt, Some(sigma))
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn into_fields(self) -> Vec<SpectralField> {
        self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        self.fields[0].lattice()
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    /// n·Δt, the length of the sampled window.
    pub fn duration(&self) -> f64 {
        self.len() as f64 * self.dt
    }

    pub fn map(&self, f: impl Fn(&SpectralField) -> SpectralField) -> Result<Trajectory> {
        Trajectory::new(self.fields.iter().map(f).collect(), self.dt, self.sigma)
    }

    pub fn conj(&self) -> Trajectory {
        Trajectory {
            fields: self.fields.iter().map(|f| f.conj()).collect(),
            dt: self.dt,
            sigma: self.sigma.map(|s| -s),
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.len() as u32).to_le_bytes())?;
        w.write_all(&self.dt.to_le_bytes())?;
        w.write_all(&self.sigma.unwrap_or(f64::NAN).to_le_bytes())?;
        for f in &self.fields {
            write_snapshot(f, &mut w)?;
        }
        Ok(())
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 6];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Snapshot("bad trajectory magic".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let dt = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let sigma = f64::from_le_bytes(b8);
        let fields = (0..n).map(|_| read_snapshot(&mut r)).collect::<Result<Vec<_>>>()?;
        Trajectory::new(fields, dt, (!sigma.is_nan()).then_some(sigma))
    }
}
