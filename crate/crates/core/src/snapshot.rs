//! Binary field snapshots: magic `QDNLS1`, LE i32 d, K, c, LE f64 L, then (re, im) pairs.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lattice::FrequencyLattice;

pub const MAGIC: &[u8; 6] = b"QDNLS1";

pub fn write_snapshot<W: Write>(f: &SpectralField, mut w: W) -> Result<()> {
    let lat = f.lattice();
    w.write_all(MAGIC)?;
    w.write_all(&(lat.dim() as i32).to_le_bytes())?;
    w.write_all(&(lat.cutoff() as i32).to_le_bytes())?;
    w.write_all(&(f.components() as i32).to_le_bytes())?;
    w.write_all(&lat.scale().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * f.coeffs().len());
    for z in f.coeffs() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<SpectralField> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let mut i4 = [0u8; 4];
    let mut read_i32 = |r: &mut R| -> Result<i32> {
        r.read_exact(&mut i4)?;
        Ok(i32::from_le_bytes(i4))
    };
    let d = read_i32(&mut r)?;
    let k = read_i32(&mut r)?;
    let c = read_i32(&mut r)?;
    let mut f8 = [0u8; 8];
    r.read_exact(&mut f8)?;
    let l = f64::from_le_bytes(f8);
    if d < 1 || k < 1 || c < 1 {
        return Err(Error::Snapshot(format!("bad header d={d} K={k} c={c}")));
    }
    let lat = FrequencyLattice::new(d as usize, k as usize, l)?;
    let n = c as usize * lat.mode_count();
    let mut raw = vec![0u8; 16 * n];
    r.read_exact(&mut raw)?;
    let coeffs = raw
        .chunks_exact(16)
        .map(|b| {
            Complex64::new(
                f64::from_le_bytes(b[..8].try_into().unwrap()),
                f64::from_le_bytes(b[8..].try_into().unwrap()),
            )
        })
        .collect();
    SpectralField::new(lat, c as usize, coeffs)
}
