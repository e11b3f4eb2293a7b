use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{invalid, Result};
use crate::fft::smooth_size;

/// Truncated mode set {−K,…,K}^d on a torus of side 2πL.
#[derive(Clone)]
pub struct FrequencyLattice {
    inner: Arc<Inner>,
}

struct Inner {
    dim: usize,
    cutoff: usize,
    scale: f64,
    grid: usize,
    norms2: OnceLock<Vec<u32>>,
    grid_index: OnceLock<Vec<usize>>,
}

impl FrequencyLattice {
    pub fn new(dim: usize, cutoff: usize, scale: f64) -> Result<Self> {
        Self::with_grid(dim, cutoff, scale, smooth_size(3 * cutoff + 2))
    }

    /// Like [`FrequencyLattice::new`] with an explicit product grid size (at least 3K+2).
    pub fn with_grid(dim: usize, cutoff: usize, scale: f64, grid: usize) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return Err(invalid(format!("dimension {dim} outside 1..=4")));
        }
        if cutoff < 1 {
            return Err(invalid("cutoff K must be at least 1"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!("torus scale L = {scale} must be positive")));
        }
        if grid < 3 * cutoff + 2 {
            return Err(invalid(format!("grid {grid} below 3K+2 = {}", 3 * cutoff + 2)));
        }
        Ok(FrequencyLattice {
            inner: Arc::new(Inner {
                dim,
                cutoff,
                scale,
                grid,
                norms2: OnceLock::new(),
                grid_index: OnceLock::new(),
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn cutoff(&self) -> usize {
        self.inner.cutoff
    }

    pub fn scale(&self) -> f64 {
        self.inner.scale
    }

    pub fn grid(&self) -> usize {
        self.inner.grid
    }

    /// Modes per axis, 2K+1.
    pub fn side(&self) -> usize {
        2 * self.inner.cutoff + 1
    }

    pub fn mode_count(&self) -> usize {
        self.side().pow(self.inner.dim as u32)
    }

    pub fn grid_points(&self) -> usize {
        self.inner.grid.pow(self.inner.dim as u32)
    }

    /// Torus volume (2πL)^d.
    pub fn volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI * self.inner.scale).powi(self.inner.dim as i32)
    }

    pub fn mode(&self, index: usize) -> Vec<i64> {
        let mut out = vec![0; self.dim()];
        self.mode_into(index, &mut out);
        out
    }

    pub fn mode_into(&self, mut index: usize, out: &mut [i64]) {
        let side = self.side();
        let k = self.cutoff() as i64;
        for a in (0..self.dim()).rev() {
            out[a] = (index % side) as i64 - k;
            index /= side;
        }
    }

    pub fn index_of(&self, xi: &[i64]) -> Option<usize> {
        if xi.len() != self.dim() {
            return None;
        }
        let k = self.cutoff() as i64;
        let side = self.side();
        let mut idx = 0usize;
        for &x in xi {
            if x < -k || x > k {
                return None;
            }
            idx = idx * side + (x + k) as usize;
        }
        Some(idx)
    }

    /// Index of −ξ given the index of ξ.
    pub fn negated(&self, index: usize) -> usize {
        self.mode_count() - 1 - index
    }

    /// Integer |ξ|² per mode in canonical order.
    pub fn norms2(&self) -> &[u32] {
        self.inner.norms2.get_or_init(|| {
            let mut buf = vec![0i64; self.dim()];
            (0..self.mode_count())
                .map(|i| {
                    self.mode_into(i, &mut buf);
                    buf.iter().map(|x| (x * x) as u32).sum()
                })
                .collect()
        })
    }

    /// Physical |ξ/L|² of a mode.
    pub fn wavenumber2(&self, index: usize) -> f64 {
        self.norms2()[index] as f64 / (self.scale() * self.scale())
    }

    /// Largest |ξ|² on the lattice.
    pub fn max_norm2(&self) -> u32 {
        (self.dim() * self.cutoff() * self.cutoff()) as u32
    }

    /// Position of each mode in a grid of `n` points per axis (frequencies wrapped mod n).
    pub fn grid_positions(&self, n: usize) -> Vec<usize> {
        assert!(n > 2 * self.cutoff(), "grid too small to hold the lattice");
        let mut buf = vec![0i64; self.dim()];
        (0..self.mode_count())
            .map(|i| {
                self.mode_into(i, &mut buf);
                buf.iter()
                    .fold(0usize, |acc, &x| acc * n + x.rem_euclid(n as i64) as usize)
            })
            .collect()
    }

    /// Cached [`FrequencyLattice::grid_positions`] for the product grid.
    pub fn grid_index(&self) -> &[usize] {
        self.inner
            .grid_index
            .get_or_init(|| self.grid_positions(self.grid()))
    }

    /// Same lattice with a different torus scale.
    pub fn rescaled(&self, scale: f64) -> Result<Self> {
        Self::with_grid(self.dim(), self.cutoff(), scale, self.grid())
    }
}

impl PartialEq for FrequencyLattice {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.dim() == other.dim()
                && self.cutoff() == other.cutoff()
                && self.scale() == other.scale()
                && self.grid() == other.grid())
    }
}

impl fmt::Debug for FrequencyLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyLattice")
            .field("dim", &self.dim())
            .field("cutoff", &self.cutoff())
            .field("scale", &self.scale())
            .field("grid", &self.grid())
            .finish()
    }
}
