//! Littlewood–Paley bumps, sharp region projections and modulation projections.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Result};
use crate::field::SpectralField;
use crate::lattice::FrequencyLattice;
use crate::trajectory::Trajectory;

/// Smooth step: 0 for t ≤ 0, 1 for t ≥ 1.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// The frozen cutoff χ: 1 on |s| ≤ 1, 0 on |s| ≥ 2.
pub fn chi(s: f64) -> f64 {
    1.0 - smooth_step(s.abs() - 1.0)
}

/// A power of two N ≥ 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicIndex(u64);

impl DyadicIndex {
    pub fn new(n: u64) -> Result<Self> {
        if n >= 1 && n.is_power_of_two() {
            Ok(DyadicIndex(n))
        } else {
            Err(invalid(format!("{n} is not a power of two")))
        }
    }

    pub fn from_exponent(k: u32) -> Self {
        DyadicIndex(1 << k)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Largest dyadic number ≤ x (at least 1).
    pub fn floor(x: f64) -> Self {
        if x < 2.0 {
            return DyadicIndex(1);
        }
        let mut n = 1u64;
        while (2 * n) as f64 <= x {
            n *= 2;
        }
        DyadicIndex(n)
    }
}

/// ψ_N(s): ψ₁ = χ, ψ_N(s) = χ(s/N) − χ(2s/N).
pub fn bump_weight(n: DyadicIndex, s: f64) -> f64 {
    let n = n.as_f64();
    if n == 1.0 {
        chi(s)
    } else {
        (chi(s / n) - chi(2.0 * s / n)).max(0.0)
    }
}

/// Σ_{N<M} ψ_N(s) = χ(2s/M), and 0 for M = 1.
pub fn low_weight(m: DyadicIndex, s: f64) -> f64 {
    if m.value() == 1 {
        0.0
    } else {
        chi(2.0 * s / m.as_f64())
    }
}

/// Σ_{N≥M} ψ_N(s).
pub fn high_weight(m: DyadicIndex, s: f64) -> f64 {
    1.0 - low_weight(m, s)
}

/// Dyadic indices whose shells can meet the lattice, so Σ P_N = Id on it.
pub fn dyadic_range(lattice: &FrequencyLattice) -> Vec<DyadicIndex> {
    let smax = (lattice.max_norm2() as f64).sqrt() / lattice.scale();
    let mut out = vec![DyadicIndex(1)];
    let mut n = 2u64;
    while (n as f64) / 2.0 < smax {
        out.push(DyadicIndex(n));
        n *= 2;
    }
    out
}

/// P_N: multiplier ψ_N(|ξ/L|).
pub fn project_dyadic(f: &SpectralField, n: DyadicIndex) -> SpectralField {
    let lat = f.lattice().clone();
    f.apply_multiplier(|i| bump_weight(n, lat.wavenumber2(i).sqrt()))
}

/// Integer points of an axis-aligned cube with `side` points per axis,
/// center_i − ⌊side/2⌋ ≤ ξ_i < center_i − ⌊side/2⌋ + side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeRegion {
    pub center: Vec<i64>,
    pub side: i64,
}

/// Modes in ξ₀ + [−N, N]^d with |a·ξ − A| ≤ M.
#[derive(Clone, Debug, PartialEq)]
pub struct StripRegion {
    pub base_center: Vec<i64>,
    pub half_side: i64,
    pub direction: Vec<f64>,
    pub offset: f64,
    pub thickness: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    All,
    Cube(CubeRegion),
    Strip(StripRegion),
    Modes(BTreeSet<Vec<i64>>),
    Intersection(Vec<Region>),
    Union(Vec<Region>),
}

impl CubeRegion {
    pub fn new(center: Vec<i64>, side: i64) -> Result<Self> {
        if side < 1 {
            return Err(invalid("cube side must be positive"));
        }
        Ok(CubeRegion { center, side })
    }

    pub fn contains(&self, xi: &[i64]) -> bool {
        let lo = self.side / 2;
        xi.iter().zip(&self.center).all(|(&x, &c)| {
            let r = x - (c - lo);
            (0..self.side).contains(&r)
        })
    }
}

impl StripRegion {
    pub fn new(
        base_center: Vec<i64>,
        half_side: i64,
        direction: Vec<f64>,
        offset: f64,
        thickness: f64,
    ) -> Result<Self> {
        if direction.len() != base_center.len() {
            return Err(invalid("strip direction has wrong dimension"));
        }
        let norm: f64 = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("strip direction has norm {norm}, not 1")));
        }
        if !(thickness > 0.0) || half_side < 0 {
            return Err(invalid("strip thickness and half side must be positive"));
        }
        Ok(StripRegion { base_center, half_side, direction, offset, thickness })
    }

    pub fn contains(&self, xi: &[i64]) -> bool {
        let in_cube = xi
            .iter()
            .zip(&self.base_center)
            .all(|(&x, &c)| (x - c).abs() <= self.half_side);
        if !in_cube {
            return false;
        }
        let dot: f64 = xi.iter().zip(&self.direction).map(|(&x, a)| x as f64 * a).sum();
        let slack = 1e-12 * (1.0 + self.offset.abs() + self.thickness);
        (dot - self.offset).abs() <= self.thickness + slack
    }
}

impl Region {
    pub fn contains(&self, xi: &[i64]) -> bool {
        match self {
            Region::All => true,
            Region::Cube(c) => c.contains(xi),
            Region::Strip(s) => s.contains(xi),
            Region::Modes(m) => m.contains(xi),
            Region::Intersection(rs) => rs.iter().all(|r| r.contains(xi)),
            Region::Union(rs) => rs.iter().any(|r| r.contains(xi)),
        }
    }

    /// The lattice modes inside the region, in canonical order.
    pub fn modes_on(&self, lattice: &FrequencyLattice) -> Vec<Vec<i64>> {
        (0..lattice.mode_count())
            .map(|i| lattice.mode(i))
            .filter(|m| self.contains(m))
            .collect()
    }
}

/// P_S: sharp indicator multiplier.
pub fn project_set(f: &SpectralField, region: &Region) -> SpectralField {
    let lat = f.lattice().clone();
    let mut buf = vec![0i64; lat.dim()];
    let mask: Vec<bool> = (0..lat.mode_count())
        .map(|i| {
            lat.mode_into(i, &mut buf);
            region.contains(&buf)
        })
        .collect();
    f.apply_multiplier(|i| if mask[i] { 1.0 } else { 0.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModulationMode {
    Band,
    High,
    Low,
}

impl ModulationMode {
    pub fn weight(self, m: DyadicIndex, s: f64) -> f64 {
        match self {
            ModulationMode::Band => bump_weight(m, s.abs()),
            ModulationMode::High => high_weight(m, s),
            ModulationMode::Low => low_weight(m, s),
        }
    }
}

/// Wrap a real frequency index into [−n/2, n/2).
pub fn wrap_index(x: f64, n: usize) -> f64 {
    let n = n as f64;
    x - n * ((x + n / 2.0) / n).floor()
}

/// Q_M^{σΔ}, Q_{≥M}^{σΔ} or Q_{<M}^{σΔ} on one period of a periodic trajectory.
pub fn modulation_project(
    traj: &Trajectory,
    sigma: f64,
    m: DyadicIndex,
    mode: ModulationMode,
) -> Result<Trajectory> {
    let n = traj.len();
    if n < 4 {
        return Err(invalid("modulation projection needs at least 4 time samples"));
    }
    let lat = traj.lattice().clone();
    let period = traj.duration();
    let unit = 2.0 * std::f64::consts::PI / period;
    let modes = lat.mode_count();
    let comps = traj.fields()[0].components();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut out: Vec<Vec<Complex64>> = traj.fields().iter().map(|f| f.coeffs().to_vec()).collect();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut weights = vec![0.0; n];
    for i in 0..modes {
        let shift = sigma * lat.wavenumber2(i) / unit;
        for (k, w) in weights.iter_mut().enumerate() {
            let s = wrap_index(k as f64 + shift, n) * unit;
            *w = mode.weight(m, s) / n as f64;
        }
        for j in 0..comps {
            let at = j * modes + i;
            for (t, x) in line.iter_mut().enumerate() {
                *x = out[t][at];
            }
            if line.iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            fwd.process(&mut line);
            for (x, w) in line.iter_mut().zip(&weights) {
                *x *= *w;
            }
            inv.process(&mut line);
            for (t, x) in line.iter().enumerate() {
                out[t][at] = *x;
            }
        }
    }
    let fields = out
        .into_iter()
        .map(|c| SpectralField::new(lat.clone(), comps, c))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(fields, traj.dt(), traj.sigma())
}
