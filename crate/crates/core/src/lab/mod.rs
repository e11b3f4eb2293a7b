//! Randomized measurements of the Strichartz, bilinear and trilinear estimates.
//!
//! Every experiment draws independent unit-variance complex Gaussians per mode,
//! one ChaCha stream per trial, so tables are reproducible from the master seed.

mod bilinear;
mod fit;
mod strichartz;
mod strip;
mod trilinear;

pub use bilinear::{bilinear_ratio, BilinearCase};
pub use fit::{fit_delta, least_squares, loglog_slope};
pub use strichartz::{strichartz_ratio, strip_ratio};
pub use strip::{strip_decomposition_demo, StripDemo};
pub use trilinear::{trilinear_j, JPieces, TrilinearMode, TrilinearOptions, TrilinearReport};

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::fft::FftNd;
use crate::field::SpectralField;
use crate::lattice::FrequencyLattice;
use crate::norms::hs_norm;
use crate::resonance::{common_sigma, to_f64, Rational};

/// Largest physical grid (points) a lab experiment may allocate.
pub const GRID_POINT_LIMIT: usize = 1 << 26;

/// Independent generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Complex Gaussian with E|z|² = 1.
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Random field with Gaussian coefficients on |ξ|∞ ≤ `radius`, rescaled to
/// the given H^s norm (a zero norm gives the zero field).
pub fn random_field<R: Rng>(
    lattice: &FrequencyLattice,
    components: usize,
    radius: i64,
    s: f64,
    norm: f64,
    rng: &mut R,
) -> Result<SpectralField> {
    let m = lattice.mode_count();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); components * m];
    let mut xi = vec![0i64; lattice.dim()];
    for j in 0..components {
        for i in 0..m {
            lattice.mode_into(i, &mut xi);
            if xi.iter().all(|x| x.abs() <= radius) {
                coeffs[j * m + i] = complex_gaussian(rng);
            }
        }
    }
    let f = SpectralField::new(lattice.clone(), components, coeffs)?;
    let current = hs_norm(&f, s);
    if norm == 0.0 || current == 0.0 {
        return Ok(SpectralField::zeros(lattice, components));
    }
    Ok(f.scaled(Complex64::new(norm / current, 0.0)))
}

/// Calls `f` on every point of {−k,…,k}^d, last axis fastest.
pub(crate) fn for_each_point(dim: usize, k: i64, f: impl FnMut(&[i64])) {
    for_each_in(&vec![-k; dim], &vec![k; dim], f);
}

/// Calls `f` on every point of the box lo ≤ ξ ≤ hi, last axis fastest.
pub(crate) fn for_each_in(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let dim = lo.len();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut xi = lo.to_vec();
    loop {
        f(&xi);
        let mut a = dim;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            if xi[a] < hi[a] {
                xi[a] += 1;
                break;
            }
            xi[a] = lo[a];
        }
    }
}

/// Every point of the Minkowski sum of two boxes.
pub(crate) fn for_each_box(lo1: &[i64], hi1: &[i64], lo2: &[i64], hi2: &[i64], f: impl FnMut(&[i64])) {
    let lo: Vec<i64> = lo1.iter().zip(lo2).map(|(a, b)| a + b).collect();
    let hi: Vec<i64> = hi1.iter().zip(hi2).map(|(a, b)| a + b).collect();
    for_each_in(&lo, &hi, f);
}

pub(crate) fn norm2(xi: &[i64]) -> i64 {
    xi.iter().map(|x| x * x).sum()
}

/// Modes with a fixed weight profile, laid out for scattering into a grid.
pub(crate) struct ModeSet {
    pub dim: usize,
    pub grid: usize,
    pub pos: Vec<u32>,
    pub q: Vec<u32>,
    pub weight: Vec<f64>,
}

impl ModeSet {
    /// Points of {−k,…,k}^d with positive weight.
    pub fn build(dim: usize, k: i64, grid: usize, weight: impl Fn(&[i64]) -> f64) -> Result<Self> {
        check_grid(grid, dim)?;
        if grid as i64 <= 2 * k {
            return Err(invalid("grid cannot hold the mode set"));
        }
        let mut set = ModeSet { dim, grid, pos: Vec::new(), q: Vec::new(), weight: Vec::new() };
        for_each_point(dim, k, |xi| {
            let w = weight(xi);
            if w > 0.0 {
                let p = xi
                    .iter()
                    .fold(0usize, |acc, &x| acc * grid + x.rem_euclid(grid as i64) as usize);
                set.pos.push(p as u32);
                set.q.push(norm2(xi) as u32);
                set.weight.push(w);
            }
        });
        if set.pos.is_empty() {
            return Err(invalid("empty frequency support"));
        }
        Ok(set)
    }

    pub fn random_coeffs<R: Rng>(&self, rng: &mut R) -> Vec<Complex64> {
        self.weight.iter().map(|&w| complex_gaussian(rng) * w).collect()
    }

    /// ‖Σ c e^{iξ·x}‖_{L²(T^d)} on the unit-scale torus.
    pub fn l2_norm(&self, coeffs: &[Complex64]) -> f64 {
        let s: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        (volume(self.dim) * s).sqrt()
    }

    /// Samples of e^{itσΔ}φ at t = kP/n on the grid, with σ = m·σ_c and P = 2π/σ_c.
    pub fn evaluate(&self, coeffs: &[Complex64], m: i64, step: usize, steps: usize, out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        let phases = phase_table(steps);
        let mk = (m * step as i64).rem_euclid(steps as i64) as u64;
        for ((&p, &q), &c) in self.pos.iter().zip(&self.q).zip(coeffs) {
            let r = (mk * q as u64 % steps as u64) as usize;
            out[p as usize] += c * phases[r];
        }
        FftNd::cached(self.grid, self.dim).inverse(out);
    }
}

/// e^{−2πi r/n} for r < n.
pub(crate) fn phase_table(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|r| Complex64::from_polar(1.0, -2.0 * PI * r as f64 / n as f64))
        .collect()
}

pub(crate) fn volume(dim: usize) -> f64 {
    (2.0 * PI).powi(dim as i32)
}

pub(crate) fn check_grid(grid: usize, dim: usize) -> Result<()> {
    match grid.checked_pow(dim as u32) {
        Some(p) if p <= GRID_POINT_LIMIT => Ok(()),
        _ => Err(Error::CostGuard(format!("grid {grid}^{dim} exceeds {GRID_POINT_LIMIT} points"))),
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=4).contains(&dim) {
        Ok(())
    } else {
        Err(invalid(format!("dimension {dim} outside 1..=4")))
    }
}

/// Common σ_c, integer weights m_j and the period 2π/|σ_c|.
pub(crate) fn time_torus(sigmas: &[Rational]) -> Result<(f64, Vec<i64>, f64)> {
    let (sc, ms) = common_sigma(sigmas)?;
    let sc = to_f64(&sc);
    let ms = ms
        .iter()
        .map(|m| i64::try_from(m.clone()).map_err(|_| invalid("coefficient weight too large")))
        .collect::<Result<Vec<_>>>()?;
    Ok((sc, ms, 2.0 * PI / sc.abs()))
}

/// Runs `f` for every trial index, in parallel unless each trial needs
/// `points` grid samples beyond what several threads should hold at once.
pub(crate) fn map_trials<F>(trials: usize, points: usize, f: F) -> Vec<f64>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    use rayon::prelude::*;
    if points > 1 << 22 {
        (0..trials as u64).map(f).collect()
    } else {
        (0..trials as u64).into_par_iter().map(f).collect()
    }
}

pub(crate) fn running_sup(values: &[f64]) -> Vec<f64> {
    let mut s = f64::NEG_INFINITY;
    values
        .iter()
        .map(|&v| {
            s = s.max(v);
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(5, 1).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| trial_rng(5, 1).random()).collect();
        assert_eq!(a, b);
        let x: u64 = trial_rng(5, 1).random();
        let y: u64 = trial_rng(5, 2).random();
        assert_ne!(x, y);
    }

    #[test]
    fn gaussian_variance() {
        let mut rng = trial_rng(1, 0);
        let n = 20000;
        let s: f64 = (0..n).map(|_| complex_gaussian(&mut rng).norm_sqr()).sum();
        assert!((s / n as f64 - 1.0).abs() < 0.05);
    }

    #[test]
    fn points_visited_in_order() {
        let mut seen = Vec::new();
        for_each_point(2, 1, |x| seen.push(x.to_vec()));
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[0], vec![-1, -1]);
        assert_eq!(seen[1], vec![-1, 0]);
        assert_eq!(seen[8], vec![1, 1]);
    }

    #[test]
    fn mode_set_matches_spectral_field() {
        use crate::{FrequencyLattice, SpectralField};
        let lat = FrequencyLattice::new(2, 3, 1.0).unwrap();
        let set = ModeSet::build(2, 3, lat.grid(), |x| if norm2(x) <= 5 { 1.0 } else { 0.0 }).unwrap();
        let mut rng = trial_rng(3, 0);
        let c = set.random_coeffs(&mut rng);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); lat.mode_count()];
        let mut k = 0;
        for i in 0..lat.mode_count() {
            if norm2(&lat.mode(i)) <= 5 {
                coeffs[i] = c[k];
                k += 1;
            }
        }
        let f = SpectralField::new(lat.clone(), 1, coeffs).unwrap();
        assert!((set.l2_norm(&c) - f.l2_norm()).abs() < 1e-12);
        let t = 2.0 * PI * 3.0 / 8.0;
        let g = f.free_evolution(2.0, t).to_physical();
        let mut out = vec![Complex64::new(0.0, 0.0); g.points()];
        set.evaluate(&c, 2, 3, 8, &mut out);
        for (a, b) in out.iter().zip(g.component(0)) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
