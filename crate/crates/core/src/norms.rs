//! Sobolev, space-time Lebesgue, p-variation and twisted V² norms.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::field::SpectralField;
use crate::trajectory::Trajectory;

/// (Σ_ξ ⟨ξ⟩^{2s} |f̂(ξ)|²)^{1/2} over all components, ⟨ξ⟩² = 1 + |ξ/L|².
pub fn hs_norm(f: &SpectralField, s: f64) -> f64 {
    let lat = f.lattice();
    let m = lat.mode_count();
    let weights: Vec<f64> = if s == 0.0 {
        vec![1.0; m]
    } else {
        (0..m).map(|i| (1.0 + lat.wavenumber2(i)).powf(s)).collect()
    };
    let mut acc = 0.0;
    for j in 0..f.components() {
        for (z, w) in f.component(j).iter().zip(&weights) {
            acc += w * z.norm_sqr();
        }
    }
    acc.sqrt()
}

/// sup_j ‖u(t_j)‖_{H^s}.
pub fn sup_hs_norm<'a>(fields: impl IntoIterator<Item = &'a SpectralField>, s: f64) -> f64 {
    fields.into_iter().map(|f| hs_norm(f, s)).fold(0.0, f64::max)
}

/// ‖u‖_{L^p([0,nΔt) × T^d)}: left rectangle rule in time, grid sampling on the
/// lattice product grid in space. `p` may be infinite.
pub fn lp_spacetime_norm(traj: &Trajectory, p: f64) -> Result<f64> {
    lp_spacetime_norm_on(traj, p, traj.lattice().grid())
}

/// As [`lp_spacetime_norm`] on an explicit spatial grid (n > 2K points per axis).
pub fn lp_spacetime_norm_on(traj: &Trajectory, p: f64, grid: usize) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid(format!("L^p exponent {p} below 1")));
    }
    let lat = traj.lattice();
    if grid <= 2 * lat.cutoff() {
        return Err(invalid("quadrature grid cannot resolve the lattice"));
    }
    let mut acc = 0.0;
    for f in traj.fields() {
        let v = pointwise_power_sum(f, p, grid);
        if p.is_infinite() {
            acc = f64::max(acc, v);
        } else {
            acc += v;
        }
    }
    if p.is_infinite() {
        return Ok(acc);
    }
    let cell = lat.volume() / (grid.pow(lat.dim() as u32)) as f64;
    Ok((acc * cell * traj.dt()).powf(1.0 / p))
}

/// Σ_x |f(x)|^p over grid points, or max_x |f(x)| when p = ∞.
pub(crate) fn pointwise_power_sum(f: &SpectralField, p: f64, grid: usize) -> f64 {
    let ph = f.to_physical_on(grid);
    let pts = ph.points();
    let mut mod2 = vec![0.0f64; pts];
    for j in 0..ph.components {
        for (m, z) in mod2.iter_mut().zip(ph.component(j)) {
            *m += z.norm_sqr();
        }
    }
    if p.is_infinite() {
        mod2.iter().fold(0.0, |a: f64, &b| a.max(b)).sqrt()
    } else if p == 2.0 {
        mod2.iter().sum()
    } else if p == 4.0 {
        mod2.iter().map(|m| m * m).sum()
    } else {
        mod2.iter().map(|m| m.powf(p / 2.0)).sum()
    }
}

/// Sup over sample-index partitions of (Σ d(t_{k−1}, t_k)^p)^{1/p} for `n` samples,
/// with `dist(i, j)` the distance between samples i and j. O(n²) dynamic program.
pub fn vp_variation_with(n: usize, p: f64, dist: impl Fn(usize, usize) -> f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("p-variation of an empty path"));
    }
    if !(p >= 1.0) || p.is_infinite() {
        return Err(invalid(format!("p-variation exponent {p} must be finite and ≥ 1")));
    }
    let mut best = vec![0.0f64; n];
    for j in 1..n {
        let mut b = 0.0f64;
        for (i, bi) in best[..j].iter().enumerate() {
            b = b.max(bi + dist(i, j).powf(p));
        }
        best[j] = b;
    }
    Ok(best.iter().fold(0.0f64, |a, &b| a.max(b)).powf(1.0 / p))
}

fn euclid(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn euclid_zero(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// p-variation of vector samples in ℂ^m with the Euclidean norm; `append_zero`
/// adds the terminal zero sample of the 1_{[0,T)} convention.
pub fn vp_variation_norm<V: AsRef<[Complex64]>>(samples: &[V], p: f64, append_zero: bool) -> Result<f64> {
    let n = samples.len();
    let total = n + usize::from(append_zero);
    vp_variation_with(total, p, |i, j| {
        if j == n {
            euclid_zero(samples[i].as_ref())
        } else {
            euclid(samples[i].as_ref(), samples[j].as_ref())
        }
    })
}

/// Brute force over every subset of sample indices; for checking the dynamic program.
pub fn vp_variation_exhaustive(n: usize, p: f64, dist: impl Fn(usize, usize) -> f64) -> f64 {
    assert!(n <= 20, "exhaustive search is exponential");
    let mut best = 0.0f64;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut prev: Option<usize> = None;
        let mut sum = 0.0;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                if let Some(q) = prev {
                    sum += dist(q, i).powf(p);
                }
                prev = Some(i);
            }
        }
        best = best.max(sum);
    }
    best.powf(1.0 / p)
}

/// (Σ_ξ ⟨ξ⟩^{2s} ‖t ↦ e^{itσ|ξ|²}û(t,ξ)‖²_{V²})^{1/2} with the zero right endpoint.
pub fn ys_norm(traj: &Trajectory, sigma: f64, s: f64) -> f64 {
    let lat = traj.lattice();
    let m = lat.mode_count();
    let comps = traj.fields()[0].components();
    let n = traj.len();
    let mut path = vec![vec![Complex64::new(0.0, 0.0); comps]; n];
    let mut acc = 0.0;
    for i in 0..m {
        let k2 = lat.wavenumber2(i);
        let mut nonzero = false;
        for (t, row) in path.iter_mut().enumerate() {
            let ph = Complex64::from_polar(1.0, traj.time(t) * sigma * k2);
            for (j, x) in row.iter_mut().enumerate() {
                *x = ph * traj.fields()[t].component(j)[i];
                nonzero |= x.norm_sqr() != 0.0;
            }
        }
        if !nonzero {
            continue;
        }
        let v = vp_variation_norm(&path, 2.0, true).expect("nonempty path");
        acc += (1.0 + k2).powf(s) * v * v;
    }
    acc.sqrt()
}
