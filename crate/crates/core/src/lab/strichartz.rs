use num_complex::Complex64;

use super::{check_dim, map_trials, running_sup, time_torus, trial_rng, volume, ModeSet};
use crate::error::{invalid, Result};
use crate::fft::smooth_size;
use crate::projections::{bump_weight, DyadicIndex};
use crate::resonance::Rational;
use crate::table::{Cell, ResultTable};

const TIME_SAMPLES: usize = 16;

/// Space-time L^p norm over one period of the free evolution, sampled at
/// `steps` times and on the grid of `set`. For p = ∞ the maximum modulus.
pub(crate) fn spacetime_lp(
    set: &ModeSet,
    coeffs: &[Complex64],
    m: i64,
    p: f64,
    period: f64,
    steps: usize,
) -> f64 {
    let pts = set.grid.pow(set.dim as u32);
    let mut buf = vec![Complex64::new(0.0, 0.0); pts];
    let mut acc = 0.0f64;
    for k in 0..steps {
        set.evaluate(coeffs, m, k, steps, &mut buf);
        if p.is_infinite() {
            acc = buf.iter().fold(acc, |a, z| a.max(z.norm_sqr()));
        } else if p == 4.0 {
            acc += buf.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum::<f64>();
        } else {
            acc += buf.iter().map(|z| z.norm_sqr().powf(p / 2.0)).sum::<f64>();
        }
    }
    if p.is_infinite() {
        return acc.sqrt();
    }
    let cell = volume(set.dim) / pts as f64;
    (acc * cell * period / steps as f64).powf(1.0 / p)
}

/// Integer weight and period of e^{itσΔ} on the unit torus.
fn single_sigma(sigma: &Rational) -> Result<(i64, f64)> {
    let (_, m, period) = time_torus(std::slice::from_ref(sigma))?;
    Ok((m[0], period))
}

/// ‖P_N e^{itσΔ}φ‖_{L^p(T_σ × T^d)} / ‖P_Nφ‖_{L²} over random φ.
pub fn strichartz_ratio(
    n: DyadicIndex,
    p: f64,
    sigma: &Rational,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<ResultTable> {
    check_dim(dim)?;
    if trials == 0 {
        return Err(invalid("at least one trial"));
    }
    if !(p >= 1.0) {
        return Err(invalid(format!("exponent {p} below 1")));
    }
    let (weight, period) = single_sigma(sigma)?;
    let k = 2 * n.value() as i64 - 1;
    let grid = smooth_size(2 * k as usize + 2);
    let set = ModeSet::build(dim, k, grid, |xi| {
        let s = (super::norm2(xi) as f64).sqrt();
        bump_weight(n, s)
    })?;
    let values = map_trials(trials, grid.pow(dim as u32), |trial| {
        let mut rng = trial_rng(seed, trial);
        let c = set.random_coeffs(&mut rng);
        spacetime_lp(&set, &c, weight, p, period, TIME_SAMPLES) / set.l2_norm(&c)
    });
    let mut table = ResultTable::new(
        ["experiment", "d", "N", "p", "sigma", "trial", "value", "running_sup"],
        seed,
    );
    for (trial, (v, s)) in values.iter().zip(running_sup(&values)).enumerate() {
        table.push(vec![
            "strichartz".into(),
            dim.into(),
            n.value().into(),
            p.into(),
            sigma.to_string().into(),
            trial.into(),
            Cell::Float(*v),
            Cell::Float(s),
        ])?;
    }
    Ok(table)
}

/// Random data on the strip ([−N,N]^d) ∩ {|ξ₁| ≤ M}. The value is the ratio
/// ‖e^{itσΔ}φ‖_{L^p} / ‖φ‖_{L²} divided by its value for a single mode, so
/// plane waves score exactly 1.
pub fn strip_ratio(
    n: DyadicIndex,
    m: DyadicIndex,
    p: f64,
    sigma: &Rational,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<ResultTable> {
    check_dim(dim)?;
    if m > n {
        return Err(invalid(format!("strip width {} exceeds cube size {}", m.value(), n.value())));
    }
    if p != 4.0 && !p.is_infinite() {
        return Err(invalid("strip ratios use p = 4 or p = ∞"));
    }
    if trials == 0 {
        return Err(invalid("at least one trial"));
    }
    let (weight, period) = single_sigma(sigma)?;
    let k = n.value() as i64;
    let mv = m.value() as i64;
    let grid = smooth_size(3 * k as usize + 2);
    let set = ModeSet::build(dim, k, grid, |xi| if xi[0].abs() <= mv { 1.0 } else { 0.0 })?;
    let steps = if p.is_infinite() { 2 * TIME_SAMPLES } else { TIME_SAMPLES };
    let plane = if p.is_infinite() {
        volume(dim).powf(-0.5)
    } else {
        (period * volume(dim)).powf(1.0 / p) * volume(dim).powf(-0.5)
    };
    let values = map_trials(trials, grid.pow(dim as u32), |trial| {
        let mut rng = trial_rng(seed, trial);
        let c = set.random_coeffs(&mut rng);
        spacetime_lp(&set, &c, weight, p, period, steps) / set.l2_norm(&c) / plane
    });
    let bound = if p.is_infinite() {
        m.as_f64().sqrt() * n.as_f64().powf((dim as f64 - 1.0) / 2.0)
    } else {
        m.as_f64() / n.as_f64()
    };
    let mut table = ResultTable::new(
        ["experiment", "d", "N", "M", "p", "sigma", "trial", "value", "running_sup", "bound"],
        seed,
    );
    for (trial, (v, s)) in values.iter().zip(running_sup(&values)).enumerate() {
        table.push(vec![
            "strip".into(),
            dim.into(),
            n.value().into(),
            m.value().into(),
            p.into(),
            sigma.to_string().into(),
            trial.into(),
            Cell::Float(*v),
            Cell::Float(s),
            Cell::Float(bound),
        ])?;
    }
    Ok(table)
}
