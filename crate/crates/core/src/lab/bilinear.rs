use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::Zero;

use super::{check_dim, check_grid, map_trials, norm2, running_sup, time_torus, trial_rng, volume, ModeSet};
use crate::error::{invalid, Error, Result};
use crate::fft::{smooth_size, FftNd};
use crate::projections::{bump_weight, DyadicIndex};
use crate::resonance::Rational;
use crate::table::{Cell, ResultTable};

const TIME_SAMPLES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BilinearCase {
    /// ‖P_H u₁ · P_L u₂‖
    HL,
    /// ‖P_L(P_H u₁ · P_H u₂)‖
    HHL,
}

impl fmt::Display for BilinearCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BilinearCase::HL => "HL",
            BilinearCase::HHL => "HHL",
        })
    }
}

impl FromStr for BilinearCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "HL" => Ok(BilinearCase::HL),
            "HHL" => Ok(BilinearCase::HHL),
            _ => Err(invalid(format!("unknown bilinear case {s:?}"))),
        }
    }
}

fn shell(n: DyadicIndex, dim: usize, grid: usize) -> Result<ModeSet> {
    let k = 2 * n.value() as i64 - 1;
    ModeSet::build(dim, k, grid, |xi| bump_weight(n, (norm2(xi) as f64).sqrt()))
}

/// Measured ‖·‖_{L²(T_σ × T^d)} / (L^s ‖φ₁‖ ‖φ₂‖) for free evolutions of
/// random shell data, with s = max(d/2 − 1, 0).
#[allow(clippy::too_many_arguments)]
pub fn bilinear_ratio(
    h: DyadicIndex,
    l: DyadicIndex,
    case: BilinearCase,
    sigma1: &Rational,
    sigma2: &Rational,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<ResultTable> {
    check_dim(dim)?;
    if trials == 0 {
        return Err(invalid("at least one trial"));
    }
    if h < l {
        return Err(invalid("bilinear ratio needs H ≥ L"));
    }
    if case == BilinearCase::HHL {
        if h.value() < 4 * l.value() {
            return Err(invalid("high-high-low case needs H ≥ 4L"));
        }
        if (sigma1 + sigma2).is_zero() {
            return Err(invalid("high-high-low case needs σ₁ + σ₂ ≠ 0"));
        }
    }
    let (_, ms, period) = time_torus(&[sigma1.clone(), sigma2.clone()])?;
    let s = (dim as f64 / 2.0 - 1.0).max(0.0);
    let kh = 2 * h.value() as usize - 1;
    let kl = 2 * l.value() as usize - 1;
    let values = match case {
        BilinearCase::HL => {
            let grid = smooth_size(2 * (kh + kl) + 1);
            check_grid(grid, dim)?;
            let s1 = shell(h, dim, grid)?;
            let s2 = shell(l, dim, grid)?;
            let pts = grid.pow(dim as u32);
            map_trials(trials, pts, |trial| {
                let mut rng = trial_rng(seed, trial);
                let c1 = s1.random_coeffs(&mut rng);
                let c2 = s2.random_coeffs(&mut rng);
                let mut a = vec![Complex64::zero(); pts];
                let mut b = vec![Complex64::zero(); pts];
                let mut acc = 0.0;
                for k in 0..TIME_SAMPLES {
                    s1.evaluate(&c1, ms[0], k, TIME_SAMPLES, &mut a);
                    s2.evaluate(&c2, ms[1], k, TIME_SAMPLES, &mut b);
                    acc += a.iter().zip(&b).map(|(x, y)| (x * y).norm_sqr()).sum::<f64>();
                }
                let cell = volume(dim) / pts as f64;
                let norm = (acc * cell * period / TIME_SAMPLES as f64).sqrt();
                norm / (l.as_f64().powf(s) * s1.l2_norm(&c1) * s2.l2_norm(&c2))
            })
        }
        BilinearCase::HHL => {
            let grid = smooth_size(2 * kh + kl + 1);
            check_grid(grid, dim)?;
            let set = shell(h, dim, grid)?;
            let low = shell(l, dim, grid)?;
            let pts = grid.pow(dim as u32);
            map_trials(trials, pts, |trial| {
                let mut rng = trial_rng(seed, trial);
                let c1 = set.random_coeffs(&mut rng);
                let c2 = set.random_coeffs(&mut rng);
                let mut a = vec![Complex64::zero(); pts];
                let mut b = vec![Complex64::zero(); pts];
                let plan = FftNd::cached(grid, dim);
                let mut acc = 0.0;
                for k in 0..TIME_SAMPLES {
                    set.evaluate(&c1, ms[0], k, TIME_SAMPLES, &mut a);
                    set.evaluate(&c2, ms[1], k, TIME_SAMPLES, &mut b);
                    for (x, y) in a.iter_mut().zip(&b) {
                        *x *= y;
                    }
                    plan.forward(&mut a);
                    acc += low
                        .pos
                        .iter()
                        .zip(&low.weight)
                        .map(|(&p, &w)| (a[p as usize] * w).norm_sqr())
                        .sum::<f64>();
                }
                let spectral = acc / (pts as f64 * pts as f64) * volume(dim);
                let norm = (spectral * period / TIME_SAMPLES as f64).sqrt();
                norm / (l.as_f64().powf(s) * set.l2_norm(&c1) * set.l2_norm(&c2))
            })
        }
    };
    let bound = l.as_f64() / h.as_f64() + 1.0 / l.as_f64();
    let mut table = ResultTable::new(
        [
            "experiment", "d", "H", "L", "case", "sigma1", "sigma2", "trial", "value", "running_sup",
            "bound_base",
        ],
        seed,
    );
    for (trial, (v, sup)) in values.iter().zip(running_sup(&values)).enumerate() {
        table.push(vec![
            "bilinear".into(),
            dim.into(),
            h.value().into(),
            l.value().into(),
            case.to_string().into(),
            sigma1.to_string().into(),
            sigma2.to_string().into(),
            trial.into(),
            Cell::Float(*v),
            Cell::Float(sup),
            Cell::Float(bound),
        ])?;
    }
    Ok(table)
}
