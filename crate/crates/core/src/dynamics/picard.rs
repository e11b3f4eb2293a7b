use super::duhamel::phi_map;
use super::{critical_index, sup_distance, triple_hs_norm, TripleTrajectory};
use crate::error::{invalid, Error, Result};
use crate::resonance::CoefficientTriple;
use crate::state::FieldTriple;

/// Contraction evidence from [`picard_solve`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PicardReport {
    pub iterates: usize,
    /// sup-in-time H^s distance between consecutive iterates.
    pub differences: Vec<f64>,
    /// differences[k+1] / differences[k].
    pub ratios: Vec<f64>,
    /// sup-in-time H^s norm of Φ(X) − X for the returned iterate.
    pub final_residual: f64,
}

#[derive(Clone, Debug)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Time steps on [0, T]; the iterates are sampled at steps + 1 points.
    pub steps: usize,
    /// Sobolev index of the metric; `None` means d/2 − 1.
    pub sobolev: Option<f64>,
    pub guard_factor: f64,
}

impl PicardOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        PicardOptions { tol, max_iter, steps: 256, sobolev: None, guard_factor: 1e6 }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }
}

fn sup_norm(x: &TripleTrajectory, s: f64) -> f64 {
    (0..x.len())
        .map(|k| {
            triple_hs_norm(
                [&x.u.fields()[k], &x.v.fields()[k], &x.w.fields()[k]],
                s,
            )
        })
        .fold(0.0, f64::max)
}

/// Iterate Φ from the free evolution until consecutive iterates differ by less than `tol`.
pub fn picard_solve(
    data: &FieldTriple,
    coeffs: &CoefficientTriple,
    t_final: f64,
    opts: &PicardOptions,
) -> Result<(TripleTrajectory, PicardReport)> {
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    if opts.steps < 1 || !(t_final > 0.0) {
        return Err(invalid("need T > 0 and at least one time step"));
    }
    let s = opts.sobolev.unwrap_or_else(|| critical_index(data.lattice().dim()));
    let dt = t_final / opts.steps as f64;
    let mut x = TripleTrajectory::free(data, coeffs.as_f64(), dt, opts.steps)?;
    let reference = sup_norm(&x, s);
    let mut report = PicardReport::default();
    let fail = |reason: String, report: PicardReport| Error::NonConvergence {
        reason,
        report: Box::new(report),
    };
    for k in 1..=opts.max_iter {
        let y = phi_map(data, &x, coeffs, t_final)?;
        let diff = sup_distance(&y, &x, s)?;
        if let Some(&prev) = report.differences.last() {
            report.ratios.push(if prev > 0.0 { diff / prev } else { f64::INFINITY });
        }
        report.differences.push(diff);
        report.iterates = k;
        let size = sup_norm(&y, s);
        if !diff.is_finite() || !size.is_finite() {
            return Err(fail(format!("non-finite iterate at step {k}"), report));
        }
        if reference > 0.0 && size > opts.guard_factor * reference {
            return Err(fail(
                format!("iterate norm {size:e} exceeds {}× the free evolution", opts.guard_factor),
                report,
            ));
        }
        x = y;
        if diff < opts.tol {
            let z = phi_map(data, &x, coeffs, t_final)?;
            report.final_residual = sup_distance(&z, &x, s)?;
            return Ok((x, report));
        }
        let n = report.ratios.len();
        if n >= 3 && report.ratios[n - 3..].iter().all(|&r| r >= 1.0) {
            return Err(fail("contraction ratio ≥ 1 for 3 consecutive steps".into(), report));
        }
    }
    Err(fail(format!("no convergence within {} iterations", opts.max_iter), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FrequencyLattice;
    use crate::resonance::classify_str;

    #[test]
    fn zero_data_one_iterate() {
        let lat = FrequencyLattice::new(2, 4, 1.0).unwrap();
        let coeffs = classify_str("1", "2", "3").unwrap();
        let (x, rep) =
            picard_solve(&FieldTriple::zeros(&lat), &coeffs, 0.5, &PicardOptions::new(1e-10, 10).with_steps(8))
                .unwrap();
        assert_eq!(rep.iterates, 1);
        assert_eq!(rep.final_residual, 0.0);
        assert!(x.u.fields().iter().all(|f| f.is_zero()));
    }

    #[test]
    fn rejects_bad_options() {
        let lat = FrequencyLattice::new(1, 4, 1.0).unwrap();
        let coeffs = classify_str("1", "2", "3").unwrap();
        let z = FieldTriple::zeros(&lat);
        assert!(picard_solve(&z, &coeffs, 0.5, &PicardOptions::new(0.0, 10)).is_err());
        assert!(picard_solve(&z, &coeffs, 0.0, &PicardOptions::new(1e-3, 10)).is_err());
    }
}
