use num_complex::Complex64;

use super::nonlinearity::nonlinearity;
use super::TripleTrajectory;
use crate::error::{invalid, Result};
use crate::field::{pointwise_product, ProductKind, SpectralField};
use crate::resonance::CoefficientTriple;
use crate::state::FieldTriple;
use crate::trajectory::Trajectory;

/// Streaming trapezoid for ∫₀^{t_k} e^{i(t_k−t')σΔ}F(t')dt' in the twisted frame.
pub(crate) struct TwistedIntegral {
    sigma: f64,
    dt: f64,
    k: usize,
    sum: Option<SpectralField>,
    prev: Option<SpectralField>,
}

impl TwistedIntegral {
    pub fn new(sigma: f64, dt: f64) -> Self {
        TwistedIntegral { sigma, dt, k: 0, sum: None, prev: None }
    }

    /// Feed F(t_k) for the next k and get the integral up to t_k.
    pub fn push(&mut self, forcing: &SpectralField) -> Result<SpectralField> {
        let t = self.k as f64 * self.dt;
        let g = forcing.free_evolution(self.sigma, -t);
        let half = Complex64::new(0.5 * self.dt, 0.0);
        let sum = match (self.sum.take(), self.prev.take()) {
            (Some(mut s), Some(p)) => {
                s.axpy(half, &p)?;
                s.axpy(half, &g)?;
                s
            }
            _ => SpectralField::zeros(forcing.lattice(), forcing.components()),
        };
        let out = sum.free_evolution(self.sigma, t);
        self.sum = Some(sum);
        self.prev = Some(g);
        self.k += 1;
        Ok(out)
    }

    /// Twisted partial sum and last twisted integrand, for sub-step evaluation.
    fn state(&self) -> Option<(&SpectralField, &SpectralField)> {
        Some((self.sum.as_ref()?, self.prev.as_ref()?))
    }
}

/// Cumulative Duhamel integrals I(t_k) for forcing samples F(t_k), t_k = k·dt.
pub fn duhamel_cumulative(sigma: f64, forcing: &[SpectralField], dt: f64) -> Result<Vec<SpectralField>> {
    let mut acc = TwistedIntegral::new(sigma, dt);
    forcing.iter().map(|f| acc.push(f)).collect()
}

fn evaluate_at(
    sigma: f64,
    dt: f64,
    n: usize,
    t: f64,
    forcing: impl Fn(usize) -> Result<SpectralField>,
) -> Result<SpectralField> {
    let t_end = (n - 1) as f64 * dt;
    if !(t >= 0.0) || t > t_end * (1.0 + 1e-12) {
        return Err(invalid(format!("t = {t} outside [0, {t_end}]")));
    }
    let pos = t / dt;
    let j = (pos + 1e-9).floor().min((n - 1) as f64) as usize;
    let mut acc = TwistedIntegral::new(sigma, dt);
    let mut last = acc.push(&forcing(0)?)?;
    for k in 1..=j {
        last = acc.push(&forcing(k)?)?;
    }
    let frac = pos - j as f64;
    if frac <= 1e-9 || j + 1 >= n {
        return Ok(last);
    }
    // partial trapezoid over [t_j, t] with the linearly interpolated twisted integrand
    let (sum, gj) = acc.state().expect("at least one sample");
    let g1 = forcing(j + 1)?.free_evolution(sigma, -((j + 1) as f64) * dt);
    let mut gt = gj.scaled(Complex64::new(1.0 - frac, 0.0));
    gt.axpy(Complex64::new(frac, 0.0), &g1)?;
    let h = Complex64::new(0.5 * frac * dt, 0.0);
    let mut s = sum.clone();
    s.axpy(h, gj)?;
    s.axpy(h, &gt)?;
    Ok(s.free_evolution(sigma, t))
}

fn check_pair(f: &Trajectory, g: &Trajectory) -> Result<()> {
    if f.len() != g.len() || f.dt() != g.dt() {
        return Err(invalid("trajectories must share a time grid"));
    }
    if f.lattice() != g.lattice() {
        return Err(crate::error::Error::LatticeMismatch);
    }
    Ok(())
}

/// I⁽¹⁾_σ(f, g)(t) = ∫₀ᵗ e^{i(t−t')σΔ}(∇·f(t'))g(t')dt'.
pub fn duhamel_i1(sigma: f64, f: &Trajectory, g: &Trajectory, t: f64) -> Result<SpectralField> {
    check_pair(f, g)?;
    evaluate_at(sigma, f.dt(), f.len(), t, |k| {
        let div = f.fields()[k].divergence()?;
        pointwise_product(&div, &g.fields()[k], false, ProductKind::Broadcast)
    })
}

/// I⁽²⁾_σ(f, g)(t) = ∫₀ᵗ e^{i(t−t')σΔ}∇(f(t')·g(t'))dt'.
pub fn duhamel_i2(sigma: f64, f: &Trajectory, g: &Trajectory, t: f64) -> Result<SpectralField> {
    check_pair(f, g)?;
    evaluate_at(sigma, f.dt(), f.len(), t, |k| {
        pointwise_product(&f.fields()[k], &g.fields()[k], false, ProductKind::Dot)?.gradient()
    })
}

/// Φ(u, v, w) = (e^{itαΔ}u₀ + iI⁽¹⁾_α(w, v), e^{itβΔ}v₀ + iI⁽¹⁾_β(w̄, u), e^{itγΔ}w₀ − iI⁽²⁾_γ(u, v̄))
/// on the time grid of `guess`, which must end at `t_final`.
pub fn phi_map(
    data: &FieldTriple,
    guess: &TripleTrajectory,
    coeffs: &CoefficientTriple,
    t_final: f64,
) -> Result<TripleTrajectory> {
    if (guess.final_time() - t_final).abs() > 1e-9 * t_final.max(1.0) {
        return Err(invalid(format!(
            "guess ends at {} but T = {t_final}",
            guess.final_time()
        )));
    }
    if guess.u.lattice() != data.lattice() {
        return Err(crate::error::Error::LatticeMismatch);
    }
    let sig = coeffs.as_f64();
    let dt = guess.dt();
    let mut acc = [
        TwistedIntegral::new(sig[0], dt),
        TwistedIntegral::new(sig[1], dt),
        TwistedIntegral::new(sig[2], dt),
    ];
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = Vec::with_capacity(guess.len());
    for k in 0..guess.len() {
        let t = k as f64 * dt;
        let n = nonlinearity(&guess.at(k))?;
        let mut fields = Vec::with_capacity(3);
        for (j, (f0, nk)) in data.fields().into_iter().zip([&n.u, &n.v, &n.w]).enumerate() {
            let mut x = f0.free_evolution(sig[j], t);
            x.axpy(minus_i, &acc[j].push(nk)?)?;
            fields.push(x);
        }
        out.push(FieldTriple::from_vec(fields)?);
    }
    TripleTrajectory::from_states(out, dt, sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FrequencyLattice;
    use crate::resonance::classify_str;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_single_mode_forcing() {
        // ∫₀ᵗ e^{−i(t−t')σq} F dt' = F(1 − e^{−iσqt})/(iσq)
        let lat = FrequencyLattice::new(1, 4, 1.0).unwrap();
        let f0 = c(0.7, -0.2);
        let sigma = 1.0;
        let q = 9.0;
        let forcing = SpectralField::single_mode(&lat, 1, 0, &[3], f0).unwrap();
        let errs: Vec<f64> = [0.01, 0.005]
            .iter()
            .map(|&dt| {
                let n = (1.0f64 / dt).round() as usize;
                let samples = vec![forcing.clone(); n + 1];
                let out = duhamel_cumulative(sigma, &samples, dt).unwrap();
                let t = n as f64 * dt;
                let exact = f0 * (c(1.0, 0.0) - Complex64::from_polar(1.0, -sigma * q * t)) / c(0.0, sigma * q);
                assert_eq!(out[0].coeff_norm2(), 0.0);
                (out[n].coeffs()[lat.index_of(&[3]).unwrap()] - exact).norm()
            })
            .collect();
        assert!(errs[0] < 1e-2);
        let order = (errs[0] / errs[1]).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn zero_and_endpoints() {
        let lat = FrequencyLattice::new(2, 3, 1.0).unwrap();
        let z = Trajectory::free(&SpectralField::zeros(&lat, 2), 1.0, 0.1, 6).unwrap();
        let g = Trajectory::free(
            &SpectralField::single_mode(&lat, 2, 0, &[1, 1], c(1.0, 0.0)).unwrap(),
            1.0,
            0.1,
            6,
        )
        .unwrap();
        assert!(duhamel_i1(1.0, &z, &g, 0.33).unwrap().is_zero());
        assert!(duhamel_i1(1.0, &g, &g, 0.0).unwrap().is_zero());
        assert!(duhamel_i2(1.0, &g, &g, 0.0).unwrap().is_zero());
        assert!(duhamel_i1(1.0, &g, &g, 0.51).is_err());
        assert!(duhamel_i1(1.0, &g, &g, -0.1).is_err());
    }

    #[test]
    fn off_grid_time_interpolates() {
        let lat = FrequencyLattice::new(1, 4, 1.0).unwrap();
        let f0 = c(0.7, -0.2);
        let w = Trajectory::new(
            vec![SpectralField::single_mode(&lat, 1, 0, &[1], f0).unwrap(); 401],
            0.0025,
            None,
        )
        .unwrap();
        let v = Trajectory::new(
            vec![SpectralField::single_mode(&lat, 1, 0, &[1], c(1.0, 0.0)).unwrap(); 401],
            0.0025,
            None,
        )
        .unwrap();
        // (∇·w)v = i f0 e^{2ix}: constant forcing at mode 2, q = 4
        let t = 0.7013;
        let got = duhamel_i1(1.0, &w, &v, t).unwrap().coeffs()[lat.index_of(&[2]).unwrap()];
        let f = c(0.0, 1.0) * f0;
        let exact = f * (c(1.0, 0.0) - Complex64::from_polar(1.0, -4.0 * t)) / c(0.0, 4.0);
        assert!((got - exact).norm() < 1e-5);
    }

    #[test]
    fn phi_of_zero_guess_is_free() {
        let lat = FrequencyLattice::new(2, 4, 1.0).unwrap();
        let coeffs = classify_str("1", "2", "3").unwrap();
        let u = SpectralField::single_mode(&lat, 2, 0, &[1, 2], c(0.3, 0.1)).unwrap();
        let v = SpectralField::single_mode(&lat, 2, 1, &[-1, 0], c(0.2, -0.4)).unwrap();
        let w = SpectralField::single_mode(&lat, 2, 1, &[0, 3], c(0.1, 0.2)).unwrap();
        let data = FieldTriple::new(u, v, w).unwrap();
        let zero = TripleTrajectory::free(&FieldTriple::zeros(&lat), [1.0, 2.0, 3.0], 0.05, 10).unwrap();
        let out = phi_map(&data, &zero, &coeffs, 0.5).unwrap();
        let free = TripleTrajectory::free(&data, [1.0, 2.0, 3.0], 0.05, 10).unwrap();
        assert_eq!(out, free);
        let zz = phi_map(&FieldTriple::zeros(&lat), &zero, &coeffs, 0.5).unwrap();
        assert!(zz.u.fields().iter().all(|f| f.is_zero()));
        assert!(phi_map(&data, &zero, &coeffs, 0.7).is_err());
    }

    #[test]
    fn phi_agrees_with_duhamel_integrals() {
        let lat = FrequencyLattice::new(2, 3, 1.0).unwrap();
        let coeffs = classify_str("1", "2", "3").unwrap();
        let u = SpectralField::single_mode(&lat, 2, 0, &[1, 0], c(0.3, 0.1)).unwrap();
        let v = SpectralField::single_mode(&lat, 2, 1, &[0, 1], c(0.2, -0.4)).unwrap();
        let w = SpectralField::single_mode(&lat, 2, 0, &[1, -1], c(0.1, 0.2)).unwrap();
        let data = FieldTriple::new(u, v, w).unwrap();
        let guess = TripleTrajectory::free(&data, [1.0, 2.0, 3.0], 0.02, 25).unwrap();
        let out = phi_map(&data, &guess, &coeffs, 0.5).unwrap();
        let t = 0.5;
        let i = c(0.0, 1.0);
        let mut u1 = data.u.free_evolution(1.0, t);
        u1.axpy(i, &duhamel_i1(1.0, &guess.w, &guess.v, t).unwrap()).unwrap();
        let mut v1 = data.v.free_evolution(2.0, t);
        v1.axpy(i, &duhamel_i1(2.0, &guess.w.conj(), &guess.u, t).unwrap()).unwrap();
        let mut w1 = data.w.free_evolution(3.0, t);
        w1.axpy(-i, &duhamel_i2(3.0, &guess.u, &guess.v.conj(), t).unwrap()).unwrap();
        let last = out.last();
        assert!(last.u.max_abs_diff(&u1) < 1e-14);
        assert!(last.v.max_abs_diff(&v1) < 1e-14);
        assert!(last.w.max_abs_diff(&w1) < 1e-14);
    }
}
