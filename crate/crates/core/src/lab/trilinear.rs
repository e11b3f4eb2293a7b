use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::Zero;
use rustfft::FftPlanner;

use super::{check_dim, complex_gaussian, for_each_point, norm2, phase_table, running_sup, time_torus, trial_rng, volume};
use crate::error::{invalid, Error, Result};
use crate::projections::{bump_weight, low_weight, DyadicIndex};
use crate::resonance::{classify, scan_min_ratio, to_f64, Rational};
use crate::table::{Cell, ResultTable};

/// Largest number of (ξ_a, ξ_b) pairs visited while enumerating triples.
pub const TRIPLE_PAIR_LIMIT: u64 = 500_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrilinearMode {
    /// Random shell data; HH-nonresonant coefficients only.
    Nonresonant,
    /// One resonant triple ξ₁+ξ₂+ξ₃ = 0 with h = 0; resonant coefficients only.
    ResonantDemo,
}

impl fmt::Display for TrilinearMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrilinearMode::Nonresonant => "nonresonant",
            TrilinearMode::ResonantDemo => "resonant-demo",
        })
    }
}

impl FromStr for TrilinearMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonresonant" => Ok(TrilinearMode::Nonresonant),
            "resonant-demo" => Ok(TrilinearMode::ResonantDemo),
            _ => Err(invalid(format!("unknown trilinear mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrilinearOptions {
    pub n: [DyadicIndex; 3],
    pub sigmas: [Rational; 3],
    pub dim: usize,
    /// Truncation time, 0 < T ≤ period.
    pub t: f64,
    /// M = N_max²/C_split rounded down to a dyadic number. `None` takes
    /// 3/c with c the lattice min-ratio at K = N_max (1 in the resonant demo).
    pub c_split: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub mode: TrilinearMode,
    /// Time samples per period (power of two); `None` chooses one that
    /// resolves every modulation without wrap-around.
    pub time_samples: Option<usize>,
}

/// The five pieces and the direct integral for one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JPieces {
    pub j1: Complex64,
    pub j2: Complex64,
    pub j31: Complex64,
    pub j32: Complex64,
    pub j33: Complex64,
    pub direct: Complex64,
    /// Product of the three data L² norms.
    pub norms: f64,
}

impl JPieces {
    pub fn sum(&self) -> Complex64 {
        self.j1 + self.j2 + self.j31 + self.j32 + self.j33
    }

    /// |ΣJ − direct| / |direct|, or relative to the product of norms when the
    /// direct integral vanishes (below 1e−8 of that product).
    pub fn identity_error(&self) -> f64 {
        let d = self.direct.norm();
        let scale = if d > 1e-8 * self.norms { d } else { self.norms };
        (self.sum() - self.direct).norm() / scale
    }
}

#[derive(Clone, Debug)]
pub struct TrilinearReport {
    pub table: ResultTable,
    pub pieces: Vec<JPieces>,
    pub m: DyadicIndex,
    pub c_split: f64,
    /// min |σ₁|ξ₁|² + σ₂|ξ₂|² + σ₃|ξ₃|²| over the enumerated triples.
    pub h_min: f64,
    pub time_samples: usize,
    pub triples: usize,
}

struct Support {
    xi: Vec<i64>,
    q: Vec<u32>,
    weight: Vec<f64>,
}

impl Support {
    fn len(&self) -> usize {
        self.q.len()
    }

    fn point(&self, i: usize, dim: usize) -> &[i64] {
        &self.xi[i * dim..(i + 1) * dim]
    }
}

struct Triples {
    idx: [Vec<u32>; 3],
    qid: Vec<u32>,
    qs: Vec<[u32; 3]>,
}

fn enumerate(supports: &[Support; 3], dim: usize, k: i64) -> Result<Triples> {
    let c = (0..3).max_by_key(|&j| supports[j].len()).unwrap();
    let (a, b) = match c {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let pairs = supports[a].len() as u64 * supports[b].len() as u64;
    if pairs > TRIPLE_PAIR_LIMIT {
        return Err(Error::CostGuard(format!("{pairs} frequency pairs exceed {TRIPLE_PAIR_LIMIT}")));
    }
    let side = 2 * k + 1;
    let mut lookup = vec![u32::MAX; side.pow(dim as u32) as usize];
    let locate = |xi: &[i64]| -> Option<usize> {
        let mut idx = 0i64;
        for &x in xi {
            if x.abs() > k {
                return None;
            }
            idx = idx * side + x + k;
        }
        Some(idx as usize)
    };
    for i in 0..supports[c].len() {
        lookup[locate(supports[c].point(i, dim)).unwrap()] = i as u32;
    }
    let mut out = Triples { idx: [Vec::new(), Vec::new(), Vec::new()], qid: Vec::new(), qs: Vec::new() };
    let mut ids: HashMap<[u32; 3], u32> = HashMap::new();
    let mut xc = vec![0i64; dim];
    for ia in 0..supports[a].len() {
        let pa = supports[a].point(ia, dim);
        for ib in 0..supports[b].len() {
            let pb = supports[b].point(ib, dim);
            for d in 0..dim {
                xc[d] = -pa[d] - pb[d];
            }
            let Some(slot) = locate(&xc) else { continue };
            let ic = lookup[slot];
            if ic == u32::MAX {
                continue;
            }
            let mut tri = [0u32; 3];
            tri[a] = ia as u32;
            tri[b] = ib as u32;
            tri[c] = ic;
            let q = [0, 1, 2].map(|j| supports[j].q[tri[j] as usize]);
            let next = ids.len() as u32;
            let id = *ids.entry(q).or_insert_with(|| {
                out.qs.push(q);
                next
            });
            for j in 0..3 {
                out.idx[j].push(tri[j]);
            }
            out.qid.push(id);
        }
    }
    Ok(out)
}

/// Truncated wave 1_{[0,T)}(t) e^{−itσq} sampled at t_k = kP/n, split into
/// modulation < M and ≥ M parts.
struct Waves {
    full: Vec<Complex64>,
    low: Vec<Complex64>,
    high: Vec<Complex64>,
}

fn waves(m_j: i64, q: u32, mask: &[bool], sigma_c: f64, m: DyadicIndex) -> Waves {
    let n = mask.len();
    let phases = phase_table(n);
    let shift = (m_j * q as i64).rem_euclid(n as i64);
    let full: Vec<Complex64> = (0..n)
        .map(|k| if mask[k] { phases[(shift as u64 * k as u64 % n as u64) as usize] } else { Complex64::zero() })
        .collect();
    let mut planner = FftPlanner::new();
    let mut low = full.clone();
    planner.plan_fft_forward(n).process(&mut low);
    for (b, z) in low.iter_mut().enumerate() {
        let r = (b as i64 + m_j * q as i64).rem_euclid(n as i64);
        let wrapped = if r >= n as i64 / 2 { r - n as i64 } else { r };
        *z *= low_weight(m, sigma_c * wrapped as f64) / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut low);
    let high = full.iter().zip(&low).map(|(f, l)| f - l).collect();
    Waves { full, low, high }
}

fn dot3(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(Complex64::zero(), |s, (x, y)| s + x * y)
}

/// Piece weights W(q₁,q₂,q₃) = Δt Σ_k Π_j G_j(t_k) for J₁, J₂, J₃₁, J₃₂, J₃₃.
fn piece_weights(
    qs: &[[u32; 3]],
    ms: &[i64],
    mask: &[bool],
    sigma_c: f64,
    m: DyadicIndex,
    dt: f64,
) -> Vec<[Complex64; 5]> {
    let mut cache: [BTreeMap<u32, Waves>; 3] = Default::default();
    for q in qs {
        for j in 0..3 {
            cache[j].entry(q[j]).or_insert_with(|| waves(ms[j], q[j], mask, sigma_c, m));
        }
    }
    let mut groups: BTreeMap<(u32, u32), Vec<(u32, usize)>> = BTreeMap::new();
    for (id, q) in qs.iter().enumerate() {
        groups.entry((q[0], q[1])).or_default().push((q[2], id));
    }
    let n = mask.len();
    let mut out = vec![[Complex64::zero(); 5]; qs.len()];
    let mut pairs = vec![vec![Complex64::zero(); n]; 5];
    for ((q1, q2), members) in groups {
        let g1 = &cache[0][&q1];
        let g2 = &cache[1][&q2];
        for k in 0..n {
            pairs[0][k] = g1.low[k] * g2.low[k];
            pairs[1][k] = g1.high[k] * g2.high[k];
            pairs[2][k] = g1.high[k] * g2.low[k];
            pairs[3][k] = g1.full[k] * g2.high[k];
            pairs[4][k] = g1.low[k] * g2.full[k];
        }
        for (q3, id) in members {
            let g3 = &cache[2][&q3];
            out[id] = [
                dot3(&pairs[0], &g3.low) * dt,
                dot3(&pairs[1], &g3.high) * dt,
                dot3(&pairs[2], &g3.full) * dt,
                dot3(&pairs[3], &g3.low) * dt,
                dot3(&pairs[4], &g3.high) * dt,
            ];
        }
    }
    out
}

/// Δt Σ_{t_k < T} e^{−2πi r k/n} for every residue r.
fn direct_weights(mask: &[bool], dt: f64) -> Vec<Complex64> {
    let n = mask.len();
    let phases = phase_table(n);
    (0..n)
        .map(|r| {
            (0..n)
                .filter(|&k| mask[k])
                .fold(Complex64::zero(), |s, k| s + phases[r * k % n])
                * dt
        })
        .collect()
}

/// The five-piece modulation decomposition of ∫₀ᵀ∫ Π P_{N_j}u_j for free
/// evolutions of random data, with its direct evaluation.
pub fn trilinear_j(opts: &TrilinearOptions) -> Result<TrilinearReport> {
    let dim = opts.dim;
    check_dim(dim)?;
    if opts.trials == 0 {
        return Err(invalid("at least one trial"));
    }
    let nmax = opts.n.iter().max().unwrap().value();
    let nmin = opts.n.iter().min().unwrap().as_f64();
    if nmax < 2 {
        return Err(invalid("the largest frequency scale must be at least 2"));
    }
    let [a, b, c] = opts.sigmas.clone();
    let triple = classify(a, b, c)?;
    let resonant = !triple.hh_nonresonant;
    match (opts.mode, resonant) {
        (TrilinearMode::Nonresonant, true) => {
            return Err(Error::Resonant(format!(
                "{triple} is HH-resonant; run the resonant-demo mode instead"
            )))
        }
        (TrilinearMode::ResonantDemo, false) => {
            return Err(invalid(format!("{triple} is HH-nonresonant; the resonant demo needs h = 0 triples")))
        }
        _ => {}
    }
    let (sigma_c, ms, period) = time_torus(&opts.sigmas)?;
    if !(opts.t > 0.0 && opts.t <= period * (1.0 + 1e-12)) {
        return Err(invalid(format!("T = {} outside (0, {period}]", opts.t)));
    }
    let k = 2 * nmax as i64 - 1;
    let supports: [Support; 3] = match opts.mode {
        TrilinearMode::Nonresonant => [0, 1, 2].map(|j| {
            let mut s = Support { xi: Vec::new(), q: Vec::new(), weight: Vec::new() };
            for_each_point(dim, k, |xi| {
                let q = norm2(xi);
                let w = bump_weight(opts.n[j], (q as f64).sqrt());
                if w > 0.0 {
                    s.xi.extend_from_slice(xi);
                    s.q.push(q as u32);
                    s.weight.push(w);
                }
            });
            s
        }),
        TrilinearMode::ResonantDemo => {
            let scan = scan_min_ratio(&opts.sigmas, 2, dim)?;
            if !scan.min_ratio.is_zero() {
                return Err(invalid("no resonant triple within |ξ|∞ ≤ 2"));
            }
            [0, 1, 2].map(|j| {
                let xi = scan.witness[j].clone();
                let q = norm2(&xi);
                Support { weight: vec![bump_weight(opts.n[j], (q as f64).sqrt())], q: vec![q as u32], xi }
            })
        }
    };
    if let Some(j) = supports.iter().position(|s| s.len() == 0 || s.weight.iter().all(|w| *w == 0.0)) {
        return Err(invalid(format!("frequency support {} is empty", j + 1)));
    }
    let triples = enumerate(&supports, dim, k)?;
    if triples.qid.is_empty() {
        return Err(invalid("no frequency triples sum to zero"));
    }
    let h_units = |q: &[u32; 3]| -> i64 { (0..3).map(|j| ms[j] * q[j] as i64).sum::<i64>() };
    let h_min = triples.qs.iter().map(|q| h_units(q).unsigned_abs()).min().unwrap() as f64 * sigma_c;
    let h_max = triples.qs.iter().map(|q| h_units(q).unsigned_abs()).max().unwrap();
    let n2 = (nmax * nmax) as f64;
    let (m, c_split) = match (opts.c_split, opts.mode) {
        (Some(cs), _) => {
            if !(cs > 0.0) {
                return Err(invalid("C_split must be positive"));
            }
            (DyadicIndex::floor(n2 / cs), cs)
        }
        (None, TrilinearMode::Nonresonant) => {
            let scan = scan_min_ratio(&opts.sigmas, nmax as usize, dim)?;
            let cs = 3.0 / to_f64(&scan.min_ratio);
            (DyadicIndex::floor(n2 / cs), cs)
        }
        (None, TrilinearMode::ResonantDemo) => (DyadicIndex::floor(n2), 1.0),
    };
    let m_units = (m.as_f64() / sigma_c).ceil() as u64;
    let n = match opts.time_samples {
        Some(n) if n.is_power_of_two() && n >= 8 => n,
        Some(n) => return Err(invalid(format!("{n} time samples; need a power of two ≥ 8"))),
        None => ((h_max + 3 * m_units + 1) as usize).next_power_of_two().max(64),
    };
    let dt = period / n as f64;
    let mask: Vec<bool> = (0..n).map(|k| (k as f64) * dt < opts.t).collect();
    let weights = piece_weights(&triples.qs, &ms, &mask, sigma_c, m, dt);
    let direct = direct_weights(&mask, dt);
    let direct_q: Vec<Complex64> = triples
        .qs
        .iter()
        .map(|q| direct[h_units(q).rem_euclid(n as i64) as usize])
        .collect();
    let vol = volume(dim);
    let sc = dim as f64 / 2.0 - 1.0;
    let pieces: Vec<JPieces> = (0..opts.trials as u64)
        .map(|trial| {
            let mut rng = trial_rng(opts.seed, trial);
            let coeffs: Vec<Vec<Complex64>> = supports
                .iter()
                .map(|s| s.weight.iter().map(|&w| complex_gaussian(&mut rng) * w).collect())
                .collect();
            let mut amp = vec![Complex64::zero(); triples.qs.len()];
            for (t, &id) in triples.qid.iter().enumerate() {
                amp[id as usize] += coeffs[0][triples.idx[0][t] as usize]
                    * coeffs[1][triples.idx[1][t] as usize]
                    * coeffs[2][triples.idx[2][t] as usize];
            }
            let mut j = [Complex64::zero(); 5];
            let mut d = Complex64::zero();
            for (id, a) in amp.iter().enumerate() {
                for p in 0..5 {
                    j[p] += a * weights[id][p];
                }
                d += a * direct_q[id];
            }
            let norms: f64 = coeffs
                .iter()
                .map(|c| (vol * c.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt())
                .product();
            JPieces {
                j1: j[0] * vol,
                j2: j[1] * vol,
                j31: j[2] * vol,
                j32: j[3] * vol,
                j33: j[4] * vol,
                direct: d * vol,
                norms,
            }
        })
        .collect();
    let values: Vec<f64> = pieces
        .iter()
        .map(|p| nmax as f64 * p.direct.norm() / (nmin.powf(sc) * p.norms))
        .collect();
    let mut table = ResultTable::new(
        [
            "experiment", "d", "N1", "N2", "N3", "mode", "T", "M", "trial", "j1", "j2", "j31", "j32", "j33",
            "direct", "identity_error", "value", "running_sup",
        ],
        opts.seed,
    );
    for (trial, ((p, v), sup)) in pieces.iter().zip(&values).zip(running_sup(&values)).enumerate() {
        let rel = |z: Complex64| Cell::Float(z.norm() / p.norms);
        table.push(vec![
            "trilinear".into(),
            dim.into(),
            opts.n[0].value().into(),
            opts.n[1].value().into(),
            opts.n[2].value().into(),
            opts.mode.to_string().into(),
            Cell::Float(opts.t),
            m.value().into(),
            trial.into(),
            rel(p.j1),
            rel(p.j2),
            rel(p.j31),
            rel(p.j32),
            rel(p.j33),
            rel(p.direct),
            Cell::Float(p.identity_error()),
            Cell::Float(*v),
            Cell::Float(sup),
        ])?;
    }
    Ok(TrilinearReport {
        table,
        pieces,
        m,
        c_split,
        h_min,
        time_samples: n,
        triples: triples.qid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonance::rational;
    use std::f64::consts::PI;

    fn dy(n: u64) -> DyadicIndex {
        DyadicIndex::new(n).unwrap()
    }

    fn opts(n: [u64; 3], s: [i64; 3], dim: usize, t: f64) -> TrilinearOptions {
        TrilinearOptions {
            n: n.map(dy),
            sigmas: s.map(|x| rational(x, 1)),
            dim,
            t,
            c_split: None,
            trials: 3,
            seed: 11,
            mode: TrilinearMode::Nonresonant,
            time_samples: None,
        }
    }

    #[test]
    fn decomposition_identity_small() {
        for t in [2.0 * PI, 1.3] {
            let r = trilinear_j(&opts([2, 2, 2], [1, -2, -3], 2, t)).unwrap();
            for p in &r.pieces {
                assert!(p.identity_error() < 1e-10, "{}", p.identity_error());
                assert!(p.j1.norm() <= 1e-10 * p.norms);
            }
        }
    }

    #[test]
    fn direct_matches_brute_force() {
        // d = 1, N = (2, 2, 1): compare with a direct sum over triples and time samples.
        let o = opts([2, 2, 1], [1, 2, 3], 1, 2.5);
        let r = trilinear_j(&o).unwrap();
        let n = r.time_samples;
        let dt = 2.0 * PI / n as f64;
        let mut rng = trial_rng(o.seed, 0);
        let pts: Vec<i64> = (-3..=3).collect();
        let coeffs: Vec<Vec<(i64, Complex64)>> = o
            .n
            .iter()
            .map(|&nj| {
                pts.iter()
                    .filter_map(|&x| {
                        let w = bump_weight(nj, (x as f64).abs());
                        (w > 0.0).then(|| (x, complex_gaussian(&mut rng) * w))
                    })
                    .collect()
            })
            .collect();
        let mut want = Complex64::zero();
        for &(x1, c1) in &coeffs[0] {
            for &(x2, c2) in &coeffs[1] {
                for &(x3, c3) in &coeffs[2] {
                    if x1 + x2 + x3 != 0 {
                        continue;
                    }
                    let h = (x1 * x1 + 2 * x2 * x2 + 3 * x3 * x3) as f64;
                    for k in 0..n {
                        let t = k as f64 * dt;
                        if t < o.t {
                            want += c1 * c2 * c3 * Complex64::from_polar(dt, -t * h);
                        }
                    }
                }
            }
        }
        want *= 2.0 * PI;
        let got = r.pieces[0].direct;
        assert!((got - want).norm() < 1e-10 * want.norm(), "{got} vs {want}");
    }

    #[test]
    fn resonant_rejected_in_default_mode() {
        let e = trilinear_j(&opts([1, 1, 2], [1, 1, -1], 3, 1.0));
        assert!(matches!(e, Err(Error::Resonant(_))));
    }

    #[test]
    fn resonant_demo_keeps_j1() {
        let mut o = opts([1, 1, 2], [1, 1, -1], 3, 2.0 * PI);
        o.mode = TrilinearMode::ResonantDemo;
        let r = trilinear_j(&o).unwrap();
        for p in &r.pieces {
            assert!(p.j1.norm() >= 1e-3 * p.norms);
            assert!(p.identity_error() < 1e-10);
            // T·(2π)^{-d/2} for a single exactly resonant triple over a full period
            assert!((p.j1.norm() / p.norms - (2.0 * PI).powf(-0.5)).abs() < 1e-9);
        }
    }

    #[test]
    fn preconditions() {
        assert!(trilinear_j(&opts([1, 1, 1], [1, -2, -3], 2, 1.0)).is_err());
        assert!(trilinear_j(&opts([2, 2, 2], [1, -2, -3], 2, 7.0)).is_err());
    }

    #[test]
    fn deterministic_table() {
        let a = trilinear_j(&opts([2, 2, 1], [1, -2, -3], 2, 1.0)).unwrap();
        let b = trilinear_j(&opts([2, 2, 1], [1, -2, -3], 2, 1.0)).unwrap();
        assert_eq!(a.table.to_csv(), b.table.to_csv());
    }
}
