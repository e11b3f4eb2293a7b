//! Exact classification of dispersion coefficient triples and lattice resonance scans.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

pub type Rational = BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse "p/q" or an integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| invalid(format!("bad rational {s:?}")))?;
    let d: BigInt = d.parse().map_err(|_| invalid(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(invalid(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// (α, β, γ) with exact flags and the common time period.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTriple {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    /// σ_j = m_j·σ for the three coefficients.
    pub m: [BigInt; 3],
    pub sigma: Rational,
    pub hh_nonresonant: bool,
    pub hl_nonresonant: bool,
    pub rational_ratio: bool,
    pub same_sign: bool,
}

impl CoefficientTriple {
    pub fn as_f64(&self) -> [f64; 3] {
        [to_f64(&self.alpha), to_f64(&self.beta), to_f64(&self.gamma)]
    }

    pub fn coefficients(&self) -> [&Rational; 3] {
        [&self.alpha, &self.beta, &self.gamma]
    }

    /// Common period 2π/|σ| on the torus of side 2π.
    pub fn period(&self) -> f64 {
        self.period_on(1.0)
    }

    /// Common period on the torus of side 2πL, where frequencies are ξ/L.
    pub fn period_on(&self, scale: f64) -> f64 {
        2.0 * std::f64::consts::PI * scale * scale / to_f64(&self.sigma).abs()
    }

    /// The σ-triple (α, −β, −γ) seen by the u-equation.
    pub fn u_equation_sigmas(&self) -> [Rational; 3] {
        [self.alpha.clone(), -self.beta.clone(), -self.gamma.clone()]
    }
}

impl fmt::Display for CoefficientTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.alpha, self.beta, self.gamma)
    }
}

/// Largest σ > 0 with every x_j/σ an integer: gcd(numerators)/lcm(denominators).
pub fn common_sigma(xs: &[Rational]) -> Result<(Rational, Vec<BigInt>)> {
    if xs.iter().any(|x| x.is_zero()) {
        return Err(Error::ZeroCoefficient);
    }
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for x in xs {
        g = g.gcd(x.numer());
        l = l.lcm(x.denom());
    }
    let sigma = BigRational::new(g, l);
    let ms = xs
        .iter()
        .map(|x| {
            let q = x / &sigma;
            debug_assert!(q.is_integer());
            q.to_integer()
        })
        .collect();
    Ok((sigma, ms))
}

pub fn classify(alpha: Rational, beta: Rational, gamma: Rational) -> Result<CoefficientTriple> {
    if alpha.is_zero() || beta.is_zero() || gamma.is_zero() {
        return Err(Error::ZeroCoefficient);
    }
    // αβγ(1/α − 1/β − 1/γ) = βγ − αγ − αβ
    let hh = &beta * &gamma - &alpha * &gamma - &alpha * &beta;
    let hl = (&alpha - &beta) * (&beta + &gamma) * (&gamma - &alpha);
    let (sigma, ms) = common_sigma(&[alpha.clone(), beta.clone(), gamma.clone()])?;
    let same_sign = alpha.is_positive() == beta.is_positive() && beta.is_positive() == gamma.is_positive();
    Ok(CoefficientTriple {
        m: [ms[0].clone(), ms[1].clone(), ms[2].clone()],
        sigma,
        hh_nonresonant: hh.is_positive(),
        hl_nonresonant: !hl.is_zero(),
        rational_ratio: true,
        same_sign,
        alpha,
        beta,
        gamma,
    })
}

pub fn classify_str(alpha: &str, beta: &str, gamma: &str) -> Result<CoefficientTriple> {
    classify(parse_rational(alpha)?, parse_rational(beta)?, parse_rational(gamma)?)
}

fn norm2(x: &[i64]) -> i64 {
    x.iter().map(|v| v * v).sum()
}

/// h = σ₁|ξ₁|² + σ₂|ξ₂|² + σ₃|ξ₃|² for ξ₁ + ξ₂ + ξ₃ = 0.
pub fn resonance_value(sigmas: &[Rational; 3], xis: [&[i64]; 3]) -> Result<Rational> {
    let d = xis[0].len();
    if xis.iter().any(|x| x.len() != d) {
        return Err(invalid("frequency vectors differ in dimension"));
    }
    if (0..d).any(|a| xis[0][a] + xis[1][a] + xis[2][a] != 0) {
        return Err(Error::FrequencySum);
    }
    Ok(sigmas
        .iter()
        .zip(xis)
        .map(|(s, x)| s * BigInt::from(norm2(x)))
        .fold(Rational::zero(), |a, b| a + b))
}

/// Integer weights n_j and denominator D with σ_j = n_j / D.
pub fn integer_weights(sigmas: &[Rational; 3]) -> Result<([i64; 3], i64)> {
    let mut den = BigInt::one();
    for s in sigmas {
        den = den.lcm(s.denom());
    }
    let conv = |b: BigInt| b.to_i64().ok_or_else(|| invalid("coefficient too large for a lattice scan"));
    let mut n = [0i64; 3];
    for (k, s) in sigmas.iter().enumerate() {
        n[k] = conv((s * BigRational::from_integer(den.clone())).to_integer())?;
    }
    Ok((n, conv(den)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    /// min |h| / max_j |ξ_j|² in lowest terms.
    pub min_ratio: Rational,
    pub witness: [Vec<i64>; 3],
    pub triples_scanned: u64,
}

#[derive(Clone, Debug)]
struct Candidate {
    num: i128,
    den: i128,
    xi1: Vec<i64>,
    xi2: Vec<i64>,
}

impl Candidate {
    /// Smaller ratio, then smaller max|ξ|², then lexicographically greater (ξ₁, ξ₂).
    fn better_than(&self, o: &Candidate) -> bool {
        let ord = (self.num * o.den)
            .cmp(&(o.num * self.den))
            .then(self.den.cmp(&o.den))
            .then_with(|| (&o.xi1, &o.xi2).cmp(&(&self.xi1, &self.xi2)));
        ord == Ordering::Less
    }
}

pub const SCAN_COST_LIMIT: u64 = 600_000_000;

/// Exhaustive min of |h|/max_j|ξ_j|² over ξ₁+ξ₂+ξ₃ = 0 with every ξ_j nonzero and
/// in {−K,…,K}^d.
pub fn scan_min_ratio(sigmas: &[Rational; 3], cutoff: usize, dim: usize) -> Result<ScanResult> {
    if cutoff < 1 || dim < 1 {
        return Err(invalid("scan needs K ≥ 1 and d ≥ 1"));
    }
    let side = 2 * cutoff as u64 + 1;
    let cost = side.checked_pow(2 * dim as u32).unwrap_or(u64::MAX);
    if cost > SCAN_COST_LIMIT {
        return Err(Error::CostGuard(format!(
            "scan over (2K+1)^(2d) = {cost} pairs exceeds {SCAN_COST_LIMIT}"
        )));
    }
    let (n, den) = integer_weights(sigmas)?;
    let k = cutoff as i64;
    let box_points = side.pow(dim as u32);
    let point = |mut idx: u64| -> Vec<i64> {
        let mut v = vec![0i64; dim];
        for a in (0..dim).rev() {
            v[a] = k - (idx % side) as i64;
            idx /= side;
        }
        v
    };
    let best = (0..box_points)
        .into_par_iter()
        .map(|i1| {
            let xi1 = point(i1);
            let q1 = norm2(&xi1);
            let mut local: Option<Candidate> = None;
            if q1 == 0 {
                return (local, 0u64);
            }
            let mut count = 0u64;
            let mut xi3 = vec![0i64; dim];
            for i2 in 0..box_points {
                let xi2 = point(i2);
                let q2 = norm2(&xi2);
                if q2 == 0 {
                    continue;
                }
                let mut inside = true;
                for a in 0..dim {
                    xi3[a] = -xi1[a] - xi2[a];
                    inside &= xi3[a].abs() <= k;
                }
                let q3 = norm2(&xi3);
                if !inside || q3 == 0 {
                    continue;
                }
                count += 1;
                let h = n[0] as i128 * q1 as i128 + n[1] as i128 * q2 as i128 + n[2] as i128 * q3 as i128;
                let c = Candidate { num: h.abs(), den: q1.max(q2).max(q3) as i128, xi1: xi1.clone(), xi2 };
                if local.as_ref().is_none_or(|b| c.better_than(b)) {
                    local = Some(c);
                }
            }
            (local, count)
        })
        .reduce(
            || (None, 0),
            |(a, ca), (b, cb)| {
                let pick = match (a, b) {
                    (Some(a), Some(b)) => Some(if b.better_than(&a) { b } else { a }),
                    (a, None) => a,
                    (None, b) => b,
                };
                (pick, ca + cb)
            },
        );
    let (cand, count) = best;
    let c = cand.ok_or_else(|| invalid("no admissible triple in the scanned box"))?;
    let xi3: Vec<i64> = c.xi1.iter().zip(&c.xi2).map(|(a, b)| -a - b).collect();
    Ok(ScanResult {
        min_ratio: BigRational::new(BigInt::from(c.num), BigInt::from(c.den * den as i128)),
        witness: [c.xi1, c.xi2, xi3],
        triples_scanned: count,
    })
}
