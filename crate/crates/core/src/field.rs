use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fft::FftNd;
use crate::lattice::FrequencyLattice;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A ℂ^c-valued function on the torus stored as Fourier coefficients,
/// f(x) = Σ_ξ f̂(ξ) e^{iξ·x/L}, component-major in canonical mode order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    lattice: FrequencyLattice,
    components: usize,
    coeffs: Vec<Complex64>,
}

/// Samples of a field on the uniform grid x_j = 2πL j / n, component-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    pub dim: usize,
    pub grid: usize,
    pub components: usize,
    pub values: Vec<Complex64>,
}

/// How [`pointwise_product`] pairs components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    /// One factor is scalar and multiplies every component of the other.
    Broadcast,
    /// Σ_j f_j g_j, no implicit conjugation.
    Dot,
    /// (f_j g_j)_j.
    Componentwise,
}

impl SpectralField {
    pub fn new(lattice: FrequencyLattice, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 {
            return Err(invalid("field needs at least one component"));
        }
        let want = components * lattice.mode_count();
        if coeffs.len() != want {
            return Err(Error::ShapeMismatch(format!(
                "expected {want} coefficients, got {}",
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(SpectralField { lattice, components, coeffs })
    }

    pub fn zeros(lattice: &FrequencyLattice, components: usize) -> Self {
        let n = components * lattice.mode_count();
        SpectralField { lattice: lattice.clone(), components, coeffs: vec![ZERO; n] }
    }

    pub fn single_mode(
        lattice: &FrequencyLattice,
        components: usize,
        component: usize,
        xi: &[i64],
        value: Complex64,
    ) -> Result<Self> {
        let idx = lattice
            .index_of(xi)
            .ok_or_else(|| invalid(format!("mode {xi:?} not on lattice")))?;
        if component >= components {
            return Err(invalid("component out of range"));
        }
        let mut f = Self::zeros(lattice, components);
        f.coeffs[component * lattice.mode_count() + idx] = value;
        Ok(f)
    }

    /// Stack scalar fields into one vector field.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| invalid("nothing to stack"))?;
        let mut coeffs = Vec::with_capacity(parts.len() * first.lattice.mode_count());
        let mut components = 0;
        for p in parts {
            if p.lattice != first.lattice {
                return Err(Error::LatticeMismatch);
            }
            coeffs.extend_from_slice(&p.coeffs);
            components += p.components;
        }
        Ok(SpectralField { lattice: first.lattice.clone(), components, coeffs })
    }

    pub(crate) fn from_parts_unchecked(
        lattice: FrequencyLattice,
        components: usize,
        coeffs: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(coeffs.len(), components * lattice.mode_count());
        SpectralField { lattice, components, coeffs }
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        &self.lattice
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, j: usize) -> &[Complex64] {
        let m = self.lattice.mode_count();
        &self.coeffs[j * m..(j + 1) * m]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut [Complex64] {
        let m = self.lattice.mode_count();
        &mut self.coeffs[j * m..(j + 1) * m]
    }

    pub fn component_field(&self, j: usize) -> SpectralField {
        SpectralField {
            lattice: self.lattice.clone(),
            components: 1,
            coeffs: self.component(j).to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| *z == ZERO)
    }

    pub fn same_shape(&self, other: &SpectralField) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        if self.components != other.components {
            return Err(Error::ShapeMismatch(format!(
                "{} vs {} components",
                self.components, other.components
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    /// self += a·x
    pub fn axpy(&mut self, a: Complex64, x: &SpectralField) -> Result<()> {
        self.same_shape(x)?;
        for (y, &xv) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += a * xv;
        }
        Ok(())
    }

    pub fn scaled(&self, a: Complex64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|z| *z *= a);
        out
    }

    /// Coefficients of the pointwise complex conjugate: (f̄)^(ξ) = conj(f̂(−ξ)).
    pub fn conj(&self) -> SpectralField {
        let m = self.lattice.mode_count();
        let mut out = self.clone();
        for j in 0..self.components {
            let src = &self.coeffs[j * m..(j + 1) * m];
            let dst = &mut out.coeffs[j * m..(j + 1) * m];
            for (i, d) in dst.iter_mut().enumerate() {
                *d = src[m - 1 - i].conj();
            }
        }
        out
    }

    /// Multiply every component by a real multiplier depending on the mode index.
    pub fn apply_multiplier(&self, mult: impl Fn(usize) -> f64) -> SpectralField {
        let m = self.lattice.mode_count();
        let weights: Vec<f64> = (0..m).map(mult).collect();
        let mut out = self.clone();
        for chunk in out.coeffs.chunks_mut(m) {
            for (z, w) in chunk.iter_mut().zip(&weights) {
                *z *= *w;
            }
        }
        out
    }

    /// Exact e^{itσΔ}: multiplies f̂(ξ) by e^{−itσ|ξ/L|²}.
    pub fn free_evolution(&self, sigma: f64, t: f64) -> SpectralField {
        let mut out = self.clone();
        out.free_evolve_in_place(sigma, t);
        out
    }

    pub fn free_evolve_in_place(&mut self, sigma: f64, t: f64) {
        if t == 0.0 || sigma == 0.0 {
            return;
        }
        let table = phase_table(&self.lattice, sigma * t);
        let norms2 = self.lattice.norms2();
        let m = self.lattice.mode_count();
        for chunk in self.coeffs.chunks_mut(m) {
            for (z, &q) in chunk.iter_mut().zip(norms2) {
                *z *= table[q as usize];
            }
        }
    }

    /// ∇ of a scalar field (multiplier iξ/L per axis).
    pub fn gradient(&self) -> Result<SpectralField> {
        if self.components != 1 {
            return Err(Error::ShapeMismatch("gradient needs a scalar field".into()));
        }
        let d = self.lattice.dim();
        let m = self.lattice.mode_count();
        let inv_l = 1.0 / self.lattice.scale();
        let mut coeffs = vec![ZERO; d * m];
        let mut xi = vec![0i64; d];
        for i in 0..m {
            let c = self.coeffs[i];
            if c == ZERO {
                continue;
            }
            self.lattice.mode_into(i, &mut xi);
            for a in 0..d {
                coeffs[a * m + i] = Complex64::new(0.0, xi[a] as f64 * inv_l) * c;
            }
        }
        Ok(SpectralField::from_parts_unchecked(self.lattice.clone(), d, coeffs))
    }

    /// ∇· of a ℂ^d field.
    pub fn divergence(&self) -> Result<SpectralField> {
        let d = self.lattice.dim();
        if self.components != d {
            return Err(Error::ShapeMismatch(format!(
                "divergence needs {d} components, got {}",
                self.components
            )));
        }
        let m = self.lattice.mode_count();
        let inv_l = 1.0 / self.lattice.scale();
        let mut coeffs = vec![ZERO; m];
        let mut xi = vec![0i64; d];
        for (i, out) in coeffs.iter_mut().enumerate() {
            self.lattice.mode_into(i, &mut xi);
            let mut acc = ZERO;
            for a in 0..d {
                acc += self.coeffs[a * m + i] * (xi[a] as f64 * inv_l);
            }
            *out = Complex64::new(-acc.im, acc.re);
        }
        Ok(SpectralField::from_parts_unchecked(self.lattice.clone(), 1, coeffs))
    }

    /// Δ (multiplier −|ξ/L|²).
    pub fn laplacian(&self) -> SpectralField {
        let lat = self.lattice.clone();
        self.apply_multiplier(|i| -lat.wavenumber2(i))
    }

    /// Σ|f̂|² over all modes and components.
    pub fn coeff_norm2(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// True L² norm over the torus, (2πL)^{d/2}(Σ|f̂|²)^{1/2}.
    pub fn l2_norm(&self) -> f64 {
        (self.lattice.volume() * self.coeff_norm2()).sqrt()
    }

    /// ∫ Σ_j f_j conj(g_j) dx.
    pub fn inner(&self, other: &SpectralField) -> Result<Complex64> {
        self.same_shape(other)?;
        let s: Complex64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.lattice.volume())
    }

    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Samples on the lattice product grid.
    pub fn to_physical(&self) -> PhysicalField {
        self.to_physical_on(self.lattice.grid())
    }

    /// Samples on an `n`-point grid per axis; needs n > 2K.
    pub fn to_physical_on(&self, n: usize) -> PhysicalField {
        let d = self.lattice.dim();
        let plan = FftNd::cached(n, d);
        let total = plan.len();
        let own;
        let pos: &[usize] = if n == self.lattice.grid() {
            self.lattice.grid_index()
        } else {
            own = self.lattice.grid_positions(n);
            &own
        };
        let mut values = vec![ZERO; self.components * total];
        for j in 0..self.components {
            let buf = &mut values[j * total..(j + 1) * total];
            for (&p, &c) in pos.iter().zip(self.component(j)) {
                buf[p] = c;
            }
            plan.inverse(buf);
        }
        PhysicalField { dim: d, grid: n, components: self.components, values }
    }

    /// Project grid samples back onto the lattice (exact for fields with modes inside it).
    pub fn from_physical(p: &PhysicalField, lattice: &FrequencyLattice) -> Result<SpectralField> {
        if p.dim != lattice.dim() || p.grid <= 2 * lattice.cutoff() {
            return Err(Error::ShapeMismatch(format!(
                "grid {}^{} cannot hold lattice {:?}",
                p.grid, p.dim, lattice
            )));
        }
        let plan = FftNd::cached(p.grid, p.dim);
        let total = plan.len();
        if p.values.len() != p.components * total {
            return Err(Error::ShapeMismatch("sample count does not match grid".into()));
        }
        let own;
        let pos: &[usize] = if p.grid == lattice.grid() {
            lattice.grid_index()
        } else {
            own = lattice.grid_positions(p.grid);
            &own
        };
        let m = lattice.mode_count();
        let norm = 1.0 / total as f64;
        let mut coeffs = vec![ZERO; p.components * m];
        let mut buf = vec![ZERO; total];
        for j in 0..p.components {
            buf.copy_from_slice(&p.values[j * total..(j + 1) * total]);
            plan.forward(&mut buf);
            for (c, &q) in coeffs[j * m..(j + 1) * m].iter_mut().zip(pos) {
                *c = buf[q] * norm;
            }
        }
        Ok(SpectralField::from_parts_unchecked(lattice.clone(), p.components, coeffs))
    }
}

impl PhysicalField {
    pub fn points(&self) -> usize {
        self.grid.pow(self.dim as u32)
    }

    pub fn component(&self, j: usize) -> &[Complex64] {
        let n = self.points();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut [Complex64] {
        let n = self.points();
        &mut self.values[j * n..(j + 1) * n]
    }

    pub fn conj(&self) -> PhysicalField {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|z| *z = z.conj());
        out
    }
}

/// e^{−iθq/L²} for every integer q up to the lattice's largest |ξ|².
pub(crate) fn phase_table(lattice: &FrequencyLattice, theta: f64) -> Vec<Complex64> {
    let inv_l2 = 1.0 / (lattice.scale() * lattice.scale());
    (0..=lattice.max_norm2())
        .map(|q| Complex64::from_polar(1.0, -theta * q as f64 * inv_l2))
        .collect()
}

/// Exact truncated product of two fields: the true pointwise product projected back
/// onto the lattice, computed on the zero-padded product grid.
pub fn pointwise_product(
    f: &SpectralField,
    g: &SpectralField,
    conjugate_g: bool,
    kind: ProductKind,
) -> Result<SpectralField> {
    if f.lattice != g.lattice {
        return Err(Error::LatticeMismatch);
    }
    let out_components = match kind {
        ProductKind::Broadcast => {
            if f.components == 1 {
                g.components
            } else if g.components == 1 {
                f.components
            } else {
                return Err(Error::ShapeMismatch("broadcast product needs a scalar factor".into()));
            }
        }
        ProductKind::Dot => {
            if f.components != g.components {
                return Err(Error::ShapeMismatch("dot product component mismatch".into()));
            }
            1
        }
        ProductKind::Componentwise => {
            if f.components != g.components {
                return Err(Error::ShapeMismatch("componentwise product mismatch".into()));
            }
            f.components
        }
    };
    let pf = f.to_physical();
    let mut pg = g.to_physical();
    if conjugate_g {
        pg.values.iter_mut().for_each(|z| *z = z.conj());
    }
    let n = pf.points();
    let mut out = PhysicalField {
        dim: pf.dim,
        grid: pf.grid,
        components: out_components,
        values: vec![ZERO; out_components * n],
    };
    match kind {
        ProductKind::Broadcast => {
            for j in 0..out_components {
                let a = pf.component(if f.components == 1 { 0 } else { j });
                let b = pg.component(if g.components == 1 { 0 } else { j });
                for ((o, x), y) in out.component_mut(j).iter_mut().zip(a).zip(b) {
                    *o = x * y;
                }
            }
        }
        ProductKind::Dot => {
            for j in 0..f.components {
                let (a, b) = (pf.component(j), pg.component(j));
                for ((o, x), y) in out.values.iter_mut().zip(a).zip(b) {
                    *o += x * y;
                }
            }
        }
        ProductKind::Componentwise => {
            for j in 0..out_components {
                let (a, b) = (pf.component(j), pg.component(j));
                for ((o, x), y) in out.component_mut(j).iter_mut().zip(a).zip(b) {
                    *o = x * y;
                }
            }
        }
    }
    SpectralField::from_physical(&out, &f.lattice)
}
