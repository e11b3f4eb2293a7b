//! Multi-dimensional complex FFT on cubic grids, built from rustfft line transforms.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

pub struct FftNd {
    n: usize,
    dim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftNd {
    pub fn new(n: usize, dim: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftNd {
            n,
            dim,
            forward: planner.plan_fft(n, FftDirection::Forward),
            inverse: planner.plan_fft(n, FftDirection::Inverse),
        }
    }

    /// Shared plan for `(n, dim)`, cached per thread.
    pub fn cached(n: usize, dim: usize) -> Rc<FftNd> {
        thread_local! {
            static CACHE: RefCell<HashMap<(usize, usize), Rc<FftNd>>> = RefCell::new(HashMap::new());
        }
        CACHE.with(|c| {
            c.borrow_mut()
                .entry((n, dim))
                .or_insert_with(|| Rc::new(FftNd::new(n, dim)))
                .clone()
        })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unnormalized transform with kernel e^{-2πi jk/n} along every axis.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(&self.forward, data);
    }

    /// Unnormalized transform with kernel e^{+2πi jk/n} along every axis.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(&self.inverse, data);
    }

    fn run(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(data.len(), self.len(), "buffer length does not match grid");
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(data, &mut scratch);
        if self.dim == 1 {
            return;
        }
        let mut stride = n;
        let mut tmp = Vec::new();
        for _ in 1..self.dim {
            let block = n * stride;
            tmp.resize(block, Complex64::new(0.0, 0.0));
            for chunk in data.chunks_mut(block) {
                for i in 0..n {
                    let row = &chunk[i * stride..(i + 1) * stride];
                    for (j, &x) in row.iter().enumerate() {
                        tmp[j * n + i] = x;
                    }
                }
                fft.process_with_scratch(&mut tmp, &mut scratch);
                for i in 0..n {
                    let row = &mut chunk[i * stride..(i + 1) * stride];
                    for (j, x) in row.iter_mut().enumerate() {
                        *x = tmp[j * n + i];
                    }
                }
            }
            stride *= n;
        }
    }
}

/// Smallest integer ≥ `n` whose only prime factors are 2, 3 and 5.
pub fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}
