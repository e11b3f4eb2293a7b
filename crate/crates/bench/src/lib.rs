//! Fixtures shared by the kernel benchmarks.

use qdnls::lab::{random_field, trial_rng};
use qdnls::{FrequencyLattice, SpectralField};

pub fn lattice(dim: usize, cutoff: usize) -> FrequencyLattice {
    FrequencyLattice::new(dim, cutoff, 1.0).expect("valid lattice")
}

/// Unit-L² field with Gaussian coefficients on the whole lattice.
pub fn field(lattice: &FrequencyLattice, components: usize, seed: u64) -> SpectralField {
    let mut rng = trial_rng(seed, 0);
    random_field(lattice, components, lattice.cutoff() as i64, 0.0, 1.0, &mut rng).expect("field")
}
