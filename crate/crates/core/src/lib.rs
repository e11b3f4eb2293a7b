//! Pseudospectral numerics for the coupled quadratic-derivative Schrödinger system
//!
//! ```text
//! (i∂t + αΔ)u = −(∇·w)v
//! (i∂t + βΔ)v = −(∇·w̄)u
//! (i∂t + γΔ)w = ∇(u·v̄)
//! ```
//!
//! on the torus of side 2πL in dimension d ≤ 4.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dynamics;
pub mod error;
pub mod fft;
pub mod field;
pub mod lab;
pub mod lattice;
pub mod norms;
pub mod projections;
pub mod resonance;
pub mod snapshot;
pub mod state;
pub mod table;
pub mod trajectory;

pub use num_complex::Complex64;

pub use dynamics::{PicardOptions, PicardReport, StepOptions, TripleTrajectory};
pub use error::{Error, Result};
pub use field::{pointwise_product, PhysicalField, ProductKind, SpectralField};
pub use lattice::FrequencyLattice;
pub use projections::{CubeRegion, DyadicIndex, ModulationMode, Region, StripRegion};
pub use resonance::{CoefficientTriple, Rational};
pub use state::FieldTriple;
pub use table::ResultTable;
pub use trajectory::Trajectory;
