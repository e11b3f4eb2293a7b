//! Configuration, orchestration and artifact output for the `qdnls` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod plot;
pub mod run;

pub use config::{ExperimentConfig, ExperimentKind};
pub use plot::{emit_plot_data, Series, Transform};
pub use run::{exit_code, run, RunOutput};
