//! Configurable experiments, the acceptance suite and result persistence for
//! the `fraclog` solver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod config;
pub mod cutoff;
pub mod experiments;
pub mod oracle;
pub mod report;

pub use check::{run_acceptance, CriterionOutcome};
pub use config::ExperimentConfig;
pub use cutoff::CutoffZeta;
pub use experiments::{Experiment, EXPERIMENTS};
pub use report::{ExperimentReport, Verdict};
