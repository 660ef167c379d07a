//! Experiment runner for the quantum OT laboratory: configuration, the
//! experiment catalog and JSON reports.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{ExperimentConfig, Profile, Resolved};
pub use experiments::{list_experiments, run_experiment, trace_experiment, Catalog, RunMode};
pub use report::{Bound, Check, ExperimentReport, Hygiene, Records, EXACT_TOL, MASS_TOL, NORM_TOL};

use quclab_core::adversim::{AdvError, TvError};
use quclab_core::netexec::NetError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}; reduce the protocol parameters or raise branch_cap")]
    BranchCap(NetError),
    #[error(transparent)]
    Net(NetError),
    #[error(transparent)]
    Adversary(AdvError),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl From<NetError> for HarnessError {
    fn from(e: NetError) -> Self {
        match e {
            NetError::BranchCap(_) => HarnessError::BranchCap(e),
            NetError::InvalidConfig(m) => HarnessError::Config(m),
            e => HarnessError::Net(e),
        }
    }
}

impl From<TvError> for HarnessError {
    fn from(e: TvError) -> Self {
        HarnessError::Adversary(AdvError::Tv(e))
    }
}

impl From<AdvError> for HarnessError {
    fn from(e: AdvError) -> Self {
        match e {
            AdvError::Net(n) => n.into(),
            e => HarnessError::Adversary(e),
        }
    }
}

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const THRESHOLD_FAILED: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
}

// Exhaustive runs clone and drop machine state at every branch point.
#[global_allocator]
static ALLOC: mimalloc::MiMalloc = mimalloc::MiMalloc;
