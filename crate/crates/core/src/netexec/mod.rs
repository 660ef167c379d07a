//! Execution kernel: identity-tagged machines sharing one classical and one
//! quantum communication register, activated one at a time.
//!
//! Each activation delivers the register to the machine it is addressed to.
//! The machine's output becomes the next register content, unless it does
//! not parse or claims a sender other than the machine that ran; then the
//! register is reset to `(ε, environment, ε)` with no qubits. A run ends when
//! the environment sends to `ε`, or when the activation budget runs out.

mod compose;
mod dist;
mod dummy;
mod exec;
mod id;
mod machine;
mod network;
mod trace;
pub mod wire;
mod wrapper;

pub use compose::compose;
pub use dist::Distribution;
pub use dummy::{
    corrupt, corruption_party, dummy_adversary, instruct, make_dummy_party, CorruptionParty,
    DummyAdversary, DummyParty,
};
pub use exec::{
    exact, exact_map, exec_network, run, sample, trial_seed, Exact, ExecConfig, ExecResult,
    Execution, Mode, OutcomeDistribution, Output, DEFAULT_BRANCH_CAP, DEFAULT_MAX_STEPS,
};
pub use id::{MachineId, ADVERSARY, ENVIRONMENT};
pub use machine::{Behavior, Ctx, Delivery, Emission, FnBehavior, MachineSpec, Out};
pub use network::Network;
pub use trace::{to_json_lines, ResetReason, TraceEntry};
pub use wire::{payload, ClassicalMessage, Fields, ParseFailure};
pub use wrapper::{classical_wrapper, ClassicalWrapper};

use crate::qcore::BranchCapExceeded;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetError {
    #[error("machine ids must be nonempty")]
    EmptyId,
    #[error("duplicate machine id {0}")]
    DuplicateId(String),
    #[error("{0} is not a party of the network")]
    UnknownParty(String),
    #[error("id collision on {0}")]
    IdCollision(String),
    #[error("network has no environment")]
    MissingEnvironment,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    BranchCap(#[from] BranchCapExceeded),
}
