//! Adversaries, environments and simulators for the OT protocols, and the
//! real-versus-ideal comparisons built from them.

mod attack;
mod corpus;
mod driver;
mod sim;
mod tv;

pub use attack::{
    attack_bob, attack_network, cheat_pass_rate_exact, cheat_pass_rate_sampled, receiver_privacy, sender_privacy, AttackRoute,
    wrong_basis_posterior, PassRate, Posterior, PrivacyReport,
};
pub use corpus::{both_corrupted_corpus, corpus_from_json, corpus_to_json, corrupted_alice_corpus, no_corruption_corpus};
pub use driver::{output_string, parse_transcript, Driver, Mutation, ScriptSpec, Verdict};
pub use sim::{simulator_both_corrupted, simulator_corrupted_alice, InternalSim, SIM_STEP_BUDGET};
pub use tv::{empirical_tv, hoeffding_radius, tv_distance, TvError, TvEstimate, CONFIDENCE_DELTA, MASS_TOL};

use std::collections::BTreeSet;

use serde::Serialize;

use crate::netexec::{
    corrupt, dummy_adversary, exact, sample, trial_seed, ExecConfig, MachineId, MachineSpec, NetError, Network,
    Output,
};
use crate::otproto::{alice_id, bob_id, ideal_ot, ideal_rot, pi_qot, pi_qrot, ProtocolParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdvError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Tv(#[from] TvError),
    #[error("no simulator for {0}")]
    Unsupported(String),
}

/// Which simulator the ideal world of a corruption set uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulatorKind {
    /// No corruption: the dummy adversary itself.
    Dummy,
    CorruptedAlice,
    BothCorrupted,
}

impl SimulatorKind {
    pub fn for_corruption(corrupted: &BTreeSet<MachineId>) -> Result<Self, AdvError> {
        match (corrupted.contains(&alice_id()), corrupted.contains(&bob_id())) {
            (false, false) => Ok(SimulatorKind::Dummy),
            (true, false) => Ok(SimulatorKind::CorruptedAlice),
            (true, true) => Ok(SimulatorKind::BothCorrupted),
            (false, true) => Err(AdvError::Unsupported("a corrupted Bob alone".into())),
        }
    }

    pub fn build(self, params: ProtocolParams) -> MachineSpec {
        match self {
            SimulatorKind::Dummy => dummy_adversary(),
            SimulatorKind::CorruptedAlice => simulator_corrupted_alice(params),
            SimulatorKind::BothCorrupted => simulator_both_corrupted(params),
        }
    }
}

/// The protocol with the script's corruptions, under the dummy adversary.
pub fn real_world(params: ProtocolParams, script: &ScriptSpec) -> Result<Network, AdvError> {
    let base = if script.inputs.is_some() { pi_qot(params)? } else { pi_qrot(params)? };
    Ok(corrupt(&base, &script.corrupted())?
        .with(dummy_adversary())?
        .with(script.environment(params))?)
}

/// `F_ROT` (or `F_OT`) with the script's corruptions, under `sim`.
pub fn ideal_world_with(params: ProtocolParams, script: &ScriptSpec, sim: MachineSpec) -> Result<Network, AdvError> {
    let corrupted = script.corrupted();
    let base = if script.inputs.is_some() {
        if !corrupted.is_empty() {
            return Err(AdvError::Unsupported("corruptions in the OT variant".into()));
        }
        ideal_ot(params.ell)?
    } else {
        ideal_rot(params.ell, corrupted.contains(&alice_id()))?
    };
    Ok(corrupt(&base, &corrupted)?.with(sim)?.with(script.environment(params))?)
}

pub fn ideal_world(params: ProtocolParams, script: &ScriptSpec) -> Result<Network, AdvError> {
    let kind = SimulatorKind::for_corruption(&script.corrupted())?;
    ideal_world_with(params, script, kind.build(params))
}

/// Exact comparison of one script's real and ideal outputs.
#[derive(Clone, Debug, Serialize)]
pub struct ExactComparison {
    pub script: String,
    pub tv: f64,
    /// `|Pr[real outputs 1] - Pr[ideal outputs 1]|` for bit verdicts.
    pub bit_gap: Option<f64>,
    pub real_leaves: usize,
    pub ideal_leaves: usize,
    pub max_mass_error: f64,
    pub max_norm_deviation: f64,
}

fn prob_one(d: &crate::netexec::Distribution<Output>) -> f64 {
    d.mass(|o| o.value().and_then(crate::netexec::Fields::parse).is_some_and(|f| f.is("bit", 1) && f.args[0] == b"1"))
}

/// Runs both worlds exhaustively. The simulator is passed in so one
/// instance can serve a whole corpus.
pub fn compare_exact(
    params: ProtocolParams,
    script: &ScriptSpec,
    sim: &MachineSpec,
    cfg: &ExecConfig,
    cap: usize,
) -> Result<ExactComparison, AdvError> {
    let real = exact(&real_world(params, script)?, cfg, cap)?;
    let ideal = exact(&ideal_world_with(params, script, sim.clone())?, cfg, cap)?;
    let bits = matches!(script.verdict, Verdict::Aborted | Verdict::OutputBit);
    Ok(ExactComparison {
        script: script.name.clone(),
        tv: tv_distance(&real.dist, &ideal.dist)?,
        bit_gap: bits.then(|| (prob_one(&real.dist) - prob_one(&ideal.dist)).abs()),
        real_leaves: real.leaves,
        ideal_leaves: ideal.leaves,
        max_mass_error: real.mass_error().max(ideal.mass_error()),
        max_norm_deviation: real.max_norm_deviation.max(ideal.max_norm_deviation),
    })
}

/// Outputs of `trials` sampled runs, split across threads. Trial `i` uses
/// `trial_seed(seed, i)`, so the result does not depend on the split.
pub fn sample_outputs<K: Send>(
    net: &Network,
    cfg: &ExecConfig,
    seed: u64,
    trials: u64,
    project: impl Fn(crate::netexec::ExecResult) -> K + Sync,
) -> Result<Vec<K>, NetError> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()) as u64;
    let chunk = trials.div_ceil(threads.max(1)).max(1);
    let project = &project;
    let parts: Vec<Result<Vec<K>, NetError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..trials)
            .step_by(chunk as usize)
            .map(|lo| {
                let hi = (lo + chunk).min(trials);
                s.spawn(move || (lo..hi).map(|i| sample(net, cfg, trial_seed(seed, i)).map(project)).collect())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial thread panicked")).collect()
    });
    let mut out = Vec::with_capacity(trials as usize);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
