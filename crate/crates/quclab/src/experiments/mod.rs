//! The experiment catalog.

mod protocol;
mod security;

use serde::{Deserialize, Serialize};

use quclab_core::adversim::{attack_bob, corrupted_alice_corpus, no_corruption_corpus, real_world, ScriptSpec};
use quclab_core::netexec::{sample, to_json_lines, ExecConfig, Network, DEFAULT_BRANCH_CAP};
use quclab_core::otproto::{BobStrategy, ProtocolParams};

use crate::config::Resolved;
use crate::report::ExperimentReport;
use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    /// Exhaustive enumeration only.
    Exact,
    /// Sampled trials only.
    Sample,
    /// Both parts where an experiment has both.
    Full,
}

impl RunMode {
    pub fn name(self) -> &'static str {
        match self {
            RunMode::Exact => "exact",
            RunMode::Sample => "sample",
            RunMode::Full => "full",
        }
    }

    pub fn exact(self) -> bool {
        self != RunMode::Sample
    }

    pub fn sampled(self) -> bool {
        self != RunMode::Exact
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Catalog {
    Correctness,
    CorruptedAliceTv,
    TrivialCasesTv,
    CheatBobAbort,
    SenderPrivacy,
    ReceiverPrivacy,
    CompositionEquivalence,
    LiftingWrapper,
    HashUniversality,
}

pub struct Defaults {
    pub params: ProtocolParams,
    pub exact_params: ProtocolParams,
    pub mode: RunMode,
    pub trials: u64,
    pub branch_cap: usize,
}

fn p(n: usize, m: usize, ell: usize) -> ProtocolParams {
    ProtocolParams::new(n, m, ell).expect("valid defaults")
}

impl Catalog {
    pub const ALL: [Catalog; 9] = [
        Catalog::Correctness,
        Catalog::CorruptedAliceTv,
        Catalog::TrivialCasesTv,
        Catalog::CheatBobAbort,
        Catalog::SenderPrivacy,
        Catalog::ReceiverPrivacy,
        Catalog::CompositionEquivalence,
        Catalog::LiftingWrapper,
        Catalog::HashUniversality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Catalog::Correctness => "correctness",
            Catalog::CorruptedAliceTv => "corrupted-alice-tv",
            Catalog::TrivialCasesTv => "trivial-cases-tv",
            Catalog::CheatBobAbort => "cheat-bob-abort",
            Catalog::SenderPrivacy => "sender-privacy",
            Catalog::ReceiverPrivacy => "receiver-privacy",
            Catalog::CompositionEquivalence => "composition-equivalence",
            Catalog::LiftingWrapper => "lifting-wrapper",
            Catalog::HashUniversality => "hash-universality",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, HarnessError> {
        Catalog::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment {name:?}; see `quclab list`")))
    }

    pub fn summary(self) -> &'static str {
        match self {
            Catalog::Correctness => "honest OT outputs the chosen input (exact and sampled)",
            Catalog::CorruptedAliceTv => "real vs simulated outputs with Alice corrupted, per corpus script",
            Catalog::TrivialCasesTv => "real vs ideal outputs with no party or both parties corrupted",
            Catalog::CheatBobAbort => "pass rate of a receiver that commits without measuring",
            Catalog::SenderPrivacy => "curious receiver's view with the other string vs with a uniform string",
            Catalog::ReceiverPrivacy => "messages the sender receives for choice 0 vs choice 1",
            Catalog::CompositionEquivalence => "OT from one ROT call, with the ROT protocol plugged in, vs OT protocol",
            Catalog::LiftingWrapper => "measuring wrapper leaves classical machines unchanged and is idempotent",
            Catalog::HashUniversality => "collision rate of random Toeplitz hashes on fixed input pairs",
        }
    }

    pub fn supports(self, mode: RunMode) -> bool {
        match self {
            Catalog::Correctness | Catalog::CheatBobAbort => true,
            Catalog::HashUniversality => mode == RunMode::Sample,
            _ => mode == RunMode::Exact,
        }
    }

    pub fn defaults(self) -> Defaults {
        let base = Defaults {
            params: p(8, 12, 1),
            exact_params: p(2, 3, 1),
            mode: RunMode::Exact,
            trials: 1,
            branch_cap: DEFAULT_BRANCH_CAP,
        };
        match self {
            Catalog::Correctness => Defaults {
                params: p(8, 12, 2),
                mode: RunMode::Full,
                trials: 10_000,
                ..base
            },
            Catalog::CheatBobAbort => Defaults {
                params: p(4, 20, 1),
                exact_params: p(1, 2, 1),
                mode: RunMode::Full,
                trials: 100_000,
                branch_cap: 5_000_000,
            },
            Catalog::HashUniversality => Defaults {
                params: p(8, 12, 2),
                mode: RunMode::Sample,
                trials: 100_000,
                ..base
            },
            _ => base,
        }
    }
}

pub fn list_experiments() -> Vec<(&'static str, &'static str)> {
    Catalog::ALL.iter().map(|c| (c.name(), c.summary())).collect()
}

/// Runs one experiment. The report is a pure function of the config.
pub fn run_experiment(cfg: &Resolved) -> Result<ExperimentReport, HarnessError> {
    match cfg.experiment {
        Catalog::Correctness => protocol::correctness(cfg),
        Catalog::CompositionEquivalence => protocol::composition(cfg),
        Catalog::LiftingWrapper => protocol::lifting(cfg),
        Catalog::HashUniversality => protocol::hash_universality(cfg),
        Catalog::CorruptedAliceTv => security::corrupted_alice(cfg),
        Catalog::TrivialCasesTv => security::trivial_cases(cfg),
        Catalog::CheatBobAbort => security::cheat_bob(cfg),
        Catalog::SenderPrivacy => security::sender_privacy(cfg),
        Catalog::ReceiverPrivacy => security::receiver_privacy(cfg),
    }
}

pub(crate) fn exact_config(cfg: &Resolved) -> ExecConfig {
    let mut e = ExecConfig::exact();
    e.qubit_cap = e.qubit_cap.max(2 * cfg.exact_params.m);
    e
}

pub(crate) fn sample_config(params: ProtocolParams) -> ExecConfig {
    let mut e = ExecConfig::default();
    e.qubit_cap = e.qubit_cap.max(2 * params.m);
    e
}

pub(crate) fn load_corpus(cfg: &Resolved, default: Vec<ScriptSpec>) -> Result<Vec<ScriptSpec>, HarnessError> {
    match &cfg.corpus {
        None => Ok(default),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
            quclab_core::adversim::corpus_from_json(&text).map_err(|e| HarnessError::Config(format!("corpus: {e}")))
        }
    }
}

fn representative(cfg: &Resolved) -> Result<(Network, ExecConfig), HarnessError> {
    let exact_params = cfg.exact_params;
    let sampled = sample_config(cfg.params);
    let tiny = sample_config(exact_params);
    Ok(match cfg.experiment {
        Catalog::Correctness => (protocol::honest_ot_network(cfg.params, cfg.seed)?, sampled),
        Catalog::CorruptedAliceTv => {
            let corpus = load_corpus(cfg, corrupted_alice_corpus())?;
            let first = corpus.first().ok_or_else(|| HarnessError::Config("empty corpus".into()))?;
            (real_world(exact_params, first)?, tiny)
        }
        Catalog::TrivialCasesTv => (real_world(exact_params, &no_corruption_corpus()[0])?, tiny),
        Catalog::CheatBobAbort => (attack_bob(security::no_measure(cfg.seed), cfg.params, false)?, sampled),
        Catalog::SenderPrivacy => (
            real_world(
                exact_params,
                &ScriptSpec {
                    bob: Some(BobStrategy::Honest),
                    ..ScriptSpec::honest("curious-bob", false)
                },
            )?,
            tiny,
        ),
        Catalog::ReceiverPrivacy => (
            real_world(
                exact_params,
                &ScriptSpec {
                    alice: Some(Default::default()),
                    ..ScriptSpec::honest("curious-alice", false)
                },
            )?,
            tiny,
        ),
        Catalog::CompositionEquivalence | Catalog::LiftingWrapper => (protocol::composed_network(exact_params, false, "0", "1")?, tiny),
        Catalog::HashUniversality => {
            return Err(HarnessError::Config("hash-universality runs no network to trace".into()));
        }
    })
}

/// JSON-lines trace of one sampled run of the experiment's main network.
pub fn trace_experiment(cfg: &Resolved) -> Result<String, HarnessError> {
    let (net, exec) = representative(cfg)?;
    let r = sample(&net, &exec.traced(), cfg.seed)?;
    Ok(to_json_lines(&r.trace))
}
