//! Cheating receivers, and the privacy checks phrased over transcripts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{parse_transcript, sample_outputs, tv_distance, AdvError, ScriptSpec, Verdict, CONFIDENCE_DELTA};
use crate::bits::Bits;
use crate::netexec::{
    corrupt, dummy_adversary, exact_map, payload, Behavior, ClassicalMessage, Ctx, Delivery, Distribution, Emission,
    ExecConfig, Fields, MachineId, MachineSpec, Network, Output,
};
use crate::behavior_clone;
use crate::otproto::{alice_id, bob_id, fcom_index, pi_qrot, AliceDeviation, Bob, BobStrategy, CommitStyle, ProtocolParams, Variant};
use crate::qcore::{enumerate, Basis, Branching, QuantumPool, QubitRegister};

/// How a cheating Bob is placed in the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackRoute {
    /// Bob is corrupted and the environment plays him through the dummy
    /// adversary; the run stops when Alice announces her bases.
    Corrupted,
    /// The deviating Bob machine replaces honest Bob and tells the
    /// environment when Alice's bases arrive instead of reading them.
    Direct,
}

/// Environment and network for a corrupted Bob following `strategy`. The
/// environment stops once Alice announces her bases and outputs `pass`, or
/// `abort` if she aborted first.
pub fn attack_bob(strategy: BobStrategy, params: ProtocolParams, choice: bool) -> Result<Network, AdvError> {
    attack_network(strategy, params, choice, AttackRoute::Corrupted)
}

pub fn attack_network(
    strategy: BobStrategy,
    params: ProtocolParams,
    choice: bool,
    route: AttackRoute,
) -> Result<Network, AdvError> {
    match route {
        AttackRoute::Corrupted => {
            let script = ScriptSpec {
                bob: Some(strategy),
                stop_at: Some("theta".into()),
                verdict: Verdict::Check,
                ..ScriptSpec::honest("attack-bob", choice)
            };
            Ok(corrupt(&pi_qrot(params)?, &script.corrupted())?
                .with(dummy_adversary())?
                .with(script.environment(params))?)
        }
        AttackRoute::Direct => Ok(pi_qrot(params)?
            .map_machines(|m| {
                if m.id == bob_id() {
                    let bob = Bob::new(params, Variant::Rot, CommitStyle::Functionality, strategy.clone());
                    MachineSpec::new(bob_id(), false, StopAtTheta { bob })
                } else {
                    m
                }
            })?
            .with(MachineSpec::new(MachineId::environment(), true, CheckEnv { choice, step: 0 }))?),
    }
}

/// Bob, except that Alice's `theta` message is reported to the environment.
#[derive(Clone)]
struct StopAtTheta {
    bob: Bob,
}

impl Behavior for StopAtTheta {
    fn react(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, input: Delivery) -> Emission {
        if input.message.sender == alice_id() && Fields::parse(&input.message.payload).is_some_and(|f| f.tag == b"theta") {
            return Emission::send(me, &MachineId::environment(), payload("reached", &[b"theta"]));
        }
        self.bob.react(me, ctx, input)
    }

    behavior_clone!();
}

/// Starts both parties and reports `pass` once Bob has Alice's bases, or
/// `abort` if either party aborts.
#[derive(Clone)]
struct CheckEnv {
    choice: bool,
    step: u8,
}

impl Behavior for CheckEnv {
    fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, input: Delivery) -> Emission {
        self.step = self.step.saturating_add(1);
        match self.step {
            1 => return Emission::send(me, &bob_id(), payload("choice", &[if self.choice { b"1" } else { b"0" }])),
            2 => return Emission::send(me, &alice_id(), payload("start", &[])),
            _ => {}
        }
        let m = input.message;
        let verdict = match Fields::parse(&m.payload) {
            Some(f) if f.is("abort", 0) => "abort",
            Some(f) if m.sender == bob_id() && f.is("reached", 1) => "pass",
            _ => "other",
        };
        Emission::send(me, &MachineId::epsilon(), payload(verdict, &[]))
    }

    behavior_clone!();

    fn deterministic(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PassRate {
    pub pass: f64,
    pub abort: f64,
    /// Runs that neither passed nor aborted.
    pub other: f64,
    /// Leaves for exact runs, trials for sampled ones.
    pub runs: u64,
    /// Hoeffding radius of `pass` for sampled runs.
    pub radius: Option<f64>,
    pub max_norm_deviation: f64,
    /// `|sum p - 1|` for exact runs.
    pub mass_error: f64,
}

fn verdict_of(o: &Output) -> &'static str {
    match o.value().and_then(Fields::parse) {
        Some(f) if f.is("pass", 0) => "pass",
        Some(f) if f.is("abort", 0) => "abort",
        _ => "other",
    }
}

/// Exact pass, abort and other probabilities.
pub fn cheat_pass_rate_exact(
    strategy: BobStrategy,
    params: ProtocolParams,
    route: AttackRoute,
    cfg: &ExecConfig,
    cap: usize,
) -> Result<PassRate, AdvError> {
    let net = attack_network(strategy, params, false, route)?;
    let d = exact_map(&net, cfg, cap, |r| verdict_of(&r.output))?;
    Ok(PassRate {
        pass: d.dist.prob(&"pass"),
        abort: d.dist.prob(&"abort"),
        other: d.dist.prob(&"other"),
        runs: d.leaves as u64,
        radius: None,
        max_norm_deviation: d.max_norm_deviation,
        mass_error: d.mass_error(),
    })
}

pub fn cheat_pass_rate_sampled(
    strategy: BobStrategy,
    params: ProtocolParams,
    route: AttackRoute,
    cfg: &ExecConfig,
    trials: u64,
    seed: u64,
) -> Result<PassRate, AdvError> {
    let net = attack_network(strategy, params, false, route)?;
    let v = sample_outputs(&net, cfg, seed, trials, |r| (verdict_of(&r.output), r.norm_deviation))?;
    let n = v.len().max(1) as f64;
    let frac = |k: &str| v.iter().filter(|x| x.0 == k).count() as f64 / n;
    Ok(PassRate {
        pass: frac("pass"),
        abort: frac("abort"),
        other: frac("other"),
        runs: trials,
        radius: Some(super::hoeffding_radius(trials, CONFIDENCE_DELTA)),
        max_norm_deviation: v.iter().map(|x| x.1).fold(0.0, f64::max),
        mass_error: 0.0,
    })
}

/// What Bob learns about Alice's bits when he measures everything in the
/// computational basis. Exact over all of Alice's choices and all
/// measurement outcomes.
#[derive(Clone, Debug, Serialize)]
pub struct Posterior {
    /// Largest `|Pr[x_i = 1 | theta_i = x, Bob's values] - 1/2|`.
    pub times_bias: f64,
    /// `Pr[Bob's value = x_i | theta_i = +]`.
    pub plus_agreement: f64,
    pub leaves: usize,
}

fn deliver(bob: &mut Bob, pool: &mut QuantumPool, rng: &mut dyn Branching, p: Vec<u8>, q: QubitRegister) -> Emission {
    let me = bob_id();
    let mut ctx = Ctx {
        k: 1,
        z: &[],
        pool,
        rng,
    };
    let message = ClassicalMessage::new(alice_id(), me.clone(), p);
    bob.react(&me, &mut ctx, Delivery { message, qubits: q })
}

/// Feeds Alice's BB84 register to a `FixedBasis(basis)` Bob and reads his
/// committed values back, for every choice of Alice's bits and bases.
pub fn wrong_basis_posterior(params: ProtocolParams, basis: Basis, cap: usize) -> Result<Posterior, AdvError> {
    let m = params.m;
    // (position, theta_a, x_a, bob's committed values) -> probability
    let mut joint: BTreeMap<(usize, Basis, bool, Vec<bool>), f64> = BTreeMap::new();
    let leaves = enumerate(
        cap,
        |rng: &mut dyn Branching| {
            let theta: Vec<Basis> = rng.bits(m).iter().map(Basis::from_bit).collect();
            let x = rng.bits(m);
            let mut pool = QuantumPool::new(m.max(1));
            let reg = pool.encode_bb84(&x, &theta).expect("within cap");
            let mut bob = Bob::new(params, Variant::Rot, CommitStyle::Functionality, BobStrategy::FixedBasis(basis));
            let mut values = vec![false; m];
            let mut e = deliver(&mut bob, &mut pool, rng, payload("qubits", &[]), reg);
            for _ in 0..2 * m {
                let msg = e.message().expect("bob commits");
                let j = fcom_index(&msg.recipient).expect("commitment id");
                let f = Fields::parse(&msg.payload).expect("well formed");
                if j % 2 == 1 {
                    values[j / 2] = f.args[0] == b"1";
                }
                e = deliver(&mut bob, &mut pool, rng, payload("ack", &[]), QubitRegister::empty());
            }
            (theta, x, values)
        },
        |(theta, x, values), p| {
            for i in 0..m {
                *joint.entry((i, theta[i], x.get(i).unwrap(), values.clone())).or_default() += p;
            }
        },
    )
    .map_err(crate::netexec::NetError::from)?;
    let mut times_bias: f64 = 0.0;
    let (mut agree, mut plus) = (0.0, 0.0);
    for (&(i, th, xa, ref view), &p) in &joint {
        if th == Basis::Times && xa {
            let zero = joint.get(&(i, th, false, view.clone())).copied().unwrap_or(0.0);
            times_bias = times_bias.max((p / (p + zero) - 0.5).abs());
        }
        if th == Basis::Times && !xa && !joint.contains_key(&(i, th, true, view.clone())) {
            times_bias = 0.5;
        }
        if th == Basis::Plus {
            plus += p;
            if view[i] == xa {
                agree += p;
            }
        }
    }
    Ok(Posterior {
        times_bias,
        plus_agreement: agree / plus,
        leaves,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PrivacyReport {
    pub tv: f64,
    pub leaves: usize,
    pub max_mass_error: f64,
    pub max_norm_deviation: f64,
}

type Entry = Vec<Vec<u8>>;

/// Entries of the transcript that `party`'s program saw or produced.
fn view_of(entries: &[Entry], party: &MachineId) -> Vec<Entry> {
    entries
        .iter()
        .filter(|e| matches!(e[0].as_slice(), b"deliver" | b"emit" | b"out") && e[1] == party.as_bytes())
        .cloned()
        .collect()
}

/// Alice's `(output, s0, s1)` as seen by the environment.
fn alice_strings(entries: &[Entry]) -> Option<(Bits, Bits)> {
    entries.iter().rev().find_map(|e| {
        if e[0] != b"in" || e[1] != alice_id().as_bytes() {
            return None;
        }
        let f = Fields::parse(&e[3])?;
        if !f.is("output", 2) {
            return None;
        }
        Some((Bits::from_ascii(f.args[0])?, Bits::from_ascii(f.args[1])?))
    })
}

/// TV between `(Bob's view, s_{1-c})` and `(Bob's view, uniform)` for an
/// honestly behaving but corrupted Bob with choice `choice`.
pub fn sender_privacy(params: ProtocolParams, choice: bool, cfg: &ExecConfig, cap: usize) -> Result<PrivacyReport, AdvError> {
    let script = ScriptSpec {
        bob: Some(BobStrategy::Honest),
        ..ScriptSpec::honest("curious-bob", choice)
    };
    let net = super::real_world(params, &script)?;
    let d = exact_map(&net, cfg, cap, |r| {
        let entries = r.output.value().and_then(parse_transcript).unwrap_or_default();
        let other = alice_strings(&entries).map(|(s0, s1)| if choice { s0 } else { s1 });
        (view_of(&entries, &bob_id()), other.map(|s| s.to_ascii()))
    })?;
    let real: Distribution<(Vec<Entry>, Option<Vec<u8>>)> = d.dist.map(|k| k.clone());
    let mut ideal = Distribution::new();
    let strings = 1u64 << params.ell;
    for (view, p) in d.dist.map(|(v, _)| v.clone()).iter() {
        for u in 0..strings {
            ideal.add((view.clone(), Some(Bits::from_u64(u, params.ell).to_ascii())), p / strings as f64);
        }
    }
    Ok(PrivacyReport {
        tv: tv_distance(&real, &ideal)?,
        leaves: d.leaves,
        max_mass_error: d.mass_error(),
        max_norm_deviation: d.max_norm_deviation,
    })
}

/// TV between everything a corrupted (but honestly behaving) Alice receives
/// when Bob's choice is 0 and when it is 1.
pub fn receiver_privacy(params: ProtocolParams, cfg: &ExecConfig, cap: usize) -> Result<PrivacyReport, AdvError> {
    let mut views = Vec::new();
    let (mut leaves, mut mass, mut norm) = (0, 0.0f64, 0.0f64);
    for choice in [false, true] {
        let script = ScriptSpec {
            alice: Some(AliceDeviation::default()),
            ..ScriptSpec::honest("curious-alice", choice)
        };
        let net = super::real_world(params, &script)?;
        let d = exact_map(&net, cfg, cap, |r| {
            let entries = r.output.value().and_then(parse_transcript).unwrap_or_default();
            let received: Vec<Entry> = view_of(&entries, &alice_id())
                .into_iter()
                .filter(|e| e[0] == b"deliver")
                .collect();
            received
        })?;
        leaves += d.leaves;
        mass = mass.max(d.mass_error());
        norm = norm.max(d.max_norm_deviation);
        views.push(d.dist);
    }
    Ok(PrivacyReport {
        tv: tv_distance(&views[0], &views[1])?,
        leaves,
        max_mass_error: mass,
        max_norm_deviation: norm,
    })
}
