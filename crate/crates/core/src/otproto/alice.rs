use serde::{Deserialize, Serialize};

use super::hash::{declared_len, HashFunction};
use super::{
    binomial, bob_id, fcom_index, index_field, parse_index, unrank_subset, CommitStyle, ProtocolParams,
    Variant,
};
use crate::behavior_clone;
use crate::bits::{is_partition, Bits, IndexSet};
use crate::idealfunc::{bit_field, parse_bit};
use crate::netexec::{payload, Behavior, Ctx, Delivery, Emission, Fields, MachineId};
use crate::qcore::{bases_to_ascii, gates, Basis, QubitRegister, StateVector};

/// Ways a (corrupted) sender can depart from the protocol. The default is
/// honest behaviour.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AliceDeviation {
    /// Encode every qubit in this basis instead of random ones.
    pub fixed_basis: Option<Basis>,
    /// Abort once all commitments are in instead of sending `T`.
    pub abort_after_commits: bool,
    /// Send halves of EPR pairs and measure the kept halves only when the
    /// values are needed.
    pub entangled: bool,
    /// Send one qubit fewer than required.
    pub short_register: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlicePhase {
    Idle,
    Commits,
    Openings { t: IndexSet },
    Partition { t: IndexSet },
    Done { s0: Bits, s1: Bits },
    Aborted,
}

/// The sender. In the ROT variant it starts on `start` and hands out
/// `(output, s0, s1)` on `fetch`; in the OT variant it starts on
/// `(inputs, v0, v1)` and has no output.
#[derive(Clone, Debug)]
pub struct Alice {
    params: ProtocolParams,
    variant: Variant,
    style: CommitStyle,
    deviation: AliceDeviation,
    phase: AlicePhase,
    inputs: Option<(Bits, Bits)>,
    x: Vec<Option<bool>>,
    theta: Vec<Basis>,
    kept: Option<QubitRegister>,
    /// Per commitment index: `None` until committed, then the committed
    /// value when it travels in the clear.
    committed: Vec<Option<Option<bool>>>,
    opened: Vec<Option<bool>>,
}

enum Step {
    Send(Emission),
    Abort,
}

impl Alice {
    pub fn new(params: ProtocolParams, variant: Variant, style: CommitStyle, deviation: AliceDeviation) -> Self {
        Alice {
            params,
            variant,
            style,
            deviation,
            phase: AlicePhase::Idle,
            inputs: None,
            x: Vec::new(),
            theta: Vec::new(),
            kept: None,
            committed: vec![None; 2 * params.m],
            opened: vec![None; 2 * params.m],
        }
    }

    pub fn phase(&self) -> &AlicePhase {
        &self.phase
    }

    fn start(&mut self, me: &MachineId, ctx: &mut Ctx<'_>) -> Emission {
        let m = self.params.m;
        let bits = if self.deviation.entangled { Bits::zeros(0) } else { ctx.rng.bits(m) };
        self.theta = match self.deviation.fixed_basis {
            Some(b) => vec![b; m],
            None => ctx.rng.bits(m).iter().map(Basis::from_bit).collect(),
        };
        let reg = if self.deviation.entangled {
            let mut kept = Vec::with_capacity(m);
            let mut sent = Vec::with_capacity(m);
            for _ in 0..m {
                let a = ctx.pool.alloc(StateVector::zero(1)).expect("fresh qubit");
                let b = ctx.pool.alloc(StateVector::zero(1)).expect("fresh qubit");
                let pair = QubitRegister::new(vec![a, b]).expect("distinct");
                ctx.pool.apply_unitary(&pair, &[0], &gates::hadamard()).expect("valid gate");
                ctx.pool.apply_unitary(&pair, &[0, 1], &gates::cnot()).expect("valid gate");
                kept.push(a);
                sent.push(b);
            }
            self.kept = Some(QubitRegister::new(kept).expect("distinct"));
            self.x = vec![None; m];
            QubitRegister::new(sent).expect("distinct")
        } else {
            self.x = bits.iter().map(Some).collect();
            match ctx.pool.encode_bb84(&bits, &self.theta) {
                Ok(r) => r,
                Err(_) => return self.abort(me),
            }
        };
        let reg = if self.deviation.short_register {
            reg.select(&(0..m - 1).collect::<Vec<_>>())
        } else {
            reg
        };
        self.phase = AlicePhase::Commits;
        Emission::send_with(me, &bob_id(), payload("qubits", &[]), reg)
    }

    /// `x~A_i`, measuring the kept EPR half on first use.
    fn x_at(&mut self, i: usize, ctx: &mut Ctx<'_>) -> bool {
        if let Some(v) = self.x[i] {
            return v;
        }
        let h = self.kept.as_ref().expect("entangled").handles()[i];
        let v = ctx.pool.measure(h, self.theta[i], ctx.rng).expect("own qubit");
        self.x[i] = Some(v);
        v
    }

    fn abort(&mut self, me: &MachineId) -> Emission {
        self.phase = AlicePhase::Aborted;
        Emission::send(me, &MachineId::environment(), payload("abort", &[]))
    }

    fn ack(me: &MachineId) -> Emission {
        Emission::send(me, &bob_id(), payload("ack", &[]))
    }

    /// Which commitment a message refers to and the bit it carries, given
    /// the expected tag. `None` when it is not of that form.
    fn commitment_msg(&self, from: &MachineId, f: &Fields<'_>, tag: &str) -> Option<(usize, Option<bool>)> {
        match self.style {
            CommitStyle::Functionality => {
                let j = fcom_index(from).filter(|&j| j < 2 * self.params.m)?;
                match tag {
                    "committed" if f.is("committed", 0) => Some((j, None)),
                    "open" if f.is("open", 1) => Some((j, Some(parse_bit(f.args[0])?))),
                    _ => None,
                }
            }
            CommitStyle::Trivial => {
                if from != &bob_id() || !f.is(if tag == "committed" { "commit" } else { tag }, 2) {
                    return None;
                }
                let j = parse_index(f.args[0]).filter(|&j| j < 2 * self.params.m)?;
                Some((j, Some(parse_bit(f.args[1])?)))
            }
        }
    }

    fn step(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, from: &MachineId, f: &Fields<'_>) -> Step {
        let p = self.params;
        match self.phase.clone() {
            AlicePhase::Commits => {
                let Some((j, v)) = self.commitment_msg(from, f, "committed") else {
                    return Step::Abort;
                };
                if self.committed[j].is_some() {
                    return Step::Abort;
                }
                self.committed[j] = Some(v);
                let count = self.committed.iter().filter(|c| c.is_some()).count();
                if count < 2 * p.m {
                    return Step::Send(Self::ack(me));
                }
                if self.deviation.abort_after_commits {
                    return Step::Abort;
                }
                let t = unrank_subset(p.m, p.tested(), ctx.rng.uniform(binomial(p.m, p.tested())));
                let mask = t.to_ascii();
                self.phase = AlicePhase::Openings { t };
                Step::Send(Emission::send(me, &bob_id(), payload("T", &[&mask])))
            }
            AlicePhase::Openings { t } => {
                let Some((j, Some(v))) = self.commitment_msg(from, f, "open") else {
                    return Step::Abort;
                };
                if !t.contains(j / 2) || self.opened[j].is_some() {
                    return Step::Abort;
                }
                if let Some(Some(c)) = self.committed[j] {
                    if c != v {
                        return Step::Abort;
                    }
                }
                self.opened[j] = Some(v);
                let remaining = t.indices().iter().any(|&i| self.opened[2 * i].is_none() || self.opened[2 * i + 1].is_none());
                if remaining {
                    return Step::Send(Self::ack(me));
                }
                for i in t.indices() {
                    let theta_b = self.opened[2 * i].expect("opened");
                    let x_b = self.opened[2 * i + 1].expect("opened");
                    if theta_b == self.theta[i].as_bit() && x_b != self.x_at(i, ctx) {
                        return Step::Abort;
                    }
                }
                let kept: Vec<usize> = t.complement().indices();
                let theta_a: Vec<Basis> = kept.iter().map(|&i| self.theta[i]).collect();
                self.phase = AlicePhase::Partition { t };
                Step::Send(Emission::send(me, &bob_id(), payload("theta", &[&bases_to_ascii(&theta_a)])))
            }
            AlicePhase::Partition { t } => {
                if from != &bob_id() || !f.is("I0I1", 2) {
                    return Step::Abort;
                }
                let (Some(i0), Some(i1)) = (IndexSet::from_ascii(f.args[0]), IndexSet::from_ascii(f.args[1])) else {
                    return Step::Abort;
                };
                if !is_partition(&i0, &i1, p.n) {
                    return Step::Abort;
                }
                let kept = t.complement().indices();
                let x_a: Bits = kept.clone().into_iter().map(|i| self.x_at(i, ctx)).collect();
                let s0 = ctx.rng.bits(p.ell);
                let s1 = ctx.rng.bits(p.ell);
                let f0 = HashFunction::sample(declared_len(i0.len(), p.ell), p.ell, ctx.rng);
                let f1 = HashFunction::sample(declared_len(i1.len(), p.ell), p.ell, ctx.rng);
                let m0 = &s0 ^ &f0.eval(&x_a.select(&i0.indices())).expect("declared length");
                let m1 = &s1 ^ &f1.eval(&x_a.select(&i1.indices())).expect("declared length");
                let mut args = vec![f0.diagonals().to_ascii(), f1.diagonals().to_ascii(), m0.to_ascii(), m1.to_ascii()];
                if let Some((v0, v1)) = &self.inputs {
                    args.push((&s0 ^ v0).to_ascii());
                    args.push((&s1 ^ v1).to_ascii());
                }
                let refs: Vec<&[u8]> = args.iter().map(|a| a.as_slice()).collect();
                self.phase = AlicePhase::Done { s0, s1 };
                Step::Send(Emission::send(me, &bob_id(), payload("fm", &refs)))
            }
            AlicePhase::Idle | AlicePhase::Done { .. } | AlicePhase::Aborted => Step::Send(Emission::nothing()),
        }
    }
}

impl Behavior for Alice {
    fn react(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, input: Delivery) -> Emission {
        let from = input.message.sender.clone();
        if from.is_environment() {
            let Some(f) = Fields::parse(&input.message.payload) else {
                return Emission::nothing();
            };
            return match (&self.phase, self.variant) {
                (AlicePhase::Idle, Variant::Rot) if f.is("start", 0) => self.start(me, ctx),
                (AlicePhase::Idle, Variant::Ot) if f.is("inputs", 2) => {
                    let ell = self.params.ell;
                    let v0 = Bits::from_ascii(f.args[0]).filter(|v| v.len() == ell);
                    let v1 = Bits::from_ascii(f.args[1]).filter(|v| v.len() == ell);
                    match (v0, v1) {
                        (Some(v0), Some(v1)) => {
                            self.inputs = Some((v0, v1));
                            self.start(me, ctx)
                        }
                        _ => Emission::nothing(),
                    }
                }
                (AlicePhase::Done { s0, s1 }, Variant::Rot) if f.is("fetch", 0) => Emission::send(
                    me,
                    &MachineId::environment(),
                    payload("output", &[&s0.to_ascii(), &s1.to_ascii()]),
                ),
                _ => Emission::nothing(),
            };
        }
        let from_protocol = from == bob_id()
            || (self.style == CommitStyle::Functionality && fcom_index(&from).is_some_and(|j| j < 2 * self.params.m));
        if !from_protocol {
            return Emission::nothing();
        }
        if matches!(self.phase, AlicePhase::Idle | AlicePhase::Done { .. } | AlicePhase::Aborted) {
            return Emission::nothing();
        }
        let Some(f) = Fields::parse(&input.message.payload) else {
            return self.abort(me);
        };
        match self.step(me, ctx, &from, &f) {
            Step::Send(e) => e,
            Step::Abort => self.abort(me),
        }
    }

    behavior_clone!();
}

/// Commit or open message from Bob in the trivial style.
pub(crate) fn trivial_payload(tag: &str, j: usize, v: bool) -> Vec<u8> {
    payload(tag, &[&index_field(j), bit_field(v)])
}
