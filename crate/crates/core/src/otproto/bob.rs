use serde::{Deserialize, Serialize};

use super::alice::trivial_payload;
use super::hash::{declared_len, HashFunction};
use super::{alice_id, fcom_id, frot_id, CommitStyle, ProtocolParams, Variant};
use crate::behavior_clone;
use crate::bits::{Bits, IndexSet};
use crate::idealfunc::{bit_field, parse_bit};
use crate::netexec::{payload, Behavior, Ctx, Delivery, Emission, Fields, MachineId};
use crate::qcore::{bases_from_ascii, Basis, Branching, QubitRegister, Sampler};

/// How the receiver treats its qubits and commitments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BobStrategy {
    Honest,
    /// Measures every qubit in the given basis; otherwise honest.
    FixedBasis(Basis),
    /// Commits to bases and values drawn from a seeded stream without
    /// measuring. With `measure_at_theta` the retained qubits are measured
    /// in Alice's bases once she announces them, and both strings are
    /// output.
    Guess { seed: u64, measure_at_theta: bool },
    /// Receiver inside the corrupted-sender simulator: commits without
    /// values, measures tested qubits only when `T` arrives, sends a random
    /// partition and extracts both strings, which it hands to `frot`.
    Simulated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BobPhase {
    AwaitQubits,
    Committing { next: usize },
    AwaitT,
    Opening { queue: Vec<usize>, pos: usize },
    AwaitTheta,
    AwaitChoice,
    AwaitFm,
    Done,
}

/// The receiver. Takes `(choice, c)` from the environment (only the first
/// counts) and outputs `(output, s_c)`.
#[derive(Clone, Debug)]
pub struct Bob {
    params: ProtocolParams,
    variant: Variant,
    style: CommitStyle,
    strategy: BobStrategy,
    phase: BobPhase,
    choice: Option<bool>,
    theta_b: Vec<Basis>,
    x_b: Vec<Option<bool>>,
    reg: Option<QubitRegister>,
    t: Option<IndexSet>,
    theta_a: Option<Vec<Basis>>,
    partition: Option<(IndexSet, IndexSet)>,
}

impl Bob {
    pub fn new(params: ProtocolParams, variant: Variant, style: CommitStyle, strategy: BobStrategy) -> Self {
        Bob {
            params,
            variant,
            style,
            strategy,
            phase: BobPhase::AwaitQubits,
            choice: None,
            theta_b: Vec::new(),
            x_b: Vec::new(),
            reg: None,
            t: None,
            theta_a: None,
            partition: None,
        }
    }

    pub fn phase(&self) -> &BobPhase {
        &self.phase
    }

    fn simulated(&self) -> bool {
        self.strategy == BobStrategy::Simulated
    }

    fn value(&self, j: usize) -> bool {
        if j % 2 == 0 {
            self.theta_b[j / 2].as_bit()
        } else {
            self.x_b[j / 2].expect("value fixed before it is committed or opened")
        }
    }

    fn commit(&self, me: &MachineId, j: usize) -> Emission {
        match (self.style, self.simulated()) {
            (_, true) => Emission::send(me, &fcom_id(j), payload("commit", &[])),
            (CommitStyle::Functionality, false) => {
                Emission::send(me, &fcom_id(j), payload("commit", &[bit_field(self.value(j))]))
            }
            (CommitStyle::Trivial, false) => Emission::send(me, &alice_id(), trivial_payload("commit", j, self.value(j))),
        }
    }

    fn open(&self, me: &MachineId, j: usize) -> Emission {
        match (self.style, self.simulated()) {
            (_, true) => Emission::send(me, &fcom_id(j), payload("open", &[bit_field(self.value(j))])),
            (CommitStyle::Functionality, false) => Emission::send(me, &fcom_id(j), payload("open", &[])),
            (CommitStyle::Trivial, false) => Emission::send(me, &alice_id(), trivial_payload("open", j, self.value(j))),
        }
    }

    fn kept(&self) -> Vec<usize> {
        self.t.as_ref().expect("T known").complement().indices()
    }

    fn measure(&mut self, positions: &[usize], bases: &[Basis], ctx: &mut Ctx<'_>) {
        let reg = self.reg.as_ref().expect("qubits received");
        for (&i, &b) in positions.iter().zip(bases) {
            let v = ctx.pool.measure(reg.handles()[i], b, ctx.rng).expect("own qubit");
            self.x_b[i] = Some(v);
        }
    }

    fn receive_qubits(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, reg: QubitRegister) -> Emission {
        let m = self.params.m;
        if reg.len() != m {
            return Emission::nothing();
        }
        self.reg = Some(reg);
        self.x_b = vec![None; m];
        match self.strategy.clone() {
            BobStrategy::Honest => {
                self.theta_b = ctx.rng.bits(m).iter().map(Basis::from_bit).collect();
                let bases = self.theta_b.clone();
                self.measure(&(0..m).collect::<Vec<_>>(), &bases, ctx);
            }
            BobStrategy::FixedBasis(b) => {
                self.theta_b = vec![b; m];
                self.measure(&(0..m).collect::<Vec<_>>(), &vec![b; m], ctx);
            }
            BobStrategy::Guess { seed, .. } => {
                let mut g = Sampler::new(seed);
                self.theta_b = g.bits(m).iter().map(Basis::from_bit).collect();
                self.x_b = g.bits(m).iter().map(Some).collect();
            }
            BobStrategy::Simulated => {
                self.theta_b = ctx.rng.bits(m).iter().map(Basis::from_bit).collect();
            }
        }
        self.phase = if 2 * m > 1 { BobPhase::Committing { next: 1 } } else { BobPhase::AwaitT };
        self.commit(me, 0)
    }

    fn receive_t(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, mask: &[u8]) -> Emission {
        let Some(t) = IndexSet::from_ascii(mask) else {
            return Emission::nothing();
        };
        if t.universe() != self.params.m || t.len() != self.params.tested() {
            return Emission::nothing();
        }
        let tested = t.indices();
        if self.simulated() {
            let bases: Vec<Basis> = tested.iter().map(|&i| self.theta_b[i]).collect();
            self.measure(&tested, &bases, ctx);
        }
        let queue: Vec<usize> = tested.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect();
        self.t = Some(t);
        let e = self.open(me, queue[0]);
        self.phase = BobPhase::Opening { queue, pos: 1 };
        e
    }

    fn receive_theta(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, field: &[u8]) -> Emission {
        let Some(theta_a) = bases_from_ascii(field).filter(|b| b.len() == self.params.n) else {
            return Emission::nothing();
        };
        if let BobStrategy::Guess { measure_at_theta: true, .. } = self.strategy {
            let kept = self.kept();
            self.measure(&kept, &theta_a, ctx);
        }
        self.theta_a = Some(theta_a);
        if self.simulated() || self.choice.is_some() {
            self.send_partition(me, ctx)
        } else {
            self.phase = BobPhase::AwaitChoice;
            Emission::nothing()
        }
    }

    fn send_partition(&mut self, me: &MachineId, ctx: &mut Ctx<'_>) -> Emission {
        let n = self.params.n;
        let in_zero: Vec<bool> = if self.simulated() {
            ctx.rng.bits(n).iter().map(|b| !b).collect()
        } else {
            let c = self.choice.expect("choice known");
            let kept = self.kept();
            let theta_a = self.theta_a.as_ref().expect("theta known");
            (0..n).map(|k| (theta_a[k] == self.theta_b[kept[k]]) != c).collect()
        };
        let i0 = IndexSet::from_mask(in_zero);
        let i1 = i0.complement();
        let msg = payload("I0I1", &[&i0.to_ascii(), &i1.to_ascii()]);
        self.partition = Some((i0, i1));
        self.phase = BobPhase::AwaitFm;
        Emission::send(me, &alice_id(), msg)
    }

    fn receive_fm(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, args: &[&[u8]]) -> Emission {
        let ell = self.params.ell;
        let (i0, i1) = self.partition.clone().expect("partition sent");
        let hash = |diag: &[u8], set: &IndexSet| {
            Bits::from_ascii(diag).and_then(|d| HashFunction::from_diagonals(d, declared_len(set.len(), ell), ell).ok())
        };
        let string = |f: &[u8]| Bits::from_ascii(f).filter(|s| s.len() == ell);
        let (Some(f0), Some(f1), Some(m0), Some(m1)) = (hash(args[0], &i0), hash(args[1], &i1), string(args[2]), string(args[3]))
        else {
            return Emission::nothing();
        };
        let pads = if self.variant == Variant::Ot {
            match (string(args[4]), string(args[5])) {
                (Some(t0), Some(t1)) => Some((t0, t1)),
                _ => return Emission::nothing(),
            }
        } else {
            None
        };
        let kept = self.kept();
        if self.simulated() {
            let theta_a = self.theta_a.clone().expect("theta known");
            self.measure(&kept, &theta_a, ctx);
        }
        let x: Bits = kept.iter().map(|&i| self.x_b[i].expect("measured")).collect();
        let mut s0 = &m0 ^ &f0.eval(&x.select(&i0.indices())).expect("declared length");
        let mut s1 = &m1 ^ &f1.eval(&x.select(&i1.indices())).expect("declared length");
        if let Some((t0, t1)) = &pads {
            s0 = &s0 ^ t0;
            s1 = &s1 ^ t1;
        }
        self.phase = BobPhase::Done;
        let env = MachineId::environment();
        match self.strategy {
            BobStrategy::Simulated => {
                Emission::send(me, &frot_id(), payload("inputs", &[&s0.to_ascii(), &s1.to_ascii()]))
            }
            BobStrategy::Guess { measure_at_theta: true, .. } => {
                Emission::send(me, &env, payload("output", &[&s0.to_ascii(), &s1.to_ascii()]))
            }
            _ => {
                let s = if self.choice == Some(true) { s1 } else { s0 };
                Emission::send(me, &env, payload("output", &[&s.to_ascii()]))
            }
        }
    }
}

impl Behavior for Bob {
    fn react(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, input: Delivery) -> Emission {
        let Delivery { message, qubits } = input;
        let Some(f) = Fields::parse(&message.payload) else {
            return Emission::nothing();
        };
        if message.sender.is_environment() {
            if !f.is("choice", 1) || self.choice.is_some() {
                return Emission::nothing();
            }
            let Some(c) = parse_bit(f.args[0]) else {
                return Emission::nothing();
            };
            self.choice = Some(c);
            if self.phase == BobPhase::AwaitChoice {
                return self.send_partition(me, ctx);
            }
            return Emission::nothing();
        }
        if message.sender != alice_id() {
            return Emission::nothing();
        }
        let two_m = 2 * self.params.m;
        match self.phase.clone() {
            BobPhase::AwaitQubits if f.is("qubits", 0) => self.receive_qubits(me, ctx, qubits),
            BobPhase::Committing { next } if f.is("ack", 0) => {
                self.phase = if next + 1 < two_m { BobPhase::Committing { next: next + 1 } } else { BobPhase::AwaitT };
                self.commit(me, next)
            }
            BobPhase::AwaitT if f.is("T", 1) => self.receive_t(me, ctx, f.args[0]),
            BobPhase::Opening { queue, pos } if f.is("ack", 0) => {
                let e = self.open(me, queue[pos]);
                self.phase = if pos + 1 < queue.len() {
                    BobPhase::Opening { queue, pos: pos + 1 }
                } else {
                    BobPhase::AwaitTheta
                };
                e
            }
            BobPhase::AwaitTheta if f.is("theta", 1) => self.receive_theta(me, ctx, f.args[0]),
            BobPhase::AwaitFm if f.is("fm", if self.variant == Variant::Ot && !self.simulated() { 6 } else { 4 }) => {
                self.receive_fm(me, ctx, &f.args)
            }
            _ => Emission::nothing(),
        }
    }

    behavior_clone!();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idealfunc::testutil::drive;
    use crate::netexec::MachineSpec;

    fn bob(strategy: BobStrategy) -> MachineSpec {
        let p = ProtocolParams::new(1, 2, 1).unwrap();
        MachineSpec::new("bob".into(), false, Bob::new(p, Variant::Rot, CommitStyle::Functionality, strategy))
    }

    #[test]
    fn wrong_register_size_is_absorbed() {
        // No qubits attached while two are expected.
        let out = drive(bob(BobStrategy::Honest), &[("alice", payload("qubits", &[]))]);
        assert_eq!(out, vec![None]);
    }

    #[test]
    fn only_first_choice_counts_and_strangers_are_ignored() {
        let out = drive(
            bob(BobStrategy::Honest),
            &[
                ("environment", payload("choice", &[b"1"])),
                ("environment", payload("choice", &[b"0"])),
                ("carol", payload("ack", &[])),
                ("alice", payload("ack", &[])),
            ],
        );
        assert_eq!(out, vec![None, None, None, None]);
    }
}
