//! Simulators built by running a copy of the real world's adversarial side
//! inside one machine.

use std::collections::BTreeSet;

use crate::behavior_clone;
use crate::idealfunc::{f_com, f_com_equivocal};
use crate::netexec::{
    corruption_party, dummy_adversary, instruct, Behavior, Ctx, Delivery, Emission, MachineId,
    MachineSpec,
};
use crate::otproto::{alice_id, bob_id, fcom_id, frot_id, Bob, BobStrategy, CommitStyle, ProtocolParams, Variant};

/// Internal activations allowed per external activation.
pub const SIM_STEP_BUDGET: usize = 10_000;

/// A message from internal machine `from` to the external functionality
/// `to`, sent through the external corrupted party `via`.
#[derive(Clone, Debug)]
struct Hook {
    from: MachineId,
    to: MachineId,
    via: MachineId,
}

/// Runs a dummy adversary, copies of the corrupted parties and simulated
/// honest parties internally. Acts as the adversary of the ideal world.
///
/// Whatever the environment or an external corrupted party sends reaches
/// the internal dummy adversary. Messages leave when the internal adversary
/// or an internal corrupted copy addresses the environment, or through a
/// hook. Anything else addressed outside is dropped.
#[derive(Clone)]
pub struct InternalSim {
    machines: Vec<MachineSpec>,
    corrupted: BTreeSet<MachineId>,
    hooks: Vec<Hook>,
    budget: usize,
}

impl InternalSim {
    fn index(&self, id: &MachineId) -> Option<usize> {
        self.machines.iter().position(|m| &m.id == id)
    }

    pub fn into_spec(self) -> MachineSpec {
        MachineSpec::new(MachineId::adversary(), false, self)
    }
}

impl Behavior for InternalSim {
    fn react(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, input: Delivery) -> Emission {
        let Delivery { message, qubits } = input;
        let from = &message.sender;
        if !(from.is_environment() || self.corrupted.contains(from)) {
            return Emission::nothing();
        }
        let mut cur = message;
        let mut q = qubits;
        for _ in 0..self.budget {
            let Some(i) = self.index(&cur.recipient) else {
                return Emission::nothing();
            };
            let id = self.machines[i].id.clone();
            let e = self.machines[i].behavior.react(&id, ctx, Delivery { message: cur, qubits: q });
            let Some(m) = e.message().filter(|m| m.sender == id) else {
                return Emission::nothing();
            };
            q = e.qubits;
            if m.recipient.is_environment() {
                return if id.is_adversary() {
                    Emission::send_with(me, &m.recipient, m.payload, q)
                } else if self.corrupted.contains(&id) {
                    Emission::send_with(me, &id, instruct(&id, &m.recipient, m.payload), q)
                } else {
                    Emission::nothing()
                };
            }
            if let Some(h) = self.hooks.iter().find(|h| h.from == id && h.to == m.recipient) {
                return Emission::send_with(me, &h.via, instruct(&h.via, &h.to, m.payload), q);
            }
            cur = m;
        }
        Emission::nothing()
    }

    behavior_clone!();
}

fn commitments(params: ProtocolParams, equivocal: bool) -> impl Iterator<Item = MachineSpec> {
    (0..2 * params.m).map(move |j| {
        if equivocal {
            f_com_equivocal(fcom_id(j), 1, bob_id(), alice_id())
        } else {
            f_com(fcom_id(j), 1, bob_id(), alice_id())
        }
    })
}

/// Simulator for `πQROT` with Alice corrupted. A simulated Bob commits
/// through equivocal commitments, opens the tested positions to whatever he
/// measures there, measures the rest in Alice's announced bases, and hands
/// the two strings he can then compute to `F_ROT` as Alice's input.
pub fn simulator_corrupted_alice(params: ProtocolParams) -> MachineSpec {
    let mut machines = vec![
        dummy_adversary(),
        corruption_party(alice_id()),
        MachineSpec::new(
            bob_id(),
            false,
            Bob::new(params, Variant::Rot, CommitStyle::Functionality, BobStrategy::Simulated),
        ),
    ];
    machines.extend(commitments(params, true));
    InternalSim {
        machines,
        corrupted: [alice_id()].into(),
        hooks: vec![Hook {
            from: bob_id(),
            to: frot_id(),
            via: alice_id(),
        }],
        budget: SIM_STEP_BUDGET,
    }
    .into_spec()
}

/// Simulator for `πQROT` with both parties corrupted: the whole real world
/// minus the environment, run internally.
pub fn simulator_both_corrupted(params: ProtocolParams) -> MachineSpec {
    let mut machines = vec![dummy_adversary(), corruption_party(alice_id()), corruption_party(bob_id())];
    machines.extend(commitments(params, false));
    InternalSim {
        machines,
        corrupted: [alice_id(), bob_id()].into(),
        hooks: Vec::new(),
        budget: SIM_STEP_BUDGET,
    }
    .into_spec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netexec::{ClassicalMessage, Out};
    use crate::qcore::{QuantumPool, QubitRegister, Sampler};

    fn activate(sim: &mut MachineSpec, m: ClassicalMessage) -> Emission {
        let mut pool = QuantumPool::default();
        let mut rng = Sampler::new(1);
        let mut ctx = Ctx {
            k: 1,
            z: &[],
            pool: &mut pool,
            rng: &mut rng,
        };
        let id = sim.id.clone();
        sim.behavior.react(
            &id,
            &mut ctx,
            Delivery {
                message: m,
                qubits: QubitRegister::empty(),
            },
        )
    }

    #[test]
    fn internal_adversary_reports_to_environment() {
        let p = ProtocolParams::new(1, 2, 1).unwrap();
        let mut sim = simulator_both_corrupted(p);
        // alice is told to send something to the adversary; the internal
        // dummy adversary reports it.
        let order = instruct(
            &MachineId::adversary(),
            &alice_id(),
            instruct(&alice_id(), &MachineId::adversary(), b"hello".to_vec()),
        );
        let e = activate(&mut sim, ClassicalMessage::new(MachineId::environment(), MachineId::adversary(), order));
        let m = e.message().unwrap();
        assert!(m.recipient.is_environment());
        let report = ClassicalMessage::parse(&m.payload).unwrap();
        assert_eq!(report.sender, alice_id());
        assert_eq!(report.payload, b"hello");
    }

    #[test]
    fn corrupted_copy_reaches_environment_through_external_party() {
        let p = ProtocolParams::new(1, 2, 1).unwrap();
        let mut sim = simulator_corrupted_alice(p);
        let order = instruct(
            &MachineId::adversary(),
            &alice_id(),
            instruct(&alice_id(), &MachineId::environment(), b"out".to_vec()),
        );
        let e = activate(&mut sim, ClassicalMessage::new(MachineId::environment(), MachineId::adversary(), order));
        let m = e.message().unwrap();
        assert_eq!(m.recipient, alice_id());
        assert_eq!(
            ClassicalMessage::parse(&m.payload).unwrap(),
            ClassicalMessage::new(alice_id(), MachineId::environment(), b"out".to_vec())
        );
    }

    #[test]
    fn strangers_and_external_targets_are_absorbed() {
        let p = ProtocolParams::new(1, 2, 1).unwrap();
        let mut sim = simulator_corrupted_alice(p);
        let e = activate(&mut sim, ClassicalMessage::new(bob_id(), MachineId::adversary(), b"x".to_vec()));
        assert_eq!(e.out, Out::Nothing);
        let order = instruct(
            &MachineId::adversary(),
            &alice_id(),
            instruct(&alice_id(), &frot_id(), b"(start)".to_vec()),
        );
        let e = activate(&mut sim, ClassicalMessage::new(MachineId::environment(), MachineId::adversary(), order));
        assert_eq!(e.out, Out::Nothing);
    }
}
