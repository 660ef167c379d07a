//! Forwarding machines: dummy adversary, dummy parties, corruption parties.

use std::collections::BTreeSet;

use super::{ClassicalMessage, Ctx, Delivery, Emission, MachineId, MachineSpec, NetError, Network};
use crate::behavior_clone;
use crate::netexec::Behavior;

/// Relays between the environment and everything else; never touches qubits.
#[derive(Clone, Debug, Default)]
pub struct DummyAdversary;

impl Behavior for DummyAdversary {
    fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, input: Delivery) -> Emission {
        let Delivery { message, qubits } = input;
        if message.sender.is_environment() {
            Emission::raw(message.payload, qubits)
        } else {
            Emission::send_with(me, &MachineId::environment(), message.encode(), qubits)
        }
    }

    behavior_clone!();

    fn deterministic(&self) -> bool {
        true
    }
}

pub fn dummy_adversary() -> MachineSpec {
    MachineSpec::new(MachineId::adversary(), false, DummyAdversary)
}

/// Follows the adversary's instructions and reports everything else to it.
#[derive(Clone, Debug, Default)]
pub struct CorruptionParty;

impl Behavior for CorruptionParty {
    fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, input: Delivery) -> Emission {
        let Delivery { message, qubits } = input;
        if message.sender.is_adversary() {
            Emission::raw(message.payload, qubits)
        } else {
            Emission::send_with(me, &MachineId::adversary(), message.encode(), qubits)
        }
    }

    behavior_clone!();

    fn deterministic(&self) -> bool {
        true
    }
}

pub fn corruption_party(id: MachineId) -> MachineSpec {
    MachineSpec::new(id, false, CorruptionParty)
}

/// Replaces every party in `corrupted` by a corruption party.
pub fn corrupt(net: &Network, corrupted: &BTreeSet<MachineId>) -> Result<Network, NetError> {
    if let Some(p) = corrupted.iter().find(|p| !net.parties().contains(*p)) {
        return Err(NetError::UnknownParty(p.to_string()));
    }
    net.clone().map_machines(|m| {
        if corrupted.contains(&m.id) {
            corruption_party(m.id)
        } else {
            m
        }
    })
}

/// Forwards between the environment and one functionality.
#[derive(Clone, Debug)]
pub struct DummyParty {
    func: MachineId,
}

impl Behavior for DummyParty {
    fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, input: Delivery) -> Emission {
        let Delivery { message, qubits } = input;
        if message.sender.is_environment() {
            Emission::send_with(me, &self.func, message.payload, qubits)
        } else if message.sender == self.func {
            Emission::send_with(me, &MachineId::environment(), message.payload, qubits)
        } else {
            Emission::nothing()
        }
    }

    behavior_clone!();
}

pub fn make_dummy_party(party: MachineId, func: MachineId) -> Result<MachineSpec, NetError> {
    if party == func {
        return Err(NetError::IdCollision(party.to_string()));
    }
    Ok(MachineSpec::new(party, false, DummyParty { func }))
}

/// Encodes an instruction for the dummy adversary or a corruption party.
pub fn instruct(sender: &MachineId, recipient: &MachineId, payload: Vec<u8>) -> Vec<u8> {
    ClassicalMessage::new(sender.clone(), recipient.clone(), payload).encode()
}
