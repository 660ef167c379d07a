//! Ideal functionalities as classical machines. Inputs they do not expect
//! are absorbed.

mod and;
mod com;
mod ot;

pub use and::{f_and, FAnd};
pub use com::{
    extract, f_com, f_com_equivocal, trivial_commitment_protocol, CommitState, FCom, TrivialRecipient,
    TrivialSender,
};
pub use ot::{bit_field, f_ot, f_rot, parse_bit, RotPhase, Transfer};

use crate::netexec::{make_dummy_party, MachineId, MachineSpec, NetError, Network};

/// The ideal protocol for `func`: one dummy party per id in `parties`.
pub fn ideal_protocol(func: MachineSpec, parties: &[MachineId]) -> Result<Network, NetError> {
    let mut machines = Vec::with_capacity(parties.len() + 1);
    for p in parties {
        machines.push(make_dummy_party(p.clone(), func.id.clone())?);
    }
    machines.push(func);
    Network::new(machines, parties.iter().cloned())
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::netexec::{ClassicalMessage, Ctx, Delivery, MachineId, MachineSpec};
    use crate::qcore::{Branching, QuantumPool, Sampler};

    pub fn msg(s: &str, r: &str, p: Vec<u8>) -> ClassicalMessage {
        ClassicalMessage::new(s.into(), r.into(), p)
    }

    /// Feeds `(sender, payload)` pairs to one machine, collecting the
    /// well-formed messages it emits (`None` when absorbed).
    pub fn drive_with(
        mut m: MachineSpec,
        script: &[(&str, Vec<u8>)],
        rng: &mut dyn Branching,
    ) -> Vec<Option<ClassicalMessage>> {
        let mut pool = QuantumPool::default();
        let mut out = Vec::new();
        for (from, p) in script {
            let mut ctx = Ctx {
                k: 1,
                z: &[],
                pool: &mut pool,
                rng: &mut *rng,
            };
            let e = m.behavior.react(
                &m.id,
                &mut ctx,
                Delivery {
                    message: ClassicalMessage::new(MachineId::named(from), m.id.clone(), p.clone()),
                    qubits: Default::default(),
                },
            );
            out.push(e.message().filter(|msg| msg.sender == m.id));
        }
        out
    }

    pub fn drive(m: MachineSpec, script: &[(&str, Vec<u8>)]) -> Vec<Option<ClassicalMessage>> {
        drive_with(m, script, &mut Sampler::new(0))
    }
}
