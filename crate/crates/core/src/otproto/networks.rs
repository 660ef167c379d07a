//! Protocol networks (parties plus helper functionalities, without
//! environment or adversary) and their ideal counterparts.

use super::{
    alice_id, bob_id, fcom_id, fot_id, frot_id, Alice, AliceDeviation, Bob, BobStrategy, CommitStyle,
    ProtocolParams, QotPrimeAlice, QotPrimeBob, Variant,
};
use crate::idealfunc::{f_com, f_ot, f_rot, ideal_protocol};
use crate::netexec::{MachineSpec, NetError, Network};

pub fn protocol_alice(params: ProtocolParams, variant: Variant, style: CommitStyle) -> MachineSpec {
    MachineSpec::new(alice_id(), false, Alice::new(params, variant, style, AliceDeviation::default()))
}

pub fn protocol_bob(params: ProtocolParams, variant: Variant, style: CommitStyle, strategy: BobStrategy) -> MachineSpec {
    MachineSpec::new(bob_id(), false, Bob::new(params, variant, style, strategy))
}

fn with_commitments(params: ProtocolParams, variant: Variant) -> Result<Network, NetError> {
    let style = CommitStyle::Functionality;
    let mut machines = vec![
        protocol_alice(params, variant, style),
        protocol_bob(params, variant, style, BobStrategy::Honest),
    ];
    machines.extend((0..2 * params.m).map(|j| f_com(fcom_id(j), 1, bob_id(), alice_id())));
    Network::new(machines, [alice_id(), bob_id()])
}

/// `πQROT` with one `F_COM` per committed bit.
pub fn pi_qrot(params: ProtocolParams) -> Result<Network, NetError> {
    with_commitments(params, Variant::Rot)
}

/// `πQOT`: the same flow with sender-chosen strings padded onto the output.
pub fn pi_qot(params: ProtocolParams) -> Result<Network, NetError> {
    with_commitments(params, Variant::Ot)
}

/// `πQROT^com`: commitments replaced by the trivial commitment protocol run
/// between Bob and Alice directly.
pub fn pi_qrot_com(params: ProtocolParams) -> Result<Network, NetError> {
    let style = CommitStyle::Trivial;
    Network::new(
        vec![
            protocol_alice(params, Variant::Rot, style),
            protocol_bob(params, Variant::Rot, style, BobStrategy::Honest),
        ],
        [alice_id(), bob_id()],
    )
}

/// `πQOT'` over an ideal `F_ROT` at id `frot`.
pub fn pi_qot_prime(ell: usize) -> Result<Network, NetError> {
    Network::new(
        vec![
            MachineSpec::new(alice_id(), true, QotPrimeAlice::new(ell)),
            MachineSpec::new(bob_id(), true, QotPrimeBob::new(ell)),
            f_rot(frot_id(), ell, false, alice_id(), bob_id()),
        ],
        [alice_id(), bob_id()],
    )
}

/// Dummy parties around `F_ROT`.
pub fn ideal_rot(ell: usize, a_corrupted: bool) -> Result<Network, NetError> {
    ideal_protocol(f_rot(frot_id(), ell, a_corrupted, alice_id(), bob_id()), &[alice_id(), bob_id()])
}

/// Dummy parties around `F_OT`.
pub fn ideal_ot(ell: usize) -> Result<Network, NetError> {
    ideal_protocol(f_ot(fot_id(), ell, alice_id(), bob_id()), &[alice_id(), bob_id()])
}
