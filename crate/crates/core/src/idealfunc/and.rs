use super::ot::{bit_field, parse_bit};
use crate::behavior_clone;
use crate::netexec::{payload, Behavior, Ctx, Delivery, Emission, Fields, MachineId, MachineSpec};

/// `F_AND`: takes `(input, a)` from Alice and `(input, b)` from Bob. The
/// party whose input completes the pair receives `(output, a·b)` at once;
/// either party can `fetch` it afterwards.
#[derive(Clone, Debug)]
pub struct FAnd {
    alice: MachineId,
    bob: MachineId,
    a: Option<bool>,
    b: Option<bool>,
}

impl Behavior for FAnd {
    fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, input: Delivery) -> Emission {
        let from = input.message.sender;
        let Some(f) = Fields::parse(&input.message.payload) else {
            return Emission::nothing();
        };
        let is_alice = from == self.alice;
        if !is_alice && from != self.bob {
            return Emission::nothing();
        }
        if f.is("fetch", 0) {
            return match (self.a, self.b) {
                (Some(a), Some(b)) => Emission::send(me, &from, payload("output", &[bit_field(a & b)])),
                _ => Emission::nothing(),
            };
        }
        let slot = if is_alice { &mut self.a } else { &mut self.b };
        if !f.is("input", 1) || slot.is_some() {
            return Emission::nothing();
        }
        match parse_bit(f.args[0]) {
            Some(v) => *slot = Some(v),
            None => return Emission::nothing(),
        }
        match (self.a, self.b) {
            (Some(a), Some(b)) => Emission::send(me, &from, payload("output", &[bit_field(a & b)])),
            _ => Emission::nothing(),
        }
    }

    behavior_clone!();
}

pub fn f_and(id: MachineId, alice: MachineId, bob: MachineId) -> MachineSpec {
    MachineSpec::new(
        id,
        true,
        FAnd {
            alice,
            bob,
            a: None,
            b: None,
        },
    )
}
