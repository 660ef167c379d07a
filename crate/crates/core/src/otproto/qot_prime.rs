//! `πQOT'`: OT from one `F_ROT` call by one-time padding the inputs.
//!
//! Bob sends his choice to `frot` and, on `(output, s_c)`, tells Alice
//! `ready`. Alice, who started `frot` on her inputs, fetches `(s0, s1)` and
//! sends `(t, s0 ^ v0, s1 ^ v1)`; Bob outputs `s_c ^ t_c`.

use super::{alice_id, bob_id, frot_id};
use crate::behavior_clone;
use crate::bits::Bits;
use crate::idealfunc::parse_bit;
use crate::netexec::{payload, Behavior, Ctx, Delivery, Emission, Fields, MachineId};

fn string(field: &[u8], ell: usize) -> Option<Bits> {
    Bits::from_ascii(field).filter(|s| s.len() == ell)
}

#[derive(Clone, Debug)]
pub struct QotPrimeAlice {
    ell: usize,
    inputs: Option<(Bits, Bits)>,
    done: bool,
}

impl QotPrimeAlice {
    pub fn new(ell: usize) -> Self {
        QotPrimeAlice {
            ell,
            inputs: None,
            done: false,
        }
    }
}

impl Behavior for QotPrimeAlice {
    fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, input: Delivery) -> Emission {
        let Some(f) = Fields::parse(&input.message.payload) else {
            return Emission::nothing();
        };
        let from = &input.message.sender;
        if from.is_environment() && f.is("inputs", 2) && self.inputs.is_none() {
            let (Some(v0), Some(v1)) = (string(f.args[0], self.ell), string(f.args[1], self.ell)) else {
                return Emission::nothing();
            };
            self.inputs = Some((v0, v1));
            return Emission::send(me, &frot_id(), payload("start", &[]));
        }
        if from == &bob_id() && f.is("ready", 0) && self.inputs.is_some() && !self.done {
            return Emission::send(me, &frot_id(), payload("fetch", &[]));
        }
        if from == &frot_id() && f.is("output", 2) && !self.done {
            let (Some(s0), Some(s1)) = (string(f.args[0], self.ell), string(f.args[1], self.ell)) else {
                return Emission::nothing();
            };
            let (v0, v1) = self.inputs.as_ref().expect("started");
            self.done = true;
            let (t0, t1) = (&s0 ^ v0, &s1 ^ v1);
            return Emission::send(me, &bob_id(), payload("t", &[&t0.to_ascii(), &t1.to_ascii()]));
        }
        Emission::nothing()
    }

    behavior_clone!();
}

#[derive(Clone, Debug)]
pub struct QotPrimeBob {
    ell: usize,
    choice: Option<bool>,
    s: Option<Bits>,
    done: bool,
}

impl QotPrimeBob {
    pub fn new(ell: usize) -> Self {
        QotPrimeBob {
            ell,
            choice: None,
            s: None,
            done: false,
        }
    }
}

impl Behavior for QotPrimeBob {
    fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, input: Delivery) -> Emission {
        let Some(f) = Fields::parse(&input.message.payload) else {
            return Emission::nothing();
        };
        let from = &input.message.sender;
        if from.is_environment() && f.is("choice", 1) && self.choice.is_none() {
            let Some(c) = parse_bit(f.args[0]) else {
                return Emission::nothing();
            };
            self.choice = Some(c);
            return Emission::send(me, &frot_id(), payload("choice", &[f.args[0]]));
        }
        if from == &frot_id() && f.is("output", 1) && self.s.is_none() {
            let Some(s) = string(f.args[0], self.ell) else {
                return Emission::nothing();
            };
            self.s = Some(s);
            return Emission::send(me, &alice_id(), payload("ready", &[]));
        }
        if from == &alice_id() && f.is("t", 2) && self.s.is_some() && !self.done {
            let (Some(t0), Some(t1)) = (string(f.args[0], self.ell), string(f.args[1], self.ell)) else {
                return Emission::nothing();
            };
            self.done = true;
            let t = if self.choice == Some(true) { t1 } else { t0 };
            let v = self.s.as_ref().expect("received") ^ &t;
            return Emission::send(me, &MachineId::environment(), payload("output", &[&v.to_ascii()]));
        }
        Emission::nothing()
    }

    behavior_clone!();
}
