use crate::behavior_clone;
use crate::bits::Bits;
use crate::netexec::{payload, Behavior, Ctx, Delivery, Emission, Fields, MachineId, MachineSpec};

/// Parses a one-bit field `"0"`/`"1"`.
pub fn parse_bit(field: &[u8]) -> Option<bool> {
    match field {
        b"0" => Some(false),
        b"1" => Some(true),
        _ => None,
    }
}

pub fn bit_field(b: bool) -> &'static [u8] {
    if b {
        b"1"
    } else {
        b"0"
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RotPhase {
    Waiting,
    Done,
}

/// Shared state machine of `F_OT` and `F_ROT`.
///
/// Inputs: `(inputs, s0, s1)` from A when A picks the strings, `start` from
/// an honest A when the functionality picks them, `(choice, c)` from B.
/// Whichever input arrives first is buffered. On completion B receives
/// `(output, s_c)`; an honest A collects `(output, s0, s1)` with `fetch`.
#[derive(Clone, Debug)]
pub struct Transfer {
    ell: usize,
    alice: MachineId,
    bob: MachineId,
    /// A supplies `(s0, s1)` itself.
    sender_chooses: bool,
    started: bool,
    strings: Option<(Bits, Bits)>,
    choice: Option<bool>,
    phase: RotPhase,
}

impl Transfer {
    pub fn phase(&self) -> &RotPhase {
        &self.phase
    }

    fn try_fire(&mut self, me: &MachineId, ctx: &mut Ctx<'_>) -> Emission {
        let Some(c) = self.choice else {
            return Emission::nothing();
        };
        if !self.sender_chooses && self.started && self.strings.is_none() {
            let s0 = ctx.rng.bits(self.ell);
            let s1 = ctx.rng.bits(self.ell);
            self.strings = Some((s0, s1));
        }
        let Some((s0, s1)) = &self.strings else {
            return Emission::nothing();
        };
        self.phase = RotPhase::Done;
        let s = if c { s1 } else { s0 };
        Emission::send(me, &self.bob, payload("output", &[&s.to_ascii()]))
    }
}

impl Behavior for Transfer {
    fn react(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, input: Delivery) -> Emission {
        let Some(f) = Fields::parse(&input.message.payload) else {
            return Emission::nothing();
        };
        let from = &input.message.sender;
        if self.phase == RotPhase::Done {
            if from == &self.alice && !self.sender_chooses && f.is("fetch", 0) {
                let (s0, s1) = self.strings.as_ref().expect("done");
                return Emission::send(me, &self.alice, payload("output", &[&s0.to_ascii(), &s1.to_ascii()]));
            }
            return Emission::nothing();
        }
        if from == &self.bob && f.is("choice", 1) && self.choice.is_none() {
            match parse_bit(f.args[0]) {
                Some(c) => self.choice = Some(c),
                None => return Emission::nothing(),
            }
        } else if from == &self.alice && self.sender_chooses && f.is("inputs", 2) && self.strings.is_none() {
            let s0 = Bits::from_ascii(f.args[0]).filter(|s| s.len() == self.ell);
            let s1 = Bits::from_ascii(f.args[1]).filter(|s| s.len() == self.ell);
            match (s0, s1) {
                (Some(s0), Some(s1)) => self.strings = Some((s0, s1)),
                _ => return Emission::nothing(),
            }
        } else if from == &self.alice && !self.sender_chooses && f.is("start", 0) && !self.started {
            self.started = true;
        } else {
            return Emission::nothing();
        }
        self.try_fire(me, ctx)
    }

    behavior_clone!();
}

fn transfer(id: MachineId, ell: usize, alice: MachineId, bob: MachineId, sender_chooses: bool) -> MachineSpec {
    assert!(ell >= 1, "string length must be positive");
    MachineSpec::new(
        id,
        true,
        Transfer {
            ell,
            alice,
            bob,
            sender_chooses,
            started: false,
            strings: None,
            choice: None,
            phase: RotPhase::Waiting,
        },
    )
}

/// `F_OT` from `alice` to `bob` on `ell`-bit strings.
pub fn f_ot(id: MachineId, ell: usize, alice: MachineId, bob: MachineId) -> MachineSpec {
    transfer(id, ell, alice, bob, true)
}

/// `F_ROT`. With `a_corrupted` it takes `(s0, s1)` from A like `F_OT`;
/// otherwise it samples them once both `start` and the choice are in.
pub fn f_rot(id: MachineId, ell: usize, a_corrupted: bool, alice: MachineId, bob: MachineId) -> MachineSpec {
    transfer(id, ell, alice, bob, a_corrupted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idealfunc::testutil::{drive, drive_with, msg};
    use crate::netexec::{ClassicalMessage, Distribution};
    use crate::qcore::enumerate;

    fn ot() -> MachineSpec {
        f_ot("F".into(), 2, "A".into(), "B".into())
    }

    #[test]
    fn selection() {
        let out = drive(ot(), &[("A", payload("inputs", &[b"00", b"11"])), ("B", payload("choice", &[b"1"]))]);
        assert_eq!(out, vec![None, Some(msg("F", "B", payload("output", &[b"11"])))]);
    }

    #[test]
    fn symmetric_inputs() {
        for c in [b"0", b"1"] {
            let out = drive(ot(), &[("A", payload("inputs", &[b"01", b"01"])), ("B", payload("choice", &[c]))]);
            assert_eq!(out[1], Some(msg("F", "B", payload("output", &[b"01"]))));
        }
    }

    #[test]
    fn order_independent() {
        let a = ("A", payload("inputs", &[b"10", b"01"]));
        let b = ("B", payload("choice", &[b"0"]));
        let fwd = drive(ot(), &[a.clone(), b.clone()]);
        let rev = drive(ot(), &[b, a]);
        assert_eq!(fwd[1], rev[1]);
        assert_eq!(fwd[1], Some(msg("F", "B", payload("output", &[b"10"]))));
    }

    #[test]
    fn corrupted_rot_selects() {
        let rot = f_rot("F".into(), 2, true, "A".into(), "B".into());
        let out = drive(rot, &[("A", payload("inputs", &[b"10", b"01"])), ("B", payload("choice", &[b"1"]))]);
        assert_eq!(out[1], Some(msg("F", "B", payload("output", &[b"01"]))));
    }

    fn field(m: &Option<ClassicalMessage>, i: usize) -> Vec<u8> {
        Fields::parse(&m.as_ref().unwrap().payload).unwrap().args[i].to_vec()
    }

    #[test]
    fn honest_rot_exact_joint_distribution() {
        for (c, ell) in [(b"0", 1usize), (b"1", 1), (b"0", 2)] {
            let mut joint = Distribution::new();
            enumerate(
                1000,
                |b| {
                    drive_with(
                        f_rot("F".into(), ell, false, "A".into(), "B".into()),
                        &[("B", payload("choice", &[c])), ("A", payload("start", &[])), ("A", payload("fetch", &[]))],
                        b,
                    )
                },
                |out, p| joint.add((field(&out[2], 0), field(&out[2], 1), field(&out[1], 0)), p),
            )
            .unwrap();
            assert_eq!(joint.len(), 1 << (2 * ell));
            for ((s0, s1, s), p) in joint.iter() {
                assert!((p - 1.0 / (1 << (2 * ell)) as f64).abs() < 1e-12);
                assert_eq!(s, if c == b"1" { s1 } else { s0 });
            }
        }
    }

    #[test]
    fn honest_rot_waits_for_both() {
        let rot = || f_rot("F".into(), 1, false, "A".into(), "B".into());
        let out = drive(rot(), &[("A", payload("fetch", &[])), ("A", payload("start", &[])), ("B", payload("choice", &[b"1"]))]);
        assert_eq!(out[0], None);
        assert_eq!(out[1], None);
        assert!(out[2].is_some());
        let out = drive(rot(), &[("B", payload("choice", &[b"2"])), ("A", payload("inputs", &[b"0", b"1"]))]);
        assert_eq!(out, vec![None, None]);
    }
}
