use super::{Behavior, Ctx, Delivery, Emission, MachineId, MachineSpec};
use crate::behavior_clone;

/// `C(M)`: measures the quantum register in the computational basis before
/// and after `M` reacts.
#[derive(Clone)]
pub struct ClassicalWrapper {
    inner: Box<dyn Behavior>,
}

impl Behavior for ClassicalWrapper {
    fn react(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, input: Delivery) -> Emission {
        ctx.pool.classicalize(&input.qubits, ctx.rng);
        let out = self.inner.react(me, ctx, input);
        ctx.pool.classicalize(&out.qubits, ctx.rng);
        out
    }

    behavior_clone!();
}

pub fn classical_wrapper(machine: MachineSpec) -> MachineSpec {
    MachineSpec {
        id: machine.id,
        classical: machine.classical,
        behavior: Box::new(ClassicalWrapper {
            inner: machine.behavior,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Bits;
    use crate::netexec::{exact, ExecConfig, FnBehavior, Network, Output};
    use crate::qcore::Basis;

    /// Environment sends `|0>_x` to `m`, which reports its computational
    /// reading back; the environment outputs it.
    fn net(wraps: usize) -> Network {
        let env = MachineSpec::new(
            MachineId::environment(),
            false,
            FnBehavior(|me: &MachineId, ctx: &mut Ctx<'_>, d: Delivery| {
                if d.message.sender.is_epsilon() {
                    let reg = ctx
                        .pool
                        .encode_bb84(&Bits::zeros(1), &[Basis::Times])
                        .unwrap();
                    Emission::send_with(me, &"m".into(), Vec::new(), reg)
                } else {
                    Emission::send(me, &MachineId::epsilon(), d.message.payload)
                }
            }),
        );
        let mut m = MachineSpec::new(
            "m".into(),
            false,
            FnBehavior(|me: &MachineId, ctx: &mut Ctx<'_>, d: Delivery| {
                let b = ctx.pool.measure(d.qubits.handles()[0], Basis::Plus, ctx.rng).unwrap();
                Emission::send(me, &MachineId::environment(), vec![b as u8])
            }),
        );
        for _ in 0..wraps {
            m = classical_wrapper(m);
        }
        Network::new(vec![env, m], []).unwrap()
    }

    #[test]
    fn wrapped_machine_sees_uniform_bit() {
        for wraps in 0..3 {
            let d = exact(&net(wraps), &ExecConfig::exact(), 100).unwrap();
            assert_eq!(d.dist.len(), 2);
            assert!((d.dist.prob(&Output::Value(vec![0])) - 0.5).abs() < 1e-12);
        }
    }
}
