//! `σ^π`: runs instances of a subprotocol inside a calling protocol.
//!
//! Instance `i` of π is attached at a call id `F_i` of σ. σ's party `P`
//! talks to instance `i` by sending to `F_i`, exactly as it would talk to an
//! ideal functionality with that id. A router at `F_i` delivers the message
//! to `P#i`, which sees it as coming from its environment; `P#i`'s outputs to
//! the environment come back to `P` with sender `F_i`.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Behavior, Ctx, Delivery, Emission, MachineId, MachineSpec, NetError, Network};
use crate::behavior_clone;

#[derive(Clone)]
struct Adapter {
    inner: Box<dyn Behavior>,
    inner_id: MachineId,
    instance: usize,
    call: MachineId,
    members: Arc<BTreeSet<MachineId>>,
}

impl Adapter {
    fn inward(&self, id: &MachineId) -> Option<MachineId> {
        if id == &self.call {
            return Some(MachineId::environment());
        }
        if id.is_adversary() {
            return Some(id.clone());
        }
        id.untagged(self.instance).filter(|u| self.members.contains(u))
    }

    fn outward(&self, id: &MachineId) -> MachineId {
        if id.is_environment() {
            self.call.clone()
        } else if self.members.contains(id) {
            id.tagged(self.instance)
        } else {
            id.clone()
        }
    }
}

impl Behavior for Adapter {
    fn react(&mut self, _me: &MachineId, ctx: &mut Ctx<'_>, input: Delivery) -> Emission {
        let Some(sender) = self.inward(&input.message.sender) else {
            return Emission::nothing();
        };
        let mut message = input.message;
        message.sender = sender;
        message.recipient = self.inner_id.clone();
        let inner_id = self.inner_id.clone();
        let out = self.inner.react(
            &inner_id,
            ctx,
            Delivery {
                message,
                qubits: input.qubits,
            },
        );
        match out.message() {
            Some(m) if m.sender == self.inner_id => Emission::send_with(
                &self.outward(&m.sender),
                &self.outward(&m.recipient),
                m.payload,
                out.qubits,
            ),
            _ => Emission::nothing(),
        }
    }

    behavior_clone!();
}

#[derive(Clone)]
struct Router {
    instance: usize,
    parties: Arc<BTreeSet<MachineId>>,
}

impl Behavior for Router {
    fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, input: Delivery) -> Emission {
        let Delivery { message, qubits } = input;
        if self.parties.contains(&message.sender) {
            let to = message.sender.tagged(self.instance);
            return Emission::send_with(me, &to, message.payload, qubits);
        }
        match message.sender.untagged(self.instance) {
            Some(p) if self.parties.contains(&p) => Emission::send_with(me, &p, message.payload, qubits),
            _ => Emission::nothing(),
        }
    }

    behavior_clone!();
}

/// Attaches one instance of `pi` at each id in `calls`. Machines of `sigma`
/// with a call id are replaced. Every party of `pi` must be a machine of
/// `sigma` (its caller).
pub fn compose(sigma: &Network, pi: &Network, calls: &[MachineId]) -> Result<Network, NetError> {
    if calls.is_empty() {
        return Err(NetError::InvalidConfig("compose needs at least one instance".into()));
    }
    if pi.contains(&MachineId::environment()) {
        return Err(NetError::InvalidConfig("subprotocol must not contain an environment".into()));
    }
    for p in pi.parties() {
        if !sigma.contains(p) || calls.contains(p) {
            return Err(NetError::UnknownParty(p.to_string()));
        }
    }
    let members: Arc<BTreeSet<MachineId>> = Arc::new(pi.ids().cloned().collect());
    let parties = Arc::new(pi.parties().clone());

    let mut machines: Vec<MachineSpec> = sigma
        .machines()
        .iter()
        .filter(|m| !calls.contains(&m.id))
        .cloned()
        .collect();
    for (i, call) in calls.iter().enumerate() {
        machines.push(MachineSpec::new(
            call.clone(),
            false,
            Router {
                instance: i,
                parties: parties.clone(),
            },
        ));
        for m in pi.machines() {
            machines.push(MachineSpec {
                id: m.id.tagged(i),
                classical: m.classical,
                behavior: Box::new(Adapter {
                    inner: m.behavior.clone(),
                    inner_id: m.id.clone(),
                    instance: i,
                    call: call.clone(),
                    members: members.clone(),
                }),
            });
        }
    }
    let mut seen = BTreeSet::new();
    for m in &machines {
        if !seen.insert(m.id.clone()) {
            return Err(NetError::IdCollision(m.id.to_string()));
        }
    }
    Network::new(machines, sigma.parties().iter().cloned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netexec::{sample, ExecConfig, FnBehavior, Output};

    /// π: a single party "p" that answers its environment with payload + "!".
    fn pi() -> Network {
        let p = MachineSpec::new(
            "p".into(),
            true,
            FnBehavior(|me: &MachineId, _: &mut Ctx<'_>, d: Delivery| {
                if d.message.sender.is_environment() {
                    let mut v = d.message.payload;
                    v.push(b'!');
                    Emission::send(me, &MachineId::environment(), v)
                } else {
                    Emission::nothing()
                }
            }),
        );
        Network::new(vec![p], ["p".into()]).unwrap()
    }

    /// σ: party "p" calls f0 then f1 and reports both answers.
    fn sigma() -> Network {
        #[derive(Clone, Default)]
        struct Caller(Vec<u8>, u8);
        impl Behavior for Caller {
            fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, d: Delivery) -> Emission {
                self.1 += 1;
                match self.1 {
                    1 => Emission::send(me, &"f0".into(), b"a".to_vec()),
                    2 => {
                        self.0.extend(&d.message.payload);
                        Emission::send(me, &"f1".into(), b"b".to_vec())
                    }
                    _ => {
                        self.0.extend(&d.message.payload);
                        Emission::send(me, &MachineId::environment(), self.0.clone())
                    }
                }
            }
            behavior_clone!();
        }
        let env = MachineSpec::new(
            MachineId::environment(),
            false,
            FnBehavior(|me: &MachineId, _: &mut Ctx<'_>, d: Delivery| {
                if d.message.sender.is_epsilon() {
                    Emission::send(me, &"p".into(), Vec::new())
                } else {
                    Emission::send(me, &MachineId::epsilon(), d.message.payload)
                }
            }),
        );
        Network::new(vec![env, MachineSpec::new("p".into(), true, Caller::default())], ["p".into()]).unwrap()
    }

    #[test]
    fn two_instances_are_separate() {
        let net = compose(&sigma(), &pi(), &["f0".into(), "f1".into()]).unwrap();
        let ids: Vec<String> = net.ids().map(|i| i.to_string()).collect();
        assert!(ids.contains(&"p#0".to_string()) && ids.contains(&"p#1".to_string()));
        let r = sample(&net, &ExecConfig::default().traced(), 0).unwrap();
        assert_eq!(r.output, Output::Value(b"a!b!".to_vec()));
        // instance 0 never talks to instance 1
        for e in &r.trace {
            let s = e.message.sender.to_string();
            let t = e.message.recipient.to_string();
            assert!(!(s.ends_with("#0") && t.ends_with("#1") || s.ends_with("#1") && t.ends_with("#0")));
        }
    }

    #[test]
    fn collisions_and_missing_callers() {
        assert!(matches!(compose(&sigma(), &pi(), &[]), Err(NetError::InvalidConfig(_))));
        assert!(matches!(compose(&sigma(), &pi(), &["p".into()]), Err(NetError::UnknownParty(_))));
        assert!(matches!(
            compose(&sigma(), &pi(), &["f0".into(), "f0".into()]),
            Err(NetError::IdCollision(_))
        ));
    }
}
