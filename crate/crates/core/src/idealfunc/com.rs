use crate::behavior_clone;
use crate::bits::Bits;
use crate::netexec::{payload, Behavior, Ctx, Delivery, Emission, Fields, MachineId, MachineSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommitState {
    Empty,
    Committed(Bits),
    Opened(Bits),
}

/// Commitment from `sender` to `recipient`. In equivocal mode the commit
/// phase carries no value and the sender names the value when opening.
#[derive(Clone, Debug)]
pub struct FCom {
    ell: usize,
    sender: MachineId,
    recipient: MachineId,
    equivocal: bool,
    state: CommitState,
}

impl FCom {
    pub fn state(&self) -> &CommitState {
        &self.state
    }
}

impl Behavior for FCom {
    fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, input: Delivery) -> Emission {
        if input.message.sender != self.sender {
            return Emission::nothing();
        }
        let Some(f) = Fields::parse(&input.message.payload) else {
            return Emission::nothing();
        };
        let value = |f: &Fields| Bits::from_ascii(f.args[0]).filter(|x| x.len() == self.ell);
        match &self.state {
            CommitState::Empty => {
                let committed = if self.equivocal {
                    f.is("commit", 0).then(|| Bits::zeros(self.ell))
                } else if f.is("commit", 1) {
                    value(&f)
                } else {
                    None
                };
                match committed {
                    Some(x) => {
                        self.state = CommitState::Committed(x);
                        Emission::send(me, &self.recipient, payload("committed", &[]))
                    }
                    None => Emission::nothing(),
                }
            }
            CommitState::Committed(x) => {
                let opened = if self.equivocal {
                    if f.is("open", 1) {
                        value(&f)
                    } else {
                        None
                    }
                } else {
                    f.is("open", 0).then(|| x.clone())
                };
                match opened {
                    Some(x) => {
                        let out = payload("open", &[&x.to_ascii()]);
                        self.state = CommitState::Opened(x);
                        Emission::send(me, &self.recipient, out)
                    }
                    None => Emission::nothing(),
                }
            }
            CommitState::Opened(_) => Emission::nothing(),
        }
    }

    behavior_clone!();

    fn deterministic(&self) -> bool {
        true
    }
}

/// `F_COM` with `ell`-bit values.
pub fn f_com(id: MachineId, ell: usize, sender: MachineId, recipient: MachineId) -> MachineSpec {
    assert!(ell >= 1, "commitment length must be positive");
    MachineSpec::new(
        id,
        true,
        FCom {
            ell,
            sender,
            recipient,
            equivocal: false,
            state: CommitState::Empty,
        },
    )
}

/// `F_FC`: like [`f_com`] but the value is chosen at opening time.
pub fn f_com_equivocal(id: MachineId, ell: usize, sender: MachineId, recipient: MachineId) -> MachineSpec {
    assert!(ell >= 1, "commitment length must be positive");
    MachineSpec::new(
        id,
        true,
        FCom {
            ell,
            sender,
            recipient,
            equivocal: true,
            state: CommitState::Empty,
        },
    )
}

/// Sender of the plain-text commitment: `(commit, x)` and later `(open, x)`
/// both go straight to the recipient.
#[derive(Clone, Debug)]
pub struct TrivialSender {
    recipient: MachineId,
    value: Option<Bits>,
    opened: bool,
}

impl Behavior for TrivialSender {
    fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, input: Delivery) -> Emission {
        if !input.message.sender.is_environment() {
            return Emission::nothing();
        }
        let Some(f) = Fields::parse(&input.message.payload) else {
            return Emission::nothing();
        };
        match (&self.value, self.opened) {
            (None, _) if f.is("commit", 1) => match Bits::from_ascii(f.args[0]) {
                Some(x) => {
                    let out = payload("commit", &[&x.to_ascii()]);
                    self.value = Some(x);
                    Emission::send(me, &self.recipient, out)
                }
                None => Emission::nothing(),
            },
            (Some(x), false) if f.is("open", 0) => {
                self.opened = true;
                Emission::send(me, &self.recipient, payload("open", &[&x.to_ascii()]))
            }
            _ => Emission::nothing(),
        }
    }

    behavior_clone!();
}

/// Recipient of the plain-text commitment. Outputs `committed`, then
/// `(open, x)` if the opening matches, else `reject`.
#[derive(Clone, Debug)]
pub struct TrivialRecipient {
    sender: MachineId,
    value: Option<Bits>,
    done: bool,
}

impl Behavior for TrivialRecipient {
    fn react(&mut self, me: &MachineId, _: &mut Ctx<'_>, input: Delivery) -> Emission {
        if input.message.sender != self.sender || self.done {
            return Emission::nothing();
        }
        let env = MachineId::environment();
        match &self.value {
            None => match extract(&input.message.payload) {
                Some(x) => {
                    self.value = Some(x);
                    Emission::send(me, &env, payload("committed", &[]))
                }
                None => Emission::nothing(),
            },
            Some(x) => {
                let Some(f) = Fields::parse(&input.message.payload).filter(|f| f.is("open", 1)) else {
                    return Emission::nothing();
                };
                self.done = true;
                if f.args[0] == x.to_ascii().as_slice() {
                    Emission::send(me, &env, payload("open", &[&x.to_ascii()]))
                } else {
                    Emission::send(me, &env, payload("reject", &[]))
                }
            }
        }
    }

    behavior_clone!();
}

/// Reads the committed value off a commit message.
pub fn extract(commit_payload: &[u8]) -> Option<Bits> {
    let f = Fields::parse(commit_payload)?;
    if f.is("commit", 1) {
        Bits::from_ascii(f.args[0])
    } else {
        None
    }
}

/// Sender and recipient machines of the plain-text commitment scheme.
pub fn trivial_commitment_protocol(sender: MachineId, recipient: MachineId) -> (MachineSpec, MachineSpec) {
    (
        MachineSpec::new(
            sender.clone(),
            true,
            TrivialSender {
                recipient: recipient.clone(),
                value: None,
                opened: false,
            },
        ),
        MachineSpec::new(
            recipient,
            true,
            TrivialRecipient {
                sender,
                value: None,
                done: false,
            },
        ),
    )
}
