//! Scripted environments. A [`Driver`] talks to honest parties directly and
//! plays every corrupted party itself through the dummy adversary: it runs
//! a copy of that party's program (a puppet) on whatever the corruption
//! party reports, and turns the puppet's messages into instructions.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::behavior_clone;
use crate::bits::Bits;
use crate::netexec::wire::{decode_tuple, encode_tuple};
use crate::netexec::{
    instruct, payload, Behavior, ClassicalMessage, Ctx, Delivery, Emission, Fields, MachineId, MachineSpec,
};
use crate::otproto::{
    alice_id, bob_id, fcom_id, frot_id, Alice, AliceDeviation, Bob, BobStrategy, CommitStyle, ProtocolParams,
    Variant,
};
use crate::qcore::{Branching, QubitRegister, Sampler};

/// What the environment outputs when it stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Everything it received and sent, in order.
    Transcript,
    /// `1` iff an abort was observed.
    Aborted,
    /// First bit of Bob's output; `0` when there is none.
    OutputBit,
    /// `pass` if the stop tag was reached, `abort` on abort, `other`
    /// otherwise.
    Check,
}

/// Seeded corruption of the puppets' outgoing messages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutation {
    pub seed: u64,
    /// Chance in percent that a given message is mutated.
    pub rate_percent: u32,
}

/// A named environment script. A party with a program here is corrupted
/// and played by the environment; the others are honest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScriptSpec {
    pub name: String,
    pub choice: bool,
    /// Sender inputs `(v0, v1)` as bit strings; switches to the OT variant.
    #[serde(default)]
    pub inputs: Option<(String, String)>,
    #[serde(default)]
    pub alice: Option<AliceDeviation>,
    #[serde(default)]
    pub bob: Option<BobStrategy>,
    /// Seed for the puppets' coins. Without one they draw from the
    /// execution, so exact runs enumerate them.
    #[serde(default)]
    pub puppet_seed: Option<u64>,
    #[serde(default)]
    pub mutation: Option<Mutation>,
    /// Stop as soon as a puppet is about to receive a message with this tag.
    #[serde(default)]
    pub stop_at: Option<String>,
    pub verdict: Verdict,
}

impl ScriptSpec {
    /// Honest run of both parties with transcript output.
    pub fn honest(name: &str, choice: bool) -> Self {
        ScriptSpec {
            name: name.into(),
            choice,
            inputs: None,
            alice: None,
            bob: None,
            puppet_seed: None,
            mutation: None,
            stop_at: None,
            verdict: Verdict::Transcript,
        }
    }

    pub fn corrupted(&self) -> BTreeSet<MachineId> {
        let mut c = BTreeSet::new();
        if self.alice.is_some() {
            c.insert(alice_id());
        }
        if self.bob.is_some() {
            c.insert(bob_id());
        }
        c
    }

    pub fn variant(&self) -> Variant {
        if self.inputs.is_some() {
            Variant::Ot
        } else {
            Variant::Rot
        }
    }

    pub fn environment(&self, params: ProtocolParams) -> MachineSpec {
        MachineSpec::new(MachineId::environment(), false, Driver::new(self.clone(), params))
    }
}

#[derive(Clone, Debug)]
enum Action {
    Honest(MachineId, Vec<u8>),
    Puppet(MachineId, Vec<u8>),
}

enum Flow {
    Emit(Emission),
    Continue,
    Finish,
}

#[derive(Clone)]
pub struct Driver {
    spec: Arc<ScriptSpec>,
    alice: Option<MachineSpec>,
    bob: Option<MachineSpec>,
    puppet_rng: Option<Sampler>,
    mutator: Option<Sampler>,
    pending: VecDeque<Action>,
    transcript: Vec<Vec<u8>>,
    started: bool,
    fetched: bool,
    aborted: bool,
    reached_stop: bool,
    bob_output: Option<Vec<u8>>,
}

fn count(q: &QubitRegister) -> Vec<u8> {
    q.len().to_string().into_bytes()
}

impl Driver {
    pub fn new(spec: ScriptSpec, params: ProtocolParams) -> Self {
        let variant = spec.variant();
        let style = CommitStyle::Functionality;
        let alice = spec
            .alice
            .clone()
            .map(|dev| MachineSpec::new(alice_id(), false, Alice::new(params, variant, style, dev)));
        let bob = spec
            .bob
            .clone()
            .map(|s| MachineSpec::new(bob_id(), false, Bob::new(params, variant, style, s)));
        Driver {
            puppet_rng: spec.puppet_seed.map(Sampler::new),
            mutator: spec.mutation.as_ref().map(|m| Sampler::new(m.seed)),
            spec: Arc::new(spec),
            alice,
            bob,
            pending: VecDeque::new(),
            transcript: Vec::new(),
            started: false,
            fetched: false,
            aborted: false,
            reached_stop: false,
            bob_output: None,
        }
    }

    fn action(&self, party: MachineId, payload: Vec<u8>) -> Action {
        let puppet = if party == alice_id() { self.alice.is_some() } else { self.bob.is_some() };
        if puppet {
            Action::Puppet(party, payload)
        } else {
            Action::Honest(party, payload)
        }
    }

    fn opening(&mut self) {
        let c: &[u8] = if self.spec.choice { b"1" } else { b"0" };
        let choice = self.action(bob_id(), payload("choice", &[c]));
        let start = match &self.spec.inputs {
            Some((v0, v1)) => payload("inputs", &[v0.as_bytes(), v1.as_bytes()]),
            None => payload("start", &[]),
        };
        let start = self.action(alice_id(), start);
        self.pending.extend([choice, start]);
    }

    fn record(&mut self, fields: &[&[u8]]) {
        if self.spec.verdict != Verdict::Transcript {
            return;
        }
        self.transcript.push(encode_tuple(fields));
    }

    /// Reaction to an output a party (honest or puppet) addressed to us.
    fn party_output(&mut self, party: &MachineId, f: &Fields<'_>, raw: &[u8]) -> Flow {
        if f.is("abort", 0) {
            self.aborted = true;
            return Flow::Finish;
        }
        if f.tag != b"output" {
            return Flow::Continue;
        }
        if party == &bob_id() {
            self.bob_output = Some(raw.to_vec());
            if self.spec.inputs.is_some() {
                return Flow::Finish;
            }
            if !self.fetched {
                self.fetched = true;
                let fetch = self.action(alice_id(), payload("fetch", &[]));
                self.pending.push_back(fetch);
            }
            Flow::Continue
        } else {
            Flow::Finish
        }
    }

    fn run_puppet(&mut self, party: &MachineId, ctx: &mut Ctx<'_>, message: ClassicalMessage, qubits: QubitRegister) -> Emission {
        let puppet = if party == &alice_id() { self.alice.as_mut() } else { self.bob.as_mut() };
        let puppet = puppet.expect("puppet exists");
        let d = Delivery { message, qubits };
        match self.puppet_rng.as_mut() {
            Some(r) => puppet.behavior.react(party, &mut ctx.with_rng(r), d),
            None => puppet.behavior.react(party, ctx, d),
        }
    }

    fn deliver(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, party: &MachineId, message: ClassicalMessage, qubits: QubitRegister) -> Flow {
        self.record(&[b"deliver", party.as_bytes(), message.sender.as_bytes(), &message.payload, &count(&qubits)]);
        if let (Some(stop), Some(f)) = (&self.spec.stop_at, Fields::parse(&message.payload)) {
            if f.tag == stop.as_bytes() {
                self.reached_stop = true;
                return Flow::Finish;
            }
        }
        let e = self.run_puppet(party, ctx, message, qubits);
        let Some(m) = e.message().filter(|m| &m.sender == party) else {
            return Flow::Continue;
        };
        if m.recipient.is_environment() {
            self.record(&[b"out", party.as_bytes(), &m.payload]);
            return match Fields::parse(&m.payload) {
                Some(f) => {
                    let raw = m.payload.clone();
                    self.party_output(party, &f, &raw)
                }
                None => Flow::Continue,
            };
        }
        let Some((m, qubits)) = self.mutate(m, e.qubits) else {
            return Flow::Continue;
        };
        self.record(&[b"emit", party.as_bytes(), m.recipient.as_bytes(), &m.payload, &count(&qubits)]);
        let adv = MachineId::adversary();
        let order = instruct(&adv, party, instruct(party, &m.recipient, m.payload));
        Flow::Emit(Emission::send_with(me, &adv, order, qubits))
    }

    fn mutate(&mut self, mut m: ClassicalMessage, qubits: QubitRegister) -> Option<(ClassicalMessage, QubitRegister)> {
        let rate = self.spec.mutation.as_ref().map_or(0, |x| x.rate_percent);
        let Some(rng) = self.mutator.as_mut() else {
            return Some((m, qubits));
        };
        if rng.uniform(100) as u32 >= rate {
            return Some((m, qubits));
        }
        match rng.uniform(4) {
            0 => {
                let Some(fields) = decode_tuple(&m.payload) else {
                    return Some((m, qubits));
                };
                let mut fields: Vec<Vec<u8>> = fields.into_iter().map(|f| f.to_vec()).collect();
                let spots: Vec<(usize, usize)> = fields
                    .iter()
                    .enumerate()
                    .skip(1)
                    .flat_map(|(i, f)| f.iter().enumerate().filter(|(_, b)| b"01+x".contains(b)).map(move |(j, _)| (i, j)))
                    .collect();
                if spots.is_empty() {
                    return Some((m, qubits));
                }
                let (i, j) = spots[rng.uniform(spots.len())];
                fields[i][j] = match fields[i][j] {
                    b'0' => b'1',
                    b'1' => b'0',
                    b'+' => b'x',
                    _ => b'+',
                };
                m.payload = encode_tuple(&fields);
                Some((m, qubits))
            }
            1 => {
                let targets = [
                    alice_id(),
                    bob_id(),
                    frot_id(),
                    fcom_id(0),
                    MachineId::environment(),
                    MachineId::adversary(),
                    MachineId::named("carol"),
                ];
                m.recipient = targets[rng.uniform(targets.len())].clone();
                Some((m, qubits))
            }
            2 => None,
            _ => {
                let q = if qubits.is_empty() {
                    qubits
                } else {
                    qubits.select(&(0..qubits.len() - 1).collect::<Vec<_>>())
                };
                Some((m, q))
            }
        }
    }

    fn handle(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, message: ClassicalMessage, qubits: QubitRegister) -> Flow {
        let from = message.sender.clone();
        if from.is_adversary() {
            let Ok(report) = ClassicalMessage::parse(&message.payload) else {
                return Flow::Continue;
            };
            let is_puppet = (report.sender == alice_id() && self.alice.is_some())
                || (report.sender == bob_id() && self.bob.is_some());
            if !is_puppet || !report.recipient.is_adversary() {
                return Flow::Continue;
            }
            let Ok(inner) = ClassicalMessage::parse(&report.payload) else {
                return Flow::Continue;
            };
            if inner.recipient != report.sender {
                return Flow::Continue;
            }
            return self.deliver(me, ctx, &report.sender, inner, qubits);
        }
        if (from == alice_id() || from == bob_id()) && message.recipient.is_environment() {
            if let Some(f) = Fields::parse(&message.payload) {
                return self.party_output(&from, &f, &message.payload);
            }
        }
        Flow::Continue
    }

    fn drain(&mut self, me: &MachineId, ctx: &mut Ctx<'_>) -> Emission {
        while let Some(a) = self.pending.pop_front() {
            match a {
                Action::Honest(to, p) => {
                    self.record(&[b"send", to.as_bytes(), &p]);
                    return Emission::send(me, &to, p);
                }
                Action::Puppet(party, p) => {
                    let m = ClassicalMessage::new(MachineId::environment(), party.clone(), p);
                    match self.deliver(me, ctx, &party, m, QubitRegister::empty()) {
                        Flow::Emit(e) => return e,
                        Flow::Finish => return self.finish(me),
                        Flow::Continue => {}
                    }
                }
            }
        }
        self.finish(me)
    }

    fn finish(&mut self, me: &MachineId) -> Emission {
        let bit = |b: bool| -> &'static [u8] {
            if b {
                b"1"
            } else {
                b"0"
            }
        };
        let out = match self.spec.verdict {
            Verdict::Transcript => {
                let refs: Vec<&[u8]> = self.transcript.iter().map(|e| e.as_slice()).collect();
                payload("transcript", &refs)
            }
            Verdict::Aborted => payload("bit", &[bit(self.aborted)]),
            Verdict::OutputBit => {
                let first = self
                    .bob_output
                    .as_ref()
                    .and_then(|o| Fields::parse(o).and_then(|f| f.args.first().map(|a| a.first() == Some(&b'1'))))
                    .unwrap_or(false);
                payload("bit", &[bit(first)])
            }
            Verdict::Check => {
                let tag: &[u8] = if self.reached_stop {
                    b"pass"
                } else if self.aborted {
                    b"abort"
                } else {
                    b"other"
                };
                payload(std::str::from_utf8(tag).expect("ascii"), &[])
            }
        };
        Emission::send(me, &MachineId::epsilon(), out)
    }
}

impl Behavior for Driver {
    fn react(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, input: Delivery) -> Emission {
        let Delivery { message, qubits } = input;
        if !self.started {
            self.started = true;
            self.opening();
        }
        self.record(&[b"in", message.sender.as_bytes(), message.recipient.as_bytes(), &message.payload, &count(&qubits)]);
        match self.handle(me, ctx, message, qubits) {
            Flow::Emit(e) => e,
            Flow::Finish => self.finish(me),
            Flow::Continue => self.drain(me, ctx),
        }
    }

    behavior_clone!();
}

/// Entries of a `transcript` output, each split into its fields.
pub fn parse_transcript(output: &[u8]) -> Option<Vec<Vec<Vec<u8>>>> {
    let f = Fields::parse(output)?;
    if f.tag != b"transcript" {
        return None;
    }
    f.args
        .iter()
        .map(|e| decode_tuple(e).map(|fs| fs.into_iter().map(|x| x.to_vec()).collect()))
        .collect()
}

/// Parses an `(output, s)` payload's first string.
pub fn output_string(payload: &[u8]) -> Option<Bits> {
    let f = Fields::parse(payload)?;
    if f.tag != b"output" {
        return None;
    }
    Bits::from_ascii(f.args.first()?)
}
