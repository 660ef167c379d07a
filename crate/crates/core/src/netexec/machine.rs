use std::fmt;

use super::{ClassicalMessage, MachineId};
use crate::qcore::{Branching, QuantumPool, QubitRegister};

/// What a machine sees when activated.
#[derive(Clone, Debug)]
pub struct Delivery {
    pub message: ClassicalMessage,
    pub qubits: QubitRegister,
}

/// Classical part of a machine's output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Out {
    Message(ClassicalMessage),
    /// Raw register bytes, parsed by the kernel. Lets forwarders pass on
    /// whatever they were told to, including garbage.
    Raw(Vec<u8>),
    /// Leave the register unparseable; the environment runs next.
    Nothing,
}

#[derive(Clone, Debug)]
pub struct Emission {
    pub out: Out,
    pub qubits: QubitRegister,
}

impl Emission {
    pub fn nothing() -> Self {
        Emission {
            out: Out::Nothing,
            qubits: QubitRegister::empty(),
        }
    }

    pub fn send(from: &MachineId, to: &MachineId, payload: Vec<u8>) -> Self {
        Emission::send_with(from, to, payload, QubitRegister::empty())
    }

    pub fn send_with(from: &MachineId, to: &MachineId, payload: Vec<u8>, qubits: QubitRegister) -> Self {
        Emission {
            out: Out::Message(ClassicalMessage::new(from.clone(), to.clone(), payload)),
            qubits,
        }
    }

    pub fn raw(bytes: Vec<u8>, qubits: QubitRegister) -> Self {
        Emission {
            out: Out::Raw(bytes),
            qubits,
        }
    }

    /// The emitted message if it is well formed, without any sender check.
    pub fn message(&self) -> Option<ClassicalMessage> {
        match &self.out {
            Out::Message(m) => Some(m.clone()),
            Out::Raw(b) => ClassicalMessage::parse(b).ok(),
            Out::Nothing => None,
        }
    }
}

/// Per-activation context shared by all machines of one execution.
pub struct Ctx<'a> {
    /// Security parameter.
    pub k: u32,
    /// The environment's input.
    pub z: &'a [u8],
    pub pool: &'a mut QuantumPool,
    pub rng: &'a mut dyn Branching,
}

impl Ctx<'_> {
    /// Same pool and parameters, different randomness source.
    pub fn with_rng<'b>(&'b mut self, rng: &'b mut dyn Branching) -> Ctx<'b> {
        Ctx {
            k: self.k,
            z: self.z,
            pool: self.pool,
            rng,
        }
    }

    pub fn reborrow(&mut self) -> Ctx<'_> {
        Ctx {
            k: self.k,
            z: self.z,
            pool: self.pool,
            rng: self.rng,
        }
    }
}

/// A machine's reaction function together with its local state.
pub trait Behavior: Send + Sync {
    fn react(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, input: Delivery) -> Emission;

    fn box_clone(&self) -> Box<dyn Behavior>;

    /// True if `react` never touches `ctx.rng`. Exact mode skips the
    /// pre-activation snapshot for such machines.
    fn deterministic(&self) -> bool {
        false
    }
}

impl Clone for Box<dyn Behavior> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}

/// Implements `box_clone` for a `Clone` behavior.
#[macro_export]
macro_rules! behavior_clone {
    () => {
        fn box_clone(&self) -> Box<dyn $crate::netexec::Behavior> {
            Box::new(self.clone())
        }
    };
}

#[derive(Clone)]
pub struct MachineSpec {
    pub id: MachineId,
    /// Set for machines whose reaction only depends on classical content.
    pub classical: bool,
    pub behavior: Box<dyn Behavior>,
}

impl MachineSpec {
    pub fn new(id: MachineId, classical: bool, behavior: impl Behavior + 'static) -> Self {
        MachineSpec {
            id,
            classical,
            behavior: Box::new(behavior),
        }
    }
}

impl fmt::Debug for MachineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MachineSpec")
            .field("id", &self.id)
            .field("classical", &self.classical)
            .finish_non_exhaustive()
    }
}

/// A stateless machine defined by a closure.
#[derive(Clone)]
pub struct FnBehavior<F>(pub F);

impl<F> Behavior for FnBehavior<F>
where
    F: Fn(&MachineId, &mut Ctx<'_>, Delivery) -> Emission + Clone + Send + Sync + 'static,
{
    fn react(&mut self, me: &MachineId, ctx: &mut Ctx<'_>, input: Delivery) -> Emission {
        (self.0)(me, ctx, input)
    }

    behavior_clone!();
}
