use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{MachineId, MachineSpec, NetError};

/// A set of machines with pairwise-distinct ids and a designated set of
/// protocol parties. Executing it requires an `environment` machine.
#[derive(Clone, Debug)]
pub struct Network {
    machines: Vec<MachineSpec>,
    index: Arc<BTreeMap<MachineId, usize>>,
    parties: BTreeSet<MachineId>,
}

impl Network {
    pub fn new(
        machines: Vec<MachineSpec>,
        parties: impl IntoIterator<Item = MachineId>,
    ) -> Result<Self, NetError> {
        let mut index = BTreeMap::new();
        for (i, m) in machines.iter().enumerate() {
            if m.id.is_epsilon() {
                return Err(NetError::EmptyId);
            }
            if index.insert(m.id.clone(), i).is_some() {
                return Err(NetError::DuplicateId(m.id.to_string()));
            }
        }
        let parties: BTreeSet<MachineId> = parties.into_iter().collect();
        if let Some(p) = parties.iter().find(|p| !index.contains_key(*p)) {
            return Err(NetError::UnknownParty(p.to_string()));
        }
        Ok(Network {
            machines,
            index: Arc::new(index),
            parties,
        })
    }

    pub fn machines(&self) -> &[MachineSpec] {
        &self.machines
    }

    pub fn parties(&self) -> &BTreeSet<MachineId> {
        &self.parties
    }

    pub fn ids(&self) -> impl Iterator<Item = &MachineId> {
        self.machines.iter().map(|m| &m.id)
    }

    pub fn contains(&self, id: &MachineId) -> bool {
        self.index.contains_key(id)
    }

    pub fn get(&self, id: &MachineId) -> Option<&MachineSpec> {
        self.index.get(id).map(|&i| &self.machines[i])
    }

    pub(crate) fn position(&self, id: &MachineId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Adds a machine (e.g. an environment or adversary).
    pub fn with(self, machine: MachineSpec) -> Result<Self, NetError> {
        let parties = self.parties.clone();
        let mut machines = self.machines;
        machines.push(machine);
        Network::new(machines, parties)
    }

    /// Replaces the machine with the same id, keeping party membership.
    pub fn replace(self, machine: MachineSpec) -> Result<Self, NetError> {
        let i = self
            .position(&machine.id)
            .ok_or_else(|| NetError::UnknownParty(machine.id.to_string()))?;
        let mut net = self;
        net.machines[i] = machine;
        Ok(net)
    }

    /// Drops a machine; it also stops being a party.
    pub fn without(self, id: &MachineId) -> Result<Self, NetError> {
        let mut parties = self.parties.clone();
        parties.remove(id);
        let machines = self.machines.into_iter().filter(|m| &m.id != id).collect();
        Network::new(machines, parties)
    }

    /// Applies `f` to every machine, keeping ids and parties.
    pub fn map_machines(self, mut f: impl FnMut(MachineSpec) -> MachineSpec) -> Result<Self, NetError> {
        let parties = self.parties.clone();
        Network::new(self.machines.into_iter().map(&mut f).collect(), parties)
    }
}
