use std::fmt;
use std::sync::{Arc, OnceLock};

use super::NetError;

/// Identity of a machine. Nonempty, except for the `ε` placeholder used in
/// the reset register `(ε, environment, ε)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MachineId(Arc<[u8]>);

pub const ENVIRONMENT: &str = "environment";
pub const ADVERSARY: &str = "adversary";

static ENV_ID: OnceLock<MachineId> = OnceLock::new();
static ADV_ID: OnceLock<MachineId> = OnceLock::new();
static EPS_ID: OnceLock<MachineId> = OnceLock::new();

impl MachineId {
    pub fn new(bytes: impl AsRef<[u8]>) -> Result<Self, NetError> {
        let bytes = bytes.as_ref();
        if bytes.is_empty() {
            return Err(NetError::EmptyId);
        }
        Ok(MachineId(Arc::from(bytes)))
    }

    /// Panics on the empty string; for literal ids.
    pub fn named(name: &str) -> Self {
        MachineId::new(name).expect("machine ids are nonempty")
    }

    pub fn epsilon() -> Self {
        EPS_ID.get_or_init(|| MachineId(Arc::from(&b""[..]))).clone()
    }

    pub fn environment() -> Self {
        ENV_ID.get_or_init(|| MachineId::named(ENVIRONMENT)).clone()
    }

    pub fn adversary() -> Self {
        ADV_ID.get_or_init(|| MachineId::named(ADVERSARY)).clone()
    }

    /// Interprets a wire field; empty means `ε`.
    pub(crate) fn from_field(bytes: &[u8]) -> Self {
        if bytes.is_empty() {
            MachineId::epsilon()
        } else {
            MachineId(Arc::from(bytes))
        }
    }

    pub fn is_epsilon(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_environment(&self) -> bool {
        &*self.0 == ENVIRONMENT.as_bytes()
    }

    pub fn is_adversary(&self) -> bool {
        &*self.0 == ADVERSARY.as_bytes()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// `"{id}#{instance}"`.
    pub fn tagged(&self, instance: usize) -> MachineId {
        let mut v = self.0.to_vec();
        v.extend_from_slice(format!("#{instance}").as_bytes());
        MachineId(Arc::from(v))
    }

    /// Inverse of [`MachineId::tagged`] for the given instance.
    pub fn untagged(&self, instance: usize) -> Option<MachineId> {
        let suffix = format!("#{instance}");
        let b = self.as_bytes();
        if b.len() > suffix.len() && b.ends_with(suffix.as_bytes()) {
            Some(MachineId(Arc::from(&b[..b.len() - suffix.len()])))
        } else {
            None
        }
    }
}

impl fmt::Display for MachineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_epsilon() {
            f.write_str("ε")
        } else {
            f.write_str(&String::from_utf8_lossy(&self.0))
        }
    }
}

impl fmt::Debug for MachineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<&str> for MachineId {
    fn from(s: &str) -> Self {
        MachineId::named(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_rejected() {
        assert!(MachineId::new("").is_err());
        assert!(MachineId::epsilon().is_epsilon());
    }

    #[test]
    fn tagging_round_trips() {
        let a = MachineId::named("alice");
        let t = a.tagged(3);
        assert_eq!(t.to_string(), "alice#3");
        assert_eq!(t.untagged(3), Some(a.clone()));
        assert_eq!(t.untagged(1), None);
        assert_eq!(a.untagged(3), None);
    }
}
