//! The BB84-based oblivious transfer protocols: `πQROT` over commitment
//! functionalities, its variant with a plain commitment protocol, `πQOT`
//! with sender-chosen strings, and the classical `πQOT'` over `F_ROT`.
//!
//! Wire conventions. Bits travel as ASCII `0`/`1`, bases as `+`/`x`, index
//! sets as ASCII masks. Commitment `j` covers `theta_i` when `j = 2i` and
//! `x_i` when `j = 2i + 1`; a committed basis is `+ = 0`, `x = 1`.

mod alice;
mod bob;
mod hash;
mod networks;
mod params;
mod qot_prime;

pub use alice::{Alice, AliceDeviation, AlicePhase};
pub use bob::{Bob, BobPhase, BobStrategy};
pub use hash::{declared_len, HashError, HashFunction};
pub use networks::{
    ideal_ot, ideal_rot, pi_qot, pi_qot_prime, pi_qrot, pi_qrot_com, protocol_alice, protocol_bob,
};
pub use params::{ParamError, ProtocolParams};
pub use qot_prime::{QotPrimeAlice, QotPrimeBob};

use crate::bits::IndexSet;
use crate::netexec::MachineId;

/// Random strings (`πQROT`) or sender-chosen strings (`πQOT`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Rot,
    Ot,
}

/// How Bob's commitments reach Alice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommitStyle {
    /// One `F_COM` instance per committed bit.
    Functionality,
    /// Values in the clear: commit and open both carry the bit.
    Trivial,
}

pub fn alice_id() -> MachineId {
    MachineId::named("alice")
}

pub fn bob_id() -> MachineId {
    MachineId::named("bob")
}

pub fn frot_id() -> MachineId {
    MachineId::named("frot")
}

pub fn fot_id() -> MachineId {
    MachineId::named("fot")
}

/// Id of the commitment functionality for commitment `j`.
pub fn fcom_id(j: usize) -> MachineId {
    let kind = if j % 2 == 0 { "theta" } else { "x" };
    MachineId::named(&format!("fcom/{kind}/{}", j / 2))
}

/// Inverse of [`fcom_id`].
pub fn fcom_index(id: &MachineId) -> Option<usize> {
    let s = std::str::from_utf8(id.as_bytes()).ok()?;
    let rest = s.strip_prefix("fcom/")?;
    let (kind, i) = rest.split_once('/')?;
    if i.starts_with('+') || (i.len() > 1 && i.starts_with('0')) {
        return None;
    }
    let i: usize = i.parse().ok()?;
    match kind {
        "theta" => Some(2 * i),
        "x" => Some(2 * i + 1),
        _ => None,
    }
}

pub(crate) fn index_field(j: usize) -> Vec<u8> {
    j.to_string().into_bytes()
}

pub(crate) fn parse_index(field: &[u8]) -> Option<usize> {
    let s = std::str::from_utf8(field).ok()?;
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return None;
    }
    s.parse().ok()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// The `rank`-th `size`-subset of `0..universe` in lexicographic order.
pub fn unrank_subset(universe: usize, size: usize, mut rank: usize) -> IndexSet {
    assert!(rank < binomial(universe, size), "rank out of range");
    let mut chosen = Vec::with_capacity(size);
    let mut next = 0;
    for left in (1..=size).rev() {
        loop {
            let with = binomial(universe - next - 1, left - 1);
            if rank < with {
                chosen.push(next);
                next += 1;
                break;
            }
            rank -= with;
            next += 1;
        }
    }
    IndexSet::from_indices(universe, &chosen).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fcom_ids_round_trip() {
        for j in 0..40 {
            assert_eq!(fcom_index(&fcom_id(j)), Some(j));
        }
        assert_eq!(fcom_id(5).to_string(), "fcom/x/2");
        assert_eq!(fcom_index(&"fcom/y/1".into()), None);
        assert_eq!(fcom_index(&"fcom/x/01".into()), None);
        assert_eq!(fcom_index(&"bob".into()), None);
    }

    #[test]
    fn unranking_is_a_bijection() {
        let (n, k) = (6, 3);
        let all: std::collections::BTreeSet<Vec<usize>> =
            (0..binomial(n, k)).map(|r| unrank_subset(n, k, r).indices()).collect();
        assert_eq!(all.len(), 20);
        assert!(all.iter().all(|s| s.len() == k));
        assert_eq!(unrank_subset(4, 2, 0).indices(), vec![0, 1]);
        assert_eq!(unrank_subset(4, 2, 5).indices(), vec![2, 3]);
        assert_eq!(unrank_subset(3, 0, 0).indices(), Vec::<usize>::new());
    }

    #[test]
    fn index_fields() {
        assert_eq!(parse_index(&index_field(17)), Some(17));
        assert_eq!(parse_index(b"07"), None);
        assert_eq!(parse_index(b""), None);
        assert_eq!(parse_index(b"-1"), None);
    }
}
