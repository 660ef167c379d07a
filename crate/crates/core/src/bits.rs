//! Classical bitstrings and index subsets.

use std::fmt;
use std::ops::{BitXor, Index};

/// A bitstring, rendered and transmitted as ASCII `'0'`/`'1'`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Bits(vec![false; len])
    }

    /// Low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        Bits((0..len).rev().map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|b| !b)
    }

    /// Bits at the positions listed in `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Bits {
        Bits(indices.iter().map(|&i| self.0[i]).collect())
    }

    /// Bits whose position is not in `mask` (`mask[i] == true` removes bit `i`).
    pub fn without(&self, mask: &IndexSet) -> Bits {
        Bits(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| !mask.contains(*i))
                .map(|(_, &b)| b)
                .collect(),
        )
    }

    pub fn to_ascii(&self) -> Vec<u8> {
        self.0.iter().map(|&b| if b { b'1' } else { b'0' }).collect()
    }

    pub fn from_ascii(bytes: &[u8]) -> Option<Self> {
        bytes
            .iter()
            .map(|c| match c {
                b'0' => Some(false),
                b'1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Bits)
    }

    pub fn to_u64(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }
}

impl Index<usize> for Bits {
    type Output = bool;

    fn index(&self, i: usize) -> &bool {
        &self.0[i]
    }
}

impl BitXor for &Bits {
    type Output = Bits;

    /// Panics if the lengths differ.
    fn bitxor(self, rhs: &Bits) -> Bits {
        assert_eq!(self.len(), rhs.len(), "xor of bitstrings of unequal length");
        Bits(self.0.iter().zip(&rhs.0).map(|(a, b)| a ^ b).collect())
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Bits(iter.into_iter().collect())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Bits {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Bits::from_ascii(s.as_bytes()).ok_or(())
    }
}

/// A subset of `{0, .., universe-1}` stored as a membership mask.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet {
    mask: Vec<bool>,
}

impl IndexSet {
    pub fn empty(universe: usize) -> Self {
        IndexSet {
            mask: vec![false; universe],
        }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        IndexSet { mask }
    }

    /// Returns `None` if an index is out of range or repeated.
    pub fn from_indices(universe: usize, indices: &[usize]) -> Option<Self> {
        let mut set = IndexSet::empty(universe);
        for &i in indices {
            if i >= universe || set.mask[i] {
                return None;
            }
            set.mask[i] = true;
        }
        Some(set)
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn complement(&self) -> IndexSet {
        IndexSet {
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| !(a & b))
    }

    /// Mask form, `'1'` for members.
    pub fn to_ascii(&self) -> Vec<u8> {
        Bits(self.mask.clone()).to_ascii()
    }

    pub fn from_ascii(bytes: &[u8]) -> Option<Self> {
        Bits::from_ascii(bytes).map(|b| IndexSet { mask: b.0 })
    }
}

/// Whether `(a, b)` partitions `{0, .., n-1}`.
pub fn is_partition(a: &IndexSet, b: &IndexSet, n: usize) -> bool {
    a.universe() == n && b.universe() == n && a.is_disjoint(b) && a.len() + b.len() == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_round_trip() {
        let b: Bits = "01101".parse().unwrap();
        assert_eq!(b.to_ascii(), b"01101");
        assert_eq!(b.to_string(), "01101");
        assert!(Bits::from_ascii(b"012").is_none());
    }

    #[test]
    fn u64_conversion_is_msb_first() {
        assert_eq!(Bits::from_u64(0b110, 3).to_string(), "110");
        assert_eq!(Bits::from_u64(5, 4).to_u64(), 5);
    }

    #[test]
    fn select_and_without() {
        let b: Bits = "10110".parse().unwrap();
        assert_eq!(b.select(&[4, 0]).to_string(), "01");
        let t = IndexSet::from_indices(5, &[1, 3]).unwrap();
        assert_eq!(b.without(&t).to_string(), "110");
    }

    #[test]
    fn partition_check() {
        let a = IndexSet::from_indices(3, &[0, 2]).unwrap();
        let b = a.complement();
        assert!(is_partition(&a, &b, 3));
        assert!(!is_partition(&a, &a, 3));
        assert!(IndexSet::from_indices(3, &[1, 1]).is_none());
        assert!(IndexSet::from_indices(3, &[3]).is_none());
    }
}
