//! Toeplitz hashing over GF(2).

use crate::bits::Bits;
use crate::qcore::Branching;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HashError {
    #[error("input of length {got} exceeds the declared length {declared}")]
    LengthMismatch { declared: usize, got: usize },
    #[error("expected {expected} diagonal bits, got {got}")]
    BadDiagonals { expected: usize, got: usize },
}

/// An `ell x input_len` Toeplitz matrix, `T[r][j] = d[r - j + input_len - 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashFunction {
    diagonals: Bits,
    input_len: usize,
    ell: usize,
}

fn diag_len(input_len: usize, ell: usize) -> usize {
    (input_len + ell).saturating_sub(1)
}

/// Declared input length used for a retained set of `set_size` positions:
/// shorter inputs are zero-padded up to `ell`.
pub fn declared_len(set_size: usize, ell: usize) -> usize {
    set_size.max(ell)
}

impl HashFunction {
    pub fn sample(input_len: usize, ell: usize, rng: &mut dyn Branching) -> Self {
        HashFunction {
            diagonals: rng.bits(diag_len(input_len, ell)),
            input_len,
            ell,
        }
    }

    pub fn from_diagonals(diagonals: Bits, input_len: usize, ell: usize) -> Result<Self, HashError> {
        let expected = diag_len(input_len, ell);
        if diagonals.len() != expected {
            return Err(HashError::BadDiagonals {
                expected,
                got: diagonals.len(),
            });
        }
        Ok(HashFunction {
            diagonals,
            input_len,
            ell,
        })
    }

    pub fn diagonals(&self) -> &Bits {
        &self.diagonals
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Matrix-vector product; `x` is zero-padded on the right.
    pub fn eval(&self, x: &Bits) -> Result<Bits, HashError> {
        if x.len() > self.input_len {
            return Err(HashError::LengthMismatch {
                declared: self.input_len,
                got: x.len(),
            });
        }
        let d = self.input_len;
        Ok((0..self.ell)
            .map(|r| {
                x.iter()
                    .enumerate()
                    .filter(|(_, xj)| *xj)
                    .fold(false, |acc, (j, _)| acc ^ self.diagonals[r + d - 1 - j])
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{enumerate, Sampler};
    use proptest::prelude::*;

    #[test]
    fn zero_diagonals_give_zero_map() {
        let f = HashFunction::from_diagonals(Bits::zeros(5), 4, 2).unwrap();
        assert_eq!(f.eval(&"1011".parse().unwrap()).unwrap(), Bits::zeros(2));
    }

    #[test]
    fn length_checks() {
        let f = HashFunction::from_diagonals(Bits::zeros(3), 2, 2).unwrap();
        assert!(f.eval(&"101".parse().unwrap()).is_err());
        assert_eq!(f.eval(&Bits::zeros(0)).unwrap(), Bits::zeros(2));
        assert!(HashFunction::from_diagonals(Bits::zeros(2), 2, 2).is_err());
    }

    #[test]
    fn padding_matches_explicit_zeros() {
        let f = HashFunction::sample(5, 3, &mut Sampler::new(4));
        let x: Bits = "101".parse().unwrap();
        let padded: Bits = "10100".parse().unwrap();
        assert_eq!(f.eval(&x).unwrap(), f.eval(&padded).unwrap());
    }

    #[test]
    fn matrix_entries() {
        // T = [[d1, d0], [d2, d1]] for d = d0 d1 d2
        let f = HashFunction::from_diagonals("011".parse().unwrap(), 2, 2).unwrap();
        assert_eq!(f.eval(&"10".parse().unwrap()).unwrap().to_string(), "11");
        assert_eq!(f.eval(&"01".parse().unwrap()).unwrap().to_string(), "01");
    }

    #[test]
    fn universal_by_enumeration() {
        // Exact collision probability over all diagonals, every pair x != y.
        let (len, ell) = (3, 2);
        for x in 0..8u64 {
            for y in 0..8u64 {
                if x == y {
                    continue;
                }
                let (bx, by) = (Bits::from_u64(x, len), Bits::from_u64(y, len));
                let mut coll = 0.0;
                enumerate(
                    1 << 10,
                    |b| {
                        let f = HashFunction::sample(len, ell, b);
                        f.eval(&bx).unwrap() == f.eval(&by).unwrap()
                    },
                    |c, p| {
                        if c {
                            coll += p
                        }
                    },
                )
                .unwrap();
                assert!((coll - 0.25).abs() < 1e-12, "pair {x} {y}: {coll}");
            }
        }
    }

    proptest! {
        #[test]
        fn linear(seed in any::<u64>(), x in 0u64..256, y in 0u64..256) {
            let f = HashFunction::sample(8, 3, &mut Sampler::new(seed));
            let (bx, by) = (Bits::from_u64(x, 8), Bits::from_u64(y, 8));
            let lhs = f.eval(&(&bx ^ &by)).unwrap();
            let rhs = &f.eval(&bx).unwrap() ^ &f.eval(&by).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert!(f.eval(&Bits::zeros(8)).unwrap().is_zero());
        }
    }
}
