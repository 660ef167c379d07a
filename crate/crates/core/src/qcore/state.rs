use num_complex::Complex64;

use super::{QcoreError, NORM_TOL, UNITARY_TOL};

/// Dense pure state of `num_qubits` qubits.
///
/// Qubit position 0 is the most significant bit of the amplitude index, so
/// `|01>` is amplitude index 1.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        StateVector {
            num_qubits,
            amplitudes,
        }
    }

    /// Normalizes the given amplitudes. Fails if the length is not a power of
    /// two or the vector is zero.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, QcoreError> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(QcoreError::LengthMismatch {
                expected: len.next_power_of_two(),
                got: len,
            });
        }
        let mut sv = StateVector {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        };
        if sv.norm() < NORM_TOL {
            return Err(QcoreError::ZeroState);
        }
        sv.renormalize();
        Ok(sv)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub(crate) fn renormalize(&mut self) {
        let n = self.norm();
        for a in &mut self.amplitudes {
            *a /= n;
        }
    }

    fn mask(&self, pos: usize) -> usize {
        1 << (self.num_qubits - 1 - pos)
    }

    /// `self ⊗ other`, with `other`'s qubits appended after ours.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes,
        }
    }

    /// Applies a `2^t x 2^t` row-major matrix to the qubits at `targets`;
    /// `targets[0]` is the most significant bit of the matrix index.
    pub fn apply(&mut self, targets: &[usize], matrix: &[Complex64]) -> Result<(), QcoreError> {
        let t = targets.len();
        let dim = 1usize << t;
        if t == 0 || matrix.len() != dim * dim {
            return Err(QcoreError::BadTargets);
        }
        let mut seen = 0usize;
        for &q in targets {
            if q >= self.num_qubits || seen & (1 << q) != 0 {
                return Err(QcoreError::BadTargets);
            }
            seen |= 1 << q;
        }
        if !is_unitary(matrix, dim) {
            return Err(QcoreError::NotUnitary);
        }
        let masks: Vec<usize> = targets.iter().map(|&q| self.mask(q)).collect();
        let all: usize = masks.iter().sum();
        let offsets: Vec<usize> = (0..dim)
            .map(|j| {
                (0..t)
                    .filter(|&b| j & (1 << (t - 1 - b)) != 0)
                    .map(|b| masks[b])
                    .sum()
            })
            .collect();
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amplitudes.len() {
            if base & all != 0 {
                continue;
            }
            for (j, off) in offsets.iter().enumerate() {
                buf[j] = self.amplitudes[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let row = &matrix[r * dim..(r + 1) * dim];
                self.amplitudes[base | off] = row.iter().zip(&buf).map(|(m, a)| m * a).sum();
            }
        }
        Ok(())
    }

    /// Hadamard on one position.
    pub(crate) fn hadamard(&mut self, pos: usize) {
        let m = self.mask(pos);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amplitudes.len() {
            if i & m == 0 {
                let (a, b) = (self.amplitudes[i], self.amplitudes[i | m]);
                self.amplitudes[i] = (a + b) * h;
                self.amplitudes[i | m] = (a - b) * h;
            }
        }
    }

    /// Probability that position `pos` reads 1 in the computational basis.
    pub fn prob_one(&self, pos: usize) -> f64 {
        let m = self.mask(pos);
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects position `pos` onto `outcome` and removes it, returning the
    /// normalized state of the remaining qubits.
    pub(crate) fn project_out(&self, pos: usize, outcome: bool) -> StateVector {
        let m = self.mask(pos);
        let want = if outcome { m } else { 0 };
        let amplitudes: Vec<Complex64> = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m == want)
            .map(|(_, a)| *a)
            .collect();
        let mut sv = StateVector {
            num_qubits: self.num_qubits - 1,
            amplitudes,
        };
        sv.renormalize();
        sv
    }

    /// Marginal distribution of the computational-basis readout of `positions`,
    /// indexed by the bits read in `positions` order (first = most significant).
    pub fn marginal(&self, positions: &[usize]) -> Vec<f64> {
        let masks: Vec<usize> = positions.iter().map(|&q| self.mask(q)).collect();
        let mut out = vec![0.0; 1 << positions.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let key = masks
                .iter()
                .fold(0usize, |acc, m| (acc << 1) | (i & m != 0) as usize);
            out[key] += a.norm_sqr();
        }
        out
    }
}

fn is_unitary(m: &[Complex64], dim: usize) -> bool {
    for r in 0..dim {
        for c in 0..dim {
            let dot: Complex64 = (0..dim).map(|k| m[k * dim + r].conj() * m[k * dim + c]).sum();
            let want = if r == c { 1.0 } else { 0.0 };
            if (dot - Complex64::new(want, 0.0)).norm() > UNITARY_TOL {
                return false;
            }
        }
    }
    true
}
