//! Exact small-scale quantum state simulation for conjugate-coding protocols.
//!
//! Qubits live in a [`QuantumPool`] owned by a single execution. The pool
//! keeps unentangled qubits in separate dense factors, so product states of
//! many qubits stay cheap; a factor only grows when a multi-qubit unitary
//! touches qubits from different factors. Measurement collapses and splits
//! the measured qubit back out into its own factor.
//!
//! Randomness (including measurement outcomes) is drawn through
//! [`Branching`], which is either a seeded [`Sampler`] or the exhaustive
//! enumerator behind [`enumerate`].

mod branch;
mod pool;
mod state;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use branch::{enumerate, BranchCapExceeded, Branching, Sampler};
pub use pool::{QuantumPool, QubitHandle, QubitRegister};
pub use state::StateVector;

/// Default cap on the size of one dense factor and of one encoded register.
pub const DEFAULT_QUBIT_CAP: usize = 20;
/// Norm and unitarity checks.
pub const CHECK_TOL: f64 = 1e-10;
pub(crate) const UNITARY_TOL: f64 = CHECK_TOL;
/// Renormalization guard.
pub const NORM_TOL: f64 = 1e-12;
/// Outcomes with probability at or below this are treated as impossible.
pub const PROB_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QcoreError {
    #[error("{requested} qubits exceed the cap of {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("targets are repeated, out of range, or do not match the matrix")]
    BadTargets,
    #[error("unknown qubit handle {0}")]
    UnknownHandle(u32),
    #[error("state has zero norm")]
    ZeroState,
}

/// A conjugate-coding basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// Computational basis, written `+`.
    #[serde(rename = "+")]
    Plus,
    /// Diagonal basis, written `x`.
    #[serde(rename = "x")]
    Times,
}

impl Basis {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Basis::Times
        } else {
            Basis::Plus
        }
    }

    pub fn as_bit(self) -> bool {
        self == Basis::Times
    }

    pub fn symbol(self) -> u8 {
        match self {
            Basis::Plus => b'+',
            Basis::Times => b'x',
        }
    }

    pub fn from_symbol(c: u8) -> Option<Self> {
        match c {
            b'+' => Some(Basis::Plus),
            b'x' => Some(Basis::Times),
            _ => None,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if *self == Basis::Plus { "+" } else { "x" })
    }
}

/// Serializes a basis string as `+`/`x` symbols.
pub fn bases_to_ascii(bases: &[Basis]) -> Vec<u8> {
    bases.iter().map(|b| b.symbol()).collect()
}

pub fn bases_from_ascii(bytes: &[u8]) -> Option<Vec<Basis>> {
    bytes.iter().map(|&c| Basis::from_symbol(c)).collect()
}

/// Common gates as row-major matrices.
pub mod gates {
    use num_complex::Complex64;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    pub fn identity(qubits: usize) -> Vec<Complex64> {
        let dim = 1 << qubits;
        (0..dim * dim)
            .map(|i| if i / dim == i % dim { r(1.0) } else { r(0.0) })
            .collect()
    }

    pub fn hadamard() -> Vec<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![r(h), r(h), r(h), r(-h)]
    }

    pub fn x() -> Vec<Complex64> {
        vec![r(0.0), r(1.0), r(1.0), r(0.0)]
    }

    pub fn z() -> Vec<Complex64> {
        vec![r(1.0), r(0.0), r(0.0), r(-1.0)]
    }

    /// Control is the first target.
    pub fn cnot() -> Vec<Complex64> {
        let mut m = vec![r(0.0); 16];
        m[0] = r(1.0);
        m[5] = r(1.0);
        m[11] = r(1.0);
        m[14] = r(1.0);
        m
    }
}
