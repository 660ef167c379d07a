//! Simulation of a quantum network execution model and a conjugate-coding
//! oblivious transfer protocol running inside it.

pub mod adversim;
pub mod bits;
pub mod idealfunc;
pub mod netexec;
pub mod otproto;
pub mod qcore;
