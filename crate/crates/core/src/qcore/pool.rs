use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{Basis, Branching, QcoreError, StateVector, DEFAULT_QUBIT_CAP, PROB_EPS};
use crate::bits::Bits;

/// Opaque qubit identifier, unique for the lifetime of a pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitHandle(u32);

impl QubitHandle {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for QubitHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// An ordered list of distinct qubit handles; the quantum part of a message.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QubitRegister(Vec<QubitHandle>);

impl QubitRegister {
    pub fn empty() -> Self {
        QubitRegister(Vec::new())
    }

    /// Fails with `BadTargets` on repeated handles.
    pub fn new(handles: Vec<QubitHandle>) -> Result<Self, QcoreError> {
        let mut sorted = handles.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != handles.len() {
            return Err(QcoreError::BadTargets);
        }
        Ok(QubitRegister(handles))
    }

    pub fn handles(&self) -> &[QubitHandle] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sub-register of the given positions.
    pub fn select(&self, positions: &[usize]) -> QubitRegister {
        QubitRegister(positions.iter().map(|&i| self.0[i]).collect())
    }

    /// Concatenation; fails if the registers share a handle.
    pub fn concat(&self, other: &QubitRegister) -> Result<QubitRegister, QcoreError> {
        QubitRegister::new(self.0.iter().chain(&other.0).copied().collect())
    }
}

#[derive(Clone, Debug)]
struct Factor {
    qubits: Vec<QubitHandle>,
    state: StateVector,
}

/// All qubits of one execution, as a product of dense factors.
#[derive(Clone, Debug)]
pub struct QuantumPool {
    cap: usize,
    /// Shared between clones until written.
    factors: Vec<Option<Arc<Factor>>>,
    /// `(factor, position)` for every handle ever allocated.
    location: Vec<(usize, usize)>,
}

impl Default for QuantumPool {
    fn default() -> Self {
        QuantumPool::new(DEFAULT_QUBIT_CAP)
    }
}

impl QuantumPool {
    pub fn new(cap: usize) -> Self {
        QuantumPool {
            cap,
            factors: Vec::new(),
            location: Vec::new(),
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Number of qubits allocated so far.
    pub fn allocated(&self) -> usize {
        self.location.len()
    }

    /// Allocates a fresh qubit in the given single-qubit state.
    pub fn alloc(&mut self, state: StateVector) -> Result<QubitHandle, QcoreError> {
        if state.num_qubits() != 1 {
            return Err(QcoreError::LengthMismatch {
                expected: 1,
                got: state.num_qubits(),
            });
        }
        let h = QubitHandle(self.location.len() as u32);
        self.location.push((self.factors.len(), 0));
        self.factors.push(Some(Arc::new(Factor {
            qubits: vec![h],
            state,
        })));
        Ok(h)
    }

    /// Prepares `|bits>_bases`, one fresh qubit per position.
    pub fn encode_bb84(&mut self, bits: &Bits, bases: &[Basis]) -> Result<QubitRegister, QcoreError> {
        if bits.len() != bases.len() {
            return Err(QcoreError::LengthMismatch {
                expected: bits.len(),
                got: bases.len(),
            });
        }
        if bits.is_empty() {
            return Err(QcoreError::LengthMismatch { expected: 1, got: 0 });
        }
        if bits.len() > self.cap {
            return Err(QcoreError::CapExceeded {
                requested: bits.len(),
                cap: self.cap,
            });
        }
        let handles = bits
            .iter()
            .zip(bases)
            .map(|(x, &b)| self.alloc(bb84_state(x, b)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QubitRegister(handles))
    }

    fn locate(&self, h: QubitHandle) -> Result<(usize, usize), QcoreError> {
        self.location
            .get(h.0 as usize)
            .copied()
            .ok_or(QcoreError::UnknownHandle(h.0))
    }

    fn factor(&self, i: usize) -> &Factor {
        self.factors[i].as_ref().expect("live factor")
    }

    /// Merges the factors holding `handles` into one; returns its index.
    fn merge(&mut self, handles: &[QubitHandle]) -> Result<usize, QcoreError> {
        let mut ids: Vec<usize> = Vec::new();
        for &h in handles {
            let (f, _) = self.locate(h)?;
            if !ids.contains(&f) {
                ids.push(f);
            }
        }
        let total: usize = ids.iter().map(|&f| self.factor(f).qubits.len()).sum();
        if total > self.cap {
            return Err(QcoreError::CapExceeded {
                requested: total,
                cap: self.cap,
            });
        }
        let target = ids[0];
        for &f in &ids[1..] {
            let other = self.factors[f].take().expect("live factor");
            let base = self.factor(target).qubits.len();
            for (pos, q) in other.qubits.iter().enumerate() {
                self.location[q.0 as usize] = (target, base + pos);
            }
            let merged = Arc::make_mut(self.factors[target].as_mut().expect("live factor"));
            merged.state = merged.state.tensor(&other.state);
            merged.qubits.extend_from_slice(&other.qubits);
        }
        Ok(target)
    }

    /// Applies `matrix` to the register positions listed in `targets`.
    pub fn apply_unitary(
        &mut self,
        reg: &QubitRegister,
        targets: &[usize],
        matrix: &[Complex64],
    ) -> Result<(), QcoreError> {
        if targets.is_empty() || targets.iter().any(|&t| t >= reg.len()) {
            return Err(QcoreError::BadTargets);
        }
        let handles: Vec<QubitHandle> = targets.iter().map(|&t| reg.0[t]).collect();
        QubitRegister::new(handles.clone())?;
        // Validate against a scratch state first so failures leave the pool untouched.
        let mut probe = StateVector::zero(handles.len());
        probe.apply(&(0..handles.len()).collect::<Vec<_>>(), matrix)?;
        let f = self.merge(&handles)?;
        let positions: Vec<usize> = handles.iter().map(|h| self.location[h.0 as usize].1).collect();
        let factor = Arc::make_mut(self.factors[f].as_mut().expect("live factor"));
        factor.state.apply(&positions, matrix)
    }

    /// Measures one qubit in `basis`; the qubit is left in the measured basis
    /// state, as its own factor.
    pub fn measure(
        &mut self,
        h: QubitHandle,
        basis: Basis,
        branching: &mut dyn Branching,
    ) -> Result<bool, QcoreError> {
        let (f, pos) = self.locate(h)?;
        let mut state = self.factor(f).state.clone();
        if basis == Basis::Times {
            state.hadamard(pos);
        }
        let marg = state.marginal(&[pos]);
        let outcome = branching.branch(&[marg[0], marg[1]]) == 1;

        let factor = self.factors[f].take().expect("live factor");
        if factor.qubits.len() > 1 {
            let rest_state = state.project_out(pos, outcome);
            let mut rest_qubits = factor.qubits.clone();
            rest_qubits.remove(pos);
            for (p, q) in rest_qubits.iter().enumerate() {
                self.location[q.0 as usize] = (f, p);
            }
            // Undo the basis change on the remaining qubits is unnecessary:
            // the Hadamard only acted on the measured position.
            self.factors[f] = Some(Arc::new(Factor {
                qubits: rest_qubits,
                state: rest_state,
            }));
            self.location[h.0 as usize] = (self.factors.len(), 0);
            self.factors.push(Some(Arc::new(Factor {
                qubits: vec![h],
                state: bb84_state(outcome, basis),
            })));
        } else {
            self.factors[f] = Some(Arc::new(Factor {
                qubits: vec![h],
                state: bb84_state(outcome, basis),
            }));
        }
        Ok(outcome)
    }

    /// Measures each qubit of `reg` in the corresponding basis.
    pub fn measure_in_bases(
        &mut self,
        reg: &QubitRegister,
        bases: &[Basis],
        branching: &mut dyn Branching,
    ) -> Result<Bits, QcoreError> {
        if reg.len() != bases.len() {
            return Err(QcoreError::LengthMismatch {
                expected: reg.len(),
                got: bases.len(),
            });
        }
        reg.0
            .iter()
            .zip(bases)
            .map(|(&h, &b)| self.measure(h, b, branching))
            .collect()
    }

    /// Measures every qubit of `reg` in the computational basis, keeping the
    /// collapsed qubits in the pool.
    pub fn classicalize(&mut self, reg: &QubitRegister, branching: &mut dyn Branching) {
        for &h in &reg.0 {
            self.measure(h, Basis::Plus, branching)
                .expect("register handles belong to this pool");
        }
    }

    /// Born-rule distribution of measuring `reg` in `bases`, without collapsing.
    /// Keys are the outcome bits in register order.
    pub fn exact_outcome_distribution(
        &self,
        reg: &QubitRegister,
        bases: &[Basis],
    ) -> Result<BTreeMap<Bits, f64>, QcoreError> {
        if reg.len() != bases.len() {
            return Err(QcoreError::LengthMismatch {
                expected: reg.len(),
                got: bases.len(),
            });
        }
        // Group register positions by factor.
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for (i, &h) in reg.0.iter().enumerate() {
            let (f, _) = self.locate(h)?;
            match groups.iter_mut().find(|(g, _)| *g == f) {
                Some((_, v)) => v.push(i),
                None => groups.push((f, vec![i])),
            }
        }
        let mut dist: Vec<(Vec<bool>, f64)> = vec![(vec![false; reg.len()], 1.0)];
        for (f, members) in groups {
            let mut state = self.factor(f).state.clone();
            let positions: Vec<usize> = members
                .iter()
                .map(|&i| self.location[reg.0[i].0 as usize].1)
                .collect();
            for (&i, &p) in members.iter().zip(&positions) {
                if bases[i] == Basis::Times {
                    state.hadamard(p);
                }
            }
            let marg = state.marginal(&positions);
            let k = members.len();
            let mut next = Vec::new();
            for (bits, p) in &dist {
                for (key, q) in marg.iter().enumerate() {
                    if *q <= PROB_EPS {
                        continue;
                    }
                    let mut b = bits.clone();
                    for (j, &i) in members.iter().enumerate() {
                        b[i] = key & (1 << (k - 1 - j)) != 0;
                    }
                    next.push((b, p * q));
                }
            }
            dist = next;
        }
        Ok(dist.into_iter().map(|(b, p)| (Bits::new(b), p)).collect())
    }

    /// The joint state of `reg`, in register order. Fails with `BadTargets`
    /// if the register is entangled with qubits outside it.
    pub fn joint_state(&self, reg: &QubitRegister) -> Result<StateVector, QcoreError> {
        let mut order: Vec<usize> = Vec::new();
        for &h in &reg.0 {
            let (f, _) = self.locate(h)?;
            if !order.contains(&f) {
                order.push(f);
            }
        }
        let covered: usize = order.iter().map(|&f| self.factor(f).qubits.len()).sum();
        if covered != reg.len() {
            return Err(QcoreError::BadTargets);
        }
        let mut layout: Vec<QubitHandle> = Vec::new();
        let mut state = StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0)])?;
        for f in order {
            let factor = self.factor(f);
            state = state.tensor(&factor.state);
            layout.extend(&factor.qubits);
        }
        // Permute into register order.
        let n = reg.len();
        let src_pos: Vec<usize> = reg
            .0
            .iter()
            .map(|h| layout.iter().position(|x| x == h).expect("covered"))
            .collect();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (dst, a) in amps.iter_mut().enumerate() {
            let mut src = 0usize;
            for (j, &sp) in src_pos.iter().enumerate() {
                if dst & (1 << (n - 1 - j)) != 0 {
                    src |= 1 << (n - 1 - sp);
                }
            }
            *a = state.amplitudes()[src];
        }
        StateVector::from_amplitudes(amps)
    }

    /// Largest `| ||psi|| - 1 |` over all factors.
    pub fn max_norm_deviation(&self) -> f64 {
        self.factors
            .iter()
            .flatten()
            .map(|f| (f.state.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Size of the largest dense factor.
    pub fn largest_factor(&self) -> usize {
        self.factors
            .iter()
            .flatten()
            .map(|f| f.qubits.len())
            .max()
            .unwrap_or(0)
    }
}

/// `|x>_basis` as a single-qubit state.
pub fn bb84_state(x: bool, basis: Basis) -> StateVector {
    let mut s = StateVector::zero(1);
    if x {
        s.apply(&[0], &super::gates::x()).expect("valid gate");
    }
    if basis == Basis::Times {
        s.hadamard(0);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{enumerate, gates, Sampler};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn amps(s: &StateVector) -> Vec<(f64, f64)> {
        s.amplitudes().iter().map(|a| (a.re, a.im)).collect()
    }

    fn close(a: &[(f64, f64)], b: &[f64]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|((re, im), want)| (re - want).abs() < 1e-12 && im.abs() < 1e-12)
    }

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn encode_single_qubits() {
        let mut pool = QuantumPool::default();
        let r = pool.encode_bb84(&bits("0"), &[Basis::Plus]).unwrap();
        assert!(close(&amps(&pool.joint_state(&r).unwrap()), &[1.0, 0.0]));
        let r = pool.encode_bb84(&bits("1"), &[Basis::Times]).unwrap();
        assert!(close(&amps(&pool.joint_state(&r).unwrap()), &[H, -H]));
        let r = pool.encode_bb84(&bits("00"), &[Basis::Plus, Basis::Plus]).unwrap();
        assert!(close(&amps(&pool.joint_state(&r).unwrap()), &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn encode_errors() {
        let mut pool = QuantumPool::new(2);
        assert_eq!(
            pool.encode_bb84(&bits("000"), &[Basis::Plus; 3]),
            Err(QcoreError::CapExceeded { requested: 3, cap: 2 })
        );
        assert!(matches!(
            pool.encode_bb84(&bits("00"), &[Basis::Plus]),
            Err(QcoreError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn same_basis_measurement_is_deterministic() {
        let mut pool = QuantumPool::default();
        let r = pool.encode_bb84(&bits("1"), &[Basis::Times]).unwrap();
        let d = pool.exact_outcome_distribution(&r, &[Basis::Times]).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[&bits("1")] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_basis_is_uniform() {
        let mut pool = QuantumPool::default();
        let r = pool.encode_bb84(&bits("0"), &[Basis::Times]).unwrap();
        let d = pool.exact_outcome_distribution(&r, &[Basis::Plus]).unwrap();
        assert!((d[&bits("0")] - 0.5).abs() < 1e-12);
        assert!((d[&bits("1")] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_register_measurement() {
        let mut pool = QuantumPool::default();
        let r = pool.encode_bb84(&bits("01"), &[Basis::Plus, Basis::Plus]).unwrap();
        let out = pool
            .measure_in_bases(&r, &[Basis::Plus, Basis::Plus], &mut Sampler::new(0))
            .unwrap();
        assert_eq!(out, bits("01"));
    }

    #[test]
    fn mixed_bases_distribution() {
        // |0>_+ ⊗ |1>_x read in ++: first qubit fixed at 0, second uniform.
        let mut pool = QuantumPool::default();
        let r = pool.encode_bb84(&bits("01"), &[Basis::Plus, Basis::Times]).unwrap();
        let d = pool.exact_outcome_distribution(&r, &[Basis::Plus, Basis::Plus]).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d[&bits("00")] - 0.5).abs() < 1e-12);
        assert!((d[&bits("01")] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn measurement_enumerates_branches() {
        let mut leaves = Vec::new();
        enumerate(
            10,
            |b| {
                let mut pool = QuantumPool::default();
                let r = pool.encode_bb84(&bits("0"), &[Basis::Times]).unwrap();
                pool.measure_in_bases(&r, &[Basis::Plus], b).unwrap()
            },
            |o, p| leaves.push((o, p)),
        )
        .unwrap();
        assert_eq!(leaves.len(), 2);
        assert!(leaves.iter().all(|(_, p)| (p - 0.5).abs() < 1e-12));
    }

    #[test]
    fn measuring_collapses() {
        let mut pool = QuantumPool::default();
        let r = pool.encode_bb84(&bits("0"), &[Basis::Times]).unwrap();
        let mut s = Sampler::new(3);
        let first = pool.measure_in_bases(&r, &[Basis::Plus], &mut s).unwrap();
        for _ in 0..10 {
            assert_eq!(pool.measure_in_bases(&r, &[Basis::Plus], &mut s).unwrap(), first);
        }
    }

    #[test]
    fn classicalize_twice_matches_once() {
        let dist = |times: usize| {
            let mut d = BTreeMap::new();
            enumerate(
                100,
                |b| {
                    let mut pool = QuantumPool::default();
                    let r = pool.encode_bb84(&bits("0"), &[Basis::Times]).unwrap();
                    for _ in 0..times {
                        pool.classicalize(&r, b);
                    }
                    pool.exact_outcome_distribution(&r, &[Basis::Plus]).unwrap()
                },
                |o, p| {
                    for (k, q) in o {
                        *d.entry(k).or_insert(0.0) += p * q;
                    }
                },
            )
            .unwrap();
            d
        };
        let once = dist(1);
        let twice = dist(2);
        assert_eq!(once.len(), 2);
        for (k, p) in &once {
            assert!((p - twice[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn entangling_merges_and_measurement_splits() {
        let mut pool = QuantumPool::default();
        let r = pool.encode_bb84(&bits("00"), &[Basis::Times, Basis::Plus]).unwrap();
        pool.apply_unitary(&r, &[0, 1], &gates::cnot()).unwrap();
        assert_eq!(pool.largest_factor(), 2);
        let d = pool.exact_outcome_distribution(&r, &[Basis::Plus, Basis::Plus]).unwrap();
        assert_eq!(d.keys().cloned().collect::<Vec<_>>(), vec![bits("00"), bits("11")]);
        let mut s = Sampler::new(9);
        let a = pool.measure(r.handles()[0], Basis::Plus, &mut s).unwrap();
        assert_eq!(pool.largest_factor(), 1);
        let b = pool.measure(r.handles()[1], Basis::Plus, &mut s).unwrap();
        assert_eq!(a, b);
        assert!(pool.max_norm_deviation() < 1e-10);
    }

    #[test]
    fn unitary_errors_leave_pool_intact() {
        let mut pool = QuantumPool::new(2);
        let r = pool.encode_bb84(&bits("000"), &[Basis::Plus; 3]);
        assert!(r.is_err());
        let r = pool.encode_bb84(&bits("00"), &[Basis::Plus; 2]).unwrap();
        let bad = vec![Complex64::new(2.0, 0.0); 4];
        assert_eq!(pool.apply_unitary(&r, &[0], &bad), Err(QcoreError::NotUnitary));
        assert_eq!(pool.apply_unitary(&r, &[2], &gates::x()), Err(QcoreError::BadTargets));
        assert_eq!(pool.largest_factor(), 1);
    }

    #[test]
    fn hadamard_then_x() {
        let mut pool = QuantumPool::default();
        let r = pool.encode_bb84(&bits("0"), &[Basis::Plus]).unwrap();
        pool.apply_unitary(&r, &[0], &gates::hadamard()).unwrap();
        assert!(close(&amps(&pool.joint_state(&r).unwrap()), &[H, H]));
        let r2 = pool.encode_bb84(&bits("0"), &[Basis::Plus]).unwrap();
        pool.apply_unitary(&r2, &[0], &gates::x()).unwrap();
        assert!(close(&amps(&pool.joint_state(&r2).unwrap()), &[0.0, 1.0]));
    }
}
