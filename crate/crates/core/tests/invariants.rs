use num_complex::Complex64;
use proptest::prelude::*;

use quclab_core::bits::Bits;
use quclab_core::qcore::{enumerate, gates, Basis, Branching, QuantumPool, Sampler, StateVector};

fn basis(b: bool) -> Basis {
    Basis::from_bit(b)
}

/// Random product of H, X, Z and CNOT on three qubits.
fn circuit() -> impl Strategy<Value = Vec<(u8, usize, usize)>> {
    prop::collection::vec((0u8..4, 0usize..3, 0usize..3), 0..12)
}

fn run_circuit(s: &mut StateVector, ops: &[(u8, usize, usize)]) {
    for &(g, a, b) in ops {
        match g {
            0 => s.apply(&[a], &gates::hadamard()).unwrap(),
            1 => s.apply(&[a], &gates::x()).unwrap(),
            2 => s.apply(&[a], &gates::z()).unwrap(),
            _ if a != b => s.apply(&[a, b], &gates::cnot()).unwrap(),
            _ => {}
        }
    }
}

proptest! {
    #[test]
    fn unitaries_keep_the_norm(ops in circuit()) {
        let mut s = StateVector::zero(3);
        run_circuit(&mut s, &ops);
        prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        let total: f64 = s.marginal(&[0, 1, 2]).iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn marginals_agree_with_amplitudes(ops in circuit(), pos in 0usize..3) {
        let mut s = StateVector::zero(3);
        run_circuit(&mut s, &ops);
        // Position 0 is the most significant bit of the index.
        let mask = 1usize << (2 - pos);
        let one: f64 = s.amplitudes().iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, a)| a.norm_sqr()).sum();
        prop_assert!((s.prob_one(pos) - one).abs() < 1e-12);
        let m = s.marginal(&[pos]);
        prop_assert!((m[1] - one).abs() < 1e-12);
    }

    #[test]
    fn same_basis_measurement_returns_the_encoded_bits(bits in prop::collection::vec(any::<bool>(), 1..10),
                                                       bases in prop::collection::vec(any::<bool>(), 10),
                                                       seed in any::<u64>()) {
        let x = Bits::new(bits.clone());
        let theta: Vec<Basis> = bases[..bits.len()].iter().map(|&b| basis(b)).collect();
        let mut pool = QuantumPool::new(16);
        let reg = pool.encode_bb84(&x, &theta).unwrap();
        let got = pool.measure_in_bases(&reg, &theta, &mut Sampler::new(seed)).unwrap();
        prop_assert_eq!(got, x);
        prop_assert!(pool.max_norm_deviation() < 1e-10);
    }

    #[test]
    fn exact_outcome_distribution_is_normalized(bits in prop::collection::vec(any::<bool>(), 1..7),
                                                prep in prop::collection::vec(any::<bool>(), 7),
                                                meas in prop::collection::vec(any::<bool>(), 7)) {
        let n = bits.len();
        let x = Bits::new(bits);
        let prep: Vec<Basis> = prep[..n].iter().map(|&b| basis(b)).collect();
        let meas: Vec<Basis> = meas[..n].iter().map(|&b| basis(b)).collect();
        let mut pool = QuantumPool::new(16);
        let reg = pool.encode_bb84(&x, &prep).unwrap();
        let dist = pool.exact_outcome_distribution(&reg, &meas).unwrap();
        let total: f64 = dist.values().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        // Each conjugate position is an independent fair coin.
        let conjugate = prep.iter().zip(&meas).filter(|(a, b)| a != b).count();
        prop_assert_eq!(dist.len(), 1 << conjugate);
        for p in dist.values() {
            prop_assert!((p - 0.5f64.powi(conjugate as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn enumeration_leaf_probabilities_sum_to_one(weights in prop::collection::vec(1u32..10, 2..5), depth in 1usize..4) {
        let w: Vec<f64> = weights.iter().map(|&v| f64::from(v)).collect();
        let sum: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|v| v / sum).collect();
        let mut total = 0.0;
        let leaves = enumerate(1 << 20, |b: &mut dyn Branching| {
            for _ in 0..depth {
                b.branch(&w);
            }
        }, |_, p| total += p).unwrap();
        prop_assert_eq!(leaves, w.len().pow(depth as u32));
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn bell_pair_outcomes_are_perfectly_correlated() {
    let mut s = StateVector::zero(2);
    s.apply(&[0], &gates::hadamard()).unwrap();
    s.apply(&[0, 1], &gates::cnot()).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let want = [h, 0.0, 0.0, h];
    for (a, w) in s.amplitudes().iter().zip(want) {
        assert!((a - Complex64::new(w, 0.0)).norm() < 1e-12);
    }
    let m = s.marginal(&[0, 1]);
    assert!((m[0] - 0.5).abs() < 1e-12 && (m[3] - 0.5).abs() < 1e-12);
    assert!(m[1].abs() < 1e-12 && m[2].abs() < 1e-12);
}
