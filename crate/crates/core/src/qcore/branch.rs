//! Sources of randomness: seeded sampling, and exhaustive enumeration of
//! every branch with its exact probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PROB_EPS;
use crate::bits::Bits;

/// A random choice point. Machines and measurements draw all randomness
/// through this trait so that the same code can be sampled or enumerated.
pub trait Branching {
    /// Picks index `i` with probability `weights[i] / sum(weights)`.
    fn branch(&mut self, weights: &[f64]) -> usize;

    /// Picks uniformly from `0..n`. `n` must be positive.
    fn uniform(&mut self, n: usize) -> usize;

    fn coin(&mut self) -> bool {
        self.uniform(2) == 1
    }

    fn bits(&mut self, len: usize) -> Bits {
        (0..len).map(|_| self.coin()).collect()
    }
}

/// Draws from a seeded ChaCha stream.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl Branching for Sampler {
    fn branch(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut u = self.rng.gen::<f64>() * total;
        let mut last = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w <= PROB_EPS {
                continue;
            }
            if u < w {
                return i;
            }
            u -= w;
            last = i;
        }
        last
    }

    fn uniform(&mut self, n: usize) -> usize {
        assert!(n > 0, "uniform choice from an empty range");
        self.rng.gen_range(0..n)
    }
}

#[derive(Clone, Debug)]
enum Options {
    Uniform(usize),
    Weighted(Vec<f64>),
}

#[derive(Clone, Debug)]
struct Decision {
    taken: usize,
    options: Options,
}

impl Decision {
    fn next(&self) -> Option<usize> {
        match &self.options {
            Options::Uniform(n) => (self.taken + 1 < *n).then_some(self.taken + 1),
            Options::Weighted(w) => (self.taken + 1..w.len()).find(|&i| w[i] > PROB_EPS),
        }
    }
}

/// Replays a fixed prefix of decisions and extends it with first choices.
struct Replay<'a> {
    path: &'a mut Vec<Decision>,
    pos: usize,
    prob: f64,
}

impl Branching for Replay<'_> {
    fn branch(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let idx = if self.pos < self.path.len() {
            let d = &self.path[self.pos];
            match &d.options {
                Options::Weighted(w) if w.len() == weights.len() => d.taken,
                _ => panic!("replay diverged: branch shape changed at decision {}", self.pos),
            }
        } else {
            let first = weights
                .iter()
                .position(|&w| w > PROB_EPS)
                .expect("branch with no outcome of positive weight");
            self.path.push(Decision {
                taken: first,
                options: Options::Weighted(weights.to_vec()),
            });
            first
        };
        self.pos += 1;
        self.prob *= weights[idx] / total;
        idx
    }

    fn uniform(&mut self, n: usize) -> usize {
        assert!(n > 0, "uniform choice from an empty range");
        let idx = if self.pos < self.path.len() {
            let d = &self.path[self.pos];
            match d.options {
                Options::Uniform(k) if k == n => d.taken,
                _ => panic!("replay diverged: branch shape changed at decision {}", self.pos),
            }
        } else {
            self.path.push(Decision {
                taken: 0,
                options: Options::Uniform(n),
            });
            0
        };
        self.pos += 1;
        self.prob /= n as f64;
        idx
    }
}

/// Raised when enumeration would visit more leaves than allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("exact enumeration exceeded the branch cap of {cap} leaves")]
pub struct BranchCapExceeded {
    pub cap: usize,
}

/// Runs `run` once per leaf of its decision tree, depth first, and hands
/// every result to `visit` together with the exact leaf probability.
///
/// `run` must be deterministic given the decisions it draws. Zero-weight
/// outcomes are never visited. Returns the number of leaves.
pub fn enumerate<T>(
    cap: usize,
    mut run: impl FnMut(&mut dyn Branching) -> T,
    mut visit: impl FnMut(T, f64),
) -> Result<usize, BranchCapExceeded> {
    let mut path: Vec<Decision> = Vec::new();
    let mut leaves = 0usize;
    loop {
        leaves += 1;
        if leaves > cap {
            return Err(BranchCapExceeded { cap });
        }
        let mut replay = Replay {
            path: &mut path,
            pos: 0,
            prob: 1.0,
        };
        let out = run(&mut replay);
        let (prob, consumed) = (replay.prob, replay.pos);
        assert_eq!(
            consumed,
            path.len(),
            "replay diverged: run consumed fewer decisions than recorded"
        );
        visit(out, prob);

        loop {
            match path.last_mut() {
                None => return Ok(leaves),
                Some(d) => match d.next() {
                    Some(i) => {
                        d.taken = i;
                        break;
                    }
                    None => {
                        path.pop();
                    }
                },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn enumerates_two_coins() {
        let mut dist = BTreeMap::new();
        let leaves = enumerate(
            100,
            |b| (b.coin(), b.coin()),
            |o, p| *dist.entry(o).or_insert(0.0) += p,
        )
        .unwrap();
        assert_eq!(leaves, 4);
        assert!(dist.values().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn data_dependent_depth() {
        // Second draw only happens after heads.
        let mut dist = BTreeMap::new();
        enumerate(
            100,
            |b| if b.coin() { 1 + b.uniform(3) } else { 0 },
            |o, p| *dist.entry(o).or_insert(0.0) += p,
        )
        .unwrap();
        assert_eq!(dist[&0], 0.5);
        for k in 1..=3 {
            assert!((dist[&k] - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_weight_branches_are_skipped() {
        let mut seen = Vec::new();
        enumerate(10, |b| b.branch(&[0.0, 0.25, 0.0, 0.75]), |o, p| seen.push((o, p))).unwrap();
        assert_eq!(seen, vec![(1, 0.25), (3, 0.75)]);
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate(3, |b| b.bits(2), |_, _| {}).unwrap_err();
        assert_eq!(err.cap, 3);
    }

    #[test]
    fn sampler_is_reproducible() {
        let a: Vec<usize> = {
            let mut s = Sampler::new(7);
            (0..20).map(|_| s.uniform(10)).collect()
        };
        let mut s = Sampler::new(7);
        let b: Vec<usize> = (0..20).map(|_| s.uniform(10)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn sampler_respects_weights() {
        let mut s = Sampler::new(1);
        let n = 100_000;
        let hits = (0..n).filter(|_| s.branch(&[0.0, 0.3, 0.7]) == 1).count();
        let freq = hits as f64 / n as f64;
        // 4 sigma of Bernoulli(0.3) at 1e5 samples
        assert!((freq - 0.3).abs() < 4.0 * (0.21f64 / n as f64).sqrt());
    }
}
