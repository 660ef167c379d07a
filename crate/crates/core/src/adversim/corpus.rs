//! Named environment scripts used in the real-versus-ideal comparisons.

use super::{Mutation, ScriptSpec, Verdict};
use crate::otproto::{AliceDeviation, BobStrategy};
use crate::qcore::Basis;

fn alice(name: &str, choice: bool, dev: AliceDeviation) -> ScriptSpec {
    ScriptSpec {
        alice: Some(dev),
        ..ScriptSpec::honest(name, choice)
    }
}

fn fuzz(mut s: ScriptSpec, seed: u64) -> ScriptSpec {
    s.puppet_seed = Some(seed);
    s.mutation = Some(Mutation { seed, rate_percent: 35 });
    s
}

/// Scripts playing a corrupted Alice against an honest Bob.
pub fn corrupted_alice_corpus() -> Vec<ScriptSpec> {
    let plain = AliceDeviation::default;
    let mut v = vec![
        alice("replay-c0", false, plain()),
        alice("replay-c1", true, plain()),
        ScriptSpec {
            puppet_seed: Some(7),
            ..alice("seeded-replay-7", false, plain())
        },
        ScriptSpec {
            puppet_seed: Some(11),
            ..alice("seeded-replay-11", true, plain())
        },
        alice(
            "bases-all-plus",
            false,
            AliceDeviation {
                fixed_basis: Some(Basis::Plus),
                ..plain()
            },
        ),
        alice(
            "bases-all-times",
            true,
            AliceDeviation {
                fixed_basis: Some(Basis::Times),
                ..plain()
            },
        ),
        alice(
            "abort-after-commits",
            false,
            AliceDeviation {
                abort_after_commits: true,
                ..plain()
            },
        ),
        alice(
            "bell-pairs",
            true,
            AliceDeviation {
                entangled: true,
                ..plain()
            },
        ),
        alice(
            "short-register",
            false,
            AliceDeviation {
                short_register: true,
                ..plain()
            },
        ),
        ScriptSpec {
            verdict: Verdict::OutputBit,
            ..alice("output-bit", true, plain())
        },
    ];
    for seed in [101, 202, 303] {
        v.push(fuzz(alice(&format!("fuzz-{seed}"), seed % 2 == 0, plain()), seed));
    }
    v.push(ScriptSpec {
        verdict: Verdict::Aborted,
        ..fuzz(alice("fuzz-abort-bit", false, plain()), 404)
    });
    v
}

/// Scripts with both parties honest.
pub fn no_corruption_corpus() -> Vec<ScriptSpec> {
    vec![
        ScriptSpec::honest("honest-c0", false),
        ScriptSpec::honest("honest-c1", true),
        ScriptSpec {
            verdict: Verdict::OutputBit,
            ..ScriptSpec::honest("honest-output-bit", true)
        },
    ]
}

/// Scripts playing both parties.
pub fn both_corrupted_corpus() -> Vec<ScriptSpec> {
    let both = |name: &str, c: bool, bob: BobStrategy| ScriptSpec {
        alice: Some(AliceDeviation::default()),
        bob: Some(bob),
        ..ScriptSpec::honest(name, c)
    };
    let mut v = vec![
        both("both-replay-c0", false, BobStrategy::Honest),
        both("both-replay-c1", true, BobStrategy::Honest),
        both(
            "both-guessing-bob",
            false,
            BobStrategy::Guess {
                seed: 5,
                measure_at_theta: true,
            },
        ),
    ];
    for seed in [11, 12, 13] {
        v.push(fuzz(both(&format!("both-fuzz-{seed}"), seed % 2 == 1, BobStrategy::Honest), seed));
    }
    v
}

pub fn corpus_to_json(scripts: &[ScriptSpec]) -> String {
    serde_json::to_string_pretty(scripts).expect("scripts serialize")
}

pub fn corpus_from_json(text: &str) -> Result<Vec<ScriptSpec>, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_round_trips_through_json() {
        for c in [corrupted_alice_corpus(), no_corruption_corpus(), both_corrupted_corpus()] {
            assert_eq!(corpus_from_json(&corpus_to_json(&c)).unwrap(), c);
        }
    }

    #[test]
    fn corrupted_alice_corpus_is_large_enough_and_named_uniquely() {
        let c = corrupted_alice_corpus();
        assert!(c.len() >= 10);
        assert!(c.iter().filter(|s| s.mutation.is_some()).count() >= 3);
        let names: std::collections::BTreeSet<_> = c.iter().map(|s| s.name.clone()).collect();
        assert_eq!(names.len(), c.len());
        assert!(c.iter().all(|s| s.alice.is_some() && s.bob.is_none()));
    }
}
