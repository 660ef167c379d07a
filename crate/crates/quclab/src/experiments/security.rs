//! Real-versus-ideal comparisons, attacks and privacy checks.

use rayon::prelude::*;
use serde_json::json;

use quclab_core::adversim::{
    attack_network, both_corrupted_corpus, cheat_pass_rate_exact, cheat_pass_rate_sampled, compare_exact, corrupted_alice_corpus,
    no_corruption_corpus, parse_transcript, real_world, simulator_both_corrupted, simulator_corrupted_alice,
    tv_distance, wrong_basis_posterior, AttackRoute, ExactComparison, ScriptSpec, SimulatorKind,
};
use quclab_core::netexec::{exact, exact_map, MachineSpec};
use quclab_core::otproto::{binomial, BobStrategy, ProtocolParams};
use quclab_core::qcore::Basis;

use super::protocol::party_output;
use super::{exact_config, load_corpus, sample_config};
use crate::config::Resolved;
use crate::report::{Checks, ExperimentReport, EXACT_TOL};
use crate::HarnessError;

/// Corpora smaller than this do not count as a suite.
pub const MIN_CORPUS: usize = 10;
/// Largest `m - n` in the exhaustive pass-rate sweep.
pub const SWEEP_MAX_GAP: usize = 8;
/// The sweep runs the direct attack network; both routes are compared up to
/// this gap.
pub const ROUTE_CHECK_GAP: usize = 3;

/// Commits to seeded values and never measures.
pub(crate) fn no_measure(seed: u64) -> BobStrategy {
    BobStrategy::Guess {
        seed,
        measure_at_theta: false,
    }
}

fn compare_all(
    cfg: &Resolved,
    scripts: &[ScriptSpec],
    sim: &MachineSpec,
    checks: &mut Checks,
    prefix: &str,
) -> Result<Vec<ExactComparison>, HarnessError> {
    let ecfg = exact_config(cfg);
    let results: Vec<Result<ExactComparison, HarnessError>> = scripts
        .par_iter()
        .map(|s| Ok(compare_exact(cfg.exact_params, s, sim, &ecfg, cfg.branch_cap)?))
        .collect();
    let mut out = Vec::new();
    for r in results {
        let r = r?;
        checks.hygiene.mass(r.max_mass_error);
        checks.hygiene.norm(r.max_norm_deviation);
        checks.at_most(format!("{prefix}tv:{}", r.script), r.tv, EXACT_TOL);
        if let Some(gap) = r.bit_gap {
            checks.at_most(format!("{prefix}output-one-gap:{}", r.script), gap, EXACT_TOL);
        }
        out.push(r);
    }
    Ok(out)
}

pub fn corrupted_alice(cfg: &Resolved) -> Result<ExperimentReport, HarnessError> {
    let corpus = load_corpus(cfg, corrupted_alice_corpus())?;
    if let Some(s) = corpus.iter().find(|s| s.alice.is_none() || s.bob.is_some()) {
        return Err(HarnessError::Config(format!("script {} does not corrupt exactly Alice", s.name)));
    }
    // one simulator for the whole corpus
    let sim = simulator_corrupted_alice(cfg.exact_params);
    let mut checks = Checks::default();
    checks.at_least("corpus-size", corpus.len() as f64, MIN_CORPUS as f64);
    let results = compare_all(cfg, &corpus, &sim, &mut checks, "")?;
    let fuzz = corpus.iter().filter(|s| s.mutation.is_some()).count();
    Ok(checks.finish(
        cfg.clone(),
        json!({ "params": cfg.exact_params, "scripts": corpus.len(), "fuzz_scripts": fuzz, "comparisons": results }),
    ))
}

pub fn trivial_cases(cfg: &Resolved) -> Result<ExperimentReport, HarnessError> {
    let p = cfg.exact_params;
    let mut checks = Checks::default();
    let none = compare_all(cfg, &no_corruption_corpus(), &SimulatorKind::Dummy.build(p), &mut checks, "none/")?;
    let both = compare_all(cfg, &both_corrupted_corpus(), &simulator_both_corrupted(p), &mut checks, "both/")?;
    Ok(checks.finish(cfg.clone(), json!({ "params": p, "no_corruption": none, "both_corrupted": both })))
}

pub fn cheat_bob(cfg: &Resolved) -> Result<ExperimentReport, HarnessError> {
    let mut checks = Checks::default();
    let mut m = serde_json::Map::new();
    if cfg.mode.exact() {
        let ecfg = exact_config(cfg);
        let base = cfg.exact_params;
        let sweep: Vec<Result<(usize, f64, quclab_core::adversim::PassRate), HarnessError>> = (1..=SWEEP_MAX_GAP)
            .into_par_iter()
            .map(|d| {
                let p = ProtocolParams::new(base.n, base.n + d, base.ell).map_err(|e| HarnessError::Config(e.to_string()))?;
                let mut e = ecfg.clone();
                e.qubit_cap = e.qubit_cap.max(p.m);
                let r = cheat_pass_rate_exact(no_measure(cfg.seed), p, AttackRoute::Direct, &e, cfg.branch_cap)?;
                Ok((d, 0.75f64.powi(d as i32), r))
            })
            .collect();
        let mut rows = Vec::new();
        for r in sweep {
            let (d, expected, r) = r?;
            checks.hygiene.mass(r.mass_error);
            checks.hygiene.norm(r.max_norm_deviation);
            checks.within(format!("exact-pass-rate:gap-{d}"), r.pass, expected, EXACT_TOL);
            checks.at_most(format!("exact-neither-pass-nor-abort:gap-{d}"), r.other, EXACT_TOL);
            rows.push(json!({ "gap": d, "expected": expected, "rate": r }));
        }
        let p = cfg.exact_params;
        let store = cheat_pass_rate_exact(
            BobStrategy::Guess {
                seed: cfg.seed,
                measure_at_theta: true,
            },
            p,
            AttackRoute::Corrupted,
            &ecfg,
            cfg.branch_cap,
        )?;
        checks.at_most("exact-neither-pass-nor-abort:store-and-guess", store.other, EXACT_TOL);
        checks.hygiene.mass(store.mass_error);
        checks.hygiene.norm(store.max_norm_deviation);
        let fixed = cheat_pass_rate_exact(BobStrategy::FixedBasis(Basis::Plus), p, AttackRoute::Corrupted, &ecfg, cfg.branch_cap)?;
        checks.at_most("exact-neither-pass-nor-abort:wrong-basis-all", fixed.other, EXACT_TOL);
        checks.hygiene.mass(fixed.mass_error);
        checks.hygiene.norm(fixed.max_norm_deviation);
        let posterior = wrong_basis_posterior(p, Basis::Plus, cfg.branch_cap)?;
        checks.at_most("wrong-basis-posterior-bias", posterior.times_bias, EXACT_TOL);
        let honest = honest_through_corruption(cfg)?;
        checks.at_most("honest-bob-through-corruption-tv", honest, EXACT_TOL);
        let routes = route_gap(cfg)?;
        checks.at_most("attack-route-verdict-tv", routes, EXACT_TOL);
        m.insert(
            "exact".into(),
            json!({
                "base_params": base,
                "sweep": rows,
                "store_and_guess": store,
                "wrong_basis_all_plus": fixed,
                "wrong_basis_posterior": posterior,
                "honest_through_corruption_tv": honest,
                "sweep_route": AttackRoute::Direct,
                "attack_route_tv": routes,
            }),
        );
    }
    if cfg.mode.sampled() {
        let p = cfg.params;
        let r = cheat_pass_rate_sampled(no_measure(cfg.seed), p, AttackRoute::Corrupted, &sample_config(p), cfg.trials, cfg.seed)?;
        let expected = 0.75f64.powi(p.tested() as i32);
        let radius = r.radius.expect("sampled");
        checks.hygiene.norm(r.max_norm_deviation);
        checks.within("sampled-pass-rate", r.pass, expected, radius);
        checks.at_most("sampled-neither-pass-nor-abort", r.other, 0.0);
        m.insert("sampled".into(), json!({ "params": p, "expected": expected, "rate": r }));
    }
    Ok(checks.finish(cfg.clone(), m.into()))
}

/// TV between the parties' outputs with Bob run honestly through the
/// corruption machinery and with Bob uncorrupted.
fn honest_through_corruption(cfg: &Resolved) -> Result<f64, HarnessError> {
    let p = cfg.exact_params;
    let ecfg = exact_config(cfg);
    let mut worst: f64 = 0.0;
    for c in [false, true] {
        let outputs = |script: &ScriptSpec| -> Result<_, HarnessError> {
            let d = exact_map(&real_world(p, script)?, &ecfg, cfg.branch_cap, |r| {
                let e = r.output.value().and_then(parse_transcript).unwrap_or_default();
                (party_output(&e, "bob"), party_output(&e, "alice"))
            })?;
            Ok(d.dist)
        };
        let plain = outputs(&ScriptSpec::honest("honest", c))?;
        let puppet = outputs(&ScriptSpec {
            bob: Some(BobStrategy::Honest),
            ..ScriptSpec::honest("honest-puppet-bob", c)
        })?;
        worst = worst.max(tv_distance(&plain, &puppet)?);
    }
    Ok(worst)
}

/// Largest TV between the verdicts of a corrupted and a directly placed
/// cheating Bob, over the small end of the sweep.
fn route_gap(cfg: &Resolved) -> Result<f64, HarnessError> {
    let ecfg = exact_config(cfg);
    let mut worst: f64 = 0.0;
    for d in 1..=ROUTE_CHECK_GAP {
        let p = ProtocolParams::new(cfg.exact_params.n, cfg.exact_params.n + d, cfg.exact_params.ell)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let verdicts = |route| -> Result<_, HarnessError> {
            Ok(exact(&attack_network(no_measure(cfg.seed), p, false, route)?, &ecfg, cfg.branch_cap)?.dist)
        };
        worst = worst.max(tv_distance(&verdicts(AttackRoute::Corrupted)?, &verdicts(AttackRoute::Direct)?)?);
    }
    Ok(worst)
}

/// `(1/2) E[2^-|I|]` with `|I| ~ Bin(n, 1/2)`: the chance that the hash
/// restricted to the wrong-basis positions is the zero map, halved.
pub fn degenerate_hash_tv(n: usize) -> f64 {
    0.5 * (0..=n)
        .map(|k| binomial(n, k) as f64 / 2f64.powi(n as i32) * 2f64.powi(-(k as i32)))
        .sum::<f64>()
}

pub fn sender_privacy(cfg: &Resolved) -> Result<ExperimentReport, HarnessError> {
    let p = cfg.exact_params;
    let ecfg = exact_config(cfg);
    let mut checks = Checks::default();
    let mut rows = Vec::new();
    for c in [false, true] {
        let r = quclab_core::adversim::sender_privacy(p, c, &ecfg, cfg.branch_cap)?;
        checks.hygiene.mass(r.max_mass_error);
        checks.hygiene.norm(r.max_norm_deviation);
        checks.at_most(format!("tv-view-other-string-vs-uniform:c-{}", c as u8), r.tv, EXACT_TOL);
        rows.push(json!({ "choice": c, "report": r }));
    }
    Ok(checks.finish(
        cfg.clone(),
        json!({ "params": p, "runs": rows, "degenerate_hash_prediction": degenerate_hash_tv(p.n) }),
    ))
}

pub fn receiver_privacy(cfg: &Resolved) -> Result<ExperimentReport, HarnessError> {
    let p = cfg.exact_params;
    let r = quclab_core::adversim::receiver_privacy(p, &exact_config(cfg), cfg.branch_cap)?;
    let mut checks = Checks::default();
    checks.hygiene.mass(r.max_mass_error);
    checks.hygiene.norm(r.max_norm_deviation);
    checks.at_most("tv-alice-view-c0-vs-c1", r.tv, EXACT_TOL);
    Ok(checks.finish(cfg.clone(), json!({ "params": p, "report": r })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_hash_prediction_values() {
        assert_eq!(degenerate_hash_tv(0), 0.5);
        assert!((degenerate_hash_tv(1) - 0.375).abs() < 1e-15);
        assert!((degenerate_hash_tv(2) - 0.28125).abs() < 1e-15);
    }
}
