//! Experiments on honest behavior: correctness, composition, the measuring
//! wrapper and the hash family.

use rayon::prelude::*;
use serde_json::json;

use quclab_core::adversim::{hoeffding_radius, ideal_world, parse_transcript, real_world, tv_distance, ScriptSpec, CONFIDENCE_DELTA};
use quclab_core::bits::Bits;
use quclab_core::netexec::{
    classical_wrapper, compose, dummy_adversary, exact, exact_map, sample, trial_seed, Distribution,
    Fields, MachineId, Network, Output,
};
use quclab_core::otproto::{frot_id, ideal_ot, ideal_rot, pi_qot_prime, pi_qrot, HashFunction, ProtocolParams};
use quclab_core::qcore::{Branching, Sampler};

use super::{exact_config, sample_config};
use crate::config::Resolved;
use crate::report::{Checks, ExperimentReport, Records, EXACT_TOL};
use crate::HarnessError;

type Entry = Vec<Vec<u8>>;

/// Payload of the last output `party` addressed to the environment, from
/// the party itself or from a puppet the environment ran for it.
pub(crate) fn party_output(entries: &[Entry], party: &str) -> Option<Vec<u8>> {
    let p = party.as_bytes();
    entries.iter().rev().find_map(|e| match e[0].as_slice() {
        b"in" if e[1] == p && e[2] == b"environment" => Some(e[3].clone()),
        b"out" if e[1] == p => Some(e[2].clone()),
        _ => None,
    })
}

/// Arguments of an `(output, ...)` payload.
pub(crate) fn output_fields(payload: &[u8]) -> Option<Vec<Vec<u8>>> {
    let f = Fields::parse(payload)?;
    (f.tag == b"output").then(|| f.args.iter().map(|a| a.to_vec()).collect())
}

fn entries(o: &Output) -> Vec<Entry> {
    o.value().and_then(parse_transcript).unwrap_or_default()
}

fn ascii(b: &Bits) -> String {
    String::from_utf8(b.to_ascii()).expect("ascii bits")
}

fn ot_script(choice: bool, v0: &str, v1: &str) -> ScriptSpec {
    ScriptSpec {
        inputs: Some((v0.into(), v1.into())),
        ..ScriptSpec::honest("honest-ot", choice)
    }
}

/// Honest `πQOT` with inputs and choice drawn from `seed`.
pub(crate) fn honest_ot_network(params: ProtocolParams, seed: u64) -> Result<Network, HarnessError> {
    let mut rng = Sampler::new(seed);
    let (v0, v1, c) = (rng.bits(params.ell), rng.bits(params.ell), rng.coin());
    Ok(real_world(params, &ot_script(c, &ascii(&v0), &ascii(&v1)))?)
}

/// `πQOT'` with `πQROT` plugged in for its `F_ROT` call, under the dummy
/// adversary and an honest OT environment.
pub(crate) fn composed_network(params: ProtocolParams, choice: bool, v0: &str, v1: &str) -> Result<Network, HarnessError> {
    let net = compose(&pi_qot_prime(params.ell)?, &pi_qrot(params)?, &[frot_id()])?;
    Ok(net.with(dummy_adversary())?.with(ot_script(choice, v0, v1).environment(params))?)
}

/// Input pairs for exhaustive OT runs: all of them for short strings.
fn input_pairs(ell: usize) -> Vec<(String, String)> {
    let all = |v: u64| ascii(&Bits::from_u64(v, ell));
    if ell <= 2 {
        let k = 1u64 << ell;
        (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).map(|(a, b)| (all(a), all(b))).collect()
    } else {
        let ones = (1u64 << ell) - 1;
        let alt = 0x5555_5555_5555_5555u64 & ones;
        vec![(all(0), all(ones)), (all(alt), all(ones ^ alt)), (all(ones), all(ones))]
    }
}

pub fn correctness(cfg: &Resolved) -> Result<ExperimentReport, HarnessError> {
    let mut checks = Checks::default();
    let mut m = serde_json::Map::new();
    if cfg.mode.exact() {
        let p = cfg.exact_params;
        let ecfg = exact_config(cfg);
        let mut worst_ot: f64 = 1.0;
        let mut leaves = 0;
        for (v0, v1) in input_pairs(p.ell) {
            for c in [false, true] {
                let want = if c { &v1 } else { &v0 };
                let net = real_world(p, &ot_script(c, &v0, &v1))?;
                let d = exact_map(&net, &ecfg, cfg.branch_cap, |r| {
                    let out = party_output(&entries(&r.output), "bob").and_then(|o| output_fields(&o));
                    out.is_some_and(|f| f.len() == 1 && f[0] == want.as_bytes())
                })?;
                checks.hygiene.mass(d.mass_error());
                checks.hygiene.norm(d.max_norm_deviation);
                leaves += d.leaves;
                worst_ot = worst_ot.min(d.dist.prob(&true));
            }
        }
        let mut worst_rot: f64 = 1.0;
        for c in [false, true] {
            let net = real_world(p, &ScriptSpec::honest("honest-rot", c))?;
            let d = exact_map(&net, &ecfg, cfg.branch_cap, |r| {
                let e = entries(&r.output);
                let bob = party_output(&e, "bob").and_then(|o| output_fields(&o));
                let alice = party_output(&e, "alice").and_then(|o| output_fields(&o));
                match (bob, alice) {
                    (Some(b), Some(a)) if b.len() == 1 && a.len() == 2 => b[0] == a[c as usize],
                    _ => false,
                }
            })?;
            checks.hygiene.mass(d.mass_error());
            checks.hygiene.norm(d.max_norm_deviation);
            leaves += d.leaves;
            worst_rot = worst_rot.min(d.dist.prob(&true));
        }
        checks.at_most("exact-ot-failure-probability", 1.0 - worst_ot, EXACT_TOL);
        checks.at_most("exact-rot-failure-probability", 1.0 - worst_rot, EXACT_TOL);
        m.insert(
            "exact".into(),
            json!({ "params": p, "min_success_ot": worst_ot, "min_success_rot": worst_rot, "leaves": leaves }),
        );
    }
    if cfg.mode.sampled() {
        let p = cfg.params;
        let scfg = sample_config(p);
        let rows: Vec<Result<(Vec<String>, bool, f64), HarnessError>> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let seed = trial_seed(cfg.seed, i);
                let mut rng = Sampler::new(seed);
                let (v0, v1, c) = (ascii(&rng.bits(p.ell)), ascii(&rng.bits(p.ell)), rng.coin());
                let r = sample(&real_world(p, &ot_script(c, &v0, &v1))?, &scfg, seed)?;
                let out = party_output(&entries(&r.output), "bob")
                    .and_then(|o| output_fields(&o))
                    .and_then(|f| f.first().map(|s| String::from_utf8_lossy(s).into_owned()))
                    .unwrap_or_default();
                let ok = out == if c { &v1 } else { &v0 }.as_str();
                let row = vec![i.to_string(), (c as u8).to_string(), v0, v1, out, ok.to_string()];
                Ok((row, ok, r.norm_deviation))
            })
            .collect();
        let mut failures = 0u64;
        let mut records = Records {
            header: vec!["trial", "choice", "v0", "v1", "output", "correct"],
            rows: Vec::with_capacity(rows.len()),
        };
        for r in rows {
            let (row, ok, dev) = r?;
            failures += !ok as u64;
            checks.hygiene.norm(dev);
            records.rows.push(row);
        }
        checks.at_most("sampled-failures", failures as f64, 0.0);
        m.insert("sampled".into(), json!({ "params": p, "trials": cfg.trials, "failures": failures }));
        checks.records = Some(records);
    }
    Ok(checks.finish(cfg.clone(), m.into()))
}

pub fn composition(cfg: &Resolved) -> Result<ExperimentReport, HarnessError> {
    let p = cfg.exact_params;
    let ecfg = exact_config(cfg);
    let mut checks = Checks::default();
    let mut rows = Vec::new();
    let run = |net: &Network, checks: &mut Checks| -> Result<Distribution<Output>, HarnessError> {
        let d = exact(net, &ecfg, cfg.branch_cap)?;
        checks.hygiene.mass(d.mass_error());
        checks.hygiene.norm(d.max_norm_deviation);
        Ok(d.dist)
    };
    let (mut worst_protocol, mut worst_ideal): (f64, f64) = (0.0, 0.0);
    for (v0, v1) in input_pairs(p.ell) {
        for c in [false, true] {
            let script = ot_script(c, &v0, &v1);
            let composed = run(&composed_network(p, c, &v0, &v1)?, &mut checks)?;
            let direct = run(&real_world(p, &script)?, &mut checks)?;
            let ideal = run(&ideal_world(p, &script)?, &mut checks)?;
            let tv_direct = tv_distance(&composed, &direct)?;
            let tv_ideal = tv_distance(&composed, &ideal)?;
            worst_protocol = worst_protocol.max(tv_direct);
            worst_ideal = worst_ideal.max(tv_ideal);
            rows.push(json!({ "v0": v0, "v1": v1, "choice": c, "tv_vs_pi_qot": tv_direct, "tv_vs_f_ot": tv_ideal }));
        }
    }
    checks.at_most("tv-composed-vs-pi-qot", worst_protocol, EXACT_TOL);
    checks.at_most("tv-composed-vs-f-ot", worst_ideal, EXACT_TOL);
    Ok(checks.finish(cfg.clone(), json!({ "params": p, "runs": rows })))
}

fn wrap_ids(net: &Network, ids: &[MachineId], times: usize) -> Result<Network, HarnessError> {
    Ok(net.clone().map_machines(|mut m| {
        if ids.contains(&m.id) {
            for _ in 0..times {
                m = classical_wrapper(m);
            }
        }
        m
    })?)
}

pub fn lifting(cfg: &Resolved) -> Result<ExperimentReport, HarnessError> {
    let p = cfg.exact_params;
    let ecfg = exact_config(cfg);
    let ones = ascii(&Bits::from_u64((1 << p.ell) - 1, p.ell));
    let zeros = ascii(&Bits::zeros(p.ell));
    let ot = ot_script(true, &zeros, &ones);
    let rot = ScriptSpec::honest("honest-rot", false);
    let suite: Vec<(&str, Network)> = vec![
        ("pi-qot-prime", pi_qot_prime(p.ell)?.with(dummy_adversary())?.with(ot.environment(p))?),
        ("pi-qrot", pi_qrot(p)?.with(dummy_adversary())?.with(rot.environment(p))?),
        ("ideal-ot", ideal_ot(p.ell)?.with(dummy_adversary())?.with(ot.environment(p))?),
        ("ideal-rot", ideal_rot(p.ell, false)?.with(dummy_adversary())?.with(rot.environment(p))?),
    ];
    let mut checks = Checks::default();
    let run = |net: &Network, checks: &mut Checks| -> Result<Distribution<Output>, HarnessError> {
        let d = exact(net, &ecfg, cfg.branch_cap)?;
        checks.hygiene.mass(d.mass_error());
        checks.hygiene.norm(d.max_norm_deviation);
        Ok(d.dist)
    };
    let mut classical_count = 0;
    let mut machine_count = 0;
    let (mut worst_wrap, mut worst_idem): (f64, f64) = (0.0, 0.0);
    let mut quantum_tv = Vec::new();
    for (name, net) in &suite {
        let base = run(net, &mut checks)?;
        let classical: Vec<MachineId> = net.machines().iter().filter(|m| m.classical).map(|m| m.id.clone()).collect();
        for id in net.ids() {
            machine_count += 1;
            let once = run(&wrap_ids(net, std::slice::from_ref(id), 1)?, &mut checks)?;
            let twice = run(&wrap_ids(net, std::slice::from_ref(id), 2)?, &mut checks)?;
            worst_idem = worst_idem.max(tv_distance(&once, &twice)?);
            let tv = tv_distance(&base, &once)?;
            if classical.contains(id) {
                classical_count += 1;
                worst_wrap = worst_wrap.max(tv);
            } else if tv > 0.0 {
                quantum_tv.push(json!({ "network": name, "machine": id.to_string(), "tv": tv }));
            }
        }
        let all = run(&wrap_ids(net, &classical, 1)?, &mut checks)?;
        worst_wrap = worst_wrap.max(tv_distance(&base, &all)?);
    }
    checks.at_most("tv-wrapped-classical-vs-plain", worst_wrap, EXACT_TOL);
    checks.at_most("tv-wrapped-twice-vs-once", worst_idem, EXACT_TOL);
    checks.at_least("classical-machines-in-suite", classical_count as f64, 1.0);
    Ok(checks.finish(
        cfg.clone(),
        json!({
            "params": p,
            "networks": suite.iter().map(|(n, _)| *n).collect::<Vec<_>>(),
            "classical_machines": classical_count,
            "machines": machine_count,
            "max_tv_classical": worst_wrap,
            "max_tv_idempotence": worst_idem,
            // machines that do touch qubits, for contrast
            "non_classical_changes": quantum_tv,
        }),
    ))
}

/// Number of fixed input pairs.
pub const HASH_PAIRS: usize = 100;

pub fn hash_universality(cfg: &Resolved) -> Result<ExperimentReport, HarnessError> {
    let (len, ell) = (cfg.params.n, cfg.params.ell);
    let mut rng = Sampler::new(cfg.seed);
    let mut pairs = Vec::with_capacity(HASH_PAIRS);
    while pairs.len() < HASH_PAIRS {
        let (x, y) = (rng.bits(len), rng.bits(len));
        if x != y {
            pairs.push((x, y));
        }
    }
    let trials = cfg.trials;
    let rates: Vec<f64> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (x, y))| {
            let mut rng = Sampler::new(trial_seed(cfg.seed, i as u64));
            let mut hits = 0u64;
            for _ in 0..trials {
                let h = HashFunction::sample(len, ell, &mut rng);
                hits += (h.eval(x).expect("declared length") == h.eval(y).expect("declared length")) as u64;
            }
            hits as f64 / trials as f64
        })
        .collect();
    let radius = hoeffding_radius(trials, CONFIDENCE_DELTA);
    let ideal = 2f64.powi(-(ell as i32));
    let max = rates.iter().cloned().fold(0.0, f64::max);
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let mut checks = Checks::default();
    checks.at_most("max-collision-rate", max, ideal + radius);
    let records = Records {
        header: vec!["pair", "x", "y", "collision_rate"],
        rows: pairs
            .iter()
            .zip(&rates)
            .enumerate()
            .map(|(i, ((x, y), r))| vec![i.to_string(), ascii(x), ascii(y), r.to_string()])
            .collect(),
    };
    checks.records = Some(records);
    Ok(checks.finish(
        cfg.clone(),
        json!({
            "input_len": len,
            "ell": ell,
            "pairs": HASH_PAIRS,
            "samples_per_pair": trials,
            "bound": ideal,
            "radius": radius,
            "max_rate": max,
            "mean_rate": mean,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use quclab_core::netexec::ExecConfig;

    #[test]
    fn input_pairs_cover_short_strings() {
        assert_eq!(input_pairs(1).len(), 4);
        assert_eq!(input_pairs(2).len(), 16);
        assert_eq!(input_pairs(5)[0], ("00000".to_string(), "11111".to_string()));
    }

    #[test]
    fn party_output_finds_direct_and_puppet_outputs() {
        let e = vec![
            vec![b"in".to_vec(), b"bob".to_vec(), b"environment".to_vec(), b"x".to_vec(), b"0".to_vec()],
            vec![b"out".to_vec(), b"alice".to_vec(), b"y".to_vec()],
        ];
        assert_eq!(party_output(&e, "bob"), Some(b"x".to_vec()));
        assert_eq!(party_output(&e, "alice"), Some(b"y".to_vec()));
        assert_eq!(party_output(&e, "carol"), None);
    }

    #[test]
    fn sampled_correctness_is_seed_deterministic() {
        let cfg = crate::config::ExperimentConfig {
            experiment: Some("correctness".into()),
            mode: Some(super::super::RunMode::Sample),
            params: Some(ProtocolParams::new(2, 4, 1).unwrap()),
            trials: Some(20),
            seed: Some(3),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        let a = correctness(&cfg).unwrap();
        let b = correctness(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.records, b.records);
        assert!(a.passed);
    }

    #[test]
    fn wrapping_twice_is_harmless() {
        let p = ProtocolParams::new(1, 2, 1).unwrap();
        let net = pi_qot_prime(1)
            .unwrap()
            .with(dummy_adversary())
            .unwrap()
            .with(ot_script(false, "1", "0").environment(p))
            .unwrap();
        let ids: Vec<MachineId> = net.ids().cloned().collect();
        let a = exact(&wrap_ids(&net, &ids, 1).unwrap(), &ExecConfig::exact(), 1000).unwrap();
        let b = exact(&wrap_ids(&net, &ids, 2).unwrap(), &ExecConfig::exact(), 1000).unwrap();
        assert_eq!(tv_distance(&a.dist, &b.dist).unwrap(), 0.0);
    }
}
