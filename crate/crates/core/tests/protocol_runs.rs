use quclab_core::adversim::{
    corpus_from_json, corpus_to_json, corrupted_alice_corpus, output_string, parse_transcript, real_world, ScriptSpec,
};
use quclab_core::netexec::{
    compose, dummy_adversary, exact_map, sample, trial_seed, ExecConfig, Output, DEFAULT_BRANCH_CAP,
};
use quclab_core::otproto::{frot_id, pi_qot_prime, pi_qrot, ProtocolParams};

fn ot_script(c: bool, v0: &str, v1: &str) -> ScriptSpec {
    ScriptSpec {
        inputs: Some((v0.into(), v1.into())),
        ..ScriptSpec::honest("ot", c)
    }
}

/// Bob's output string, read off the transcript.
fn bob_output(out: &Output) -> Option<String> {
    let entries = parse_transcript(out.value()?)?;
    entries.iter().rev().find_map(|e| {
        let is_bob_out = e.len() >= 4 && e[0] == b"in" && e[1] == b"bob" && e[2] == b"environment";
        if !is_bob_out {
            return None;
        }
        String::from_utf8(output_string(&e[3])?.to_ascii()).ok()
    })
}

#[test]
fn sampled_honest_ot_outputs_the_chosen_string() {
    let p = ProtocolParams::new(4, 6, 2).unwrap();
    let inputs = [("00", "11"), ("01", "10"), ("11", "11")];
    for i in 0..24u64 {
        let (v0, v1) = inputs[i as usize % inputs.len()];
        let c = i % 2 == 1;
        let r = sample(&real_world(p, &ot_script(c, v0, v1)).unwrap(), &ExecConfig::default(), trial_seed(5, i)).unwrap();
        assert_eq!(bob_output(&r.output).as_deref(), Some(if c { v1 } else { v0 }), "trial {i}");
        assert!(r.norm_deviation < 1e-10);
    }
}

#[test]
fn exact_honest_ot_is_always_correct() {
    let p = ProtocolParams::new(2, 3, 1).unwrap();
    for c in [false, true] {
        let d = exact_map(&real_world(p, &ot_script(c, "0", "1")).unwrap(), &ExecConfig::exact(), DEFAULT_BRANCH_CAP, |r| {
            bob_output(&r.output)
        })
        .unwrap();
        let want = Some(if c { "1" } else { "0" }.to_string());
        assert!((d.dist.prob(&want) - 1.0).abs() < 1e-12);
        assert!(d.mass_error() < 1e-9);
    }
}

#[test]
fn composed_protocol_runs_end_to_end() {
    let p = ProtocolParams::new(2, 3, 1).unwrap();
    let net = compose(&pi_qot_prime(p.ell).unwrap(), &pi_qrot(p).unwrap(), &[frot_id()]).unwrap();
    let net = net.with(dummy_adversary()).unwrap().with(ot_script(true, "0", "1").environment(p)).unwrap();
    for seed in 0..8 {
        let r = sample(&net, &ExecConfig::default(), seed).unwrap();
        assert_eq!(bob_output(&r.output).as_deref(), Some("1"));
    }
}

#[test]
fn corpus_survives_a_json_round_trip() {
    let corpus = corrupted_alice_corpus();
    let back = corpus_from_json(&corpus_to_json(&corpus)).unwrap();
    assert_eq!(back.len(), corpus.len());
    assert_eq!(corpus_to_json(&back), corpus_to_json(&corpus));
    assert!(corpus_from_json("[{\"name\": 3}]").is_err());
}
