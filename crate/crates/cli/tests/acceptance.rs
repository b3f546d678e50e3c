//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; the process fails if any criterion does.

use std::process::Command;
use std::time::{Duration, Instant};

use ghz_swap::dense::{embed, measure_ghz, DenseState};
use ghz_swap::label::{enumerate_basis, GhzLabel, Sign};
use ghz_swap::protocol::decoy::{run_decoys, DecoyKind};
use ghz_swap::protocol::{
    qkd_session, qpc_session, qss_session, reconstruct_secret, secret_from_outcome, Channel,
    Derived, ProtocolTranscript, QpcOptions, QpcVerdict,
};
use ghz_swap::swap::{
    oracle_all_same, oracle_outcomes, pair_swap_preserves_state, predict_multi, predict_two_bell,
    swap_preserves_state, verify_against_oracle, verify_all, SwapSpec,
};
use ghz_swap::sweep::{bell_pairs, random_specs, sghz_pairs, sghz_products};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(budget: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took <= budget, || {
        format!("took {took:.2?}, budget {budget:?}")
    })
}

fn bell_exhaustive() -> Outcome {
    let start = Instant::now();
    let reports = verify_all(&bell_pairs()).map_err(|e| e.to_string())?;
    ensure(reports.len() == 16, || format!("{} pairs", reports.len()))?;
    for r in &reports {
        ensure(r.passed(), || format!("{}: {:?}", r.spec, r.mismatches))?;
        ensure(r.outcomes == 4, || {
            format!("{}: {} outcomes", r.spec, r.outcomes)
        })?;
    }
    for a in enumerate_basis(2).unwrap() {
        for b in enumerate_basis(2).unwrap() {
            let pred = predict_two_bell(a, b).map_err(|e| e.to_string())?;
            ensure(
                pred.pairs
                    .iter()
                    .all(|p| (p.probability - 0.25).abs() < 1e-10),
                || format!("({a}, {b}) probabilities"),
            )?;
            ensure(pred.all_same() == (a == b), || {
                format!("({a}, {b}) same-pair rule")
            })?;
        }
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("16/16 pairs match, {:.0?}", start.elapsed()))
}

fn two_state_sweep() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for (m1, m2) in [(2, 2), (2, 4), (4, 2), (4, 4), (4, 6), (6, 4)] {
        let specs = sghz_pairs(m1, m2).map_err(|e| e.to_string())?;
        for r in verify_all(&specs).map_err(|e| e.to_string())? {
            ensure(r.passed(), || format!("{}: {:?}", r.spec, r.mismatches))?;
        }
        for spec in specs {
            let [a, b] = spec.states() else {
                unreachable!()
            };
            let oracle = oracle_all_same(&oracle_outcomes(&spec).map_err(|e| e.to_string())?);
            let verdict = pair_swap_preserves_state(*a, *b);
            ensure(verdict.same == oracle, || {
                format!("{spec}: predicate {verdict:?}, oracle {oracle}")
            })?;
            count += 1;
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!(
        "{count} ordered pairs, zero exceptions, {:.1?}",
        start.elapsed()
    ))
}

fn multi_state_sweep() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for n in 2..=4usize {
        for mask in 0..1u32 << n {
            let sizes: Vec<usize> = (0..n)
                .map(|k| if mask >> k & 1 == 1 { 4 } else { 2 })
                .collect();
            if sizes.iter().sum::<usize>() > 16 {
                continue;
            }
            let specs = sghz_products(&sizes).map_err(|e| e.to_string())?;
            let reports = verify_all(&specs).map_err(|e| e.to_string())?;
            for (spec, r) in specs.iter().zip(&reports) {
                ensure(r.passed(), || format!("{}: {:?}", r.spec, r.mismatches))?;
                let oracle = r.oracle_all_same;
                ensure(swap_preserves_state(spec.states()).same == oracle, || {
                    format!("{spec}: oracle says {oracle}")
                })?;
                count += 1;
            }
        }
    }

    // identical minus-signed states flip with the parity of n
    for n in 2..=6usize {
        let states = vec![GhzLabel::PHI_MINUS; n];
        let same = predict_multi(&SwapSpec::half_cut(states.clone()).unwrap())
            .unwrap()
            .all_same();
        ensure(same == (n % 2 == 0), || {
            format!("{n} x phi-: same = {same}")
        })?;
        ensure(swap_preserves_state(&states).same == same, || {
            format!("{n} x phi- predicate")
        })?;
    }

    // worked cases, for both families and both sign readings
    for family in [GhzLabel::PHI_PLUS, GhzLabel::PSI_PLUS] {
        for s in [Sign::Plus, Sign::Minus] {
            let st = family.with_sign(s);
            let flip = family.with_sign(-s);
            let cases: [(&str, Vec<GhzLabel>, bool); 5] = [
                ("three +", vec![family; 3], true),
                ("three -", vec![family.with_sign(Sign::Minus); 3], false),
                ("four identical", vec![st; 4], true),
                ("three and one", vec![st, st, st, flip], false),
                ("two and two", vec![st, st, flip, flip], true),
            ];
            for (name, states, expect) in cases {
                let spec = SwapSpec::half_cut(states.clone()).unwrap();
                let report = verify_against_oracle(&spec).map_err(|e| e.to_string())?;
                ensure(report.passed(), || {
                    format!("{name} {spec}: {:?}", report.mismatches)
                })?;
                ensure(report.oracle_all_same == expect, || {
                    format!("{name} {spec}: oracle same = {}", report.oracle_all_same)
                })?;
                ensure(swap_preserves_state(&states).same == expect, || {
                    format!("{name} {spec}: predicate")
                })?;
            }
        }
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!(
        "{count} products plus worked cases, {:.1?}",
        start.elapsed()
    ))
}

fn random_dense(rng: &mut ChaCha8Rng, n: usize) -> DenseState {
    let raw: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    DenseState::new(n, raw.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn uniformity() -> Outcome {
    let specs = random_specs(1000, 2024, 16).map_err(|e| e.to_string())?;
    for spec in &specs {
        let pred = predict_multi(spec).map_err(|e| e.to_string())?;
        let n = spec.states().len();
        ensure(pred.len() == 1 << n, || {
            format!("{spec}: {} outcomes", pred.len())
        })?;
        let max = pred
            .pairs
            .iter()
            .map(|p| p.probability)
            .fold(f64::MIN, f64::max);
        let min = pred
            .pairs
            .iter()
            .map(|p| p.probability)
            .fold(f64::MAX, f64::min);
        ensure((max / min - 1.0).abs() < 1e-12, || {
            format!("{spec}: ratio {}", max / min)
        })?;
        let total: f64 = pred.pairs.iter().map(|p| p.probability).sum();
        ensure((total - 1.0).abs() < 1e-10, || {
            format!("{spec}: prediction total {total}")
        })?;
    }
    for r in verify_all(&specs).map_err(|e| e.to_string())? {
        ensure(r.passed(), || format!("{}: {:?}", r.spec, r.mismatches))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..1000 {
        let n = rng.gen_range(3..=10);
        let state = random_dense(&mut rng, n);
        let mut particles: Vec<usize> = (1..=n).collect();
        particles.shuffle(&mut rng);
        let k = rng.gen_range(2..n);
        let outcomes = measure_ghz(&state, &particles[..k]).map_err(|e| e.to_string())?;
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        ensure((total - 1.0).abs() < 1e-10, || {
            format!("random case {case}: oracle total {total}")
        })?;
    }
    Ok("1000 predictions and 2000 oracle measurements normalized".into())
}

fn clean_protocols() -> Outcome {
    let start = Instant::now();
    let clean = Channel::clean();
    for seed in 0..500 {
        let l = 1 + seed as usize % 3;
        let t = qkd_session(4, l, seed, &clean).map_err(|e| e.to_string())?;
        let Derived::Qkd(r) = &t.derived else {
            unreachable!()
        };
        ensure(r.keys_agree && t.success, || {
            format!("qkd seed {seed} l {l}")
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut equal_cases = 0;
    for seed in 0..1000 {
        let x = rng.gen_range(0..256u64);
        let y = if rng.gen_bool(0.5) {
            x
        } else {
            rng.gen_range(0..256u64)
        };
        equal_cases += usize::from(x == y);
        let t =
            qpc_session(x, y, 8, seed, &clean, QpcOptions::default()).map_err(|e| e.to_string())?;
        let Derived::Qpc(r) = &t.derived else {
            unreachable!()
        };
        ensure((r.verdict == QpcVerdict::Equal) == (x == y), || {
            format!("qpc {x} vs {y}")
        })?;
    }
    for seed in 0..500 {
        let parties = 2 + seed as usize % 5;
        let t = qss_session(parties, seed, &clean, 0).map_err(|e| e.to_string())?;
        let Derived::Qss(r) = &t.derived else {
            unreachable!()
        };
        ensure(r.reconstruction_ok && r.reconstructed == r.secret, || {
            format!("qss seed {seed}")
        })?;
    }
    let outcome: GhzLabel = "GHZ(0110,+)".parse().unwrap();
    ensure(secret_from_outcome(outcome) == 6, || "0110 secret".into())?;
    for bits in ["0110", "1001"] {
        ensure(reconstruct_secret(bits.parse().unwrap()) == 6, || {
            format!("{bits} reconstruction")
        })?;
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "500 qkd, 1000 qpc ({equal_cases} equal), 500 qss, {:.1?}",
        start.elapsed()
    ))
}

/// Probability of a failed decoy check, summed over every branch of the
/// basis choice, the eavesdropper's coin and both parties' outcomes.
fn enumerated_decoy_failure(kind: DecoyKind, p: f64) -> f64 {
    let mut fail = 0.0;
    for x_basis in [false, true] {
        for (intercepts, p_eve) in [(true, p), (false, 1.0 - p)] {
            if p_eve == 0.0 {
                continue;
            }
            let w = 0.5 * p_eve;
            match kind {
                DecoyKind::SinglePhoton => {
                    for sent in 0..2u8 {
                        let mut photon = DenseState::basis(1, usize::from(sent)).unwrap();
                        if x_basis {
                            photon.apply_hadamard(1).unwrap();
                        }
                        let branches: Vec<(DenseState, f64)> = if intercepts {
                            (0..2u8)
                                .filter_map(|e| {
                                    let mut s = photon.clone();
                                    let pe = s.project_qubit(1, e).ok()?;
                                    (pe > 0.0).then_some((s, pe))
                                })
                                .collect()
                        } else {
                            vec![(photon, 1.0)]
                        };
                        for (mut s, pe) in branches {
                            if x_basis {
                                s.apply_hadamard(1).unwrap();
                            }
                            let p1 = s.probability_of_one(1).unwrap();
                            let wrong = if sent == 1 { 1.0 - p1 } else { p1 };
                            fail += w * 0.5 * pe * wrong;
                        }
                    }
                }
                DecoyKind::BellPair => {
                    let pair = embed(GhzLabel::PHI_PLUS).unwrap();
                    let branches: Vec<(DenseState, f64)> = if intercepts {
                        (0..2u8)
                            .filter_map(|e| {
                                let mut s = pair.clone();
                                let pe = s.project_qubit(2, e).ok()?;
                                (pe > 0.0).then_some((s, pe))
                            })
                            .collect()
                    } else {
                        vec![(pair, 1.0)]
                    };
                    for (mut s, pe) in branches {
                        if x_basis {
                            s.apply_hadamard(1).unwrap();
                            s.apply_hadamard(2).unwrap();
                        }
                        for a in 0..2u8 {
                            let mut t = s.clone();
                            let Ok(pa) = t.project_qubit(1, a) else {
                                continue;
                            };
                            if pa == 0.0 {
                                continue;
                            }
                            let p1 = t.probability_of_one(2).unwrap();
                            let wrong = if a == 1 { 1.0 - p1 } else { p1 };
                            fail += w * pe * pa * wrong;
                        }
                    }
                }
            }
        }
    }
    fail
}

fn eavesdropper_detection() -> Outcome {
    let channel = Channel::intercept(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut details = Vec::new();
    for kind in [DecoyKind::SinglePhoton, DecoyKind::BellPair] {
        let exact = enumerated_decoy_failure(kind, 1.0);
        let clean_rate = enumerated_decoy_failure(kind, 0.0);
        ensure(clean_rate.abs() < 1e-12, || {
            format!("{kind:?}: clean rate {clean_rate}")
        })?;
        let records = run_decoys(kind, 4000, "alice", "bob", &channel, &mut rng)
            .map_err(|e| e.to_string())?;
        let failures = records.iter().filter(|r| !r.passed).count();
        let rate = failures as f64 / records.len() as f64;
        let sigma = (exact * (1.0 - exact) / records.len() as f64).sqrt();
        ensure((rate - exact).abs() <= 3.0 * sigma, || {
            format!(
                "{kind:?}: empirical {rate:.4} vs exact {exact:.4} (3 sigma {:.4})",
                3.0 * sigma
            )
        })?;
        details.push(format!("{kind:?} {rate:.4} vs {exact:.4}"));
    }

    // the same rate seen through protocol transcripts
    let exact = enumerated_decoy_failure(DecoyKind::BellPair, 1.0);
    let (mut checks, mut failures) = (0, 0);
    for seed in 0..100 {
        let t = qss_session(3, seed, &channel, 10).map_err(|e| e.to_string())?;
        let stats = t.decoy_stats();
        checks += stats.checks;
        failures += stats.failures;
    }
    let rate = failures as f64 / checks as f64;
    let sigma = (exact * (1.0 - exact) / checks as f64).sqrt();
    ensure((rate - exact).abs() <= 3.0 * sigma, || {
        format!("qss decoys: {rate:.4} vs {exact:.4}")
    })?;
    details.push(format!("qss {rate:.4} over {checks}"));
    Ok(details.join(", "))
}

fn cli(args: &[&str], env_seed: Option<&str>) -> Result<(Vec<u8>, i32), String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ghz-swap"));
    cmd.args(args).env_remove("GHZ_SWAP_SEED");
    if let Some(seed) = env_seed {
        cmd.env("GHZ_SWAP_SEED", seed);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn cli_determinism() -> Outcome {
    let invocations: [(&[&str], i32); 9] = [
        (&["swap", "2:0:+", "2:0:+"], 0),
        (&["swap", "GHZ(0101,+)", "GHZ(0101,+)", "--json"], 0),
        (&["swap", "3:1:+", "2:0:+", "--cut", "2,1", "--json"], 0),
        (&["verify", "--bell-exhaustive", "--json"], 0),
        (&["verify", "--random", "50", "--seed", "7"], 0),
        (&["same", "2:0:-", "2:0:-", "2:0:-", "--check"], 0),
        (
            &[
                "protocol", "qkd", "--n", "8", "--l", "2", "--eve", "1.0", "--seed", "1",
            ],
            4,
        ),
        (
            &[
                "protocol", "qpc", "--x", "6", "--y", "6", "--bits", "3", "--seed", "1",
                "--decoys", "2",
            ],
            0,
        ),
        (&["protocol", "qss", "--parties", "4", "--seed", "1"], 0),
    ];
    for (args, code) in invocations {
        let (first, c1) = cli(args, None)?;
        let (second, c2) = cli(args, None)?;
        ensure(c1 == code && c2 == code, || {
            format!("{args:?}: exit {c1}/{c2}, expected {code}")
        })?;
        ensure(!first.is_empty(), || format!("{args:?}: empty output"))?;
        ensure(digest(&first) == digest(&second), || {
            format!("{args:?}: output hashes differ")
        })?;
    }
    let (flag, _) = cli(&["protocol", "qss", "--parties", "3", "--seed", "9"], None)?;
    let (env, _) = cli(&["protocol", "qss", "--parties", "3"], Some("9"))?;
    ensure(digest(&flag) == digest(&env), || {
        "env seed differs from --seed".into()
    })?;
    let (_, usage) = cli(&["swap", "2:7:+", "2:0:+"], None)?;
    ensure(usage == 2, || format!("bad label exit {usage}"))?;
    let (_, resource) = cli(&["protocol", "qss", "--parties", "13"], None)?;
    ensure(resource == 3, || {
        format!("oversized register exit {resource}")
    })?;
    Ok(format!(
        "{} invocations byte-identical across runs",
        invocations.len()
    ))
}

fn transcript_schema() -> Outcome {
    let schema_text = include_str!("../../../docs/transcript.schema.json");
    let schema: serde_json::Value = serde_json::from_str(schema_text).map_err(|e| e.to_string())?;
    let validator = jsonschema::validator_for(&schema).map_err(|e| e.to_string())?;
    let channel = Channel::intercept(0.7).with_decoys(2);
    let runs = [
        qkd_session(6, 2, 1, &channel),
        qkd_session(3, 1, 2, &Channel::clean()),
        qpc_session(200, 73, 8, 3, &channel, QpcOptions { amplify: Some(7) }),
        qss_session(5, 4, &channel, 3),
    ];
    for t in runs {
        let t = t.map_err(|e| e.to_string())?;
        let text = serde_json::to_string(&t).map_err(|e| e.to_string())?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        if let Some(err) = validator.iter_errors(&value).next() {
            return Err(format!(
                "{:?}: {err} at {}",
                t.protocol,
                err.instance_path()
            ));
        }
        let back: ProtocolTranscript = serde_json::from_value(value).map_err(|e| e.to_string())?;
        ensure(back == t, || {
            format!("{:?}: round trip changed the transcript", t.protocol)
        })?;
    }
    Ok("4 transcripts validate and round-trip".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 bell x bell exhaustive table", bell_exhaustive),
        ("2 two-state sghz sweep", two_state_sweep),
        ("3 multi-state sweep and worked cases", multi_state_sweep),
        ("4 uniformity and normalization", uniformity),
        ("5 clean-channel protocols", clean_protocols),
        (
            "6 eavesdropper detection vs enumeration",
            eavesdropper_detection,
        ),
        ("7 cli determinism", cli_determinism),
        ("  transcript schema round trip", transcript_schema),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS [{name}] {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL [{name}] {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
