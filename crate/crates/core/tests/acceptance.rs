// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.
// Run with `cargo test -p dram-petri --test acceptance`.

use std::collections::VecDeque;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dram_petri::analysis::{
    enumerate_traces_with, for_each_trace_with, unroll_with, TraceOptions, UnrollOptions,
};
use dram_petri::emit::export_dot_stategraph;
use dram_petri::verify::run_probe_suite;
use dram_petri::{
    count_traces, emit, enumerate_traces, k_min, parse_trace, render_trace, replay,
    state_count_formula, unroll, ArcKind, CommandKind, DramNet, EmissionTarget, NetBuilder,
    PlaceKind, ProtocolConfig, ReplayMode, ReplayOptions, TimedCommand, TimingState,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DDR3: &str = include_str!("../examples/ddr3-like.cfg");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn functional(ranks: u32, banks: u32) -> DramNet {
    DramNet::from_config(&ProtocolConfig::functional(ranks, banks)).unwrap()
}

fn trace_counts() -> Outcome {
    let dnet = functional(1, 2);
    let expected: [u128; 7] = [8, 52, 368, 2664, 19624, 145926, 1091106];
    let start = Instant::now();
    for (k, &want) in expected.iter().enumerate().take(5) {
        let k = k + 1;
        let listed = enumerate_traces(&dnet, k).map_err(|e| e.to_string())?.len() as u128;
        let counted = count_traces(&dnet, k).map_err(|e| e.to_string())?;
        ensure(listed == want && counted == want, || {
            format!("k={k}: enumerated {listed}, counted {counted}, expected {want}")
        })?;
    }
    let core = start.elapsed();
    ensure(core < Duration::from_secs(5), || {
        format!("k=1..5 took {core:?}")
    })?;

    let start = Instant::now();
    for (k, &want) in expected.iter().enumerate().skip(5) {
        let k = k + 1;
        let counted = count_traces(&dnet, k).map_err(|e| e.to_string())?;
        ensure(counted == want, || {
            format!("k={k}: counted {counted}, expected {want}")
        })?;
    }
    let extended = start.elapsed();
    ensure(extended < Duration::from_secs(10), || {
        format!("k=6,7 took {extended:?}")
    })?;
    Ok(format!(
        "8, 52, 368, 2664, 19624 in {core:.2?}; 145926, 1091106 in {extended:.2?}"
    ))
}

fn state_counts() -> Outcome {
    let cases = [
        (1, 1, 5u64),
        (1, 2, 9),
        (1, 4, 33),
        (1, 8, 513),
        (1, 16, 131073),
        (2, 8, 263169),
    ];
    let mut slowest = Duration::ZERO;
    for (ranks, banks, want) in cases {
        let start = Instant::now();
        let sg = unroll(&functional(ranks, banks)).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        let formula = state_count_formula(banks, ranks);
        ensure(
            sg.state_count() as u64 == want && formula == want.into(),
            || {
                format!(
                    "R={ranks} B={banks}: unrolled {}, formula {formula}, expected {want}",
                    sg.state_count()
                )
            },
        )?;
        ensure(took < Duration::from_secs(30), || {
            format!("R={ranks} B={banks} took {took:?}")
        })?;
    }
    Ok(format!(
        "5, 9, 33, 513, 131073, 263169; slowest {slowest:.2?}"
    ))
}

/// Longest BFS distance from idle, computed here without the library's k_min.
fn eccentricity(dnet: &DramNet) -> usize {
    let net = dnet.net();
    let start = dnet.idle_marking();
    let mut dist = std::collections::HashMap::from([(start.clone(), 0usize)]);
    let mut queue = VecDeque::from([start]);
    let mut far = 0;
    while let Some(m) = queue.pop_front() {
        let d = dist[&m];
        far = far.max(d);
        for t in net.enabled_set(&m) {
            let next = net.fire(&m, t).unwrap();
            if !dist.contains_key(&next) {
                dist.insert(next.clone(), d + 1);
                queue.push_back(next);
            }
        }
    }
    far
}

fn k_min_values() -> Outcome {
    let mut seen = Vec::new();
    for (banks, ranks) in [(1u32, 1u32), (2, 1), (4, 1), (2, 2)] {
        let dnet = functional(ranks, banks);
        let got = k_min(&unroll(&dnet).map_err(|e| e.to_string())?);
        let want = (banks + 1) * ranks;
        let oracle = eccentricity(&dnet);
        ensure(got == want && oracle == want as usize, || {
            format!("B={banks} R={ranks}: k_min {got}, oracle {oracle}, expected {want}")
        })?;
        seen.push(got.to_string());
    }
    Ok(seen.join(", "))
}

const SAMPLE_TRACES: &str = "\
[PREA  (RA0)    ; PREA  (RA0)    ; PREA  (RA0)   ],
[PREA  (RA0)    ; PRE   (RA0BA1) ; SRE   (RA0)   ],
[ACT   (RA0BA0) ; ACT   (RA0BA1) ; WR    (RA0BA0)],
[SRE   (RA0)    ; SRX   (RA0)    ; PDE   (RA0)   ],
[ACT   (RA0BA0) ; PREA  (RA0)    ; ACT   (RA0BA0)],
[ACT   (RA0BA0) ; ACT   (RA0BA1) ; PDE   (RA0)   ],
";

fn sample_membership() -> Outcome {
    let set = enumerate_traces(&functional(1, 2), 3).map_err(|e| e.to_string())?;
    let commands = parse_trace(SAMPLE_TRACES).map_err(|e| e.to_string())?;
    ensure(commands.len() == 18, || {
        format!("parsed {} commands", commands.len())
    })?;
    for chunk in commands.chunks(3) {
        let trace: Vec<_> = chunk.iter().map(|c| c.label).collect();
        ensure(set.contains(&trace), || {
            format!("missing: {}", render_trace(&trace))
        })?;
    }
    Ok("6/6 sample traces are legal at k=3".into())
}

fn reaction() -> Outcome {
    let mut b = NetBuilder::new();
    let p1 = b.add_place(PlaceKind::Aux("p1".into()), None, 2).unwrap();
    let p2 = b.add_place(PlaceKind::Aux("p2".into()), None, 2).unwrap();
    let p3 = b.add_place(PlaceKind::Aux("p3".into()), None, 0).unwrap();
    let t1 = b.add_custom_transition("t1", None).unwrap();
    b.add_arc(p1, t1, ArcKind::Normal { weight: 1 }).unwrap();
    b.add_arc(p2, t1, ArcKind::Normal { weight: 2 }).unwrap();
    b.add_arc(t1, p3, ArcKind::Normal { weight: 2 }).unwrap();
    let net = b.freeze();
    let after = net
        .fire(&net.initial_marking(), t1)
        .map_err(|e| e.to_string())?;
    ensure(after.counts() == [1, 0, 2], || {
        format!("got {:?}", after.counts())
    })?;
    Ok("{2,2,0} -> {1,0,2}".into())
}

fn probe_suite() -> Outcome {
    let dnet = DramNet::from_config(&ProtocolConfig::parse(DDR3).unwrap()).unwrap();
    let results = run_probe_suite(&dnet);
    ensure(!results.is_empty(), || "no timing arcs".into())?;
    let failed: Vec<_> = results.iter().filter(|r| !r.passed()).collect();
    ensure(failed.is_empty(), || {
        format!("{} failing, first: {}", failed.len(), failed[0])
    })?;
    Ok(format!("{}/{} timing arcs", results.len(), results.len()))
}

fn faw_window() -> Outcome {
    let mut config = ProtocolConfig::parse(DDR3).unwrap();
    config.constraints.clear();
    let dnet = DramNet::from_config(&config).unwrap();
    let net = dnet.net();
    let faw = dnet
        .window_rules()
        .iter()
        .find(|r| r.name.starts_with("FAW"))
        .cloned()
        .ok_or("no FAW rule")?;
    ensure(faw.threshold == 4, || {
        format!("FAW threshold {}", faw.threshold)
    })?;
    let rules = [faw.clone()];
    let acts: Vec<_> = net
        .transition_ids()
        .filter(|&t| dnet.label(t).command == CommandKind::ACT)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xFA3);

    // Any four activates inside one window block a fifth.
    for _ in 0..1000 {
        let mut timing = TimingState::new(net, &rules);
        let base = rng.gen_range(0..100);
        let mut times: Vec<u64> = (0..4)
            .map(|_| base + rng.gen_range(0..faw.length))
            .collect();
        times.sort();
        let mut banks = acts.clone();
        banks.shuffle(&mut rng);
        for (i, &now) in times.iter().enumerate() {
            timing
                .check(net, banks[i], now)
                .map_err(|b| format!("{b:?}"))?;
            timing.record_firing(net, banks[i], now).unwrap();
        }
        let fifth = times[0] + rng.gen_range(times[3] - times[0]..faw.length);
        ensure(!timing.timing_enabled(net, banks[4], fifth), || {
            format!("fifth ACT at {fifth} allowed after {times:?}")
        })?;
        ensure(
            timing.earliest_fire_time(net, banks[4], fifth) == Some(times[0] + faw.length),
            || {
                format!(
                    "earliest after {times:?} should be {}",
                    times[0] + faw.length
                )
            },
        )?;
    }

    // Incremental count against a brute-force recount.
    let mut checks = 0;
    for _ in 0..1000 {
        let mut m = dnet.idle_marking();
        let mut timing = TimingState::new(net, &rules);
        let mut fired: Vec<u64> = Vec::new();
        let mut now = 0;
        for _ in 0..30 {
            let Some(&t) = net.enabled_set(&m).choose(&mut rng) else {
                break;
            };
            now += rng.gen_range(0..12);
            let brute = fired.iter().filter(|&&b| b + faw.length > now).count() as u32;
            let incremental = timing.window_count(0, now);
            ensure(brute == incremental, || {
                format!("at {now}: incremental {incremental}, brute force {brute}")
            })?;
            let watched = faw.watched.contains(&t);
            let allowed = timing.timing_enabled(net, t, now);
            ensure(allowed == !(watched && brute >= faw.threshold), || {
                format!("at {now}: allowed={allowed} with {brute} in window")
            })?;
            checks += 1;
            if allowed {
                m = net.fire(&m, t).unwrap();
                timing.record_firing(net, t, now).unwrap();
                if watched {
                    fired.push(now);
                }
            }
        }
    }
    Ok(format!(
        "1000 blocking cases, {checks} recounts over 1000 sequences"
    ))
}

fn oracle_equivalence() -> Outcome {
    let dnet = functional(1, 2);
    let labels = dnet.labels();
    let untimed = ReplayOptions::untimed(ReplayMode::StopAtFirst);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut samples, mut legal) = (0, 0);
    for k in 1..=4 {
        let set = enumerate_traces(&dnet, k)
            .map_err(|e| e.to_string())?
            .to_set();
        for _ in 0..5000 {
            let trace: Vec<_> = (0..k).map(|_| *labels.choose(&mut rng).unwrap()).collect();
            let timed: Vec<_> = trace
                .iter()
                .enumerate()
                .map(|(i, &l)| TimedCommand::new(i as u64, l))
                .collect();
            let accepted = replay(&dnet, &timed, untimed).is_clean();
            let member = set.contains(&trace);
            ensure(accepted == member, || {
                format!(
                    "{}: replay {accepted}, enumeration {member}",
                    render_trace(&trace)
                )
            })?;
            samples += 1;
            legal += usize::from(member);
        }
    }
    Ok(format!(
        "{samples} samples ({legal} legal), 0 disagreements"
    ))
}

fn determinism() -> Outcome {
    let dnet = DramNet::from_config(&ProtocolConfig::parse(DDR3).unwrap()).unwrap();
    let small = functional(1, 2);
    let unroll_dot = |threads| {
        let opts = UnrollOptions {
            threads,
            ..UnrollOptions::default()
        };
        export_dot_stategraph(&unroll_with(dnet.shared_net(), &opts).unwrap())
    };
    let traces = |threads| {
        let opts = TraceOptions {
            limit: None,
            threads,
        };
        let mut out = String::new();
        for_each_trace_with(small.net(), 4, &opts, |ids| {
            let labels: Vec<_> = ids.iter().map(|&t| small.label(t)).collect();
            out.push_str(&render_trace(&labels));
            out.push('\n');
        })
        .unwrap();
        out
    };
    ensure(unroll_dot(1) == unroll_dot(1), || {
        "unroll differs between runs".into()
    })?;
    ensure(unroll_dot(1) == unroll_dot(4), || {
        "unroll differs with threads".into()
    })?;
    ensure(traces(1) == traces(1), || {
        "traces differ between runs".into()
    })?;
    ensure(traces(1) == traces(4), || {
        "traces differ with threads".into()
    })?;
    let set_1 = enumerate_traces_with(&small, 4, &TraceOptions::default()).unwrap();
    let set_4 = enumerate_traces_with(
        &small,
        4,
        &TraceOptions {
            limit: None,
            threads: 4,
        },
    )
    .unwrap();
    ensure(set_1 == set_4, || "trace sets differ with threads".into())?;
    for target in EmissionTarget::ALL {
        let a = emit(&dnet, target).map_err(|e| e.to_string())?;
        let b = emit(&dnet, target).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{target} differs between runs"))?;
    }
    Ok("unroll, traces and all emit targets byte-identical (threads 1 vs 4)".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("trace counts", trace_counts),
        ("state counts", state_counts),
        ("k_min", k_min_values),
        ("sample trace membership", sample_membership),
        ("firing oracle", reaction),
        ("timing probe suite", probe_suite),
        ("four-activate window", faw_window),
        ("replay vs enumeration", oracle_equivalence),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
