//! Property suites shared by the `properties` and `acceptance` targets.
//! Every suite runs a fixed number of cases from a fixed seed.

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::sample::{select, subsequence};
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use psafe::ast::{pretty_print, Action, Ident};
use psafe::frontend::parse_source;
use psafe::runtime::{evaluate, lower, merge, ActuationCommand, ClauseRef, MonitorConfig};
use psafe::sema::lint;
use psafe::sensors::{compute_histogram, parse_scenario, pgm, Image, SensorSnapshot};

use super::gen::{self, SnapSpec};
use super::oracle;

pub const CASES: u32 = 1000;
pub const SEED: u64 = 0x5AFE_7E57_0000_0001;

pub fn runner() -> TestRunner {
    let mut seed = [0u8; 32];
    for (i, chunk) in seed.chunks_mut(8).enumerate() {
        chunk.copy_from_slice(&SEED.wrapping_add(i as u64).to_le_bytes());
    }
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &seed))
}

fn run<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner()
        .run(&strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn contribution() -> impl Strategy<Value = ActuationCommand> {
    let actions = subsequence(
        vec!["stop", "cap_speed", "sound a", "sound b", "sound c"],
        1..=3,
    )
    .prop_shuffle();
    (0usize..4, 0usize..3, actions, 0.05f64..1.0).prop_map(|(g, c, acts, cap)| {
        let actions: Vec<Action> = acts
            .iter()
            .map(|a| match *a {
                "stop" => Action::Stop,
                "cap_speed" => Action::CapSpeed,
                s => Action::Sound(Ident::new(&s[6..])),
            })
            .collect();
        ActuationCommand::from_clause(ClauseRef::new(g, c), &actions, cap, 1.0)
    })
}

pub fn merge_laws() -> Result<(), String> {
    let strategy = (
        contribution(),
        contribution(),
        contribution(),
        proptest::collection::vec(contribution(), 0..6),
    );
    run("merge laws", strategy, |(a, b, c, rest)| {
        check(a.meet(&b) == b.meet(&a), || {
            "meet is not commutative".into()
        })?;
        check(a.meet(&b).meet(&c) == a.meet(&b.meet(&c)), || {
            "meet is not associative".into()
        })?;
        check(a.meet(&a) == a, || "meet is not idempotent".into())?;
        let merged = merge(1.0, rest.iter().cloned().chain([a.clone(), b.clone()]));
        check(merged.meet(&merged) == merged, || {
            "merged result is not idempotent".into()
        })?;
        let mut reversed = rest.clone();
        reversed.reverse();
        check(
            merge(1.0, [b.clone(), a.clone()].into_iter().chain(reversed)) == merged,
            || "merge depends on contribution order".into(),
        )?;
        for m in [&merged, &a.meet(&b)] {
            check(!m.stop || m.speed == 0.0, || {
                format!("stop with speed {}", m.speed)
            })?;
            check(m.speed <= 1.0, || {
                format!("speed {} above nominal", m.speed)
            })?;
        }
        let labels = merged.sound_labels();
        let mut unique = labels.clone();
        unique.sort();
        unique.dedup();
        check(unique.len() == labels.len(), || {
            format!("duplicate sounds {labels:?}")
        })
    })
}

fn reference_table() -> psafe::runtime::RuleTable {
    let typed = psafe::compile("reference", psafe::REFERENCE_PROGRAM).unwrap();
    lower(&typed, &MonitorConfig::default()).unwrap()
}

fn no_less_safe(before: &ActuationCommand, after: &ActuationCommand) -> Result<(), TestCaseError> {
    check(after.speed <= before.speed, || {
        format!("speed rose from {} to {}", before.speed, after.speed)
    })?;
    check(!before.stop || after.stop, || "stop was cleared".into())?;
    check(before.fired.iter().all(|f| after.fired.contains(f)), || {
        format!("fired set shrank: {:?} -> {:?}", before.fired, after.fired)
    })
}

/// Adding a detection or clearing an alive bit never makes the reference
/// program less restrictive.
pub fn monotonicity() -> Result<(), String> {
    let table = reference_table();
    let strategy = (
        gen::complete_snapshot(),
        any::<bool>(),
        select(gen::LABELS.to_vec()),
        gen::distance(),
        0u32..32,
    );
    run(
        "safety monotonicity",
        strategy,
        |(shape, to_camera, label, d, bit)| {
            let before = evaluate(&table, &shape.build(0.0));

            let mut more = shape.clone();
            let list = if to_camera {
                &mut more.camera
            } else {
                &mut more.lidar
            };
            list.as_mut().unwrap().push((label.to_string(), d));
            no_less_safe(&before, &evaluate(&table, &more.build(0.0)))?;

            let mut fewer = shape.clone();
            let mask = fewer.mask.unwrap();
            let set_bits: Vec<u32> = (0..32).filter(|i| mask & (1 << i) != 0).collect();
            if !set_bits.is_empty() {
                fewer.mask = Some(mask & !(1 << set_bits[bit as usize % set_bits.len()]));
                no_less_safe(&before, &evaluate(&table, &fewer.build(0.0)))?;
            }
            Ok(())
        },
    )
}

/// The lowered evaluator agrees with the AST-walking oracle, and every fired
/// clause re-evaluates to true there.
pub fn oracle_equivalence() -> Result<(), String> {
    let strategy = (
        gen::program(),
        proptest::collection::vec(gen::snapshot(), 1..4),
        proptest::collection::vec((0usize..4, 0usize..3, 0.05f64..1.0), 0..3),
    );
    run(
        "evaluator matches oracle",
        strategy,
        |(source, snaps, caps)| {
            let typed = psafe::compile("gen", &source).map_err(|d| {
                TestCaseError::fail(format!("generated program rejected: {d:?}\n{source}"))
            })?;
            let mut config = MonitorConfig::default();
            for (g, c, v) in caps {
                let exists = typed
                    .program()
                    .groups
                    .get(g)
                    .is_some_and(|gr| c < gr.clauses.len());
                if exists {
                    config = config.with_cap(g, c, v);
                }
            }
            let table = lower(&typed, &config).map_err(|e| TestCaseError::fail(e.to_string()))?;
            for shape in snaps {
                let snap = shape.build(0.0);
                let got = evaluate(&table, &snap);
                check(got == evaluate(&table, &snap), || {
                    "evaluation is not deterministic".into()
                })?;
                let want = oracle::run(typed.program(), &config, &snap);
                let got_summary = oracle::Outcome {
                    stop: got.stop,
                    speed: got.speed,
                    sounds: got.sound_labels().iter().map(|s| s.to_string()).collect(),
                    fired: got.fired.iter().map(|f| (f.group, f.clause)).collect(),
                    faults: got.faults.iter().map(|f| f.to_string()).collect(),
                };
                check(got_summary == want, || {
                    format!("program:\n{source}\nsnapshot: {shape:?}\nevaluator: {got_summary:?}\noracle:    {want:?}")
                })?;
            }
            Ok(())
        },
    )
}

pub fn histogram_conservation() -> Result<(), String> {
    let strategy = (gen::image(64), prop_oneof![1usize..=16, 1usize..=256]);
    run(
        "histogram conservation",
        strategy,
        |((w, h, pixels), bins)| {
            let image = Image::new(w, h, pixels).unwrap();
            let hist = compute_histogram(&image, bins).unwrap();
            let total: u64 = hist.bin_counts().iter().sum();
            check(total == u64::from(w) * u64::from(h), || {
                format!("{total} != {w}x{h}")
            })?;
            check(hist.total_pixels() == total, || {
                "total_pixels disagrees with the bins".into()
            })?;
            check(
                hist.bin_counts() == oracle::brute_histogram(&image, bins),
                || "binning differs from oracle".into(),
            )?;
            let norm = hist.normalized_view();
            let sum: f64 = norm.iter().sum();
            check((sum - 1.0).abs() <= 1e-9, || {
                format!("normalized sum {sum}")
            })?;
            check(
                norm.iter()
                    .zip(hist.bin_counts())
                    .all(|(f, &c)| *f == c as f64 / total as f64),
                || "normalized view is not count / total".into(),
            )
        },
    )
}

pub fn round_trip() -> Result<(), String> {
    run("parse/pretty-print round trip", gen::program(), |source| {
        let first = parse_source("rt", &source)
            .map_err(|d| TestCaseError::fail(format!("{d:?}\n{source}")))?;
        let printed = pretty_print(&first);
        let second = parse_source("rt", &printed)
            .map_err(|d| TestCaseError::fail(format!("reparse failed: {d:?}\n{printed}")))?;
        check(first.without_spans() == second.without_spans(), || {
            format!("round trip changed the program:\n{source}\n---\n{printed}")
        })?;
        check(pretty_print(&second) == printed, || {
            "pretty printing is not a fixed point".into()
        })
    })
}

const VOCAB: [&str; 40] = [
    "exists",
    "p",
    "in",
    "camera",
    ".",
    "all",
    "(",
    ")",
    "pedestrian",
    ":",
    "distance",
    "<",
    "1m",
    "{",
    "}",
    ";",
    "sound",
    "stop",
    "cap_speed",
    "hist",
    "h",
    "=",
    "histogram",
    "bins",
    ",",
    "10",
    "normalized",
    "true",
    "size",
    "x",
    "max",
    "min",
    "-",
    "+",
    "*",
    "/",
    "1000px",
    "lasers",
    "count",
    "#c\n",
];

fn fuzz_input() -> impl Strategy<Value = String> {
    let soup = proptest::collection::vec(
        (select(VOCAB.to_vec()), select(vec![" ", "", "\n", "\t"])),
        0..8192,
    )
    .prop_map(|ts| ts.into_iter().flat_map(|(t, s)| [t, s]).collect::<String>());
    let bytes = proptest::collection::vec(any::<u8>(), 0..=65536)
        .prop_map(|b| String::from_utf8_lossy(&b).into_owned());
    let mutated =
        proptest::collection::vec((any::<usize>(), any::<u8>(), 0u8..3), 1..64).prop_map(|edits| {
            let mut s = psafe::REFERENCE_PROGRAM.as_bytes().to_vec();
            for (at, byte, kind) in edits {
                let i = at % (s.len() + 1);
                match kind {
                    0 if i < s.len() => s[i] = byte,
                    1 => s.insert(i, byte),
                    _ if i < s.len() => {
                        s.remove(i);
                    }
                    _ => {}
                }
            }
            String::from_utf8_lossy(&s).into_owned()
        });
    let nested = (
        1usize..30_000,
        select(vec!["(", "-", "size(", "x in h.bins: "]),
    )
        .prop_map(|(n, open)| {
            format!(
                "lasers a in lasers(alive): {}count(a) < 1 {{ stop; }}",
                open.repeat(n)
            )
        });
    prop_oneof![3 => soup, 2 => bytes, 3 => mutated, 1 => nested]
        .prop_map(|s| s.chars().take(65536).collect::<String>())
        .prop_filter("at most 64 KiB", |s| s.len() <= 65536)
}

/// Arbitrary input never panics or stalls anywhere in the pipeline.
pub fn fuzz() -> Result<(), String> {
    let snap: SensorSnapshot = SnapSpec {
        camera: Some(vec![("pedestrian".into(), 0.7)]),
        lidar: Some(vec![]),
        frame: Some(gen::FrameSpec::Image {
            width: 4,
            height: 4,
            pixels: (0..16).map(|i| i * 16).collect(),
        }),
        mask: Some(0x0FFF_FFFF),
    }
    .build(0.0);
    run("fuzz", fuzz_input(), |input| {
        let start = Instant::now();
        if let Ok(typed) = psafe::compile("fuzz", &input) {
            let _ = lint(&typed);
            if let Ok(table) = lower(&typed, &MonitorConfig::default()) {
                let _ = table.dump();
                let _ = evaluate(&table, &snap);
            }
        }
        let _ = pgm::decode(input.as_bytes());
        let _ = parse_scenario(&input, std::path::Path::new("."), "fuzz");
        let elapsed = start.elapsed();
        check(elapsed < Duration::from_secs(2), || {
            format!("input of {} bytes took {elapsed:?}", input.len())
        })
    })
}

pub type Suite = fn() -> Result<(), String>;

pub const ALL: [(&str, Suite); 6] = [
    ("merge lattice laws", merge_laws),
    ("safety monotonicity", monotonicity),
    ("evaluator equals AST oracle", oracle_equivalence),
    ("histogram conservation", histogram_conservation),
    ("parse/pretty round trip", round_trip),
    ("fuzz up to 64 KiB", fuzz),
];
