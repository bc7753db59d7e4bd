//! Acceptance suite. Each test prints one `criterion N ... PASS` line (visible
//! with `--nocapture`) and fails loudly otherwise:
//!
//! 1. top-3 accuracy on a synthetic speaker-alternating first-order chain
//!    lands within ±2 percentage points of the analytic chain mass, in <10s;
//! 2. 1000 random histories normalize to 1 ± 1e-9 in <5s;
//! 3. predictions match a brute-force relative-frequency oracle to 1e-12 on
//!    every small corpus;
//! 4. golden replay of the example dialogue (byte-identity is asserted in
//!    `tests/golden.rs`; the dialogue-state assertions are repeated here);
//! 5. implausible dates drive the clarification automaton with plausible
//!    clamp proposals across 1990-2010;
//! 6. next/following classification is exact over anchor/referent pairs;
//! 7. reading disambiguation follows the preceding act;
//! 8. operator learning finds recurring turns and covers them without repair.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use chrono::Datelike;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use dlg_core::clarify::{corrected, ClarifyState, Proposal, Response};
use dlg_core::corpus::{default_inventory, ActLabel, Corpus, Dialogue, Turn, Utterance};
use dlg_core::engine::{Session, SessionConfig};
use dlg_core::plan::{learn_operators, recognize_turn, OperatorSet, PlanNode};
use dlg_core::predict::{train, DirectionTag, TaggedAct};
use dlg_core::sequence::ReadingCandidate;
use dlg_core::thematic::{
    check_plausibility, classify_successor, ClockTime, DayOfWeek, SpeakingTime, Succession,
    TimeDescription, TimeExpression,
};

fn asset(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("assets")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn dialogue(id: &str, speakers_and_acts: Vec<(&str, Vec<&str>)>) -> Dialogue {
    Dialogue {
        id: id.into(),
        speaking_time: SpeakingTime::new(1996, 1, 4),
        participants: ["A".into(), "B".into()],
        turns: speakers_and_acts
            .into_iter()
            .map(|(speaker, acts)| Turn {
                speaker: speaker.into(),
                language: "de".into(),
                utterances: acts
                    .into_iter()
                    .map(|a| Utterance {
                        text: None,
                        act: a.into(),
                        times: Vec::new(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

// --- criterion 1 -----------------------------------------------------------

const CHAIN_ACTS: [&str; 10] = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"];
/// Every transition row is a permutation of this profile; its top-3 mass is
/// exactly 0.70.
const PROFILE: [f64; 10] = [0.33, 0.22, 0.15, 0.10, 0.07, 0.05, 0.03, 0.02, 0.02, 0.01];

fn chain_matrix() -> Vec<Vec<f64>> {
    let mut rng = StdRng::seed_from_u64(7);
    (0..10)
        .map(|_| {
            let mut row: Vec<f64> = PROFILE.to_vec();
            // Fisher-Yates over the profile entries.
            for i in (1..row.len()).rev() {
                let j = rng.gen_range(0..=i);
                row.swap(i, j);
            }
            row
        })
        .collect()
}

fn sample_chain_corpus(matrix: &[Vec<f64>], dialogues: usize, length: usize, seed: u64) -> Corpus {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut sample_row = |weights: &[f64]| -> usize {
        let mut x: f64 = rng.gen();
        for (i, w) in weights.iter().enumerate() {
            x -= w;
            if x <= 0.0 {
                return i;
            }
        }
        weights.len() - 1
    };
    let corpus_dialogues = (0..dialogues)
        .map(|d| {
            let mut state = {
                // Uniform initial act, so any top-3 set covers 0.3 of the
                // first positions.
                let mut rng_first = StdRng::seed_from_u64(seed.wrapping_mul(31) + d as u64);
                rng_first.gen_range(0..CHAIN_ACTS.len())
            };
            let mut turns = Vec::new();
            for t in 0..length {
                if t > 0 {
                    state = sample_row(&matrix[state]);
                }
                // One utterance per turn, speakers strictly alternating.
                turns.push(Turn {
                    speaker: if t % 2 == 0 { "A" } else { "B" }.into(),
                    language: "de".into(),
                    utterances: vec![Utterance {
                        text: None,
                        act: CHAIN_ACTS[state].into(),
                        times: Vec::new(),
                    }],
                });
            }
            Dialogue {
                id: format!("chain-{d}"),
                speaking_time: SpeakingTime::new(1996, 1, 4),
                participants: ["A".into(), "B".into()],
                turns,
            }
        })
        .collect();
    Corpus {
        act_inventory: CHAIN_ACTS.iter().map(|a| ActLabel::from(*a)).collect(),
        dialogues: corpus_dialogues,
    }
}

#[test]
fn criterion_1_synthetic_chain_top3_accuracy() {
    let started = Instant::now();
    let matrix = chain_matrix();
    let corpus = sample_chain_corpus(&matrix, 200, 25, 42);
    assert_eq!(corpus.utterance_count(), 5000);
    // Accuracy is measured against the chain itself: a second, independently
    // sampled corpus keeps memorized trigram noise out of the estimate.
    let eval_corpus = sample_chain_corpus(&matrix, 200, 25, 4242);

    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("chain.json");
    std::fs::write(&corpus_path, serde_json::to_string(&corpus).unwrap()).unwrap();
    let eval_path = dir.path().join("chain_eval.json");
    std::fs::write(&eval_path, serde_json::to_string(&eval_corpus).unwrap()).unwrap();
    let model_path = dir.path().join("chain_model.json");

    let output = Command::new(env!("CARGO_BIN_EXE_dlg"))
        .args([
            "train",
            "--corpus",
            corpus_path.to_str().unwrap(),
            "--model",
            model_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{:?}", output);

    let output = Command::new(env!("CARGO_BIN_EXE_dlg"))
        .args([
            "eval",
            "--model",
            model_path.to_str().unwrap(),
            "--corpus",
            eval_path.to_str().unwrap(),
            "--top-n",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{:?}", output);
    let stdout = String::from_utf8(output.stdout).unwrap();
    let measured: f64 = stdout
        .trim()
        .strip_prefix("top-3 hit rate: ")
        .and_then(|s| s.strip_suffix('%'))
        .expect("eval output format")
        .parse()
        .unwrap();

    // Analytic expectation: every chain row puts 0.70 on its true top three
    // successors; the uniformly distributed first position contributes 3/10
    // for any three predicted acts.
    let expected = 100.0 * (0.3 + 24.0 * 0.70) / 25.0;
    let elapsed = started.elapsed();
    println!(
        "criterion 1: measured {measured:.2}% vs analytic {expected:.2}% \
         (|diff| = {:.2}pp, {elapsed:?}) -> PASS expected within 2pp",
        (measured - expected).abs()
    );
    assert!(
        (measured - expected).abs() <= 2.0,
        "top-3 rate {measured:.2}% deviates more than 2pp from {expected:.2}%"
    );
    assert!(elapsed.as_secs() < 10, "took {elapsed:?}, budget 10s");
}

// --- criterion 2 -----------------------------------------------------------

#[test]
fn criterion_2_normalization_over_random_histories() {
    let started = Instant::now();
    let matrix = chain_matrix();
    let corpus = sample_chain_corpus(&matrix, 40, 25, 42);
    let model = train(&corpus, 3).unwrap();

    let mut rng = StdRng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let len = rng.gen_range(0..=10);
        let history: Vec<TaggedAct> = (0..len)
            .map(|_| {
                let act = CHAIN_ACTS[rng.gen_range(0..CHAIN_ACTS.len())];
                let direction = match rng.gen_range(0..3) {
                    0 => DirectionTag::SameSpeaker,
                    1 => DirectionTag::SpeakerChange,
                    _ => DirectionTag::DialogueStart,
                };
                TaggedAct::new(act, direction)
            })
            .collect();
        let dist = model.distribution(&history).unwrap();
        let sum: f64 = dist.iter().map(|p| p.probability).sum();
        worst = worst.max((sum - 1.0).abs());
        assert!(
            (sum - 1.0).abs() <= 1e-9,
            "history {history:?} sums to {sum}"
        );
    }
    let elapsed = started.elapsed();
    println!("criterion 2: 1000 histories, worst |sum-1| = {worst:.2e} ({elapsed:?}) -> PASS");
    assert!(elapsed.as_secs() < 5, "took {elapsed:?}, budget 5s");
}

// --- criterion 3 -----------------------------------------------------------

/// Brute-force interpolated probability, recounting relative frequencies by
/// scanning the corpus on every call; shares no code with the model.
fn brute_force_probability(
    corpus: &Corpus,
    max_order: usize,
    lambdas: &[f64],
    history: &[(&str, DirectionTag)],
    act: &str,
) -> f64 {
    let mut inventory: Vec<&str> = corpus.act_inventory.iter().map(|a| a.as_str()).collect();
    inventory.sort_unstable();
    inventory.dedup();

    let sequences: Vec<Vec<(&str, &str)>> = corpus
        .dialogues
        .iter()
        .map(|d| {
            d.turns
                .iter()
                .flat_map(|t| {
                    t.utterances
                        .iter()
                        .map(move |u| (u.act.as_str(), t.speaker.as_str()))
                })
                .collect()
        })
        .collect();

    let count = |context: &[(&str, DirectionTag)], target: Option<&str>| -> u64 {
        let mut n = 0;
        for seq in &sequences {
            for i in 0..seq.len() {
                if i < context.len() {
                    continue;
                }
                let ok = context.iter().enumerate().all(|(offset, (c_act, c_dir))| {
                    let j = i - context.len() + offset;
                    let dir = if seq[j].1 == seq[j + 1].1 {
                        DirectionTag::SameSpeaker
                    } else {
                        DirectionTag::SpeakerChange
                    };
                    seq[j].0 == *c_act && dir == *c_dir
                });
                if ok && target.is_none_or(|t| seq[i].0 == t) {
                    n += 1;
                }
            }
        }
        n
    };

    let start = history.len().saturating_sub(max_order - 1);
    let history = &history[start..];
    let mut applicable = vec![1usize];
    for order in 2..=max_order {
        if history.len() < order - 1 {
            break;
        }
        if count(&history[history.len() - (order - 1)..], None) > 0 {
            applicable.push(order);
        }
    }
    let weight_sum: f64 = applicable.iter().map(|o| lambdas[o - 1]).sum();
    applicable
        .iter()
        .map(|&order| {
            let f = if order == 1 {
                let total = count(&[], None);
                (count(&[], Some(act)) as f64 + 1.0) / (total as f64 + inventory.len() as f64)
            } else {
                let context = &history[history.len() - (order - 1)..];
                count(context, Some(act)) as f64 / count(context, None) as f64
            };
            lambdas[order - 1] / weight_sum * f
        })
        .sum()
}

#[test]
fn criterion_3_brute_force_oracle_equivalence() {
    let example: Corpus =
        serde_json::from_str(&std::fs::read_to_string(asset("example_dialogue.json")).unwrap())
            .unwrap();
    let corpora = vec![
        example,
        Corpus {
            act_inventory: default_inventory(),
            dialogues: vec![
                dialogue(
                    "m1",
                    vec![("A", vec!["greet"]), ("B", vec!["greet", "bye"])],
                ),
                dialogue("m2", vec![("B", vec!["init_date", "suggest_support_date"])]),
            ],
        },
        Corpus {
            act_inventory: default_inventory(),
            dialogues: vec![dialogue(
                "s1",
                vec![
                    ("A", vec!["uptake", "uptake", "suggest_support_date"]),
                    ("B", vec!["reject_date"]),
                    ("A", vec!["suggest_support_date", "accept_date"]),
                ],
            )],
        },
    ];

    let mut checked = 0usize;
    for corpus in &corpora {
        assert!(corpus.utterance_count() <= 50);
        let model = train(corpus, 3).unwrap();
        let lambdas = model.lambdas().to_vec();
        let acts: Vec<&str> = corpus.act_inventory.iter().map(|a| a.as_str()).collect();

        // Every history of length <= 2 over act x direction, plus a longer
        // mixed one.
        let mut histories: Vec<Vec<(&str, DirectionTag)>> = vec![Vec::new()];
        let dirs = [DirectionTag::SameSpeaker, DirectionTag::SpeakerChange];
        for len in 1..=2 {
            let mut next = Vec::new();
            for h in histories.iter().filter(|h| h.len() == len - 1) {
                for act in &acts {
                    for dir in dirs {
                        let mut h2 = h.clone();
                        h2.push((*act, dir));
                        next.push(h2);
                    }
                }
            }
            histories.extend(next);
        }
        histories.push(vec![
            ("greet", DirectionTag::SameSpeaker),
            ("uptake", DirectionTag::SpeakerChange),
            ("suggest_support_date", DirectionTag::SameSpeaker),
            ("suggest_support_date", DirectionTag::SpeakerChange),
            ("accept_date", DirectionTag::SameSpeaker),
        ]);

        for history in &histories {
            let tagged: Vec<TaggedAct> = history
                .iter()
                .map(|(a, d)| TaggedAct::new(*a, *d))
                .collect();
            let ranked = model.predict(&tagged, acts.len()).unwrap();
            for act in &acts {
                let got = model.probability(&tagged, &ActLabel::from(*act)).unwrap();
                let want = brute_force_probability(corpus, 3, &lambdas, history, act);
                assert!(
                    (got - want).abs() <= 1e-12,
                    "p({act}|{history:?}) = {got} vs oracle {want}"
                );
                let in_ranking = ranked.iter().find(|p| p.act.as_str() == *act).unwrap();
                assert!(
                    (in_ranking.probability - want).abs() <= 1e-12,
                    "predict() entry for {act} diverges from the oracle"
                );
                checked += 1;
            }
        }
    }
    println!(
        "criterion 3: {checked} probabilities matched the brute-force oracle to 1e-12 -> PASS"
    );
}

// --- criterion 4 -----------------------------------------------------------

#[test]
fn criterion_4_golden_replay_of_the_example_dialogue() {
    // Byte-identity against the committed stream is asserted in
    // tests/golden.rs; here the replayed dialogue state itself is checked.
    let output = Command::new(env!("CARGO_BIN_EXE_dlg"))
        .args([
            "replay",
            "--corpus",
            &asset("example_dialogue.json"),
            "--model",
            Path::new(env!("CARGO_MANIFEST_DIR"))
                .join("tests/golden/example_model.json")
                .to_str()
                .unwrap(),
            "--operators",
            &asset("operators.json"),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stream = String::from_utf8(output.stdout).unwrap();
    let golden = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/example_replay.ndjson"),
    )
    .unwrap();
    assert_eq!(
        stream, golden,
        "stream must be byte-identical to the golden file"
    );

    let lines: Vec<serde_json::Value> = stream
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(lines
        .iter()
        .filter(|l| l["type"] == "turn_end")
        .all(|l| l["phase_repair"] == false));
    let b02_phases: Vec<&str> = lines
        .iter()
        .filter(|l| l["type"] == "utterance" && l["turn"] == 1)
        .map(|l| l["phase"].as_str().unwrap())
        .collect();
    assert_eq!(
        b02_phases,
        ["opening", "opening", "negotiation", "negotiation"]
    );

    let last = lines.last().unwrap();
    assert_eq!(last["agreement"]["day"], 8);
    assert_eq!(last["agreement"]["dow"], "Thu");
    assert_eq!(last["agreement"]["time"], "14:00");
    let thematic = last["thematic"].as_str().unwrap();
    assert!(thematic.contains("day=6..9"));
    assert!(thematic.contains("time=08:30 [proposed B@5, rejected(implicit) A@8]"));
    println!(
        "criterion 4: golden replay byte-identical; zero phase repairs; greeting span opening; \
         agreement day=8 Thu 14:00; interval 6..9 present; 8:30 implicitly rejected -> PASS"
    );
}

// --- criterion 5 -----------------------------------------------------------

fn engine_session() -> Session {
    let corpus: Corpus =
        serde_json::from_str(&std::fs::read_to_string(asset("example_dialogue.json")).unwrap())
            .unwrap();
    let model = Arc::new(train(&corpus, 3).unwrap());
    let operators_json = std::fs::read_to_string(asset("operators.json")).unwrap();
    let operators = OperatorSet::new(serde_json::from_str(&operators_json).unwrap()).unwrap();
    Session::new(
        model,
        Arc::new(operators),
        SpeakingTime::new(1996, 1, 4),
        SessionConfig::default(),
    )
    .unwrap()
}

fn april_31() -> TimeExpression {
    TimeExpression::Absolute {
        desc: TimeDescription {
            month: Some(4),
            day: Some(31),
            ..TimeDescription::default()
        },
    }
}

#[test]
fn criterion_5_april_31_clarification_and_clamp_plausibility() {
    // Accept path: a proposal of April 31 awaits confirmation of April 30,
    // and acceptance puts the corrected date into the thematic memory.
    let mut session = engine_session();
    session.begin_turn("A", "de").unwrap();
    session.process_utterance(
        "deep",
        &ActLabel::from("suggest_support_date"),
        &[april_31()],
        None,
    );
    match session.fsa().state() {
        ClarifyState::AwaitingConfirmation { proposal, .. } => match proposal {
            Proposal::CorrectedDate(date) => {
                assert_eq!((date.month, date.day), (Some(4), Some(30)));
            }
            other => panic!("unexpected proposal {other:?}"),
        },
        other => panic!("expected AwaitingConfirmation, got {other:?}"),
    }
    session.resolve_clarification(Response::Accept).unwrap();
    assert!(session.thematic().dump().contains("day=30"));

    // Reject path: RepeatRequested was reached and nothing entered the
    // thematic memory.
    let mut session = engine_session();
    session.begin_turn("A", "de").unwrap();
    session.process_utterance(
        "deep",
        &ActLabel::from("suggest_support_date"),
        &[april_31()],
        None,
    );
    let outcome = session.resolve_clarification(Response::Reject).unwrap();
    assert!(outcome.events.iter().any(|e| e.event == "repeat_requested"));
    assert!(session.thematic().is_empty());

    // Calendar property: every (month, day) clamp proposal over 1990-2010 is
    // plausible.
    let mut clamped = 0usize;
    for year in 1990..=2010 {
        for month in 1u8..=12 {
            for day in 1u8..=31 {
                let desc = TimeDescription {
                    year: Some(year),
                    month: Some(month),
                    day: Some(day),
                    ..TimeDescription::default()
                };
                if check_plausibility(&desc, year).is_plausible() {
                    continue;
                }
                let proposal = corrected(&desc, year)
                    .unwrap_or_else(|| panic!("{year}-{month}-{day} must be clampable"));
                assert!(
                    check_plausibility(&proposal, year).is_plausible(),
                    "clamp of {year}-{month}-{day} implausible"
                );
                clamped += 1;
            }
        }
    }
    println!(
        "criterion 5: April 31 -> April 30 accept/reject paths verified; \
         {clamped} clamp proposals all plausible -> PASS"
    );
}

// --- criterion 6 -----------------------------------------------------------

#[test]
fn criterion_6_successor_classification_is_exact() {
    let mut rng = StdRng::seed_from_u64(6);
    let mut week_checks = 0usize;
    let mut month_checks = 0usize;
    for _ in 0..100 {
        let year = rng.gen_range(1990..=2010);
        let month = rng.gen_range(1u8..=12);
        let day = rng.gen_range(1u8..=28);
        let anchor = SpeakingTime::new(year, month, day);
        let anchor_date = chrono::NaiveDate::from_ymd_opt(year, month as u32, day as u32).unwrap();

        // Weeks within +-8 of the anchor; the referent is labeled with the
        // ISO week of the shifted date, so "next" must hold exactly for
        // offset +1 even across year boundaries.
        for offset in -8i64..=8 {
            let shifted = anchor_date + chrono::Duration::weeks(offset);
            let iso = shifted.iso_week();
            let referent = TimeDescription {
                year: Some(iso.year()),
                week: Some(iso.week() as u8),
                ..TimeDescription::default()
            };
            let got = classify_successor(&referent, &anchor).unwrap();
            let want = if offset == 1 {
                Succession::Next
            } else {
                Succession::Following
            };
            assert_eq!(got, want, "anchor {anchor}, week offset {offset}");
            week_checks += 1;
        }

        // Months within +-8, including the December-to-January wrap, both
        // with and without an explicit year on the referent.
        for offset in -8i32..=8 {
            let idx = year * 12 + (month as i32 - 1) + offset;
            let (ref_year, ref_month) = (idx.div_euclid(12), (idx.rem_euclid(12) + 1) as u8);
            let with_year = TimeDescription {
                year: Some(ref_year),
                month: Some(ref_month),
                ..TimeDescription::default()
            };
            let want = if offset == 1 {
                Succession::Next
            } else {
                Succession::Following
            };
            assert_eq!(
                classify_successor(&with_year, &anchor).unwrap(),
                want,
                "anchor {anchor}, month offset {offset}"
            );
            month_checks += 1;
            if offset.abs() < 12 && offset != 0 {
                let cyclic = TimeDescription {
                    month: Some(ref_month),
                    ..TimeDescription::default()
                };
                let want = if offset.rem_euclid(12) == 1 {
                    Succession::Next
                } else {
                    Succession::Following
                };
                assert_eq!(
                    classify_successor(&cyclic, &anchor).unwrap(),
                    want,
                    "anchor {anchor}, cyclic month offset {offset}"
                );
                month_checks += 1;
            }
        }
    }
    println!(
        "criterion 6: {week_checks} week pairs and {month_checks} month pairs classified exactly \
         -> PASS"
    );
}

// --- criterion 7 -----------------------------------------------------------

#[test]
fn criterion_7_reading_disambiguation_by_preceding_act() {
    let candidates = vec![
        ReadingCandidate::new(
            "temporal",
            &["suggest_support_date", "request_comment_date"],
        ),
        ReadingCandidate::new("locative", &[]),
    ];

    // After a date proposal the ambiguous phrase refers to a time.
    let mut session = engine_session();
    session.begin_turn("A", "de").unwrap();
    session.process_utterance("deep", &ActLabel::from("suggest_support_date"), &[], None);
    let outcome = session.query_disambiguation(&candidates).unwrap();
    assert_eq!(outcome.reading, "temporal");
    assert!(!outcome.low_confidence);

    // After a greeting the default locative reading wins.
    let mut session = engine_session();
    session.begin_turn("A", "de").unwrap();
    session.process_utterance("deep", &ActLabel::from("greet"), &[], None);
    let outcome = session.query_disambiguation(&candidates).unwrap();
    assert_eq!(outcome.reading, "locative");
    assert!(!outcome.low_confidence);
    println!("criterion 7: suggest_support_date -> temporal, greet -> locative default -> PASS");
}

// --- criterion 8 -----------------------------------------------------------

#[test]
fn criterion_8_operator_learning_covers_recurring_turns() {
    let corpus = Corpus {
        act_inventory: default_inventory(),
        dialogues: vec![
            dialogue(
                "l1",
                vec![
                    ("A", vec!["greet", "init_date"]),
                    ("B", vec!["greet", "init_date"]),
                    ("A", vec!["greet", "init_date"]),
                ],
            ),
            dialogue(
                "l2",
                vec![
                    ("B", vec!["greet", "init_date"]),
                    ("A", vec!["greet", "init_date"]),
                ],
            ),
        ],
    };
    let learned = learn_operators(&corpus, 2).unwrap();
    assert_eq!(learned.len(), 1, "exactly one operator, got {learned:?}");
    assert_eq!(learned[0].support, Some(5));
    assert_eq!(
        learned[0].body,
        vec![ActLabel::from("greet"), ActLabel::from("init_date")]
    );

    let operators = OperatorSet::new(learned).unwrap();
    let subtree = recognize_turn(
        &[ActLabel::from("greet"), ActLabel::from("init_date")],
        &operators,
    );
    assert!(
        subtree
            .nodes
            .iter()
            .all(|n| !matches!(n, PlanNode::Repair { .. })),
        "learned operator must cover the turn without repair"
    );
    assert_eq!(subtree.leaves().len(), 2);

    // The same result through the command-line surface.
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("learn.json");
    std::fs::write(&corpus_path, serde_json::to_string(&corpus).unwrap()).unwrap();
    let out_path = dir.path().join("learned_ops.json");
    let output = Command::new(env!("CARGO_BIN_EXE_dlg"))
        .args([
            "learn-ops",
            "--corpus",
            corpus_path.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
            "--min-support",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let written: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(written.len(), 1);
    assert_eq!(written[0]["support"], 5);
    println!(
        "criterion 8: one learned operator (support 5) covering its turns without repair -> PASS"
    );
}

// --- clock sanity for the suite ---------------------------------------------

#[test]
fn clock_time_sanity_for_agreement_values() {
    // The 14:00 agreed in the golden dialogue parses and formats stably,
    // anchoring the snapshot conventions used above.
    let clock = ClockTime::parse("14:00").unwrap();
    assert_eq!(clock, ClockTime::new(14, 0));
    assert_eq!(clock.to_string(), "14:00");
    assert_eq!(DayOfWeek::Thu.to_string(), "Thu");
}
