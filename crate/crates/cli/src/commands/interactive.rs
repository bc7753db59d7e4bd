//! Interactive stepping mode. Commands, one per line on standard input:
//!
//! ```text
//! turn <speaker>                 open a turn
//! utt <act> [time-json ...]      process one utterance on the deep track
//! end [track] [count]            close the turn (defaults: deep, all)
//! quit                           print the final summary and leave
//! ```
//!
//! Implausible dates prompt `CLARIFY: did you mean <proposal>? [y/n]` and
//! wait for `y` or `n` on the next line.

use std::io::{BufRead, Write};
use std::sync::Arc;

use dlg_core::clarify::Response;
use dlg_core::corpus::ActLabel;
use dlg_core::engine::{ClarificationMode, Session, SessionConfig};
use dlg_core::thematic::{SpeakingTime, TimeExpression};

use crate::config::Defaults;
use crate::files;
use crate::stream::{self, FinalLine, TurnLine, UtteranceLine};
use crate::InteractiveArgs;

const DEFAULT_SPEAKING_TIME: &str = "1996-06-19";

pub fn run(args: &InteractiveArgs, defaults: &Defaults) -> anyhow::Result<()> {
    let model = Arc::new(files::load_model(&args.model)?);
    let operators = Arc::new(files::load_operators(&args.operators)?);
    let lexicon = match args.lexicon.as_ref() {
        Some(path) => files::load_lexicon(path)?,
        None => Vec::new(),
    };
    let speaking_time = args
        .speaking_time
        .clone()
        .or_else(|| defaults.speaking_time.clone())
        .unwrap_or_else(|| DEFAULT_SPEAKING_TIME.to_string());
    let speaking_time = SpeakingTime::parse(&speaking_time).map_err(|e| anyhow::anyhow!("{e}"))?;
    let top_k = args.top_k.or(defaults.top_k).unwrap_or(3) as usize;
    let threshold = args.threshold.or(defaults.threshold).unwrap_or(0.7);

    let config = SessionConfig {
        prediction_k: top_k,
        clarification: ClarificationMode::Interactive,
        lexicon,
        confusable_threshold: threshold,
        ..SessionConfig::default()
    };
    let track = config.inference_track.clone();
    let mut session = Session::new(model, operators, speaking_time, config)
        .map_err(|e| anyhow::anyhow!("{e}"))?;

    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();

    while let Some(line) = lines.next() {
        let line = line?;
        let mut parts = line.split_whitespace();
        let Some(command) = parts.next() else {
            continue;
        };
        match command {
            "turn" => {
                let Some(speaker) = parts.next() else {
                    eprintln!("usage: turn <speaker>");
                    continue;
                };
                match session.begin_turn(speaker, "und") {
                    Ok(index) => writeln!(out, "turn {index} open ({speaker})")?,
                    Err(e) => eprintln!("turn: {e}"),
                }
            }
            "utt" => {
                let Some(act) = parts.next() else {
                    eprintln!("usage: utt <act> [time-expression-json ...]");
                    continue;
                };
                let rest: Vec<&str> = parts.collect();
                let times = match parse_times(&rest) {
                    Ok(times) => times,
                    Err(e) => {
                        eprintln!("utt: {e}");
                        continue;
                    }
                };
                let mut report =
                    session.process_utterance(&track, &ActLabel::from(act), &times, None);

                // Clarification prompts are answered inline before the
                // report is printed.
                while let Some(proposal) = session.pending_prompt() {
                    writeln!(out, "CLARIFY: did you mean {proposal}? [y/n]")?;
                    out.flush()?;
                    let answer = match lines.next() {
                        Some(line) => line?,
                        None => break,
                    };
                    let response = match answer.trim() {
                        "y" | "Y" => Response::Accept,
                        "n" | "N" => Response::Reject,
                        other => {
                            writeln!(out, "please answer y or n (got {other:?})")?;
                            continue;
                        }
                    };
                    match session.resolve_clarification(response) {
                        Ok(outcome) => {
                            report.clarification.extend(outcome.events);
                            report.thematic.extend(outcome.thematic);
                        }
                        Err(e) => {
                            eprintln!("clarify: {e}");
                            break;
                        }
                    }
                }
                stream::emit(&mut out, &UtteranceLine::new(&report))?;
            }
            "end" => {
                let selected = parts.next().unwrap_or(&track).to_string();
                let count = match parts.next() {
                    Some(raw) => match raw.parse::<usize>() {
                        Ok(count) => count,
                        Err(_) => {
                            eprintln!("end: invalid count {raw:?}");
                            continue;
                        }
                    },
                    None => open_turn_utterances(&session, &selected).unwrap_or(0),
                };
                match session.process_turn_end(&selected, count) {
                    Ok(report) => stream::emit(&mut out, &TurnLine::new(&report))?,
                    Err(e) => eprintln!("end: {e}"),
                }
            }
            "quit" => break,
            other => eprintln!("unknown command {other:?} (turn/utt/end/quit)"),
        }
    }

    stream::emit(
        &mut out,
        &FinalLine {
            kind: "final",
            agreement: session.query_agreement(),
            phase: session.query_phase().name().to_string(),
            phase_repairs: session.structure().phase_repair_count(),
            thematic: session.thematic().dump(),
            structure: session.structure().dump(),
            memory: session.memory().snapshot(top_k),
        },
    )?;
    out.flush()?;
    Ok(())
}

fn parse_times(rest: &[&str]) -> anyhow::Result<Vec<TimeExpression>> {
    if rest.is_empty() {
        return Ok(Vec::new());
    }
    // Whitespace inside a JSON object is fine; rejoin and parse one
    // expression or an array of them.
    let joined = rest.join(" ");
    if joined.trim_start().starts_with('[') {
        Ok(serde_json::from_str(&joined)?)
    } else {
        Ok(vec![serde_json::from_str(&joined)?])
    }
}

fn open_turn_utterances(session: &Session, track: &str) -> Option<usize> {
    let memory = session.memory();
    let turn = memory.open_turn_index()?;
    let track_idx = memory.tracks().iter().position(|t| t == track)?;
    Some(memory.turns()[turn].utterances(track_idx).len())
}
