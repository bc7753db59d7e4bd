use std::io::Write;
use std::sync::Arc;

use dlg_core::engine::{Session, SessionConfig, UtteranceReport};

use crate::config::{ClarifyChoice, Defaults};
use crate::files;
use crate::stream::{self, DialogueLine, FinalLine, TurnLine, UtteranceLine};
use crate::ReplayArgs;

pub fn run(args: &ReplayArgs, defaults: &Defaults) -> anyhow::Result<()> {
    let corpus = files::load_corpus(&args.corpus)?;
    let model = Arc::new(files::load_model(&args.model)?);
    let operators = Arc::new(files::load_operators(&args.operators)?);
    let lexicon = match args.lexicon.as_ref() {
        Some(path) => files::load_lexicon(path)?,
        None => Vec::new(),
    };
    let clarify = args
        .clarify
        .or(defaults.clarify)
        .unwrap_or(ClarifyChoice::Accept);
    let top_k = args.top_k.or(defaults.top_k).unwrap_or(3) as usize;
    let track = args
        .track
        .clone()
        .or_else(|| defaults.track.clone())
        .unwrap_or_else(|| "deep".to_string());
    let threshold = args.threshold.or(defaults.threshold).unwrap_or(0.7);

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for dialogue in &corpus.dialogues {
        let config = SessionConfig {
            tracks: vec![track.clone()],
            inference_track: track.clone(),
            prediction_k: top_k,
            clarification: clarify.mode(),
            lexicon: lexicon.clone(),
            confusable_threshold: threshold,
        };
        let mut session = Session::new(
            Arc::clone(&model),
            Arc::clone(&operators),
            dialogue.speaking_time,
            config,
        )
        .map_err(|e| anyhow::anyhow!("dialogue {}: {e}", dialogue.id))?;

        stream::emit(
            &mut out,
            &DialogueLine {
                kind: "dialogue",
                id: &dialogue.id,
                speaking_time: dialogue.speaking_time.to_string(),
            },
        )?;

        for turn in &dialogue.turns {
            session
                .begin_turn(&turn.speaker, &turn.language)
                .map_err(|e| anyhow::anyhow!("dialogue {}: {e}", dialogue.id))?;
            let mut buffered: Vec<UtteranceReport> = Vec::new();
            for utterance in &turn.utterances {
                buffered.push(session.process_utterance(
                    &track,
                    &utterance.act,
                    &utterance.times,
                    utterance.text.as_deref(),
                ));
            }
            let turn_report = session
                .process_turn_end(&track, turn.utterances.len())
                .map_err(|e| anyhow::anyhow!("dialogue {}: {e}", dialogue.id))?;

            // Utterance snapshots are flushed per turn so they can carry the
            // back-annotated phase, in utterance order.
            for report in &buffered {
                let mut line = UtteranceLine::new(report);
                line.phase = report
                    .utterance_index
                    .and_then(|i| turn_report.utterance_phases.get(i))
                    .map(|p| p.name().to_string());
                stream::emit(&mut out, &line)?;
            }
            stream::emit(&mut out, &TurnLine::new(&turn_report))?;
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
    }
    out.flush()?;
    Ok(())
}
