//! The replay snapshot stream: newline-delimited JSON, one object per
//! processed utterance, one per closed turn, and a final summary per
//! dialogue. Probabilities appear as integers scaled by 1000.

use serde::Serialize;

use dlg_core::engine::{ClarificationEvent, StageError, TurnReport, UtteranceReport};
use dlg_core::plan::GapEstimate;
use dlg_core::predict::Prediction;
use dlg_core::thematic::memory::ThematicEvent;
use dlg_core::thematic::TimeDescription;

fn per_mille_pairs(predictions: &[Prediction]) -> Vec<(String, i64)> {
    predictions
        .iter()
        .map(|p| (p.act.as_str().to_string(), p.per_mille()))
        .collect()
}

#[derive(Serialize)]
pub struct DialogueLine<'a> {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub id: &'a str,
    pub speaking_time: String,
}

#[derive(Serialize)]
pub struct PredictionPairs {
    pub same_speaker: Vec<(String, i64)>,
    pub speaker_change: Vec<(String, i64)>,
}

#[derive(Serialize)]
pub struct UtteranceLine {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub turn: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub utt: Option<usize>,
    pub speaker: String,
    pub track: String,
    pub act: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<String>,
    pub predictions: PredictionPairs,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub thematic: Vec<ThematicEvent>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub clarification: Vec<ClarificationLine>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

#[derive(Serialize)]
pub struct ClarificationLine {
    pub event: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proposal: Option<String>,
}

impl From<&ClarificationEvent> for ClarificationLine {
    fn from(e: &ClarificationEvent) -> ClarificationLine {
        ClarificationLine {
            event: e.event.to_string(),
            detail: e.detail.clone(),
            proposal: e.proposal.clone(),
        }
    }
}

fn error_strings(errors: &[StageError]) -> Vec<String> {
    errors.iter().map(|e| e.to_string()).collect()
}

impl UtteranceLine {
    pub fn new(report: &UtteranceReport) -> UtteranceLine {
        UtteranceLine {
            kind: "utterance",
            turn: report.turn_index,
            utt: report.utterance_index,
            speaker: report.speaker.clone(),
            track: report.track.clone(),
            act: report.act.as_str().to_string(),
            phase: None,
            predictions: PredictionPairs {
                same_speaker: per_mille_pairs(&report.predictions_same),
                speaker_change: per_mille_pairs(&report.predictions_change),
            },
            thematic: report.thematic.clone(),
            clarification: report.clarification.iter().map(Into::into).collect(),
            warnings: report.warnings.clone(),
            errors: error_strings(&report.errors),
        }
    }
}

#[derive(Serialize)]
pub struct RepairLine {
    pub position: usize,
    pub estimate: GapEstimate,
}

#[derive(Serialize)]
pub struct TurnLine {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub turn: usize,
    pub speaker: String,
    pub selected_track: String,
    pub translated: usize,
    pub phase: String,
    pub phase_repair: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub repairs: Vec<RepairLine>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl TurnLine {
    pub fn new(report: &TurnReport) -> TurnLine {
        TurnLine {
            kind: "turn_end",
            turn: report.turn_index,
            speaker: report.speaker.clone(),
            selected_track: report.selected_track.clone(),
            translated: report.translated_count,
            phase: report.phase.name().to_string(),
            phase_repair: report.phase_repair,
            repairs: report
                .repairs
                .iter()
                .map(|r| RepairLine {
                    position: r.position,
                    estimate: r.estimate.clone(),
                })
                .collect(),
            errors: error_strings(&report.errors),
        }
    }
}

#[derive(Serialize)]
pub struct FinalLine {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub agreement: TimeDescription,
    pub phase: String,
    pub phase_repairs: usize,
    pub thematic: String,
    pub structure: String,
    pub memory: String,
}

pub fn emit<T: Serialize>(out: &mut impl std::io::Write, line: &T) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *out, line)?;
    out.write_all(b"\n")?;
    Ok(())
}
