//! The per-dialogue session: one object owning the sequence memory, thematic
//! memory, intentional structure and clarification automaton, fed one
//! utterance at a time.
//!
//! Processing degrades instead of crashing: every stage runs even when an
//! earlier one failed, and failures are reported per stage in the returned
//! reports.

use alloc::collections::VecDeque;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::clarify::{
    detect_confusables, ClarificationFsa, ClarifyState, ConfusablePair, Proposal, Response, Trigger,
};
use crate::corpus::ActLabel;
use crate::plan::{
    recognize_turn, DialoguePhase, GapEstimate, IntentionalStructure, OperatorSet, PlanError,
};
use crate::predict::{DirectionTag, NGramModel, Prediction, TaggedAct};
use crate::sequence::{Disambiguation, ReadingCandidate, SequenceError, SequenceMemory};
use crate::thematic::memory::{Stance, ThematicEvent, ThematicMemory};
use crate::thematic::time::{
    check_plausibility, classify_successor, resolve_relative, SpeakingTime, Succession,
    TimeDescription, TimeExpression,
};

/// How the session answers its own clarification prompts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClarificationMode {
    /// Plausibility violations are reported but never clarified.
    Off,
    /// Prompts wait for [`Session::resolve_clarification`].
    Interactive,
    /// Every proposal is accepted immediately.
    AutoAccept,
    /// Every proposal is rejected immediately.
    AutoReject,
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub tracks: Vec<String>,
    /// The track whose records drive plan recognition, thematic updates and
    /// predictions. Other tracks are stored but drive no inference.
    pub inference_track: String,
    /// How many ranked predictions to annotate and report.
    pub prediction_k: usize,
    pub clarification: ClarificationMode,
    /// Confusable-token lexicon; empty disables detection.
    pub lexicon: Vec<ConfusablePair>,
    pub confusable_threshold: f64,
}

impl Default for SessionConfig {
    fn default() -> SessionConfig {
        SessionConfig {
            tracks: alloc::vec!["deep".to_string(), "shallow".to_string()],
            inference_track: "deep".to_string(),
            prediction_k: 3,
            clarification: ClarificationMode::Interactive,
            lexicon: Vec::new(),
            confusable_threshold: 0.7,
        }
    }
}

/// A failure in one processing stage; later stages still ran.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.message)
    }
}

/// A clarification-related occurrence during processing.
#[derive(Debug, Clone, PartialEq)]
pub struct ClarificationEvent {
    pub event: &'static str,
    pub detail: String,
    pub proposal: Option<String>,
}

/// Everything one processed utterance did.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UtteranceReport {
    pub turn_index: usize,
    pub utterance_index: Option<usize>,
    pub speaker: String,
    pub track: String,
    pub act: ActLabel,
    /// Predictions for the following utterance under both next-speaker
    /// hypotheses.
    pub predictions_same: Vec<Prediction>,
    pub predictions_change: Vec<Prediction>,
    pub thematic: Vec<ThematicEvent>,
    pub clarification: Vec<ClarificationEvent>,
    pub warnings: Vec<String>,
    pub errors: Vec<StageError>,
}

/// A repair node of a closed turn with its gap estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct RepairReport {
    pub position: usize,
    pub estimate: GapEstimate,
}

/// Everything closing a turn did.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnReport {
    pub turn_index: usize,
    pub speaker: String,
    pub selected_track: String,
    pub translated_count: usize,
    /// Dominant phase the turn was attached under.
    pub phase: DialoguePhase,
    pub phase_repair: bool,
    /// Back-annotated phase of each inference-track utterance.
    pub utterance_phases: Vec<DialoguePhase>,
    pub repairs: Vec<RepairReport>,
    pub errors: Vec<StageError>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    Sequence(SequenceError),
    NoPendingClarification,
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::Sequence(e) => write!(f, "{e}"),
            EngineError::NoPendingClarification => {
                f.write_str("no clarification is awaiting a response")
            }
        }
    }
}

impl From<SequenceError> for EngineError {
    fn from(e: SequenceError) -> EngineError {
        EngineError::Sequence(e)
    }
}

/// What an utterance's act means for the thematic memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StanceAction {
    Propose,
    Accept,
    Reject,
    None,
}

/// A thematic update suspended behind a clarification prompt.
#[derive(Debug, Clone, PartialEq)]
struct PendingUpdate {
    trigger: Trigger,
    action: StanceAction,
    speaker: String,
    turn_index: usize,
}

/// Outcome of answering a clarification prompt.
#[derive(Debug, Clone, PartialEq)]
pub struct ClarificationOutcome {
    pub events: Vec<ClarificationEvent>,
    pub thematic: Vec<ThematicEvent>,
    /// A queued trigger has been promoted and awaits the next response.
    pub next_prompt: Option<String>,
}

pub struct Session {
    memory: SequenceMemory,
    thematic: ThematicMemory,
    structure: IntentionalStructure,
    model: Arc<NGramModel>,
    operators: Arc<OperatorSet>,
    fsa: ClarificationFsa,
    pending: Option<PendingUpdate>,
    queued: VecDeque<PendingUpdate>,
    speaking_time: SpeakingTime,
    config: SessionConfig,
}

impl Session {
    pub fn new(
        model: Arc<NGramModel>,
        operators: Arc<OperatorSet>,
        speaking_time: SpeakingTime,
        config: SessionConfig,
    ) -> Result<Session, SequenceError> {
        if !config.tracks.contains(&config.inference_track) {
            return Err(SequenceError::UnknownTrack(config.inference_track.clone()));
        }
        let tracks: Vec<&str> = config.tracks.iter().map(|s| s.as_str()).collect();
        let memory = SequenceMemory::new(&tracks)?;
        Ok(Session {
            memory,
            thematic: ThematicMemory::new(),
            structure: IntentionalStructure::new(),
            model,
            operators,
            fsa: ClarificationFsa::new(),
            pending: None,
            queued: VecDeque::new(),
            speaking_time,
            config,
        })
    }

    pub fn memory(&self) -> &SequenceMemory {
        &self.memory
    }

    pub fn thematic(&self) -> &ThematicMemory {
        &self.thematic
    }

    pub fn structure(&self) -> &IntentionalStructure {
        &self.structure
    }

    pub fn fsa(&self) -> &ClarificationFsa {
        &self.fsa
    }

    pub fn speaking_time(&self) -> &SpeakingTime {
        &self.speaking_time
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn begin_turn(&mut self, speaker: &str, language: &str) -> Result<usize, EngineError> {
        Ok(self.memory.begin_turn(speaker, language)?)
    }

    /// Runs the per-utterance pipeline: sequence memory, confusable scan,
    /// thematic updates with plausibility checks and clarification, then
    /// predictions for both hypothesized next speakers. A stage failure never
    /// prevents later stages.
    pub fn process_utterance(
        &mut self,
        track: &str,
        act: &ActLabel,
        times: &[TimeExpression],
        text: Option<&str>,
    ) -> UtteranceReport {
        let turn_index = self.memory.open_turn_index().unwrap_or(0);
        let speaker = self
            .memory
            .turns()
            .get(turn_index)
            .map(|t| t.speaker.clone())
            .unwrap_or_default();
        let mut report = UtteranceReport {
            turn_index,
            speaker: speaker.clone(),
            track: track.to_string(),
            act: act.clone(),
            ..UtteranceReport::default()
        };

        // The act preceding this utterance decides whether a feedback
        // acknowledgement counts as acceptance; capture it before the add.
        let preceding = self
            .memory
            .last_acts(&self.config.inference_track, 1)
            .ok()
            .and_then(|v| v.into_iter().next())
            .map(|(act, _)| act);

        // Stage 1: sequence memory.
        match self.memory.add_utterance(track, act.clone()) {
            Ok((_, utterance_index)) => report.utterance_index = Some(utterance_index),
            Err(e) => report.errors.push(StageError {
                stage: "sequence",
                message: e.to_string(),
            }),
        }

        // Confusable-token scan on the raw text, when configured.
        if !self.config.lexicon.is_empty() && self.config.clarification != ClarificationMode::Off {
            if let Some(text) = text {
                let tokens: Vec<&str> = text.split_whitespace().collect();
                match detect_confusables(
                    &tokens,
                    &self.config.lexicon,
                    self.config.confusable_threshold,
                ) {
                    Ok(flags) => {
                        for (position, pair) in flags {
                            let trigger = Trigger::ConfusableTokens {
                                token: tokens[position].to_string(),
                                pair,
                            };
                            self.raise_clarification(
                                trigger,
                                StanceAction::None,
                                &speaker,
                                turn_index,
                                &mut report,
                            );
                        }
                    }
                    Err(e) => report.errors.push(StageError {
                        stage: "confusables",
                        message: e.to_string(),
                    }),
                }
            }
        }

        // Stages 2 and 3 reason over the inference track only; records on
        // other tracks are stored without driving inference.
        if track != self.config.inference_track {
            return report;
        }

        // Stage 2: thematic updates.
        let action = self.stance_action(act, preceding.as_ref());
        if times.is_empty() {
            self.apply_focus_stance(action, &speaker, turn_index, &mut report);
        }
        for expr in times {
            let desc = match expr {
                TimeExpression::Absolute { desc } => desc.clone(),
                TimeExpression::Relative { .. } => {
                    match resolve_relative(expr, &self.speaking_time) {
                        Ok(desc) => desc,
                        Err(e) => {
                            report.errors.push(StageError {
                                stage: "thematic",
                                message: e.to_string(),
                            });
                            continue;
                        }
                    }
                }
            };
            let verdict = check_plausibility(&desc, self.speaking_time.year);
            match verdict.reason() {
                None => self.apply_thematic(action, &desc, &speaker, turn_index, &mut report),
                Some(reason) => {
                    if self.config.clarification == ClarificationMode::Off {
                        report
                            .warnings
                            .push(alloc::format!("implausible date {desc} dropped: {reason}"));
                        continue;
                    }
                    let trigger = Trigger::ImplausibleDate {
                        desc: desc.clone(),
                        reason: reason.to_string(),
                    };
                    self.raise_clarification(trigger, action, &speaker, turn_index, &mut report);
                }
            }
        }

        // Stage 3: predictions for both hypothesized next speakers.
        match self.both_predictions() {
            Ok((same, change)) => {
                if let Some(utterance_index) = report.utterance_index {
                    // Within the turn the following utterance continues the
                    // same speaker; the turn end re-annotates its last record
                    // with the speaker-change list.
                    if let Err(e) = self.memory.annotate(
                        turn_index,
                        utterance_index,
                        track,
                        None,
                        Some(same.clone()),
                    ) {
                        report.errors.push(StageError {
                            stage: "predict",
                            message: e.to_string(),
                        });
                    }
                }
                report.predictions_same = same;
                report.predictions_change = change;
            }
            Err(e) => report.errors.push(StageError {
                stage: "predict",
                message: e.to_string(),
            }),
        }

        report
    }

    /// Closes the turn and runs the turn-level inferences: plan recognition,
    /// phase determination and attachment, phase back-annotation, and gap
    /// estimation for repair nodes.
    pub fn process_turn_end(
        &mut self,
        selected_track: &str,
        translated_count: usize,
    ) -> Result<TurnReport, EngineError> {
        let turn_index = self
            .memory
            .open_turn_index()
            .ok_or(EngineError::Sequence(SequenceError::NoOpenTurn))?;
        self.memory.close_turn(selected_track, translated_count)?;

        let track = self.config.inference_track.clone();
        let track_idx = self
            .memory
            .tracks()
            .iter()
            .position(|t| t == &track)
            .expect("inference track is registered");
        let turn = &self.memory.turns()[turn_index];
        let speaker = turn.speaker.clone();
        let acts: Vec<ActLabel> = turn
            .utterances(track_idx)
            .iter()
            .map(|r| r.act.clone())
            .collect();

        let mut report = TurnReport {
            turn_index,
            speaker: speaker.clone(),
            selected_track: selected_track.to_string(),
            translated_count,
            phase: self.structure.current_phase(),
            phase_repair: false,
            utterance_phases: Vec::new(),
            repairs: Vec::new(),
            errors: Vec::new(),
        };
        if acts.is_empty() {
            report.errors.push(StageError {
                stage: "plan",
                message: "no utterances on the inference track, turn not attached".to_string(),
            });
            return Ok(report);
        }

        let subtree = recognize_turn(&acts, &self.operators);
        report.utterance_phases = subtree.leaf_phases();
        let outcome = self.structure.attach_turn(turn_index, &speaker, subtree);
        report.phase = outcome.phase;
        report.phase_repair = outcome.phase_repair;

        // Back-annotate per-utterance phases onto the sequence memory.
        for (utterance_index, phase) in report.utterance_phases.iter().enumerate() {
            if let Err(e) =
                self.memory
                    .annotate(turn_index, utterance_index, &track, Some(*phase), None)
            {
                report.errors.push(StageError {
                    stage: "annotate",
                    message: e.to_string(),
                });
            }
        }

        // The turn's last utterance now predicts across a speaker change.
        if let Ok((_, change)) = self.both_predictions() {
            if !acts.is_empty() {
                if let Err(e) =
                    self.memory
                        .annotate(turn_index, acts.len() - 1, &track, None, Some(change))
                {
                    report.errors.push(StageError {
                        stage: "predict",
                        message: e.to_string(),
                    });
                }
            }
        }

        // Estimate what uncovered gaps were expected to contain.
        for position in self.structure.repair_positions(turn_index) {
            match self
                .structure
                .repair_and_estimate(turn_index, position, &self.model)
            {
                Ok(estimate) => report.repairs.push(RepairReport { position, estimate }),
                Err(e @ PlanError::Predict(_)) => report.errors.push(StageError {
                    stage: "repair",
                    message: e.to_string(),
                }),
                Err(e) => report.errors.push(StageError {
                    stage: "repair",
                    message: e.to_string(),
                }),
            }
        }

        Ok(report)
    }

    /// Answers the pending clarification prompt. Acceptance applies the
    /// suspended thematic update with the corrected value; rejection drops it
    /// (the user is asked to repeat the whole turn).
    pub fn resolve_clarification(
        &mut self,
        response: Response,
    ) -> Result<ClarificationOutcome, EngineError> {
        let pending = self
            .pending
            .take()
            .ok_or(EngineError::NoPendingClarification)?;
        let mut outcome = ClarificationOutcome {
            events: Vec::new(),
            thematic: Vec::new(),
            next_prompt: None,
        };
        match self.fsa.step(response) {
            Ok(state) => {
                let (event, proposal) = match state {
                    ClarifyState::Resolved { proposal } => ("resolved", Some(proposal.clone())),
                    _ => ("repeat_requested", None),
                };
                outcome.events.push(ClarificationEvent {
                    event,
                    detail: pending.trigger.to_string(),
                    proposal: proposal.as_ref().map(|p| p.to_string()),
                });
                if let Some(Proposal::CorrectedDate(desc)) = proposal {
                    let mut report = UtteranceReport::default();
                    self.apply_thematic(
                        pending.action,
                        &desc,
                        &pending.speaker,
                        pending.turn_index,
                        &mut report,
                    );
                    outcome.thematic = report.thematic;
                }
            }
            Err(e) => {
                self.pending = Some(pending);
                return Err(EngineError::Sequence(SequenceError::UnknownTrack(
                    e.to_string(),
                )));
            }
        }
        self.fsa.reset();

        // Promote the next queued trigger, if any.
        if let Some(next) = self.queued.pop_front() {
            let year = self.speaking_time.year;
            if self.fsa.raise(next.trigger.clone(), year).is_ok() {
                match self.fsa.state() {
                    ClarifyState::AwaitingConfirmation { proposal, .. } => {
                        outcome.next_prompt = Some(proposal.to_string());
                        self.pending = Some(next);
                    }
                    ClarifyState::RepeatRequested => {
                        outcome.events.push(ClarificationEvent {
                            event: "repeat_requested",
                            detail: next.trigger.to_string(),
                            proposal: None,
                        });
                        self.fsa.reset();
                    }
                    _ => {}
                }
            }
        }
        Ok(outcome)
    }

    /// The prompt text of the clarification awaiting an answer, if any.
    pub fn pending_prompt(&self) -> Option<String> {
        match self.fsa.state() {
            ClarifyState::AwaitingConfirmation { proposal, .. } => Some(proposal.to_string()),
            _ => None,
        }
    }

    // --- queries (read-only) -------------------------------------------

    /// Ranked next-act predictions for both hypothesized next speakers.
    pub fn query_predictions(&self) -> Result<(Vec<Prediction>, Vec<Prediction>), EngineError> {
        self.both_predictions()
            .map_err(|e| EngineError::Sequence(SequenceError::UnknownTrack(e.to_string())))
    }

    /// The composed currently-agreed date (possibly partial or empty).
    pub fn query_agreement(&self) -> TimeDescription {
        self.thematic.current_agreement()
    }

    /// The dialogue phase the structure has progressed to.
    pub fn query_phase(&self) -> DialoguePhase {
        self.structure.current_phase()
    }

    /// Whether the referent is the unit immediately after the speaking time.
    pub fn query_successor(&self, expr: &TimeExpression) -> Result<Succession, String> {
        let desc = match expr {
            TimeExpression::Absolute { desc } => desc.clone(),
            TimeExpression::Relative { .. } => {
                resolve_relative(expr, &self.speaking_time).map_err(|e| e.to_string())?
            }
        };
        classify_successor(&desc, &self.speaking_time).map_err(|e| e.to_string())
    }

    /// Resolves an ambiguous reading by recent acts on the inference track.
    pub fn query_disambiguation(
        &self,
        candidates: &[ReadingCandidate],
    ) -> Result<Disambiguation, EngineError> {
        Ok(self
            .memory
            .disambiguate_reading(&self.config.inference_track, candidates)?)
    }

    // --- internals -------------------------------------------------------

    fn stance_action(&self, act: &ActLabel, preceding: Option<&ActLabel>) -> StanceAction {
        match act.as_str() {
            "suggest_support_date" | "init_date" => StanceAction::Propose,
            "accept_date" => StanceAction::Accept,
            "reject_date" => StanceAction::Reject,
            "feedback_acknowledgement" => {
                // Counts as acceptance only right after a proposal.
                let after_proposal = preceding
                    .is_some_and(|p| matches!(p.as_str(), "suggest_support_date" | "init_date"));
                if after_proposal {
                    StanceAction::Accept
                } else {
                    StanceAction::None
                }
            }
            _ => StanceAction::None,
        }
    }

    /// Stance effect of an act that names no date of its own: acceptances and
    /// rejections land on the focus node.
    fn apply_focus_stance(
        &mut self,
        action: StanceAction,
        speaker: &str,
        turn_index: usize,
        report: &mut UtteranceReport,
    ) {
        let stance = match action {
            StanceAction::Accept => Stance::Accepted,
            StanceAction::Reject => Stance::Rejected,
            _ => return,
        };
        match self.thematic.mark_focus(stance, speaker, turn_index) {
            Ok(path) => report.thematic.push(ThematicEvent {
                event: "focus_attitude".to_string(),
                node: self.thematic.path_string(&path),
                stance: Some(stance),
                speaker: Some(speaker.to_string()),
            }),
            Err(_) => report.warnings.push(alloc::format!(
                "{stance} recorded nowhere: thematic memory is empty"
            )),
        }
    }

    /// Applies one plausible description to the thematic memory under the
    /// act's stance.
    fn apply_thematic(
        &mut self,
        action: StanceAction,
        desc: &TimeDescription,
        speaker: &str,
        turn_index: usize,
        report: &mut UtteranceReport,
    ) {
        let stance = match action {
            StanceAction::Propose => Stance::Proposed,
            StanceAction::Accept => Stance::Accepted,
            StanceAction::Reject => Stance::Rejected,
            StanceAction::None => {
                report.warnings.push(alloc::format!(
                    "time {desc} noted without a stance-bearing act"
                ));
                return;
            }
        };
        if action == StanceAction::Propose {
            for path in self
                .thematic
                .infer_implicit_rejection(desc, speaker, turn_index)
            {
                report.thematic.push(ThematicEvent {
                    event: "implicit_rejection".to_string(),
                    node: self.thematic.path_string(&path),
                    stance: Some(Stance::Rejected),
                    speaker: Some(speaker.to_string()),
                });
            }
        }
        if action == StanceAction::Accept {
            // Accepting while naming a refinement also accepts what is in
            // focus (e.g. agreeing to the day while steering the time).
            if let Ok(path) = self
                .thematic
                .mark_focus(Stance::Accepted, speaker, turn_index)
            {
                report.thematic.push(ThematicEvent {
                    event: "focus_attitude".to_string(),
                    node: self.thematic.path_string(&path),
                    stance: Some(Stance::Accepted),
                    speaker: Some(speaker.to_string()),
                });
            }
        }
        match self.thematic.insert(desc, stance, speaker, turn_index) {
            Ok(outcome) => report.thematic.push(ThematicEvent {
                event: if outcome.new_root {
                    "new_root".to_string()
                } else if outcome.created == 0 {
                    "support".to_string()
                } else {
                    "insert".to_string()
                },
                node: self.thematic.path_string(&outcome.path),
                stance: Some(stance),
                speaker: Some(speaker.to_string()),
            }),
            Err(e) => report.errors.push(StageError {
                stage: "thematic",
                message: e.to_string(),
            }),
        }
    }

    fn raise_clarification(
        &mut self,
        trigger: Trigger,
        action: StanceAction,
        speaker: &str,
        turn_index: usize,
        report: &mut UtteranceReport,
    ) {
        let update = PendingUpdate {
            trigger: trigger.clone(),
            action,
            speaker: speaker.to_string(),
            turn_index,
        };
        if !self.fsa.is_idle() {
            report.clarification.push(ClarificationEvent {
                event: "queued",
                detail: trigger.to_string(),
                proposal: None,
            });
            self.queued.push_back(update);
            return;
        }
        match self.fsa.raise(trigger.clone(), self.speaking_time.year) {
            Ok(ClarifyState::AwaitingConfirmation { proposal, .. }) => {
                let proposal_text = proposal.to_string();
                report.clarification.push(ClarificationEvent {
                    event: "raised",
                    detail: trigger.to_string(),
                    proposal: Some(proposal_text),
                });
                self.pending = Some(update);
                match self.config.clarification {
                    ClarificationMode::AutoAccept => {
                        if let Ok(outcome) = self.resolve_clarification(Response::Accept) {
                            report.clarification.extend(outcome.events);
                            report.thematic.extend(outcome.thematic);
                        }
                    }
                    ClarificationMode::AutoReject => {
                        if let Ok(outcome) = self.resolve_clarification(Response::Reject) {
                            report.clarification.extend(outcome.events);
                            report.thematic.extend(outcome.thematic);
                        }
                    }
                    _ => {}
                }
            }
            Ok(_) => {
                // No single-edit correction exists.
                report.clarification.push(ClarificationEvent {
                    event: "repeat_requested",
                    detail: trigger.to_string(),
                    proposal: None,
                });
                self.fsa.reset();
            }
            Err(e) => report.errors.push(StageError {
                stage: "clarify",
                message: e.to_string(),
            }),
        }
    }

    /// Prediction lists for the following utterance under the same-speaker
    /// and speaker-change hypotheses.
    fn both_predictions(
        &self,
    ) -> Result<(Vec<Prediction>, Vec<Prediction>), crate::predict::PredictError> {
        let history = self
            .memory
            .last_acts(&self.config.inference_track, self.model.max_order())
            .unwrap_or_default();
        let mut tagged: Vec<TaggedAct> = (0..history.len())
            .map(|j| {
                let direction = match history.get(j + 1) {
                    Some((_, next_speaker)) => DirectionTag::between(&history[j].1, next_speaker),
                    None => DirectionTag::SameSpeaker,
                };
                TaggedAct::new(history[j].0.clone(), direction)
            })
            .collect();
        let same = self.model.predict(&tagged, self.config.prediction_k)?;
        if let Some(last) = tagged.last_mut() {
            last.direction = DirectionTag::SpeakerChange;
        }
        let change = self.model.predict(&tagged, self.config.prediction_k)?;
        Ok((same, change))
    }
}
