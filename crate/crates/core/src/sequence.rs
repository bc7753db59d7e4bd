//! The dialogue sequence memory: a chronological record of turns and their
//! utterances, kept separately per analysis track (deep, shallow, ...), with
//! per-turn metadata and per-utterance act, phase and prediction annotations.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::ActLabel;
use crate::plan::DialoguePhase;
use crate::predict::Prediction;

/// A parallel analysis pipeline whose segmentation is stored independently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisTrack(pub String);

/// One utterance as segmented by one track, plus its annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceRecord {
    pub act: ActLabel,
    pub phase: Option<DialoguePhase>,
    /// Ranked predictions for the following utterance.
    pub predictions: Option<Vec<Prediction>>,
    pub turn_index: usize,
    pub utterance_index: usize,
}

/// One turn with its per-track utterance lists and translation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnRecord {
    pub speaker: String,
    pub language: String,
    /// The processing track finally selected for translation.
    pub selected_track: Option<String>,
    /// How many of the selected track's utterances were translated.
    pub translated_count: usize,
    tracks: Vec<Vec<UtteranceRecord>>,
}

impl TurnRecord {
    pub fn utterances(&self, track_index: usize) -> &[UtteranceRecord] {
        &self.tracks[track_index]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceError {
    TurnAlreadyOpen,
    NoOpenTurn,
    UnknownTrack(String),
    DuplicateTrack(String),
    NoTracks,
    TranslatedCountTooLarge { count: usize, available: usize },
    NoSuchRecord { turn: usize, utterance: usize },
    EmptyCandidates,
    MultipleDefaults,
}

impl fmt::Display for SequenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceError::TurnAlreadyOpen => f.write_str("a turn is already open"),
            SequenceError::NoOpenTurn => f.write_str("no turn is open"),
            SequenceError::UnknownTrack(t) => write!(f, "unknown analysis track {t:?}"),
            SequenceError::DuplicateTrack(t) => write!(f, "duplicate analysis track {t:?}"),
            SequenceError::NoTracks => f.write_str("at least one analysis track is required"),
            SequenceError::TranslatedCountTooLarge { count, available } => write!(
                f,
                "translated count {count} exceeds the {available} utterances of the selected track"
            ),
            SequenceError::NoSuchRecord { turn, utterance } => {
                write!(f, "no utterance record at turn {turn}, index {utterance}")
            }
            SequenceError::EmptyCandidates => f.write_str("no reading candidates supplied"),
            SequenceError::MultipleDefaults => {
                f.write_str("at most one reading candidate may have an empty required set")
            }
        }
    }
}

/// One reading hypothesis for an ambiguous expression: it applies when a
/// recent dialogue act falls into its required set. An empty set marks the
/// default reading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadingCandidate {
    pub id: String,
    pub required: Vec<ActLabel>,
}

impl ReadingCandidate {
    pub fn new(id: impl Into<String>, required: &[&str]) -> ReadingCandidate {
        ReadingCandidate {
            id: id.into(),
            required: required.iter().map(|a| ActLabel::from(*a)).collect(),
        }
    }

    fn is_default(&self) -> bool {
        self.required.is_empty()
    }
}

/// Outcome of a reading disambiguation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disambiguation {
    pub reading: String,
    /// Set when the choice was forced rather than supported by context.
    pub low_confidence: bool,
}

/// The central chronological store. Mutations happen on a single thread of
/// control per dialogue session; reads may interleave between them.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceMemory {
    track_names: Vec<String>,
    turns: Vec<TurnRecord>,
    open: bool,
}

impl SequenceMemory {
    /// Creates a memory with the given analysis tracks (at least one,
    /// usually `deep` and `shallow`).
    pub fn new(tracks: &[&str]) -> Result<SequenceMemory, SequenceError> {
        if tracks.is_empty() {
            return Err(SequenceError::NoTracks);
        }
        let mut names: Vec<String> = Vec::new();
        for t in tracks {
            if names.iter().any(|n| n == t) {
                return Err(SequenceError::DuplicateTrack(t.to_string()));
            }
            names.push(t.to_string());
        }
        Ok(SequenceMemory {
            track_names: names,
            turns: Vec::new(),
            open: false,
        })
    }

    pub fn tracks(&self) -> &[String] {
        &self.track_names
    }

    pub fn turns(&self) -> &[TurnRecord] {
        &self.turns
    }

    pub fn open_turn_index(&self) -> Option<usize> {
        self.open.then(|| self.turns.len() - 1)
    }

    fn track_index(&self, track: &str) -> Result<usize, SequenceError> {
        self.track_names
            .iter()
            .position(|n| n == track)
            .ok_or_else(|| SequenceError::UnknownTrack(track.to_string()))
    }

    /// Opens the next turn; only one turn may be open at a time.
    pub fn begin_turn(&mut self, speaker: &str, language: &str) -> Result<usize, SequenceError> {
        if self.open {
            return Err(SequenceError::TurnAlreadyOpen);
        }
        self.turns.push(TurnRecord {
            speaker: speaker.to_string(),
            language: language.to_string(),
            selected_track: None,
            translated_count: 0,
            tracks: alloc::vec![Vec::new(); self.track_names.len()],
        });
        self.open = true;
        Ok(self.turns.len() - 1)
    }

    /// Appends an utterance record to one track of the open turn; other
    /// tracks are unaffected.
    pub fn add_utterance(
        &mut self,
        track: &str,
        act: ActLabel,
    ) -> Result<(usize, usize), SequenceError> {
        let track_idx = self.track_index(track)?;
        if !self.open {
            return Err(SequenceError::NoOpenTurn);
        }
        let turn_index = self.turns.len() - 1;
        let list = &mut self.turns[turn_index].tracks[track_idx];
        let utterance_index = list.len();
        list.push(UtteranceRecord {
            act,
            phase: None,
            predictions: None,
            turn_index,
            utterance_index,
        });
        Ok((turn_index, utterance_index))
    }

    /// Closes the open turn, recording which track was selected for
    /// translation and how many of its utterances were translated.
    pub fn close_turn(
        &mut self,
        selected_track: &str,
        translated_count: usize,
    ) -> Result<&TurnRecord, SequenceError> {
        let track_idx = self.track_index(selected_track)?;
        if !self.open {
            return Err(SequenceError::NoOpenTurn);
        }
        let turn = self.turns.last_mut().expect("open turn exists");
        let available = turn.tracks[track_idx].len();
        if translated_count > available {
            return Err(SequenceError::TranslatedCountTooLarge {
                count: translated_count,
                available,
            });
        }
        turn.selected_track = Some(selected_track.to_string());
        turn.translated_count = translated_count;
        self.open = false;
        Ok(self.turns.last().expect("turn exists"))
    }

    /// The most recent `n` (act, speaker) pairs on a track, oldest first,
    /// crossing turn boundaries and clamped to what exists.
    pub fn last_acts(
        &self,
        track: &str,
        n: usize,
    ) -> Result<Vec<(ActLabel, String)>, SequenceError> {
        let track_idx = self.track_index(track)?;
        let mut all: Vec<(ActLabel, String)> = Vec::new();
        for turn in &self.turns {
            for record in &turn.tracks[track_idx] {
                all.push((record.act.clone(), turn.speaker.clone()));
            }
        }
        let start = all.len().saturating_sub(n);
        Ok(all.split_off(start))
    }

    /// Resolves an ambiguous expression by the most recent act(s) on a track:
    /// the first candidate whose required set contains one of the last
    /// `window` acts wins; otherwise the default candidate; otherwise the
    /// first candidate with a low-confidence flag.
    pub fn disambiguate_reading(
        &self,
        track: &str,
        candidates: &[ReadingCandidate],
    ) -> Result<Disambiguation, SequenceError> {
        self.disambiguate_reading_with_window(track, candidates, 1)
    }

    pub fn disambiguate_reading_with_window(
        &self,
        track: &str,
        candidates: &[ReadingCandidate],
        window: usize,
    ) -> Result<Disambiguation, SequenceError> {
        if candidates.is_empty() {
            return Err(SequenceError::EmptyCandidates);
        }
        if candidates.iter().filter(|c| c.is_default()).count() > 1 {
            return Err(SequenceError::MultipleDefaults);
        }
        let recent = self.last_acts(track, window)?;
        let matched = candidates
            .iter()
            .find(|c| !c.is_default() && recent.iter().any(|(act, _)| c.required.contains(act)));
        if let Some(c) = matched {
            return Ok(Disambiguation {
                reading: c.id.clone(),
                low_confidence: false,
            });
        }
        match candidates.iter().find(|c| c.is_default()) {
            Some(default) => Ok(Disambiguation {
                reading: default.id.clone(),
                // Without any act to consult the default is a guess.
                low_confidence: recent.is_empty(),
            }),
            None => Ok(Disambiguation {
                reading: candidates[0].id.clone(),
                low_confidence: true,
            }),
        }
    }

    /// Sets phase and/or prediction annotations on an existing record; later
    /// annotations overwrite earlier ones. Predictions are kept sorted by
    /// descending probability (act name on ties).
    pub fn annotate(
        &mut self,
        turn_index: usize,
        utterance_index: usize,
        track: &str,
        phase: Option<DialoguePhase>,
        predictions: Option<Vec<Prediction>>,
    ) -> Result<&UtteranceRecord, SequenceError> {
        let track_idx = self.track_index(track)?;
        let record = self
            .turns
            .get_mut(turn_index)
            .and_then(|t| t.tracks[track_idx].get_mut(utterance_index))
            .ok_or(SequenceError::NoSuchRecord {
                turn: turn_index,
                utterance: utterance_index,
            })?;
        if let Some(phase) = phase {
            record.phase = Some(phase);
        }
        if let Some(mut predictions) = predictions {
            predictions.sort_by(|a, b| {
                b.probability
                    .total_cmp(&a.probability)
                    .then_with(|| a.act.cmp(&b.act))
            });
            record.predictions = Some(predictions);
        }
        Ok(record)
    }

    /// Structured-text dump: one line per utterance record with turn index,
    /// speaker, track, act, phase and the top-k predictions scaled to
    /// integers per mille.
    pub fn snapshot(&self, top_k: usize) -> String {
        let mut out = String::new();
        for (turn_index, turn) in self.turns.iter().enumerate() {
            for (track_idx, track_name) in self.track_names.iter().enumerate() {
                for record in &turn.tracks[track_idx] {
                    let phase = record.phase.map(|p| p.name()).unwrap_or("-");
                    let mut preds = String::new();
                    if let Some(predictions) = &record.predictions {
                        for (i, p) in predictions.iter().take(top_k).enumerate() {
                            if i > 0 {
                                preds.push_str(", ");
                            }
                            preds.push_str(&alloc::format!("{}:{}", p.act, p.per_mille()));
                        }
                    }
                    out.push_str(&alloc::format!(
                        "{turn_index} {speaker} {track_name} {act} {phase} [{preds}]\n",
                        speaker = turn.speaker,
                        act = record.act,
                    ));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn memory() -> SequenceMemory {
        SequenceMemory::new(&["deep", "shallow"]).unwrap()
    }

    #[test]
    fn begin_turn_numbers_turns_contiguously() {
        let mut mem = memory();
        assert_eq!(mem.begin_turn("A", "de").unwrap(), 0);
        mem.close_turn("deep", 0).unwrap();
        assert_eq!(mem.begin_turn("B", "de").unwrap(), 1);
        mem.close_turn("deep", 0).unwrap();
        assert_eq!(mem.begin_turn("A", "de").unwrap(), 2);
        mem.close_turn("deep", 0).unwrap();
        assert_eq!(mem.begin_turn("B", "de").unwrap(), 3);
    }

    #[test]
    fn only_one_turn_may_be_open() {
        let mut mem = memory();
        mem.begin_turn("A", "de").unwrap();
        assert_eq!(
            mem.begin_turn("B", "de"),
            Err(SequenceError::TurnAlreadyOpen)
        );
    }

    #[test]
    fn tracks_are_segmented_independently() {
        // The same turn holds four deep utterances but only two shallow ones.
        let mut mem = memory();
        mem.begin_turn("B", "de").unwrap();
        for act in [
            "greet",
            "introduce_name",
            "init_date",
            "suggest_support_date",
        ] {
            mem.add_utterance("deep", ActLabel::from(act)).unwrap();
        }
        for act in ["greet", "init_date"] {
            mem.add_utterance("shallow", ActLabel::from(act)).unwrap();
        }
        let turn = &mem.turns()[0];
        assert_eq!(turn.utterances(0).len(), 4);
        assert_eq!(turn.utterances(1).len(), 2);
        assert_eq!(turn.utterances(1)[1].act.as_str(), "init_date");

        assert_eq!(
            mem.add_utterance("x", ActLabel::from("greet")),
            Err(SequenceError::UnknownTrack("x".into()))
        );
    }

    #[test]
    fn close_turn_records_selection_and_checks_the_count() {
        let mut mem = memory();
        mem.begin_turn("B", "de").unwrap();
        for act in [
            "greet",
            "introduce_name",
            "init_date",
            "suggest_support_date",
        ] {
            mem.add_utterance("deep", ActLabel::from(act)).unwrap();
        }
        assert_eq!(
            mem.close_turn("deep", 5),
            Err(SequenceError::TranslatedCountTooLarge {
                count: 5,
                available: 4
            })
        );
        let turn = mem.close_turn("deep", 4).unwrap();
        assert_eq!(turn.selected_track.as_deref(), Some("deep"));
        assert_eq!(turn.translated_count, 4);

        // Closing with nothing translated is legal.
        let mut mem = memory();
        mem.begin_turn("A", "de").unwrap();
        assert!(mem.close_turn("deep", 0).is_ok());
    }

    #[test]
    fn last_acts_crosses_turn_boundaries_with_speakers() {
        let mut mem = memory();
        mem.begin_turn("A", "de").unwrap();
        mem.add_utterance("deep", ActLabel::from("greet")).unwrap();
        mem.add_utterance("deep", ActLabel::from("introduce_name"))
            .unwrap();
        mem.close_turn("deep", 2).unwrap();
        mem.begin_turn("B", "de").unwrap();
        for act in [
            "greet",
            "introduce_name",
            "init_date",
            "suggest_support_date",
        ] {
            mem.add_utterance("deep", ActLabel::from(act)).unwrap();
        }
        mem.close_turn("deep", 4).unwrap();

        let last2 = mem.last_acts("deep", 2).unwrap();
        assert_eq!(
            last2,
            alloc::vec![
                (ActLabel::from("init_date"), "B".to_string()),
                (ActLabel::from("suggest_support_date"), "B".to_string()),
            ]
        );
        // Clamping.
        assert_eq!(mem.last_acts("deep", 100).unwrap().len(), 6);
        assert!(memory().last_acts("deep", 3).unwrap().is_empty());
    }

    #[test]
    fn last_acts_n_is_a_suffix_of_n_plus_one() {
        let mut mem = memory();
        mem.begin_turn("A", "de").unwrap();
        for act in ["greet", "uptake", "init_date", "bye"] {
            mem.add_utterance("deep", ActLabel::from(act)).unwrap();
        }
        for n in 0..6 {
            let shorter = mem.last_acts("deep", n).unwrap();
            let longer = mem.last_acts("deep", n + 1).unwrap();
            assert!(longer.ends_with(&shorter));
        }
    }

    fn bei_ihnen_candidates() -> Vec<ReadingCandidate> {
        alloc::vec![
            ReadingCandidate::new(
                "temporal",
                &["suggest_support_date", "request_comment_date"]
            ),
            ReadingCandidate::new("locative", &[]),
        ]
    }

    #[test]
    fn disambiguation_follows_the_preceding_act() {
        let mut mem = memory();
        mem.begin_turn("A", "de").unwrap();
        mem.add_utterance("deep", ActLabel::from("suggest_support_date"))
            .unwrap();
        let outcome = mem
            .disambiguate_reading("deep", &bei_ihnen_candidates())
            .unwrap();
        assert_eq!(outcome.reading, "temporal");
        assert!(!outcome.low_confidence);
    }

    #[test]
    fn disambiguation_falls_back_to_the_default() {
        let mut mem = memory();
        mem.begin_turn("A", "de").unwrap();
        mem.add_utterance("deep", ActLabel::from("greet")).unwrap();
        let outcome = mem
            .disambiguate_reading("deep", &bei_ihnen_candidates())
            .unwrap();
        assert_eq!(outcome.reading, "locative");
        assert!(!outcome.low_confidence);
    }

    #[test]
    fn disambiguation_without_history_is_low_confidence() {
        let mem = memory();
        let outcome = mem
            .disambiguate_reading("deep", &bei_ihnen_candidates())
            .unwrap();
        assert_eq!(outcome.reading, "locative");
        assert!(outcome.low_confidence);

        // No default at all: first candidate, flagged.
        let candidates = alloc::vec![
            ReadingCandidate::new("temporal", &["suggest_support_date"]),
            ReadingCandidate::new("locative", &["greet"]),
        ];
        let outcome = mem.disambiguate_reading("deep", &candidates).unwrap();
        assert_eq!(outcome.reading, "temporal");
        assert!(outcome.low_confidence);
    }

    #[test]
    fn disambiguation_validates_candidates() {
        let mem = memory();
        assert_eq!(
            mem.disambiguate_reading("deep", &[]),
            Err(SequenceError::EmptyCandidates)
        );
        let two_defaults = alloc::vec![
            ReadingCandidate::new("a", &[]),
            ReadingCandidate::new("b", &[]),
        ];
        assert_eq!(
            mem.disambiguate_reading("deep", &two_defaults),
            Err(SequenceError::MultipleDefaults)
        );
    }

    #[test]
    fn disambiguation_is_pure_between_mutations() {
        let mut mem = memory();
        mem.begin_turn("A", "de").unwrap();
        mem.add_utterance("deep", ActLabel::from("suggest_support_date"))
            .unwrap();
        let candidates = bei_ihnen_candidates();
        let first = mem.disambiguate_reading("deep", &candidates).unwrap();
        for _ in 0..3 {
            assert_eq!(
                mem.disambiguate_reading("deep", &candidates).unwrap(),
                first
            );
        }
    }

    #[test]
    fn annotate_sets_and_overwrites_fields() {
        let mut mem = memory();
        mem.begin_turn("B", "de").unwrap();
        mem.add_utterance("deep", ActLabel::from("greet")).unwrap();

        let record = mem
            .annotate(0, 0, "deep", Some(DialoguePhase::Opening), None)
            .unwrap();
        assert_eq!(record.phase, Some(DialoguePhase::Opening));

        // Empty prediction list is stored as such.
        let record = mem.annotate(0, 0, "deep", None, Some(Vec::new())).unwrap();
        assert_eq!(record.predictions.as_deref(), Some(&[][..]));
        assert_eq!(record.phase, Some(DialoguePhase::Opening));

        // Latest wins.
        let record = mem
            .annotate(0, 0, "deep", Some(DialoguePhase::Negotiation), None)
            .unwrap();
        assert_eq!(record.phase, Some(DialoguePhase::Negotiation));

        assert_eq!(
            mem.annotate(0, 9, "deep", Some(DialoguePhase::Opening), None),
            Err(SequenceError::NoSuchRecord {
                turn: 0,
                utterance: 9
            })
        );
    }

    #[test]
    fn annotate_keeps_predictions_sorted() {
        let mut mem = memory();
        mem.begin_turn("B", "de").unwrap();
        mem.add_utterance("deep", ActLabel::from("greet")).unwrap();
        let unsorted = alloc::vec![
            Prediction {
                act: ActLabel::from("b"),
                probability: 0.2
            },
            Prediction {
                act: ActLabel::from("a"),
                probability: 0.5
            },
            Prediction {
                act: ActLabel::from("c"),
                probability: 0.2
            },
        ];
        let record = mem.annotate(0, 0, "deep", None, Some(unsorted)).unwrap();
        let order: Vec<&str> = record
            .predictions
            .as_ref()
            .unwrap()
            .iter()
            .map(|p| p.act.as_str())
            .collect();
        assert_eq!(order, ["a", "b", "c"]);
    }

    #[test]
    fn snapshot_lists_records_with_per_mille_predictions() {
        let mut mem = memory();
        mem.begin_turn("B", "de").unwrap();
        mem.add_utterance("deep", ActLabel::from("greet")).unwrap();
        mem.annotate(
            0,
            0,
            "deep",
            Some(DialoguePhase::Opening),
            Some(alloc::vec![
                Prediction {
                    act: ActLabel::from("introduce_name"),
                    probability: 0.4125
                },
                Prediction {
                    act: ActLabel::from("greet"),
                    probability: 0.1001
                },
            ]),
        )
        .unwrap();
        mem.add_utterance("shallow", ActLabel::from("greet"))
            .unwrap();
        mem.close_turn("deep", 1).unwrap();

        let snapshot = mem.snapshot(3);
        assert_eq!(
            snapshot,
            "0 B deep greet opening [introduce_name:413, greet:100]\n\
             0 B shallow greet - []\n"
        );
    }

    #[test]
    fn per_track_lists_equal_the_add_subsequence() {
        // Interleaved adds across tracks land in their own lists in order.
        let mut mem = memory();
        mem.begin_turn("A", "de").unwrap();
        let script = [
            ("deep", "greet"),
            ("shallow", "greet"),
            ("deep", "uptake"),
            ("deep", "bye"),
            ("shallow", "init_date"),
        ];
        for (track, act) in script {
            mem.add_utterance(track, ActLabel::from(act)).unwrap();
        }
        mem.close_turn("shallow", 1).unwrap();

        let expect = |track: &str| -> Vec<ActLabel> {
            script
                .iter()
                .filter(|(t, _)| *t == track)
                .map(|(_, a)| ActLabel::from(*a))
                .collect()
        };
        let turn = &mem.turns()[0];
        let deep: Vec<ActLabel> = turn.utterances(0).iter().map(|r| r.act.clone()).collect();
        let shallow: Vec<ActLabel> = turn.utterances(1).iter().map(|r| r.act.clone()).collect();
        assert_eq!(deep, expect("deep"));
        assert_eq!(shallow, expect("shallow"));
    }
}
