//! The annotated-dialogue data model: dialogue acts, utterances, turns,
//! dialogues and corpora, plus validation and deterministic corpus splitting.
//!
//! A corpus file is UTF-8 JSON with one object per file; see the `dlg-cli`
//! crate for the reader. Everything here is immutable after construction and
//! safe to share between readers.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::thematic::time::{SpeakingTime, TimeExpression};

/// A dialogue-act label out of a configured inventory, e.g.
/// `suggest_support_date`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActLabel(pub String);

impl ActLabel {
    pub fn new(name: impl Into<String>) -> ActLabel {
        ActLabel(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ActLabel {
    fn from(s: &str) -> ActLabel {
        ActLabel(s.to_string())
    }
}

/// The default act inventory: the nine acts observable in the example
/// dialogue plus `bye` for the closing phase. Inventories are open; corpora
/// declare their own.
pub fn default_inventory() -> Vec<ActLabel> {
    [
        "greet",
        "introduce_name",
        "init_date",
        "suggest_support_date",
        "request_comment_date",
        "uptake",
        "reject_date",
        "accept_date",
        "feedback_acknowledgement",
        "bye",
    ]
    .into_iter()
    .map(ActLabel::from)
    .collect()
}

/// One clause-like segment of a turn. Text is optional: all inferences work
/// on acts and structured time expressions. The utterance's index within its
/// turn is its position in the containing `Vec`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub act: ActLabel,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<TimeExpression>,
}

/// One uninterrupted contribution of a dialogue participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub speaker: String,
    pub language: String,
    pub utterances: Vec<Utterance>,
}

/// A complete two-party dialogue with its deictic anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dialogue {
    pub id: String,
    pub speaking_time: SpeakingTime,
    pub participants: [String; 2],
    pub turns: Vec<Turn>,
}

impl Dialogue {
    /// The flattened utterance sequence as (act, speaker) pairs, in order.
    pub fn flat_acts(&self) -> impl Iterator<Item = (&ActLabel, &str)> {
        self.turns.iter().flat_map(|t| {
            t.utterances
                .iter()
                .map(move |u| (&u.act, t.speaker.as_str()))
        })
    }

    pub fn utterance_count(&self) -> usize {
        self.turns.iter().map(|t| t.utterances.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub act_inventory: Vec<ActLabel>,
    pub dialogues: Vec<Dialogue>,
}

impl Corpus {
    pub fn utterance_count(&self) -> usize {
        self.dialogues.iter().map(|d| d.utterance_count()).sum()
    }

    /// Checks every structural invariant: two distinct participants, turns
    /// and utterances non-empty, speakers declared, acts inside the
    /// inventory, and structurally sound time expressions. Violations name
    /// the dialogue and turn they were found in.
    pub fn validate(&self) -> Result<(), CorpusError> {
        for act in &self.act_inventory {
            if act.as_str().is_empty() {
                return Err(CorpusError::EmptyActLabel {
                    dialogue: "<inventory>".to_string(),
                    turn: 0,
                });
            }
        }
        for dialogue in &self.dialogues {
            let id = &dialogue.id;
            if dialogue.participants[0] == dialogue.participants[1] {
                return Err(CorpusError::DuplicateParticipants {
                    dialogue: id.clone(),
                });
            }
            if dialogue.turns.is_empty() {
                return Err(CorpusError::NoTurns {
                    dialogue: id.clone(),
                });
            }
            for (turn_index, turn) in dialogue.turns.iter().enumerate() {
                if turn.utterances.is_empty() {
                    return Err(CorpusError::NoUtterances {
                        dialogue: id.clone(),
                        turn: turn_index,
                    });
                }
                if !dialogue.participants.contains(&turn.speaker) {
                    return Err(CorpusError::UndeclaredSpeaker {
                        dialogue: id.clone(),
                        turn: turn_index,
                        speaker: turn.speaker.clone(),
                    });
                }
                for utterance in &turn.utterances {
                    if utterance.act.as_str().is_empty() {
                        return Err(CorpusError::EmptyActLabel {
                            dialogue: id.clone(),
                            turn: turn_index,
                        });
                    }
                    if !self.act_inventory.contains(&utterance.act) {
                        return Err(CorpusError::UnknownAct {
                            dialogue: id.clone(),
                            turn: turn_index,
                            act: utterance.act.clone(),
                        });
                    }
                    for time in &utterance.times {
                        if let TimeExpression::Absolute { desc } = time {
                            if let Err(reason) = desc.validate() {
                                return Err(CorpusError::BadTimeExpression {
                                    dialogue: id.clone(),
                                    turn: turn_index,
                                    reason,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusError {
    DuplicateParticipants {
        dialogue: String,
    },
    NoTurns {
        dialogue: String,
    },
    NoUtterances {
        dialogue: String,
        turn: usize,
    },
    UndeclaredSpeaker {
        dialogue: String,
        turn: usize,
        speaker: String,
    },
    EmptyActLabel {
        dialogue: String,
        turn: usize,
    },
    UnknownAct {
        dialogue: String,
        turn: usize,
        act: ActLabel,
    },
    BadTimeExpression {
        dialogue: String,
        turn: usize,
        reason: String,
    },
    TooFewDialogues {
        needed: usize,
        got: usize,
    },
    InvalidFraction,
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::DuplicateParticipants { dialogue } => {
                write!(
                    f,
                    "dialogue {dialogue}: participants are not two distinct ids"
                )
            }
            CorpusError::NoTurns { dialogue } => {
                write!(f, "dialogue {dialogue}: no turns")
            }
            CorpusError::NoUtterances { dialogue, turn } => {
                write!(f, "dialogue {dialogue}, turn {turn}: no utterances")
            }
            CorpusError::UndeclaredSpeaker {
                dialogue,
                turn,
                speaker,
            } => {
                write!(f, "dialogue {dialogue}, turn {turn}: speaker {speaker:?} is not a declared participant")
            }
            CorpusError::EmptyActLabel { dialogue, turn } => {
                write!(f, "dialogue {dialogue}, turn {turn}: empty act label")
            }
            CorpusError::UnknownAct {
                dialogue,
                turn,
                act,
            } => {
                write!(
                    f,
                    "dialogue {dialogue}, turn {turn}: act {act:?} is outside the inventory",
                    act = act.as_str()
                )
            }
            CorpusError::BadTimeExpression {
                dialogue,
                turn,
                reason,
            } => {
                write!(
                    f,
                    "dialogue {dialogue}, turn {turn}: bad time expression: {reason}"
                )
            }
            CorpusError::TooFewDialogues { needed, got } => {
                write!(f, "corpus has {got} dialogues, but {needed} are needed")
            }
            CorpusError::InvalidFraction => f.write_str("held-out fraction must lie in (0,1)"),
        }
    }
}

/// Deterministically partitions a corpus into (main, held-out) parts by whole
/// dialogues. The held-out size is `round(n * fraction)` clamped so that both
/// parts stay non-empty; equal seeds give identical partitions.
pub fn split_corpus(
    corpus: &Corpus,
    held_out_fraction: f64,
    seed: u64,
) -> Result<(Corpus, Corpus), CorpusError> {
    if !(held_out_fraction > 0.0 && held_out_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction);
    }
    let n = corpus.dialogues.len();
    if n < 2 {
        return Err(CorpusError::TooFewDialogues { needed: 2, got: n });
    }
    // f64::round is unavailable without std; the product is non-negative.
    let k = (((n as f64) * held_out_fraction + 0.5) as usize).clamp(1, n - 1);

    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let mut held = alloc::vec![false; n];
    for &i in indices.iter().take(k) {
        held[i] = true;
    }

    let pick = |want_held: bool| Corpus {
        act_inventory: corpus.act_inventory.clone(),
        dialogues: corpus
            .dialogues
            .iter()
            .enumerate()
            .filter(|(i, _)| held[*i] == want_held)
            .map(|(_, d)| d.clone())
            .collect(),
    };
    Ok((pick(false), pick(true)))
}
