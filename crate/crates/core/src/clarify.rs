//! System-initiated clarification exchanges.
//!
//! A small automaton drives one clarification at a time: a trigger
//! (implausible date or confusable token) raises a correction proposal, the
//! user accepts or rejects it, and the automaton lands in a terminal state
//! until it is reset. Correction proposals are deterministic single-component
//! edits, so an accepted proposal always names a reproducible plausible date.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::calendar;
use crate::thematic::time::{check_plausibility, first_violation, TimeDescription, Violation};

/// Two lexicon tokens the recognizer is likely to swap, with a similarity
/// score in (0, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfusablePair {
    pub a: String,
    pub b: String,
    pub similarity: f64,
}

impl ConfusablePair {
    pub fn new(a: impl Into<String>, b: impl Into<String>, similarity: f64) -> ConfusablePair {
        ConfusablePair {
            a: a.into(),
            b: b.into(),
            similarity,
        }
    }

    /// The pair member that is not `token`, if `token` is a member.
    pub fn other(&self, token: &str) -> Option<&str> {
        if self.a == token {
            Some(&self.b)
        } else if self.b == token {
            Some(&self.a)
        } else {
            None
        }
    }
}

// Lexicon entries may omit the similarity; a normalized edit distance fills
// it in.
impl<'de> Deserialize<'de> for ConfusablePair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: String,
            b: String,
            #[serde(default)]
            similarity: Option<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let similarity = raw
            .similarity
            .unwrap_or_else(|| estimated_similarity(&raw.a, &raw.b));
        Ok(ConfusablePair {
            a: raw.a,
            b: raw.b,
            similarity,
        })
    }
}

/// Normalized edit-distance similarity: 1 − levenshtein / max length.
pub fn estimated_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut current = alloc::vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        current[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            current[j + 1] = substitution.min(prev[j + 1] + 1).min(current[j] + 1);
        }
        core::mem::swap(&mut prev, &mut current);
    }
    1.0 - prev[b.len()] as f64 / longest as f64
}

/// Validates a confusable lexicon: members distinct, similarity in (0, 1],
/// each unordered pair listed once.
pub fn validate_lexicon(pairs: &[ConfusablePair]) -> Result<(), ClarifyError> {
    for (i, pair) in pairs.iter().enumerate() {
        if pair.a == pair.b {
            return Err(ClarifyError::InvalidPair(format!(
                "pair members must differ, got {:?} twice",
                pair.a
            )));
        }
        if !(pair.similarity > 0.0 && pair.similarity <= 1.0) {
            return Err(ClarifyError::InvalidPair(format!(
                "similarity of ({}, {}) must lie in (0,1], got {}",
                pair.a, pair.b, pair.similarity
            )));
        }
        for earlier in &pairs[..i] {
            let same = (earlier.a == pair.a && earlier.b == pair.b)
                || (earlier.a == pair.b && earlier.b == pair.a);
            if same {
                return Err(ClarifyError::InvalidPair(format!(
                    "pair ({}, {}) listed twice",
                    pair.a, pair.b
                )));
            }
        }
    }
    Ok(())
}

/// What raised the clarification.
#[derive(Debug, Clone, PartialEq)]
pub enum Trigger {
    ImplausibleDate {
        desc: TimeDescription,
        reason: String,
    },
    ConfusableTokens {
        token: String,
        pair: ConfusablePair,
    },
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trigger::ImplausibleDate { desc, reason } => {
                write!(f, "implausible date {desc}: {reason}")
            }
            Trigger::ConfusableTokens { token, pair } => write!(
                f,
                "token {:?} is confusable with {:?}",
                token,
                pair.other(token).unwrap_or(&pair.b)
            ),
        }
    }
}

/// What the system proposes instead.
#[derive(Debug, Clone, PartialEq)]
pub enum Proposal {
    CorrectedDate(TimeDescription),
    ReplaceToken { from: String, to: String },
}

impl fmt::Display for Proposal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Proposal::CorrectedDate(desc) => write!(f, "{desc}"),
            Proposal::ReplaceToken { to, .. } => write!(f, "{to:?}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub enum ClarifyState {
    #[default]
    Idle,
    AwaitingConfirmation {
        trigger: Trigger,
        proposal: Proposal,
    },
    Resolved {
        proposal: Proposal,
    },
    RepeatRequested,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Response {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClarifyError {
    AlreadyPlausible,
    NotIdle,
    NotAwaiting,
    InvalidThreshold(f64),
    InvalidPair(String),
}

impl fmt::Display for ClarifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClarifyError::AlreadyPlausible => {
                f.write_str("description is already plausible, nothing to correct")
            }
            ClarifyError::NotIdle => f.write_str("a clarification is already in progress"),
            ClarifyError::NotAwaiting => f.write_str("no proposal is awaiting confirmation"),
            ClarifyError::InvalidThreshold(t) => {
                write!(f, "similarity threshold must lie in (0,1], got {t}")
            }
            ClarifyError::InvalidPair(why) => write!(f, "invalid confusable pair: {why}"),
        }
    }
}

/// The clarification automaton. Deterministic; `Resolved` and
/// `RepeatRequested` are terminal until an explicit [`reset`](Self::reset).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClarificationFsa {
    state: ClarifyState,
}

impl ClarificationFsa {
    pub fn new() -> ClarificationFsa {
        ClarificationFsa::default()
    }

    pub fn state(&self) -> &ClarifyState {
        &self.state
    }

    pub fn is_idle(&self) -> bool {
        matches!(self.state, ClarifyState::Idle)
    }

    pub fn proposal(&self) -> Option<&Proposal> {
        match &self.state {
            ClarifyState::AwaitingConfirmation { proposal, .. }
            | ClarifyState::Resolved { proposal } => Some(proposal),
            _ => None,
        }
    }

    /// Raises a trigger on an idle automaton. Implausible dates move to
    /// `AwaitingConfirmation` with a corrected proposal, or directly to
    /// `RepeatRequested` when no single edit fixes the description.
    pub fn raise(
        &mut self,
        trigger: Trigger,
        reference_year: i32,
    ) -> Result<&ClarifyState, ClarifyError> {
        if !self.is_idle() {
            return Err(ClarifyError::NotIdle);
        }
        self.state = match &trigger {
            Trigger::ImplausibleDate { desc, .. } => match corrected(desc, reference_year) {
                Some(proposal) => ClarifyState::AwaitingConfirmation {
                    proposal: Proposal::CorrectedDate(proposal),
                    trigger,
                },
                None => ClarifyState::RepeatRequested,
            },
            Trigger::ConfusableTokens { token, pair } => {
                let to = pair.other(token).unwrap_or(&pair.b).to_string();
                ClarifyState::AwaitingConfirmation {
                    proposal: Proposal::ReplaceToken {
                        from: token.clone(),
                        to,
                    },
                    trigger,
                }
            }
        };
        Ok(&self.state)
    }

    /// Accepts or rejects the pending proposal: acceptance resolves to the
    /// corrected value, rejection asks the user to repeat the whole turn.
    pub fn step(&mut self, response: Response) -> Result<&ClarifyState, ClarifyError> {
        match core::mem::take(&mut self.state) {
            ClarifyState::AwaitingConfirmation { proposal, .. } => {
                self.state = match response {
                    Response::Accept => ClarifyState::Resolved { proposal },
                    Response::Reject => ClarifyState::RepeatRequested,
                };
                Ok(&self.state)
            }
            other => {
                self.state = other;
                Err(ClarifyError::NotAwaiting)
            }
        }
    }

    pub fn reset(&mut self) {
        self.state = ClarifyState::Idle;
    }
}

/// Builds an automaton awaiting confirmation of a corrected date (or in
/// `RepeatRequested` if no single-component edit helps). Errors when the
/// description is already plausible.
pub fn propose_correction(
    desc: &TimeDescription,
    reference_year: i32,
) -> Result<ClarificationFsa, ClarifyError> {
    let reason = match first_violation(desc, reference_year) {
        Some(v) => v.to_string(),
        None => return Err(ClarifyError::AlreadyPlausible),
    };
    let mut fsa = ClarificationFsa::new();
    fsa.raise(
        Trigger::ImplausibleDate {
            desc: desc.clone(),
            reason,
        },
        reference_year,
    )
    .expect("fresh automaton is idle");
    Ok(fsa)
}

/// The minimal single-component edit making a description plausible: days
/// clamp to the month's last valid day, mismatched weekdays drop the
/// day-of-week component, out-of-range weeks clamp to the year's last ISO
/// week (interval endpoints likewise). `None` when one edit is not enough.
pub fn corrected(desc: &TimeDescription, reference_year: i32) -> Option<TimeDescription> {
    let violation = first_violation(desc, reference_year)?;
    let year = desc.year.unwrap_or(reference_year);
    let mut fixed = desc.clone();
    match violation {
        Violation::DayOutOfRange(_) | Violation::DayVsMonthLength { .. } => {
            let max = match desc.month {
                Some(month) => calendar::month_length(year, month) as u32,
                None => 31,
            };
            match (&mut fixed.from_to, fixed.day) {
                (Some(ft), _) if ft.level == crate::thematic::time::Level::Day => {
                    ft.lo = ft.lo.clamp(1, max);
                    ft.hi = ft.hi.clamp(1, max);
                }
                (_, Some(day)) => fixed.day = Some((day as u32).clamp(1, max) as u8),
                _ => return None,
            }
        }
        Violation::WeekdayMismatch { .. } => {
            fixed.dow = None;
        }
        Violation::WeekOutOfRange { max, .. } => match (&mut fixed.from_to, fixed.week) {
            (Some(ft), _) if ft.level == crate::thematic::time::Level::Week => {
                ft.lo = ft.lo.clamp(1, max as u32);
                ft.hi = ft.hi.clamp(1, max as u32);
            }
            (_, Some(week)) => fixed.week = Some(week.clamp(1, max)),
            _ => return None,
        },
        Violation::WeekVsDate { .. } => {
            // The full date is authoritative; the week tag is dropped.
            fixed.week = None;
        }
        _ => return None,
    }
    check_plausibility(&fixed, reference_year)
        .is_plausible()
        .then_some(fixed)
}

/// Flags every token equal to a member of a sufficiently similar confusable
/// pair, in token order.
pub fn detect_confusables(
    tokens: &[&str],
    lexicon: &[ConfusablePair],
    threshold: f64,
) -> Result<Vec<(usize, ConfusablePair)>, ClarifyError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(ClarifyError::InvalidThreshold(threshold));
    }
    let mut flags = Vec::new();
    for (position, token) in tokens.iter().enumerate() {
        for pair in lexicon {
            if pair.similarity >= threshold && pair.other(token).is_some() {
                flags.push((position, pair.clone()));
            }
        }
    }
    Ok(flags)
}
