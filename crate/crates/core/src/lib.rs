//! Context engine for mediated appointment-scheduling dialogues.
//!
//! The engine keeps track of a two-party negotiation over meeting dates and
//! offers three services to its callers: storing and retrieving dialogue
//! context, drawing inferences over it, and predicting what comes next.
//!
//! - [`corpus`] — the annotated-dialogue data model shared by everything else.
//! - [`sequence`] — chronological turn/utterance memory, kept per analysis
//!   track, with phase and prediction annotations.
//! - [`predict`] — interpolated conditional-frequency models over dialogue-act
//!   sequences, conditioned on speaker direction.
//! - [`thematic`] — negotiated dates in a specialization hierarchy with
//!   per-speaker attitudes, plus calendar plausibility and relative-time
//!   resolution.
//! - [`plan`] — leveled plan operators building an intentional structure over
//!   the acts, phase determination, and operator learning.
//! - [`clarify`] — the clarification automaton for implausible dates and
//!   confusable tokens.
//! - [`engine`] — the per-dialogue session tying the parts together.
//!
//! The crate is `no_std` (with `alloc`); all I/O, file formats and the CLI
//! live in the companion `dlg-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod clarify;
pub mod corpus;
pub mod engine;
pub mod plan;
pub mod predict;
pub mod sequence;
pub mod thematic;

pub(crate) mod calendar;
