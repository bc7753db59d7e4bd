//! Thematic memory: what dates are on the table, and where each party stands.
//!
//! Negotiated dates live in a specialization hierarchy running from years down
//! to clock times. Every node carries the attitudes (proposed, rejected,
//! accepted) the two participants have expressed towards that piece of the
//! date. The [`time`] submodule holds the partial date descriptions themselves
//! together with the pure calendar operations on them: resolving relative
//! expressions, plausibility checking, and next/following classification.

pub mod memory;
pub mod time;

pub use memory::{
    Attitude, InsertOutcome, NodePath, Stance, ThematicEvent, ThematicMemory, ThematicNode,
};
pub use time::{
    check_plausibility, classify_successor, first_violation, resolve_relative, ClockTime,
    ComponentValue, DayOfWeek, FromTo, Level, PeriodOfDay, Plausibility, SpeakingTime, Succession,
    TimeDescription, TimeError, TimeExpression, Violation,
};
