//! Partial date descriptions and the calendar logic on top of them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::calendar;

/// The seven levels of the specialization hierarchy, coarsest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "year")]
    Year,
    #[serde(rename = "month")]
    Month,
    #[serde(rename = "week")]
    Week,
    #[serde(rename = "day")]
    Day,
    #[serde(rename = "dow")]
    DayOfWeek,
    #[serde(rename = "period")]
    PeriodOfDay,
    #[serde(rename = "time")]
    Time,
}

impl Level {
    pub const ALL: [Level; 7] = [
        Level::Year,
        Level::Month,
        Level::Week,
        Level::Day,
        Level::DayOfWeek,
        Level::PeriodOfDay,
        Level::Time,
    ];

    /// Strictly finer (deeper in the hierarchy) than `other`.
    pub fn finer_than(self, other: Level) -> bool {
        self > other
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::Year => "year",
            Level::Month => "month",
            Level::Week => "week",
            Level::Day => "day",
            Level::DayOfWeek => "dow",
            Level::PeriodOfDay => "period",
            Level::Time => "time",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DayOfWeek {
    Mon,
    Tue,
    Wed,
    Thu,
    Fri,
    Sat,
    Sun,
}

impl DayOfWeek {
    pub(crate) fn from_chrono(w: Weekday) -> DayOfWeek {
        match w {
            Weekday::Mon => DayOfWeek::Mon,
            Weekday::Tue => DayOfWeek::Tue,
            Weekday::Wed => DayOfWeek::Wed,
            Weekday::Thu => DayOfWeek::Thu,
            Weekday::Fri => DayOfWeek::Fri,
            Weekday::Sat => DayOfWeek::Sat,
            Weekday::Sun => DayOfWeek::Sun,
        }
    }

    pub(crate) fn to_chrono(self) -> Weekday {
        match self {
            DayOfWeek::Mon => Weekday::Mon,
            DayOfWeek::Tue => Weekday::Tue,
            DayOfWeek::Wed => Weekday::Wed,
            DayOfWeek::Thu => Weekday::Thu,
            DayOfWeek::Fri => Weekday::Fri,
            DayOfWeek::Sat => Weekday::Sat,
            DayOfWeek::Sun => Weekday::Sun,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DayOfWeek::Mon => "Mon",
            DayOfWeek::Tue => "Tue",
            DayOfWeek::Wed => "Wed",
            DayOfWeek::Thu => "Thu",
            DayOfWeek::Fri => "Fri",
            DayOfWeek::Sat => "Sat",
            DayOfWeek::Sun => "Sun",
        }
    }
}

impl fmt::Display for DayOfWeek {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Period-of-day boundaries: morning 06:00–11:59, afternoon 12:00–17:59,
/// evening 18:00–23:59. Times outside those bands belong to no period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodOfDay {
    Morning,
    Afternoon,
    Evening,
}

impl PeriodOfDay {
    pub fn containing(clock: ClockTime) -> Option<PeriodOfDay> {
        match clock.hour {
            6..=11 => Some(PeriodOfDay::Morning),
            12..=17 => Some(PeriodOfDay::Afternoon),
            18..=23 => Some(PeriodOfDay::Evening),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PeriodOfDay::Morning => "morning",
            PeriodOfDay::Afternoon => "afternoon",
            PeriodOfDay::Evening => "evening",
        }
    }
}

impl fmt::Display for PeriodOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A clock time, serialized as `"HH:MM"`. Range violations are left to
/// [`check_plausibility`] so that dubious input can be carried around and
/// clarified instead of being rejected at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockTime {
    pub hour: u8,
    pub minute: u8,
}

impl ClockTime {
    pub fn new(hour: u8, minute: u8) -> ClockTime {
        ClockTime { hour, minute }
    }

    pub fn parse(s: &str) -> Option<ClockTime> {
        let (h, m) = s.split_once(':')?;
        if h.len() != 2 || m.len() != 2 {
            return None;
        }
        Some(ClockTime {
            hour: h.parse().ok()?,
            minute: m.parse().ok()?,
        })
    }
}

impl fmt::Display for ClockTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.hour, self.minute)
    }
}

impl Serialize for ClockTime {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClockTime {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <&str>::deserialize(deserializer)?;
        ClockTime::parse(s)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid clock time {s:?}")))
    }
}

/// An interval marker attached to exactly one component level, e.g.
/// `FROM_TO(6, 9)` at the day level for "from the 6th to the 9th".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FromTo {
    pub level: Level,
    pub lo: u32,
    pub hi: u32,
}

impl fmt::Display for FromTo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// A partial date: any subset of the seven hierarchy components, plus an
/// optional interval.  `from_to` stands in for the plain component at its
/// level; a description never carries both.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeDescription {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub month: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub week: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub day: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dow: Option<DayOfWeek>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<PeriodOfDay>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<ClockTime>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from_to: Option<FromTo>,
}

/// The value a description carries at one hierarchy level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentValue {
    Year(i32),
    Month(u8),
    Week(u8),
    Day(u8),
    Dow(DayOfWeek),
    Period(PeriodOfDay),
    Clock(ClockTime),
    Range(u32, u32),
}

impl ComponentValue {
    /// Whether a later single value is a narrowing of this one rather than an
    /// alternative: only ranges can contain other values.
    pub fn contains(&self, other: &ComponentValue) -> bool {
        match (self, other) {
            (ComponentValue::Range(lo, hi), ComponentValue::Day(d)) => {
                (*lo..=*hi).contains(&(*d as u32))
            }
            (ComponentValue::Range(lo, hi), ComponentValue::Week(w)) => {
                (*lo..=*hi).contains(&(*w as u32))
            }
            (ComponentValue::Range(lo, hi), ComponentValue::Month(m)) => {
                (*lo..=*hi).contains(&(*m as u32))
            }
            (ComponentValue::Range(lo, hi), ComponentValue::Year(y)) => {
                *y >= 0 && (*lo..=*hi).contains(&(*y as u32))
            }
            _ => false,
        }
    }
}

impl fmt::Display for ComponentValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentValue::Year(y) => write!(f, "{y}"),
            ComponentValue::Month(m) => write!(f, "{m}"),
            ComponentValue::Week(w) => write!(f, "{w}"),
            ComponentValue::Day(d) => write!(f, "{d}"),
            ComponentValue::Dow(d) => write!(f, "{d}"),
            ComponentValue::Period(p) => write!(f, "{p}"),
            ComponentValue::Clock(c) => write!(f, "{c}"),
            ComponentValue::Range(lo, hi) => write!(f, "{lo}..{hi}"),
        }
    }
}

impl TimeDescription {
    pub fn is_empty(&self) -> bool {
        self.levels().is_empty()
    }

    /// The component at `level`, with `from_to` standing in at its own level.
    pub fn component(&self, level: Level) -> Option<ComponentValue> {
        if let Some(ft) = self.from_to {
            if ft.level == level {
                return Some(ComponentValue::Range(ft.lo, ft.hi));
            }
        }
        match level {
            Level::Year => self.year.map(ComponentValue::Year),
            Level::Month => self.month.map(ComponentValue::Month),
            Level::Week => self.week.map(ComponentValue::Week),
            Level::Day => self.day.map(ComponentValue::Day),
            Level::DayOfWeek => self.dow.map(ComponentValue::Dow),
            Level::PeriodOfDay => self.period.map(ComponentValue::Period),
            Level::Time => self.time.map(ComponentValue::Clock),
        }
    }

    /// Levels with a component present, coarsest first.
    pub fn levels(&self) -> Vec<Level> {
        Level::ALL
            .iter()
            .copied()
            .filter(|l| self.component(*l).is_some())
            .collect()
    }

    pub fn deepest_level(&self) -> Option<Level> {
        self.levels().last().copied()
    }

    /// Structural sanity independent of the calendar: at least one component,
    /// and no plain value shadowed by a `from_to` at the same level.
    pub fn validate(&self) -> Result<(), String> {
        if self.is_empty() {
            return Err("time description has no components".to_string());
        }
        if let Some(ft) = self.from_to {
            let doubled = match ft.level {
                Level::Year => self.year.is_some(),
                Level::Month => self.month.is_some(),
                Level::Week => self.week.is_some(),
                Level::Day => self.day.is_some(),
                Level::DayOfWeek => self.dow.is_some(),
                Level::PeriodOfDay => self.period.is_some(),
                Level::Time => self.time.is_some(),
            };
            if doubled {
                return Err(format!(
                    "from_to at level {} conflicts with a plain {} component",
                    ft.level, ft.level
                ));
            }
            if matches!(
                ft.level,
                Level::DayOfWeek | Level::PeriodOfDay | Level::Time
            ) {
                return Err(format!(
                    "from_to intervals are not supported at level {}",
                    ft.level
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for TimeDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for level in self.levels() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}={}", level, self.component(level).unwrap())?;
        }
        if first {
            f.write_str("(empty)")?;
        }
        Ok(())
    }
}

/// Either an absolute partial date or an offset relative to the speaking time.
///
/// `{"kind":"absolute","month":1,"from_to":{"level":"day","lo":15,"hi":19}}`
/// `{"kind":"relative","unit":"week","offset":-2}`
/// `{"kind":"relative","unit":"dow","offset":1,"dow":"Thu"}` — "next Thursday"
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TimeExpression {
    Absolute {
        #[serde(flatten)]
        desc: TimeDescription,
    },
    Relative {
        unit: Level,
        offset: i32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dow: Option<DayOfWeek>,
    },
}

/// The deictic anchor of a dialogue: the calendar date (and optionally clock
/// time) at which it was spoken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpeakingTime {
    pub year: i32,
    pub month: u8,
    pub day: u8,
    pub clock: Option<ClockTime>,
}

impl SpeakingTime {
    pub fn new(year: i32, month: u8, day: u8) -> SpeakingTime {
        SpeakingTime {
            year,
            month,
            day,
            clock: None,
        }
    }

    /// Parses `YYYY-MM-DD` optionally followed by `THH:MM`, checking that the
    /// date exists on the calendar.
    pub fn parse(s: &str) -> Result<SpeakingTime, String> {
        let (date_part, clock) = match s.split_once('T') {
            Some((d, t)) => {
                let clock = ClockTime::parse(t)
                    .filter(|c| c.hour <= 23 && c.minute <= 59)
                    .ok_or_else(|| format!("invalid clock time in speaking_time {s:?}"))?;
                (d, Some(clock))
            }
            None => (s, None),
        };
        let mut parts = date_part.split('-');
        let bad = || format!("invalid speaking_time {s:?}, expected YYYY-MM-DD[THH:MM]");
        let year: i32 = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let month: u8 = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let day: u8 = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        if calendar::date(year, month, day).is_none() {
            return Err(format!("speaking_time {s:?} is not a valid calendar date"));
        }
        Ok(SpeakingTime {
            year,
            month,
            day,
            clock,
        })
    }

    pub(crate) fn naive_date(&self) -> NaiveDate {
        calendar::date(self.year, self.month, self.day).expect("validated on construction")
    }
}

impl fmt::Display for SpeakingTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)?;
        if let Some(c) = self.clock {
            write!(f, "T{c}")?;
        }
        Ok(())
    }
}

impl Serialize for SpeakingTime {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SpeakingTime {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <&str>::deserialize(deserializer)?;
        SpeakingTime::parse(s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TimeError {
    /// Relative expressions at this unit are not resolvable.
    UnsupportedUnit(Level),
    /// A relative day-of-week expression without a target weekday.
    MissingWeekday,
    /// The expression was absolute where a relative one was required.
    NotRelative,
    /// Arithmetic left the supported calendar range.
    OutOfRange,
    /// The referent shares no sequential unit with the speaking time.
    NotComparable,
}

impl fmt::Display for TimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeError::UnsupportedUnit(l) => {
                write!(f, "relative expressions at unit {l} are not supported")
            }
            TimeError::MissingWeekday => {
                f.write_str("relative day-of-week expression carries no target weekday")
            }
            TimeError::NotRelative => f.write_str("expression is not relative"),
            TimeError::OutOfRange => f.write_str("date arithmetic out of calendar range"),
            TimeError::NotComparable => {
                f.write_str("referent shares no sequential unit with the speaking time")
            }
        }
    }
}

/// Resolves a relative time expression against the speaking time into an
/// absolute description at the expression's unit level.
///
/// "two weeks ago" spoken in ISO week 25 of 1996 resolves to week 23 of 1996;
/// "next Thursday" resolves to the concrete date of the first Thursday after
/// the anchor.
pub fn resolve_relative(
    expr: &TimeExpression,
    speaking_time: &SpeakingTime,
) -> Result<TimeDescription, TimeError> {
    let (unit, offset, target_dow) = match expr {
        TimeExpression::Relative { unit, offset, dow } => (*unit, *offset, *dow),
        TimeExpression::Absolute { .. } => return Err(TimeError::NotRelative),
    };
    let anchor = speaking_time.naive_date();
    match unit {
        Level::Year => Ok(TimeDescription {
            year: Some(speaking_time.year + offset),
            ..TimeDescription::default()
        }),
        Level::Month => {
            let (year, month) =
                calendar::add_months(speaking_time.year, speaking_time.month, offset);
            Ok(TimeDescription {
                year: Some(year),
                month: Some(month),
                ..TimeDescription::default()
            })
        }
        Level::Week => {
            let shifted =
                calendar::add_days(anchor, offset.checked_mul(7).ok_or(TimeError::OutOfRange)?)
                    .ok_or(TimeError::OutOfRange)?;
            let (iso_year, week) = calendar::iso_week_of(shifted);
            Ok(TimeDescription {
                year: Some(iso_year),
                week: Some(week),
                ..TimeDescription::default()
            })
        }
        Level::Day => {
            let shifted = calendar::add_days(anchor, offset).ok_or(TimeError::OutOfRange)?;
            Ok(TimeDescription {
                year: Some(shifted.year()),
                month: Some(shifted.month() as u8),
                day: Some(shifted.day() as u8),
                ..TimeDescription::default()
            })
        }
        Level::DayOfWeek => {
            let target = target_dow.ok_or(TimeError::MissingWeekday)?;
            let date = resolve_weekday(anchor, target, offset)?;
            Ok(TimeDescription {
                year: Some(date.year()),
                month: Some(date.month() as u8),
                day: Some(date.day() as u8),
                dow: Some(target),
                ..TimeDescription::default()
            })
        }
        Level::PeriodOfDay | Level::Time => Err(TimeError::UnsupportedUnit(unit)),
    }
}

/// Offset `+k`: the k-th occurrence of `target` strictly after the anchor;
/// `-k` counts backwards; `0` means "this week's" occurrence (ISO week of the
/// anchor, which may lie before or after it).
fn resolve_weekday(
    anchor: NaiveDate,
    target: DayOfWeek,
    offset: i32,
) -> Result<NaiveDate, TimeError> {
    let anchor_dow = calendar::weekday_of(anchor).num_days_from_monday() as i32;
    let target_dow = target.to_chrono().num_days_from_monday() as i32;
    if offset == 0 {
        return calendar::add_days(anchor, target_dow - anchor_dow).ok_or(TimeError::OutOfRange);
    }
    let days = if offset > 0 {
        let first = (target_dow - anchor_dow).rem_euclid(7);
        let first = if first == 0 { 7 } else { first };
        first + 7 * (offset - 1)
    } else {
        let first = (anchor_dow - target_dow).rem_euclid(7);
        let first = if first == 0 { 7 } else { first };
        -(first + 7 * (-offset - 1))
    };
    calendar::add_days(anchor, days).ok_or(TimeError::OutOfRange)
}

/// Verdict of a calendar plausibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Plausibility {
    Plausible,
    Implausible(String),
}

impl Plausibility {
    pub fn is_plausible(&self) -> bool {
        matches!(self, Plausibility::Plausible)
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Plausibility::Plausible => None,
            Plausibility::Implausible(r) => Some(r),
        }
    }
}

/// A concrete calendar violation; the clarification module keys its
/// correction proposals off these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Structural(String),
    MonthOutOfRange(u32),
    IntervalBackwards(u32, u32),
    DayOutOfRange(u32),
    DayVsMonthLength {
        day: u32,
        month: u8,
        max: u8,
    },
    WeekdayMismatch {
        year: i32,
        month: u8,
        day: u8,
        actual: DayOfWeek,
        claimed: DayOfWeek,
    },
    WeekOutOfRange {
        week: u32,
        year: i32,
        max: u8,
    },
    WeekVsDate {
        year: i32,
        month: u8,
        day: u8,
        actual: u8,
        claimed: u8,
    },
    ClockOutOfRange(ClockTime),
    PeriodClockMismatch {
        clock: ClockTime,
        actual: PeriodOfDay,
        claimed: PeriodOfDay,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Structural(reason) => f.write_str(reason),
            Violation::MonthOutOfRange(m) => write!(f, "month {m} is out of range 1..12"),
            Violation::IntervalBackwards(lo, hi) => {
                write!(f, "interval {lo}..{hi} runs backwards")
            }
            Violation::DayOutOfRange(d) => write!(f, "day {d} is out of range 1..31"),
            Violation::DayVsMonthLength { month, max, .. } => write!(
                f,
                "{} has {} days",
                calendar::MONTH_NAMES[*month as usize - 1],
                max
            ),
            Violation::WeekdayMismatch {
                year,
                month,
                day,
                actual,
                claimed,
            } => write!(
                f,
                "{year:04}-{month:02}-{day:02} falls on a {actual}, not a {claimed}"
            ),
            Violation::WeekOutOfRange { year, max, .. } => {
                write!(f, "{year} has {max} ISO weeks")
            }
            Violation::WeekVsDate {
                year,
                month,
                day,
                actual,
                claimed,
            } => write!(
                f,
                "{year:04}-{month:02}-{day:02} lies in ISO week {actual}, not week {claimed}"
            ),
            Violation::ClockOutOfRange(clock) => write!(f, "invalid clock time {clock}"),
            Violation::PeriodClockMismatch {
                clock,
                actual,
                claimed,
            } => write!(f, "{clock} is in the {actual}, not the {claimed}"),
        }
    }
}

/// The first calendar violation of a description, in the fixed check order:
/// day-of-month vs. month length (leap-year aware), day-of-week vs. fully
/// specified dates, week-of-year range, clock-time range, then period/clock
/// agreement. Ranges are checked at both endpoints. The reference year fills
/// in for a missing year component.
pub fn first_violation(desc: &TimeDescription, reference_year: i32) -> Option<Violation> {
    if let Err(e) = desc.validate() {
        return Some(Violation::Structural(e));
    }
    let year = desc.year.unwrap_or(reference_year);

    if let Some(month) = desc.month {
        if !(1..=12).contains(&month) {
            return Some(Violation::MonthOutOfRange(month as u32));
        }
    }
    if let Some(ft) = desc.from_to {
        if ft.lo > ft.hi {
            return Some(Violation::IntervalBackwards(ft.lo, ft.hi));
        }
        if ft.level == Level::Month {
            for endpoint in [ft.lo, ft.hi] {
                if !(1..=12).contains(&endpoint) {
                    return Some(Violation::MonthOutOfRange(endpoint));
                }
            }
        }
    }

    // Day of month against month length.
    let day_bound = |d: u32| -> Option<Violation> {
        if !(1..=31).contains(&d) {
            return Some(Violation::DayOutOfRange(d));
        }
        if let Some(month) = desc.month {
            let max = calendar::month_length(year, month);
            if d > max as u32 {
                return Some(Violation::DayVsMonthLength { day: d, month, max });
            }
        }
        None
    };
    if let Some(d) = desc.day {
        if let Some(v) = day_bound(d as u32) {
            return Some(v);
        }
    }
    if let Some(ft) = desc.from_to {
        if ft.level == Level::Day {
            for endpoint in [ft.lo, ft.hi] {
                if let Some(v) = day_bound(endpoint) {
                    return Some(v);
                }
            }
        }
    }

    // Day of week against a fully specified date.
    if let (Some(month), Some(day), Some(claimed)) = (desc.month, desc.day, desc.dow) {
        if let Some(date) = calendar::date(year, month, day) {
            let actual = DayOfWeek::from_chrono(calendar::weekday_of(date));
            if actual != claimed {
                return Some(Violation::WeekdayMismatch {
                    year,
                    month,
                    day,
                    actual,
                    claimed,
                });
            }
        }
    }

    // Week of year against the ISO week count, and against a full date.
    let max_week = calendar::iso_weeks_in_year(year);
    let week_bound = |w: u32| -> Option<Violation> {
        if w < 1 || w > max_week as u32 {
            return Some(Violation::WeekOutOfRange {
                week: w,
                year,
                max: max_week,
            });
        }
        None
    };
    if let Some(w) = desc.week {
        if let Some(v) = week_bound(w as u32) {
            return Some(v);
        }
        if let (Some(month), Some(day)) = (desc.month, desc.day) {
            if let Some(date) = calendar::date(year, month, day) {
                let (_, actual) = calendar::iso_week_of(date);
                if actual != w {
                    return Some(Violation::WeekVsDate {
                        year,
                        month,
                        day,
                        actual,
                        claimed: w,
                    });
                }
            }
        }
    }
    if let Some(ft) = desc.from_to {
        if ft.level == Level::Week {
            for endpoint in [ft.lo, ft.hi] {
                if let Some(v) = week_bound(endpoint) {
                    return Some(v);
                }
            }
        }
    }

    // Clock range, then period/clock agreement.
    if let Some(clock) = desc.time {
        if clock.hour > 23 || clock.minute > 59 {
            return Some(Violation::ClockOutOfRange(clock));
        }
        if let Some(claimed) = desc.period {
            match PeriodOfDay::containing(clock) {
                Some(actual) if actual != claimed => {
                    return Some(Violation::PeriodClockMismatch {
                        clock,
                        actual,
                        claimed,
                    });
                }
                _ => {}
            }
        }
    }

    None
}

/// Checks a description against the calendar, reporting the first violation
/// as a human-readable reason. See [`first_violation`] for the check order.
pub fn check_plausibility(desc: &TimeDescription, reference_year: i32) -> Plausibility {
    match first_violation(desc, reference_year) {
        None => Plausibility::Plausible,
        Some(v) => Plausibility::Implausible(v.to_string()),
    }
}

/// Whether a referred-to date is the one immediately after the speaking time
/// at its unit level (`Next`) or further away (`Following`). Drives the
/// translation choice between "next" and "following".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Succession {
    Next,
    Following,
}

/// Compares the referent to the speaking time at the referent's deepest
/// sequential unit (year, month, week or day). A missing year or month on the
/// referent is read cyclically, so December's "next month" is January.
pub fn classify_successor(
    referent: &TimeDescription,
    speaking_time: &SpeakingTime,
) -> Result<Succession, TimeError> {
    let anchor = speaking_time.naive_date();
    let unit = [Level::Day, Level::Week, Level::Month, Level::Year]
        .into_iter()
        .find(|l| {
            referent
                .component(*l)
                .is_some_and(|c| !matches!(c, ComponentValue::Range(..)))
        })
        .ok_or(TimeError::NotComparable)?;

    let next = match unit {
        Level::Year => referent.year.unwrap() == speaking_time.year + 1,
        Level::Month => {
            let m = referent.month.unwrap();
            if !(1..=12).contains(&m) {
                return Err(TimeError::NotComparable);
            }
            let (ny, nm) = calendar::add_months(speaking_time.year, speaking_time.month, 1);
            match referent.year {
                Some(y) => (y, m) == (ny, nm),
                None => m == nm,
            }
        }
        Level::Week => {
            let w = referent.week.unwrap();
            let (anchor_iso_year, anchor_week) = calendar::iso_week_of(anchor);
            let next_week_date = calendar::add_days(anchor, 7).ok_or(TimeError::OutOfRange)?;
            let (ny, nw) = calendar::iso_week_of(next_week_date);
            match referent.year {
                Some(y) => (y, w) == (ny, nw),
                None => {
                    let weeks = calendar::iso_weeks_in_year(anchor_iso_year) as i32;
                    (w as i32 - anchor_week as i32).rem_euclid(weeks) == 1
                }
            }
        }
        Level::Day => {
            let d = referent.day.unwrap();
            match (referent.year.or(Some(speaking_time.year)), referent.month) {
                (Some(y), Some(m)) => {
                    let date = calendar::date(y, m, d).ok_or(TimeError::NotComparable)?;
                    calendar::add_days(anchor, 1) == Some(date)
                }
                _ => {
                    let len =
                        calendar::month_length(speaking_time.year, speaking_time.month) as i32;
                    (d as i32 - speaking_time.day as i32).rem_euclid(len) == 1
                }
            }
        }
        _ => unreachable!("unit restricted to sequential levels"),
    };
    Ok(if next {
        Succession::Next
    } else {
        Succession::Following
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc() -> TimeDescription {
        TimeDescription::default()
    }

    /// Independent calendar oracle: Sakamoto's day-of-week plus a plain
    /// month-length table, no chrono involved.
    pub(crate) fn oracle_weekday(y: i32, m: u8, d: u8) -> u8 {
        // 0 = Monday .. 6 = Sunday
        const T: [i32; 12] = [0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4];
        let y = if m < 3 { y - 1 } else { y };
        let sak = (y + y / 4 - y / 100 + y / 400 + T[m as usize - 1] + d as i32) % 7; // 0 = Sunday
        ((sak + 6) % 7) as u8
    }

    pub(crate) fn oracle_is_leap(y: i32) -> bool {
        (y % 4 == 0 && y % 100 != 0) || y % 400 == 0
    }

    pub(crate) fn oracle_month_length(y: i32, m: u8) -> u8 {
        match m {
            1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
            4 | 6 | 9 | 11 => 30,
            2 if oracle_is_leap(y) => 29,
            2 => 28,
            _ => 0,
        }
    }

    #[test]
    fn resolving_two_weeks_ago_from_week_25() {
        // 1996-06-19 lies in ISO week 25 of 1996.
        let speaking = SpeakingTime::new(1996, 6, 19);
        let expr = TimeExpression::Relative {
            unit: Level::Week,
            offset: -2,
            dow: None,
        };
        let resolved = resolve_relative(&expr, &speaking).unwrap();
        assert_eq!(resolved.week, Some(23));
        assert_eq!(resolved.year, Some(1996));
    }

    #[test]
    fn resolving_offset_zero_month_is_the_anchor_month() {
        let speaking = SpeakingTime::new(1996, 1, 10);
        let expr = TimeExpression::Relative {
            unit: Level::Month,
            offset: 0,
            dow: None,
        };
        let resolved = resolve_relative(&expr, &speaking).unwrap();
        assert_eq!((resolved.year, resolved.month), (Some(1996), Some(1)));
    }

    #[test]
    fn resolving_next_thursday_by_forward_enumeration() {
        // Oracle: walk forward day by day from 1996-02-05 (a Monday) until the
        // first Thursday; that is 1996-02-08.
        let mut day = 5u8;
        loop {
            day += 1;
            if oracle_weekday(1996, 2, day) == 3 {
                break;
            }
        }
        assert_eq!(day, 8);

        let speaking = SpeakingTime::new(1996, 2, 5);
        let expr = TimeExpression::Relative {
            unit: Level::DayOfWeek,
            offset: 1,
            dow: Some(DayOfWeek::Thu),
        };
        let resolved = resolve_relative(&expr, &speaking).unwrap();
        assert_eq!(
            (resolved.year, resolved.month, resolved.day, resolved.dow),
            (Some(1996), Some(2), Some(8), Some(DayOfWeek::Thu))
        );
    }

    #[test]
    fn resolving_relative_weekday_needs_a_target() {
        let speaking = SpeakingTime::new(1996, 2, 5);
        let expr = TimeExpression::Relative {
            unit: Level::DayOfWeek,
            offset: 1,
            dow: None,
        };
        assert_eq!(
            resolve_relative(&expr, &speaking),
            Err(TimeError::MissingWeekday)
        );
    }

    #[test]
    fn resolving_period_units_is_unsupported() {
        let speaking = SpeakingTime::new(1996, 2, 5);
        let expr = TimeExpression::Relative {
            unit: Level::PeriodOfDay,
            offset: 1,
            dow: None,
        };
        assert_eq!(
            resolve_relative(&expr, &speaking),
            Err(TimeError::UnsupportedUnit(Level::PeriodOfDay))
        );
    }

    #[test]
    fn resolve_is_inverse_consistent() {
        // Resolving +k then -k from the shifted anchor restores the original
        // unit value, for every sequential unit.
        let speaking = SpeakingTime::new(1996, 6, 19);
        for unit in [Level::Year, Level::Month, Level::Week, Level::Day] {
            for k in [-30i32, -7, -1, 0, 1, 5, 26] {
                let fwd = resolve_relative(
                    &TimeExpression::Relative {
                        unit,
                        offset: k,
                        dow: None,
                    },
                    &speaking,
                )
                .unwrap();
                // Re-anchor on the resolved description, filling components
                // below the unit with fixed values.
                let shifted_anchor = match unit {
                    Level::Day => {
                        SpeakingTime::new(fwd.year.unwrap(), fwd.month.unwrap(), fwd.day.unwrap())
                    }
                    Level::Week => {
                        let monday =
                            calendar::monday_of_iso_week(fwd.year.unwrap(), fwd.week.unwrap())
                                .unwrap();
                        SpeakingTime::new(monday.year(), monday.month() as u8, monday.day() as u8)
                    }
                    Level::Month => SpeakingTime::new(fwd.year.unwrap(), fwd.month.unwrap(), 1),
                    Level::Year => SpeakingTime::new(fwd.year.unwrap(), 6, 19),
                    _ => unreachable!(),
                };
                let back = resolve_relative(
                    &TimeExpression::Relative {
                        unit,
                        offset: -k,
                        dow: None,
                    },
                    &shifted_anchor,
                )
                .unwrap();
                let original = resolve_relative(
                    &TimeExpression::Relative {
                        unit,
                        offset: 0,
                        dow: None,
                    },
                    &speaking,
                )
                .unwrap();
                assert_eq!(
                    back.component(unit),
                    original.component(unit),
                    "unit {unit} k {k}"
                );
            }
        }
    }

    #[test]
    fn april_31_is_implausible() {
        let d = TimeDescription {
            month: Some(4),
            day: Some(31),
            ..desc()
        };
        assert_eq!(
            check_plausibility(&d, 1996),
            Plausibility::Implausible("April has 30 days".into())
        );
    }

    #[test]
    fn weekday_agreement_with_full_dates() {
        let thursday = TimeDescription {
            year: Some(1996),
            month: Some(2),
            day: Some(8),
            dow: Some(DayOfWeek::Thu),
            ..desc()
        };
        assert!(check_plausibility(&thursday, 1996).is_plausible());

        let friday = TimeDescription {
            dow: Some(DayOfWeek::Fri),
            ..thursday
        };
        let verdict = check_plausibility(&friday, 1996);
        assert!(verdict.reason().unwrap().contains("Thu"));
    }

    #[test]
    fn leap_day_plausibility() {
        let feb29 = |year| TimeDescription {
            year: Some(year),
            month: Some(2),
            day: Some(29),
            ..desc()
        };
        assert!(check_plausibility(&feb29(1996), 1996).is_plausible());
        assert_eq!(
            check_plausibility(&feb29(1997), 1997),
            Plausibility::Implausible("February has 28 days".into())
        );
    }

    #[test]
    fn week_range_and_interval_endpoints() {
        let w54 = TimeDescription {
            week: Some(54),
            ..desc()
        };
        assert!(!check_plausibility(&w54, 1996).is_plausible());
        // 1998 is a 53-week ISO year, 1996 is not.
        let w53 = TimeDescription {
            week: Some(53),
            ..desc()
        };
        assert!(check_plausibility(&w53, 1998).is_plausible());
        assert!(!check_plausibility(&w53, 1996).is_plausible());

        let bad_interval = TimeDescription {
            month: Some(4),
            from_to: Some(FromTo {
                level: Level::Day,
                lo: 28,
                hi: 31,
            }),
            ..desc()
        };
        assert_eq!(
            check_plausibility(&bad_interval, 1996),
            Plausibility::Implausible("April has 30 days".into())
        );

        let backwards = TimeDescription {
            from_to: Some(FromTo {
                level: Level::Day,
                lo: 9,
                hi: 6,
            }),
            ..desc()
        };
        assert!(!check_plausibility(&backwards, 1996).is_plausible());
    }

    #[test]
    fn period_and_clock_must_agree() {
        let d = TimeDescription {
            period: Some(PeriodOfDay::Afternoon),
            time: Some(ClockTime::new(14, 0)),
            ..desc()
        };
        assert!(check_plausibility(&d, 1996).is_plausible());
        let d = TimeDescription {
            period: Some(PeriodOfDay::Afternoon),
            time: Some(ClockTime::new(8, 30)),
            ..desc()
        };
        assert!(!check_plausibility(&d, 1996).is_plausible());
    }

    #[test]
    fn plausibility_matches_brute_force_calendar_walk() {
        // Every (year, month, day) accepted by the hand-rolled calendar walk
        // over 1990–2010 must be plausible, and every day outside the month
        // length implausible.
        for year in 1990..=2010 {
            for month in 1u8..=12 {
                let len = oracle_month_length(year, month);
                for day in 1u8..=31 {
                    let d = TimeDescription {
                        year: Some(year),
                        month: Some(month),
                        day: Some(day),
                        ..desc()
                    };
                    assert_eq!(
                        check_plausibility(&d, year).is_plausible(),
                        day <= len,
                        "{year}-{month}-{day}"
                    );
                }
            }
        }
    }

    #[test]
    fn weekday_check_matches_sakamoto_oracle() {
        for year in [1990, 1996, 2000, 2007] {
            for month in 1u8..=12 {
                for day in [1u8, 13, 28] {
                    let dow_idx = oracle_weekday(year, month, day);
                    let dow = [
                        DayOfWeek::Mon,
                        DayOfWeek::Tue,
                        DayOfWeek::Wed,
                        DayOfWeek::Thu,
                        DayOfWeek::Fri,
                        DayOfWeek::Sat,
                        DayOfWeek::Sun,
                    ][dow_idx as usize];
                    let d = TimeDescription {
                        year: Some(year),
                        month: Some(month),
                        day: Some(day),
                        dow: Some(dow),
                        ..desc()
                    };
                    assert!(check_plausibility(&d, year).is_plausible());
                }
            }
        }
    }

    #[test]
    fn successor_weeks() {
        let speaking = SpeakingTime::new(1996, 6, 19); // week 25
        let week = |w| TimeDescription {
            week: Some(w),
            ..desc()
        };
        assert_eq!(
            classify_successor(&week(26), &speaking),
            Ok(Succession::Next)
        );
        assert_eq!(
            classify_successor(&week(27), &speaking),
            Ok(Succession::Following)
        );
        assert_eq!(
            classify_successor(&week(25), &speaking),
            Ok(Succession::Following)
        );
    }

    #[test]
    fn successor_months_wrap_december_to_january() {
        let speaking = SpeakingTime::new(1996, 12, 15);
        let jan = TimeDescription {
            month: Some(1),
            ..desc()
        };
        assert_eq!(classify_successor(&jan, &speaking), Ok(Succession::Next));
        let jan97 = TimeDescription {
            year: Some(1997),
            month: Some(1),
            ..desc()
        };
        assert_eq!(classify_successor(&jan97, &speaking), Ok(Succession::Next));
        let jan96 = TimeDescription {
            year: Some(1996),
            month: Some(1),
            ..desc()
        };
        assert_eq!(
            classify_successor(&jan96, &speaking),
            Ok(Succession::Following)
        );
    }

    #[test]
    fn successor_requires_a_sequential_unit() {
        let speaking = SpeakingTime::new(1996, 6, 19);
        let d = TimeDescription {
            period: Some(PeriodOfDay::Afternoon),
            ..desc()
        };
        assert_eq!(
            classify_successor(&d, &speaking),
            Err(TimeError::NotComparable)
        );
    }

    #[test]
    fn expression_json_round_trip() {
        let exprs = [
            r#"{"kind":"absolute","month":1,"from_to":{"level":"day","lo":15,"hi":19}}"#,
            r#"{"kind":"absolute","day":8,"dow":"Thu"}"#,
            r#"{"kind":"absolute","time":"14:00"}"#,
            r#"{"kind":"relative","unit":"week","offset":-2}"#,
            r#"{"kind":"relative","unit":"dow","offset":1,"dow":"Thu"}"#,
        ];
        for json in exprs {
            let parsed: TimeExpression = serde_json::from_str(json).unwrap();
            let back = serde_json::to_string(&parsed).unwrap();
            assert_eq!(back, json);
        }
    }

    #[test]
    fn speaking_time_parsing() {
        let plain = SpeakingTime::parse("1996-01-04").unwrap();
        assert_eq!(
            (plain.year, plain.month, plain.day, plain.clock),
            (1996, 1, 4, None)
        );
        let with_clock = SpeakingTime::parse("1996-01-04T14:30").unwrap();
        assert_eq!(with_clock.clock, Some(ClockTime::new(14, 30)));
        assert_eq!(with_clock.to_string(), "1996-01-04T14:30");

        // Nonexistent dates and malformed strings are rejected.
        assert!(SpeakingTime::parse("1996-02-31").is_err());
        assert!(SpeakingTime::parse("1996-13-01").is_err());
        assert!(SpeakingTime::parse("1996-01-04T25:00").is_err());
        assert!(SpeakingTime::parse("19960104").is_err());
        assert!(SpeakingTime::parse("1996-01-04-05").is_err());
    }
}
