//! Thin calendar helpers over `chrono`, shared by the thematic and
//! clarification modules. ISO-8601 week numbering throughout.

use chrono::{Datelike, Days, NaiveDate, Weekday};

pub(crate) const MONTH_NAMES: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

pub(crate) fn date(year: i32, month: u8, day: u8) -> Option<NaiveDate> {
    NaiveDate::from_ymd_opt(year, month as u32, day as u32)
}

pub(crate) fn month_length(year: i32, month: u8) -> u8 {
    debug_assert!((1..=12).contains(&month));
    let first_of_next = if month == 12 {
        NaiveDate::from_ymd_opt(year + 1, 1, 1)
    } else {
        NaiveDate::from_ymd_opt(year, month as u32 + 1, 1)
    };
    first_of_next
        .and_then(|d| d.pred_opt())
        .map(|d| d.day() as u8)
        .unwrap_or(31)
}

/// ISO week-date (year, week) of a civil date. The ISO year can differ from
/// the civil year around January 1st.
pub(crate) fn iso_week_of(d: NaiveDate) -> (i32, u8) {
    let w = d.iso_week();
    (w.year(), w.week() as u8)
}

pub(crate) fn iso_weeks_in_year(iso_year: i32) -> u8 {
    if NaiveDate::from_isoywd_opt(iso_year, 53, Weekday::Mon).is_some() {
        53
    } else {
        52
    }
}

#[cfg(test)]
pub(crate) fn monday_of_iso_week(iso_year: i32, week: u8) -> Option<NaiveDate> {
    NaiveDate::from_isoywd_opt(iso_year, week as u32, Weekday::Mon)
}

pub(crate) fn add_days(d: NaiveDate, offset: i32) -> Option<NaiveDate> {
    if offset >= 0 {
        d.checked_add_days(Days::new(offset as u64))
    } else {
        d.checked_sub_days(Days::new((-(offset as i64)) as u64))
    }
}

/// Calendar month arithmetic on a (year, month) pair, wrapping years.
pub(crate) fn add_months(year: i32, month: u8, offset: i32) -> (i32, u8) {
    let idx = year as i64 * 12 + (month as i64 - 1) + offset as i64;
    (idx.div_euclid(12) as i32, (idx.rem_euclid(12) + 1) as u8)
}

pub(crate) fn weekday_of(d: NaiveDate) -> Weekday {
    d.weekday()
}
