//! Design-document text (already OCR'd) to fixture schedules and operating
//! hours.
//!
//! Fixture schedules use a heading-plus-bullets layout:
//!
//! ```text
//! - Type "S" – Exterior Wall Sconce
//!  - Voltage: MVOLT (120-277 V)
//!  - Wattage: 14.2 W
//! ```
//!
//! Operating schedules are one line per day type:
//!
//! ```text
//! Weekday: 08:00-18:00
//! Weekend: 10:00-14:00, 13:00-16:00
//! ```

mod fixtures;
mod schedule;

pub use fixtures::{
    parse_fixture_schedule, total_connected_wattage, FixtureRecord, MissingField, ParseReport,
    UnrecognizedLine,
};
pub use schedule::{format_schedule_line, parse_operating_schedule, DayType, OperatingSchedule};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocParseError {
    #[error("BadTimeRange: line {line}: '{range}' must end after it starts")]
    BadTimeRange { line: usize, range: String },
    #[error("UnknownDayType: line {line}: '{day}'")]
    UnknownDayType { line: usize, day: String },
    #[error("MalformedLine: line {line}: '{text}'")]
    MalformedLine { line: usize, text: String },
    #[error("MissingWattage: fixture type '{0}' has no wattage")]
    MissingWattage(String),
}

impl DocParseError {
    /// Re-bases the line number of an error raised on a single extracted line.
    pub(crate) fn at_line(self, n: usize) -> Self {
        match self {
            DocParseError::BadTimeRange { range, .. } => DocParseError::BadTimeRange { line: n, range },
            DocParseError::UnknownDayType { day, .. } => DocParseError::UnknownDayType { line: n, day },
            DocParseError::MalformedLine { text, .. } => DocParseError::MalformedLine { line: n, text },
            other => other,
        }
    }
}
