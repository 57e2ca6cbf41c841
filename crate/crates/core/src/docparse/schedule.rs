use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::DocParseError;

static TIME_RANGE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\d{1,2}):(\d{2})\s*[-–—‑]\s*(\d{1,2}):(\d{2})$").unwrap()
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayType {
    Weekday,
    Weekend,
}

impl DayType {
    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "weekday" | "weekdays" => Some(DayType::Weekday),
            "weekend" | "weekends" => Some(DayType::Weekend),
            _ => None,
        }
    }
}

/// Operating hours for one day type; intervals are sorted, disjoint and
/// expressed in fractional hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingSchedule {
    pub day_type: DayType,
    pub intervals: Vec<(f64, f64)>,
}

fn hour(h: &str, m: &str) -> Option<f64> {
    let h: u32 = h.parse().ok()?;
    let m: u32 = m.parse().ok()?;
    if m >= 60 || h > 24 || (h == 24 && m > 0) {
        return None;
    }
    Some(f64::from(h) + f64::from(m) / 60.0)
}

/// Sorts intervals and merges any that overlap or touch.
fn merge(mut intervals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    intervals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for (s, e) in intervals {
        match out.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => out.push((s, e)),
        }
    }
    out
}

/// Parses `<DayType>: HH:MM-HH:MM[, HH:MM-HH:MM…]` lines. Repeated day types
/// accumulate; overlapping intervals are merged.
pub fn parse_operating_schedule(text: &str) -> Result<Vec<OperatingSchedule>, DocParseError> {
    let mut weekday = Vec::new();
    let mut weekend = Vec::new();
    let mut seen = [false; 2];

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim().trim_start_matches(['-', '•', '*']).trim();
        if t.is_empty() {
            continue;
        }
        let (day, ranges) = t.split_once(':').ok_or_else(|| DocParseError::MalformedLine {
            line,
            text: t.to_string(),
        })?;
        let day_type = DayType::parse(day).ok_or_else(|| DocParseError::UnknownDayType {
            line,
            day: day.trim().to_string(),
        })?;
        let bucket = match day_type {
            DayType::Weekday => &mut weekday,
            DayType::Weekend => &mut weekend,
        };
        seen[day_type as usize] = true;
        for part in ranges.split([',', ';']).map(str::trim).filter(|p| !p.is_empty()) {
            let c = TIME_RANGE.captures(part).ok_or_else(|| DocParseError::MalformedLine {
                line,
                text: part.to_string(),
            })?;
            let bad = || DocParseError::BadTimeRange {
                line,
                range: part.to_string(),
            };
            let start = hour(&c[1], &c[2]).ok_or_else(bad)?;
            let end = hour(&c[3], &c[4]).ok_or_else(bad)?;
            if end <= start {
                return Err(bad());
            }
            bucket.push((start, end));
        }
    }

    let mut out = Vec::new();
    if seen[0] {
        out.push(OperatingSchedule {
            day_type: DayType::Weekday,
            intervals: merge(weekday),
        });
    }
    if seen[1] {
        out.push(OperatingSchedule {
            day_type: DayType::Weekend,
            intervals: merge(weekend),
        });
    }
    Ok(out)
}

fn hhmm(h: f64) -> String {
    let minutes = (h * 60.0).round() as u32;
    format!("{:02}:{:02}", minutes / 60, minutes % 60)
}

/// Renders a schedule in the line grammar accepted by
/// [`parse_operating_schedule`].
pub fn format_schedule_line(s: &OperatingSchedule) -> String {
    let day = match s.day_type {
        DayType::Weekday => "Weekday",
        DayType::Weekend => "Weekend",
    };
    let ranges: Vec<String> = s.intervals.iter().map(|&(a, b)| format!("{}-{}", hhmm(a), hhmm(b))).collect();
    format!("{day}: {}", ranges.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_interval() {
        let s = parse_operating_schedule("Weekday: 08:00-18:00").unwrap();
        assert_eq!(s, vec![OperatingSchedule { day_type: DayType::Weekday, intervals: vec![(8.0, 18.0)] }]);
    }

    #[test]
    fn overlapping_intervals_merge() {
        let s = parse_operating_schedule("Weekend: 10:00-14:00, 13:00-16:00").unwrap();
        assert_eq!(s[0].day_type, DayType::Weekend);
        assert_eq!(s[0].intervals, vec![(10.0, 16.0)]);
    }

    #[test]
    fn wrap_around_rejected() {
        assert!(matches!(
            parse_operating_schedule("Weekday: 18:00-08:00"),
            Err(DocParseError::BadTimeRange { line: 1, .. })
        ));
    }

    #[test]
    fn unknown_day_type() {
        assert!(matches!(
            parse_operating_schedule("Holiday: 08:00-12:00"),
            Err(DocParseError::UnknownDayType { .. })
        ));
    }

    #[test]
    fn minutes_and_midnight() {
        let s = parse_operating_schedule("weekdays: 07:30-12:00; 13:00 - 24:00").unwrap();
        assert_eq!(s[0].intervals, vec![(7.5, 12.0), (13.0, 24.0)]);
        assert!(parse_operating_schedule("Weekday: 08:00-24:30").is_err());
    }

    /// Independent union oracle on a 1-minute grid.
    fn covered_minutes(intervals: &[(u32, u32)]) -> Vec<bool> {
        let mut grid = vec![false; 24 * 60];
        for &(s, e) in intervals {
            for m in s..e {
                grid[m as usize] = true;
            }
        }
        grid
    }

    proptest! {
        #[test]
        fn merge_matches_union_oracle(raw in proptest::collection::vec((0u32..1439, 1u32..600), 1..6)) {
            let intervals: Vec<(u32, u32)> = raw.iter().map(|&(s, len)| (s, (s + len).min(1440))).collect();
            let line = intervals
                .iter()
                .map(|&(s, e)| format!("{:02}:{:02}-{:02}:{:02}", s / 60, s % 60, e / 60, e % 60))
                .collect::<Vec<_>>()
                .join(", ");
            let parsed = parse_operating_schedule(&format!("Weekday: {line}")).unwrap();
            let merged = &parsed[0].intervals;
            for pair in merged.windows(2) {
                prop_assert!(pair[0].1 < pair[1].0);
            }
            let as_minutes: Vec<(u32, u32)> = merged
                .iter()
                .map(|&(s, e)| ((s * 60.0).round() as u32, (e * 60.0).round() as u32))
                .collect();
            prop_assert_eq!(covered_minutes(&as_minutes), covered_minutes(&intervals));
        }
    }
}
