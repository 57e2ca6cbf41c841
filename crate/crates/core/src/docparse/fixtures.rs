use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::schedule::{format_schedule_line, parse_operating_schedule, OperatingSchedule};
use super::DocParseError;

// Quote and dash variants seen in OCR output.
static HEADING: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"^(?i:type)\s*["“”„'‘’]\s*([^"“”„'‘’]+?)\s*["“”„'‘’]\s*(?:[-–—‑:]\s*)?(.*)$"#).unwrap()
});
static KEY_VALUE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^([A-Za-z][A-Za-z0-9 /&().'-]{0,40}?)\s*:\s*(.*)$").unwrap());
static SCHEDULE_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)^(weekdays?|weekends?)\s*:").unwrap());
static NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+(?:\.\d+)?").unwrap());
static RANGE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(\d+(?:\.\d+)?)\s*[-–—‑]\s*(\d+(?:\.\d+)?)").unwrap());

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub type_code: String,
    pub description: String,
    pub voltage_min: Option<f64>,
    pub voltage_max: Option<f64>,
    pub wattage_w: Option<f64>,
    pub source: String,
    pub mounting: Option<String>,
    pub battery_minutes: Option<f64>,
    pub manufacturer: Option<String>,
    /// Key/value lines with no dedicated field, e.g. "Housing".
    pub other: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingField {
    pub record: String,
    pub field: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnrecognizedLine {
    pub line: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParseReport {
    pub fixtures: Vec<FixtureRecord>,
    pub schedules: Vec<OperatingSchedule>,
    pub missing: Vec<MissingField>,
    pub unrecognized_lines: Vec<UnrecognizedLine>,
    pub warnings: Vec<String>,
}

impl ParseReport {
    /// Renders the recognized fixtures back into the heading/bullet layout.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.fixtures {
            let _ = writeln!(out, "- Type \"{}\" – {}", f.type_code, f.description);
            match (f.voltage_min, f.voltage_max) {
                (Some(a), Some(b)) if a == b => {
                    let _ = writeln!(out, " - Voltage: {a} V");
                }
                (Some(a), Some(b)) => {
                    let _ = writeln!(out, " - Voltage: {a}-{b} V");
                }
                _ => {}
            }
            if let Some(w) = f.wattage_w {
                let _ = writeln!(out, " - Wattage: {w} W");
            }
            if !f.source.is_empty() {
                let _ = writeln!(out, " - Source: {}", f.source);
            }
            if let Some(m) = &f.mounting {
                let _ = writeln!(out, " - Mounting: {m}");
            }
            if let Some(b) = f.battery_minutes {
                let _ = writeln!(out, " - Battery: {b} minutes");
            }
            if let Some(m) = &f.manufacturer {
                let _ = writeln!(out, " - Manufacturer: {m}");
            }
            for (k, v) in &f.other {
                let _ = writeln!(out, " - {k}: {v}");
            }
        }
        for s in &self.schedules {
            let _ = writeln!(out, "{}", format_schedule_line(s));
        }
        out
    }
}

fn strip_bullet(line: &str) -> (&str, bool) {
    let t = line.trim();
    for marker in ["- ", "• ", "* ", "– ", "·"] {
        if let Some(rest) = t.strip_prefix(marker) {
            return (rest.trim(), true);
        }
    }
    if t == "-" {
        return ("", true);
    }
    (t, false)
}

fn first_number(text: &str) -> Option<f64> {
    NUMBER.find(text).and_then(|m| m.as_str().parse().ok())
}

fn voltage_range(text: &str) -> Option<(f64, f64)> {
    if let Some(c) = RANGE.captures(text) {
        let a: f64 = c[1].parse().ok()?;
        let b: f64 = c[2].parse().ok()?;
        return Some((a, b));
    }
    first_number(text).map(|v| (v, v))
}

fn battery_minutes(text: &str) -> Option<f64> {
    let m = NUMBER.find(text)?;
    let value: f64 = m.as_str().parse().ok()?;
    let unit = text[m.end()..]
        .trim_start_matches(|c: char| c.is_whitespace() || matches!(c, '-' | '–' | '‑'))
        .to_ascii_lowercase();
    if unit.starts_with("h") {
        Some(value * 60.0)
    } else {
        Some(value)
    }
}

/// Parses a lighting fixture schedule into records, a missing-information list
/// and every line that was not consumed. Operating-hour lines
/// (`Weekday: 08:00-18:00`) anywhere in the text are collected as schedules.
pub fn parse_fixture_schedule(text: &str) -> ParseReport {
    let mut report = ParseReport::default();
    let mut current: Option<FixtureRecord> = None;
    let mut schedule_text = String::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let indented = raw.starts_with(char::is_whitespace);
        let (content, bulleted) = strip_bullet(raw);

        if let Some(c) = HEADING.captures(content) {
            if let Some(done) = current.take() {
                report.fixtures.push(done);
            }
            current = Some(FixtureRecord {
                type_code: c[1].trim().to_string(),
                description: c[2].trim().to_string(),
                ..Default::default()
            });
            continue;
        }

        if SCHEDULE_LINE.is_match(content) {
            if let Some(done) = current.take() {
                report.fixtures.push(done);
            }
            match parse_operating_schedule(content) {
                Ok(_) => {
                    schedule_text.push_str(content);
                    schedule_text.push('\n');
                }
                Err(e) => {
                    report.warnings.push(e.at_line(line_no).to_string());
                    report.unrecognized_lines.push(UnrecognizedLine { line: line_no, text: raw.trim().to_string() });
                }
            }
            continue;
        }

        if let Some(rec) = current.as_mut() {
            if let Some(c) = KEY_VALUE.captures(content) {
                apply_field(rec, c[1].trim(), c[2].trim(), &mut report.missing);
                continue;
            }
            // An unindented, unbulleted line is a new section title.
            if !indented && !bulleted {
                report.fixtures.push(current.take().unwrap());
            }
        }
        report.unrecognized_lines.push(UnrecognizedLine {
            line: line_no,
            text: raw.trim().to_string(),
        });
    }
    if let Some(done) = current.take() {
        report.fixtures.push(done);
    }
    report.schedules = parse_operating_schedule(&schedule_text).expect("each line was validated");

    if report.fixtures.is_empty() {
        report
            .warnings
            .push("EmptyDocument: no fixture type headings found".to_string());
    }
    for f in &report.fixtures {
        if f.wattage_w.is_none() {
            report.missing.push(MissingField {
                record: f.type_code.clone(),
                field: "wattage_w".into(),
                note: "no usable wattage stated; needed for connected lighting load".into(),
            });
        }
    }
    report
}

fn apply_field(rec: &mut FixtureRecord, key: &str, value: &str, missing: &mut Vec<MissingField>) {
    let uncertain = |field: &str, note: String| MissingField {
        record: rec.type_code.clone(),
        field: field.to_string(),
        note,
    };
    match key.to_ascii_lowercase().as_str() {
        "voltage" => match voltage_range(value) {
            Some((a, b)) if a <= b => {
                rec.voltage_min = Some(a);
                rec.voltage_max = Some(b);
            }
            Some(_) => missing.push(uncertain("voltage", format!("inverted range '{value}'"))),
            None => missing.push(uncertain("voltage", format!("no number in '{value}'"))),
        },
        "wattage" | "watts" | "input watts" => match first_number(value) {
            Some(w) if w > 0.0 => rec.wattage_w = Some(w),
            _ => missing.push(uncertain("wattage_w", format!("unusable value '{value}'"))),
        },
        "battery" => match battery_minutes(value) {
            Some(m) => rec.battery_minutes = Some(m),
            None => {
                rec.other.insert(key.to_string(), value.to_string());
            }
        },
        "source" | "lamp" => rec.source = value.to_string(),
        "mounting" => rec.mounting = Some(value.to_string()),
        "manufacturer" => rec.manufacturer = Some(value.to_string()),
        _ => {
            rec.other.insert(key.to_string(), value.to_string());
        }
    }
}

/// Connected load Σ wattage × quantity.
pub fn total_connected_wattage(fixtures: &[(FixtureRecord, u32)]) -> Result<f64, DocParseError> {
    fixtures.iter().try_fold(0.0, |acc, (f, qty)| {
        let w = f
            .wattage_w
            .ok_or_else(|| DocParseError::MissingWattage(f.type_code.clone()))?;
        Ok(acc + w * f64::from(*qty))
    })
}
