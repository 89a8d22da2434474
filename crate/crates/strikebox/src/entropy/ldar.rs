//! Parsing of LDAR-format lightning event records.
//!
//! Each record line carries eight numeric fields:
//! `dd hh mm ss ll xx yy zz` -- day, hour, minute, second, microsecond,
//! then east/north/altitude distances in meters. Fields may be separated
//! by whitespace, commas, or both.

use thiserror::Error;

/// One parsed lightning event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrikeRecord {
    pub day: u8,
    pub hour: u8,
    pub minute: u8,
    pub second: u8,
    pub microsecond: u32,
    /// Distance in meters east of the sensor site.
    pub east_m: i64,
    /// Distance in meters north of the sensor site.
    pub north_m: i64,
    /// Altitude in meters above the surface.
    pub alt_m: i64,
}

impl StrikeRecord {
    /// Builds a record, enforcing the field ranges.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        day: i64,
        hour: i64,
        minute: i64,
        second: i64,
        microsecond: i64,
        east_m: i64,
        north_m: i64,
        alt_m: i64,
    ) -> Result<Self, String> {
        if !(1..=31).contains(&day) {
            return Err(format!("day {day} out of range 1..=31"));
        }
        if !(0..24).contains(&hour) {
            return Err(format!("hour {hour} out of range 0..24"));
        }
        if !(0..60).contains(&minute) {
            return Err(format!("minute {minute} out of range 0..60"));
        }
        if !(0..60).contains(&second) {
            return Err(format!("second {second} out of range 0..60"));
        }
        if !(0..1_000_000).contains(&microsecond) {
            return Err(format!("microsecond {microsecond} out of range 0..1000000"));
        }
        Ok(Self {
            day: day as u8,
            hour: hour as u8,
            minute: minute as u8,
            second: second as u8,
            microsecond: microsecond as u32,
            east_m,
            north_m,
            alt_m,
        })
    }
}

/// A line the lenient parser skipped, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    /// 1-based line number in the input.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Error)]
pub enum LdarError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
}

/// Result of a lenient parse: the good records plus a log of skipped lines.
#[derive(Debug, Clone, Default)]
pub struct LdarParse {
    pub records: Vec<StrikeRecord>,
    pub skipped: Vec<SkippedLine>,
}

/// Parses one numeric field. Real-valued fields are truncated toward zero.
fn parse_field(token: &str) -> Option<i64> {
    if let Ok(v) = token.parse::<i64>() {
        return Some(v);
    }
    let f = token.parse::<f64>().ok()?;
    if f.is_finite() {
        Some(f.trunc() as i64)
    } else {
        None
    }
}

fn parse_line(line: &str) -> Result<StrikeRecord, String> {
    let fields: Vec<&str> = line
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .collect();
    if fields.len() != 8 {
        return Err(format!("expected 8 fields, found {}", fields.len()));
    }
    let mut vals = [0i64; 8];
    for (i, tok) in fields.iter().enumerate() {
        vals[i] = parse_field(tok).ok_or_else(|| format!("field {} is not numeric: {tok:?}", i + 1))?;
    }
    StrikeRecord::new(
        vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6], vals[7],
    )
}

/// Parses LDAR text, one record per non-empty line.
///
/// With `strict = false`, malformed lines are skipped and reported in
/// [`LdarParse::skipped`]; with `strict = true` the first malformed line is
/// an error.
pub fn parse_ldar(text: &str, strict: bool) -> Result<LdarParse, LdarError> {
    let mut out = LdarParse::default();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(line) {
            Ok(rec) => out.records.push(rec),
            Err(reason) => {
                let line = idx + 1;
                if strict {
                    return Err(LdarError::MalformedLine { line, reason });
                }
                out.skipped.push(SkippedLine { line, reason });
            }
        }
    }
    Ok(out)
}

/// Writes records back out in the same eight-field line format.
/// `parse_ldar(serialize_records(r), true)` reproduces `r` exactly.
pub fn serialize_records(records: &[StrikeRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!(
            "{:02} {:02} {:02} {:02} {:06} {} {} {}\n",
            r.day, r.hour, r.minute, r.second, r.microsecond, r.east_m, r.north_m, r.alt_m
        ));
    }
    out
}
