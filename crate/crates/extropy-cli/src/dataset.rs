//! CSV dataset ingestion.
//!
//! Format: UTF-8, comma-delimited, LF or CRLF line endings, header row
//! required. The `time` column (positive decimal) is mandatory; `status`
//! (0 = censored, 1 = event) is optional. Extra columns are ignored.
//! Fields are plain numbers; there is no quoting mechanism. Parse errors
//! name the offending line and column.

use extropy_core::sample::{CensoredSample, Sample};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("missing header row")]
    MissingHeader,
    #[error("header has no `time` column")]
    MissingTimeColumn,
    #[error("header repeats column `{0}`")]
    DuplicateColumn(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column `{column}`: cannot parse `{value}` as {wanted}")]
    BadField {
        line: usize,
        column: &'static str,
        value: String,
        wanted: &'static str,
    },
    #[error("line {line}, column `time`: value {value} must be strictly positive and finite")]
    BadTime { line: usize, value: f64 },
    #[error("line {line}, column `status`: value {value} must be 0 or 1")]
    BadStatus { line: usize, value: String },
}

/// A parsed dataset, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub times: Vec<f64>,
    pub statuses: Option<Vec<u8>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_censored(&self) -> usize {
        self.statuses
            .as_ref()
            .map(|s| s.iter().filter(|v| **v == 0).count())
            .unwrap_or(0)
    }

    /// Complete-data view of the times.
    pub fn to_sample(&self) -> extropy_core::Result<Sample> {
        Sample::new(self.times.clone())
    }

    /// Censored view; requires a status column.
    pub fn to_censored(&self) -> Option<extropy_core::Result<CensoredSample>> {
        self.statuses
            .as_ref()
            .map(|s| CensoredSample::from_parts(&self.times, s))
    }
}

pub fn parse_dataset_bytes(bytes: &[u8]) -> Result<Dataset, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ParseError::NotUtf8)?;
    parse_dataset(text)
}

pub fn parse_dataset(text: &str) -> Result<Dataset, ParseError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate();

    let (_, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or(ParseError::MissingHeader)?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let mut time_idx = None;
    let mut status_idx = None;
    for (i, name) in columns.iter().enumerate() {
        let slot = match *name {
            "time" => &mut time_idx,
            "status" => &mut status_idx,
            _ => continue,
        };
        if slot.replace(i).is_some() {
            return Err(ParseError::DuplicateColumn((*name).into()));
        }
    }
    let time_idx = time_idx.ok_or(ParseError::MissingTimeColumn)?;

    let mut times = Vec::new();
    let mut statuses = status_idx.map(|_| Vec::new());
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(ParseError::FieldCount {
                line: line_no + 1,
                expected: columns.len(),
                found: fields.len(),
            });
        }
        let raw_time = fields[time_idx];
        let time: f64 = raw_time.parse().map_err(|_| ParseError::BadField {
            line: line_no + 1,
            column: "time",
            value: raw_time.to_string(),
            wanted: "a decimal number",
        })?;
        if !time.is_finite() || time <= 0.0 {
            return Err(ParseError::BadTime {
                line: line_no + 1,
                value: time,
            });
        }
        times.push(time);
        if let (Some(idx), Some(list)) = (status_idx, statuses.as_mut()) {
            let raw = fields[idx];
            let status: u8 = raw.parse().map_err(|_| ParseError::BadStatus {
                line: line_no + 1,
                value: raw.to_string(),
            })?;
            if status > 1 {
                return Err(ParseError::BadStatus {
                    line: line_no + 1,
                    value: raw.to_string(),
                });
            }
            list.push(status);
        }
    }
    Ok(Dataset { times, statuses })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complete_dataset() {
        let d = parse_dataset("time\n1.5\n2\n0.25\n").unwrap();
        assert_eq!(d.times, vec![1.5, 2.0, 0.25]);
        assert!(d.statuses.is_none());
        assert_eq!(d.n_censored(), 0);
    }

    #[test]
    fn parses_censored_dataset_with_extra_columns() {
        let text = "id, time , status\r\n1, 3.5, 1\r\n2, 1.25, 0\r\n";
        let d = parse_dataset(text).unwrap();
        assert_eq!(d.times, vec![3.5, 1.25]);
        assert_eq!(d.statuses, Some(vec![1, 0]));
        assert_eq!(d.n_censored(), 1);
    }

    #[test]
    fn strips_byte_order_mark() {
        let d = parse_dataset("\u{feff}time\n1\n").unwrap();
        assert_eq!(d.times, vec![1.0]);
    }

    #[test]
    fn header_is_required() {
        assert_eq!(parse_dataset(""), Err(ParseError::MissingHeader));
        assert_eq!(
            parse_dataset("lifetime\n1.0\n"),
            Err(ParseError::MissingTimeColumn)
        );
        assert_eq!(
            parse_dataset("time,time\n1,1\n"),
            Err(ParseError::DuplicateColumn("time".into()))
        );
    }

    #[test]
    fn rejects_bad_times_with_location() {
        match parse_dataset("time\n1.0\n-3\n") {
            Err(ParseError::BadTime { line, value }) => {
                assert_eq!(line, 3);
                assert_eq!(value, -3.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_dataset("time\nnan\n"),
            Err(ParseError::BadTime { .. })
        ));
        assert!(matches!(
            parse_dataset("time\ninf\n"),
            Err(ParseError::BadTime { .. })
        ));
        assert!(matches!(
            parse_dataset("time\nabc\n"),
            Err(ParseError::BadField { line: 2, .. })
        ));
    }

    #[test]
    fn rejects_bad_statuses() {
        assert!(matches!(
            parse_dataset("time,status\n1.0,2\n"),
            Err(ParseError::BadStatus { line: 2, .. })
        ));
        assert!(matches!(
            parse_dataset("time,status\n1.0,0.0\n"),
            Err(ParseError::BadStatus { .. })
        ));
        assert!(matches!(
            parse_dataset("time,status\n1.0,-1\n"),
            Err(ParseError::BadStatus { .. })
        ));
    }

    #[test]
    fn rejects_ragged_rows() {
        assert_eq!(
            parse_dataset("time,status\n1.0\n"),
            Err(ParseError::FieldCount {
                line: 2,
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn rejects_invalid_utf8() {
        assert_eq!(
            parse_dataset_bytes(&[0x74, 0xff, 0xfe]),
            Err(ParseError::NotUtf8)
        );
    }

    #[test]
    fn blank_lines_are_skipped() {
        let d = parse_dataset("\ntime\n\n1.0\n\n2.0\n\n").unwrap();
        assert_eq!(d.times, vec![1.0, 2.0]);
    }
}
