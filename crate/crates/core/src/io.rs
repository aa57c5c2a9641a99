//! Shared file formats.
//!
//! A frequency-set file is UTF-8 text with one base-10 positive integer per
//! line, strictly increasing; lines starting with `#` and blank lines are
//! skipped. A file whose first non-blank character is `{` is read as JSON
//! `{"freqs":[...]}` instead.
//!
//! A sign file has the same line discipline with one `+1`, `1` or `-1` per line.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::freqset::{FrequencySet, MAX_FREQUENCY};
use crate::perturb::SignVector;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses either representation of a frequency set.
pub fn parse_frequency_set(text: &str) -> Result<FrequencySet> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(text)?);
    }
    let mut freqs: Vec<u64> = Vec::new();
    for (line, l) in content_lines(text) {
        if !l.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse {
                line,
                message: format!("expected a positive integer, found {l:?}"),
            });
        }
        let v: u64 = l.parse().map_err(|_| Error::Parse {
            line,
            message: format!("integer out of range: {l}"),
        })?;
        if v == 0 || v > MAX_FREQUENCY {
            return Err(Error::Parse {
                line,
                message: format!("frequency {v} outside [1, 2^46]"),
            });
        }
        if let Some(&prev) = freqs.last() {
            if v <= prev {
                return Err(Error::Parse {
                    line,
                    message: format!("{v} does not exceed previous frequency {prev}"),
                });
            }
        }
        freqs.push(v);
    }
    if freqs.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no frequencies found".into(),
        });
    }
    FrequencySet::new(freqs)
}

/// Text representation, optionally preceded by `#` comment lines.
pub fn format_frequency_set(set: &FrequencySet, comments: &[String]) -> String {
    let mut out = String::with_capacity(set.len() * 8);
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    for l in set.iter() {
        let _ = writeln!(out, "{l}");
    }
    out
}

pub fn read_frequency_set(path: impl AsRef<Path>) -> Result<FrequencySet> {
    parse_frequency_set(&std::fs::read_to_string(path)?)
}

pub fn parse_signs(text: &str) -> Result<SignVector> {
    let mut eps = Vec::new();
    for (line, l) in content_lines(text) {
        let s = match l {
            "+1" | "1" => 1,
            "-1" => -1,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected +1 or -1, found {other:?}"),
                })
            }
        };
        eps.push(s);
    }
    SignVector::new(eps)
}

pub fn format_signs(eps: &SignVector) -> String {
    eps.as_slice()
        .iter()
        .map(|&s| if s > 0 { "+1\n" } else { "-1\n" })
        .collect()
}
