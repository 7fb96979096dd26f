//! Shared pieces of the plain-text file formats.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::galois_field::GaloisField;

/// 17 significant digits, enough for a lossless `f64` round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_complex(z: Complex64, sep: &str) -> String {
    format!("{}{sep}{}", fmt_f64(z.re), fmt_f64(z.im))
}

pub fn parse_f64(text: &str, line: usize) -> Result<f64> {
    text.trim().parse::<f64>().map_err(|e| Error::Parse { line, message: format!("bad number {:?}: {e}", text.trim()) })
}

/// Semicolon-separated digit tuples for a list of field-element indices.
pub fn fmt_tuple(gf: &GaloisField, indices: &[usize]) -> String {
    indices.iter().map(|&i| gf.from_index(i).expect("index in range").to_text()).collect::<Vec<_>>().join(";")
}

pub fn parse_tuple(gf: &GaloisField, text: &str, expected_len: usize, line: usize) -> Result<Vec<usize>> {
    if expected_len == 0 {
        return if text.trim().is_empty() {
            Ok(Vec::new())
        } else {
            Err(Error::Parse { line, message: format!("expected an empty tuple, got {text:?}") })
        };
    }
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != expected_len {
        return Err(Error::Parse {
            line,
            message: format!("expected {expected_len} digit tuples, got {}", parts.len()),
        });
    }
    parts
        .iter()
        .map(|part| {
            gf.parse_element(part).map(|e| e.index()).map_err(|e| Error::Parse { line, message: e.to_string() })
        })
        .collect()
}

/// Line-oriented `key = value` report.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyValueReport {
    pub entries: Vec<(String, String)>,
}

impl KeyValueReport {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut seen = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, message: "expected key = value".into() })?;
            let k = k.trim().to_string();
            if seen.insert(k.clone(), ()).is_some() {
                return Err(Error::Parse { line: i + 1, message: format!("duplicate key {k}") });
            }
            entries.push((k, v.trim().to_string()));
        }
        Ok(Self { entries })
    }
}
