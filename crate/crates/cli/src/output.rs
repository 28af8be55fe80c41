//! The output record shared by every subcommand, and its three renderings.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub params: Map<String, Value>,
    pub result: Value,
    pub warnings: Vec<String>,
}

impl OutputRecord {
    /// Parses and checks a JSON record as written by `--json`.
    pub fn from_json(s: &str) -> Result<Self, String> {
        let rec: OutputRecord = serde_json::from_str(s).map_err(|e| e.to_string())?;
        if rec.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema_version {:?}",
                rec.schema_version
            ));
        }
        if rec.command.is_empty() {
            return Err("empty command".into());
        }
        Ok(rec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

/// A command's full output: the record plus its text and CSV forms.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub record: OutputRecord,
    pub text: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.record.to_json() + "\n",
            Format::Text => self.text.iter().map(|l| format!("{l}\n")).collect(),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
            }
        }
    }
}

/// A float with 15 significant digits, as used in CSV output.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{x:.14e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
    if (-5..15).contains(&exp) {
        // positional form
        let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
        let sign = if x < 0.0 { "-" } else { "" };
        let point = exp + 1;
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), digits)
        } else if point as usize >= digits.len() {
            format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
        } else {
            format!(
                "{}.{}",
                &digits[..point as usize],
                &digits[point as usize..]
            )
        };
        format!("{sign}{body}")
    } else {
        format!("{mantissa}e{exp}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(sig15(0.6418775686595671), "0.641877568659567");
        assert_eq!(sig15(1.0), "1");
        assert_eq!(sig15(-0.25), "-0.25");
        assert_eq!(sig15(1234.5), "1234.5");
        assert_eq!(sig15(1e-7), "1e-7");
        assert_eq!(sig15(0.000123), "0.000123");
        assert_eq!(sig15(2.5e20), "2.5e20");
        assert_eq!(sig15(1.0 / 3.0), "0.333333333333333");
        assert_eq!(sig15(0.0), "0");
    }

    #[test]
    fn record_round_trip() {
        let mut params = Map::new();
        params.insert("k".into(), 3.into());
        let rec = OutputRecord {
            schema_version: SCHEMA_VERSION.into(),
            command: "member".into(),
            params,
            result: serde_json::json!({"k": 3, "member": false}),
            warnings: vec![],
        };
        assert_eq!(OutputRecord::from_json(&rec.to_json()).unwrap(), rec);
        assert!(OutputRecord::from_json(
            r#"{"schema_version":"2","command":"x","params":{},"result":null,"warnings":[]}"#
        )
        .is_err());
        assert!(OutputRecord::from_json(
            r#"{"schema_version":"1","command":"x","params":{},"result":null}"#
        )
        .is_err());
    }
}
