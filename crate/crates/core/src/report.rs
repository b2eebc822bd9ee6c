//! Flat-record serialisation shared by the library and the CLI.
//!
//! A record type lists its CSV columns once ([`Tabular`]); JSON output is
//! the serde form of the same struct, whose field names match the columns.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    PrettyTable,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "pretty-table" | "table" => Ok(OutputFormat::PrettyTable),
            other => Err(Error::InvalidArgument(format!(
                "unknown format `{other}` (expected csv, json or pretty-table)"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::PrettyTable => "pretty-table",
        })
    }
}

pub trait Tabular {
    fn headers() -> &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

pub fn write_records<T, W>(records: &[T], format: OutputFormat, mut out: W) -> Result<()>
where
    T: Tabular + Serialize,
    W: Write,
{
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(T::headers())?;
            for r in records {
                w.write_record(r.cells())?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, records)?;
            writeln!(out)?;
        }
        OutputFormat::PrettyTable => {
            let rows: Vec<Vec<String>> = records.iter().map(Tabular::cells).collect();
            let mut widths: Vec<usize> = T::headers().iter().map(|h| h.len()).collect();
            for row in &rows {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
                cells
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            writeln!(out, "{}", line(&mut T::headers().iter().copied()))?;
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            writeln!(out, "{}", rule.join("  "))?;
            for row in &rows {
                writeln!(out, "{}", line(&mut row.iter().map(String::as_str)))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Pt {
        x: f64,
        note: String,
    }

    impl Tabular for Pt {
        fn headers() -> &'static [&'static str] {
            &["x", "note"]
        }
        fn cells(&self) -> Vec<String> {
            vec![fmt17(self.x), self.note.clone()]
        }
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn formats() {
        let recs = vec![Pt {
            x: 0.5,
            note: "a, b".into(),
        }];
        let mut buf = Vec::new();
        write_records(&recs, OutputFormat::Csv, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x,note\n5.0000000000000000e-1,\"a, b\"\n"
        );

        let mut buf = Vec::new();
        write_records(&recs, OutputFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["x"], 0.5);
        assert_eq!(v[0]["note"], "a, b");

        let mut buf = Vec::new();
        write_records(&recs, OutputFormat::PrettyTable, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("x"));
        assert_eq!(s.lines().count(), 3);
    }

    #[test]
    fn parse_format() {
        assert_eq!("csv".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert_eq!(
            "pretty-table".parse::<OutputFormat>().unwrap(),
            OutputFormat::PrettyTable
        );
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
