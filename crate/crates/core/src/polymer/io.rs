use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::PolymerPath;
use crate::error::{Error, Result};

pub fn parse_path_line(line: &str) -> Result<PolymerPath> {
    let stretches: Vec<i64> = serde_json::from_str(line.trim())?;
    PolymerPath::new(stretches)
}

pub fn write_paths<W: Write>(mut w: W, paths: &[PolymerPath]) -> Result<()> {
    for p in paths {
        serde_json::to_writer(&mut w, p.stretches())?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads one JSON array per line; blank lines are skipped. When `length` is
/// given, every path must have that total length.
pub fn read_paths<R: BufRead>(r: R, length: Option<usize>) -> Result<Vec<PolymerPath>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p = parse_path_line(&line)
            .map_err(|e| Error::Format(format!("line {}: {e}", i + 1)))?;
        if let Some(len) = length {
            if p.total_length() != len {
                return Err(Error::Format(format!(
                    "line {}: path of length {} where {len} was expected",
                    i + 1,
                    p.total_length()
                )));
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// A sample dump line: `{"L":…, "trials":…, "stretches":[…]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    #[serde(rename = "L")]
    pub length: usize,
    pub trials: u64,
    pub stretches: Vec<i64>,
}

impl SampleRecord {
    pub fn new(path: &PolymerPath, trials: u64) -> Self {
        Self {
            length: path.total_length(),
            trials,
            stretches: path.stretches().to_vec(),
        }
    }

    pub fn path(&self) -> Result<PolymerPath> {
        PolymerPath::with_length(self.stretches.clone(), self.length)
    }
}

pub fn read_sample_records<R: BufRead>(r: R) -> Result<Vec<SampleRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SampleRecord = serde_json::from_str(&line)?;
        rec.path()?;
        out.push(rec);
    }
    Ok(out)
}
