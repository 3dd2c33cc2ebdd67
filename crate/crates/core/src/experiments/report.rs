use std::fmt;
use std::io::Write;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Where a reference value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// A published closed-form constant or limit theorem.
    Theory,
    /// An identity that holds by construction.
    Identity,
    /// An independent numerical computation (dynamic programming,
    /// enumeration, a separate solver).
    Oracle,
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceKind::Theory => "theory",
            ReferenceKind::Identity => "identity",
            ReferenceKind::Oracle => "oracle",
        })
    }
}

/// How a measured value is compared with its reference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tolerance {
    /// `|m − r| ≤ tol·|r|`.
    Relative { tol: f64 },
    /// `|m − r| ≤ tol`.
    Absolute { tol: f64 },
    /// `|m − r| ≤ k·se`.
    Sigma { k: f64 },
    /// `m < r`.
    Below,
    /// `m > r`.
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub measured: f64,
    pub se: Option<f64>,
    pub reference: f64,
    pub reference_kind: ReferenceKind,
    pub tolerance: Tolerance,
    pub passed: bool,
}

impl Criterion {
    pub fn new(
        name: impl Into<String>,
        measured: f64,
        se: Option<f64>,
        reference: f64,
        reference_kind: ReferenceKind,
        tolerance: Tolerance,
    ) -> Self {
        let d = (measured - reference).abs();
        let passed = match tolerance {
            Tolerance::Relative { tol } => d <= tol * reference.abs(),
            Tolerance::Absolute { tol } => d <= tol,
            Tolerance::Sigma { k } => se.is_some_and(|s| d <= k * s),
            Tolerance::Below => measured < reference,
            Tolerance::Above => measured > reference,
        };
        Self {
            name: name.into(),
            measured,
            se,
            reference,
            reference_kind,
            tolerance,
            passed: passed && measured.is_finite(),
        }
    }
}

/// Six significant digits, switching to exponent form for very small or
/// large magnitudes.
fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e6).contains(&a) {
        format!("{v:.5e}")
    } else {
        format!("{v:.6}")
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "pass" } else { "FAIL" };
        write!(f, "{verdict} {}: measured {}", self.name, num(self.measured))?;
        if let Some(se) = self.se {
            write!(f, " ± {se:.2e}")?;
        }
        let cmp = match self.tolerance {
            Tolerance::Relative { tol } => format!("within {}% of", tol * 100.0),
            Tolerance::Absolute { tol } => format!("within {tol:e} of"),
            Tolerance::Sigma { k } => format!("within {k} SE of"),
            Tolerance::Below => "below".into(),
            Tolerance::Above => "above".into(),
        };
        write!(f, ", {cmp} {} ({})", num(self.reference), self.reference_kind)
    }
}

/// A named value reported for information, without a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub se: Option<f64>,
}

/// Plot data `x, y, yerr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub yerr: Vec<f64>,
}

impl Curve {
    pub fn new(name: impl Into<String>, x: Vec<f64>, y: Vec<f64>, yerr: Option<Vec<f64>>) -> Self {
        let yerr = yerr.unwrap_or_else(|| vec![0.0; y.len()]);
        Self {
            name: name.into(),
            x,
            y,
            yerr,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,y,yerr")?;
        for ((x, y), e) in self.x.iter().zip(&self.y).zip(&self.yerr) {
            writeln!(w, "{x:.17e},{y:.17e},{e:.17e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: serde_json::Value,
    pub criteria: Vec<Criterion>,
    pub measurements: Vec<Measurement>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub curves: Vec<Curve>,
    /// Kept out of the serialised report so that reruns are byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExperimentReport {
    pub fn new(name: &str, parameters: serde_json::Value) -> Self {
        Self {
            name: name.to_string(),
            parameters,
            criteria: Vec::new(),
            measurements: Vec::new(),
            notes: Vec::new(),
            curves: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }

    pub fn check(&mut self, c: Criterion) -> &mut Self {
        self.criteria.push(c);
        self
    }

    pub fn measure(&mut self, name: impl Into<String>, value: f64, se: Option<f64>) -> &mut Self {
        self.measurements.push(Measurement {
            name: name.into(),
            value,
            se,
        });
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({:.1}s)", self.name, self.wall_time.as_secs_f64())?;
        for c in &self.criteria {
            writeln!(f, "  {c}")?;
        }
        for m in &self.measurements {
            match m.se {
                Some(se) => writeln!(f, "  {} = {} ± {se:.2e}", m.name, num(m.value))?,
                None => writeln!(f, "  {} = {}", m.name, num(m.value))?,
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let c = Criterion::new("a", 1.01, None, 1.0, ReferenceKind::Theory, Tolerance::Relative { tol: 0.02 });
        assert!(c.passed);
        let c = Criterion::new("b", 1.1, Some(0.01), 1.0, ReferenceKind::Oracle, Tolerance::Sigma { k: 3.0 });
        assert!(!c.passed);
        let c = Criterion::new("c", f64::NAN, None, 1.0, ReferenceKind::Identity, Tolerance::Below);
        assert!(!c.passed);
        assert!(c.to_string().starts_with("FAIL c"));
    }

    #[test]
    fn json_skips_timing() {
        let mut r = ExperimentReport::new("x", serde_json::json!({"seed": 1}));
        r.wall_time = Duration::from_secs(3);
        r.measure("m", 0.5, None);
        let s = r.to_json().unwrap();
        assert!(!s.contains("wall_time"));
        assert!(s.contains("\"seed\": 1"));
    }

    #[test]
    fn curve_csv() {
        let c = Curve::new("z", vec![1.0], vec![2.0], None);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("x,y,yerr\n1.00000000000000000e0,"));
    }
}
