//! Named residuals with tolerances and verdicts.

use serde::{Deserialize, Serialize};

use crate::params::Spin;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub name: String,
    /// Which identity family the check belongs to.
    #[serde(rename = "paper_anchor")]
    pub anchor: String,
    #[serde(rename = "N")]
    pub level: Option<usize>,
    pub j: Option<Spin>,
    /// A check that could not be evaluated carries a NaN residual, written as `null`.
    #[serde(with = "nullable_float")]
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ReportEntry {
    /// A check passes when its residual is finite, non-negative and within tolerance.
    pub fn new(name: impl Into<String>, anchor: &str, residual: f64, tolerance: f64) -> Self {
        let pass = residual.is_finite() && residual >= 0.0 && residual <= tolerance;
        Self {
            name: name.into(),
            anchor: anchor.to_string(),
            level: None,
            j: None,
            residual,
            tolerance,
            pass,
            detail: None,
        }
    }

    pub fn level(mut self, n: usize) -> Self {
        self.level = Some(n);
        self
    }

    pub fn spin(mut self, j: Spin) -> Self {
        self.j = Some(j);
        self
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// A failing entry for a check that raised an error instead of producing a residual.
    pub fn errored(name: impl Into<String>, anchor: &str, tolerance: f64, err: &crate::error::Error) -> Self {
        Self::new(name, anchor, f64::NAN, tolerance).detail(format!("error: {err}"))
    }
}

mod nullable_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub entries: Vec<ReportEntry>,
    pub overall_pass: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self { entries: Vec::new(), overall_pass: true }
    }

    pub fn push(&mut self, entry: ReportEntry) {
        self.overall_pass &= entry.pass;
        self.entries.push(entry);
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = ReportEntry>) {
        for e in entries {
            self.push(e);
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn find(&self, name: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, crate::linalg::worst)
    }
}

impl FromIterator<ReportEntry> for VerificationReport {
    fn from_iter<I: IntoIterator<Item = ReportEntry>>(iter: I) -> Self {
        let mut r = Self::new();
        r.extend(iter);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert!(ReportEntry::new("a", "x", 1e-12, 1e-9).pass);
        assert!(!ReportEntry::new("a", "x", 1e-3, 1e-9).pass);
        assert!(!ReportEntry::new("a", "x", f64::NAN, 1e-9).pass);
        assert!(ReportEntry::new("a", "x", 0.0, 0.0).pass);
        let r: VerificationReport = [
            ReportEntry::new("a", "x", 0.0, 1.0),
            ReportEntry::new("b", "x", 2.0, 1.0),
        ]
        .into_iter()
        .collect();
        assert!(!r.overall_pass);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn json_round_trip() {
        let mut r = VerificationReport::new();
        r.push(
            ReportEntry::new("reflection", "reflection-equation", 1.234_567_890_123e-13, 1e-9)
                .level(3)
                .spin(Spin::HALF),
        );
        r.push(ReportEntry::new("rank", "charges", 0.0, 0.0).detail("gap 1e-14"));
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"paper_anchor\""));
        assert!(text.contains("\"N\":3"));
        assert!(text.contains("\"j\":\"1/2\""));
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn errored_entry_serializes_null_residual() {
        let err = crate::error::Error::Singular("x".into());
        let e = ReportEntry::errored("a", "x", 1e-9, &err);
        assert!(!e.pass);
        let text = serde_json::to_string(&e).unwrap();
        assert!(text.contains("\"residual\":null"));
        let back: ReportEntry = serde_json::from_str(&text).unwrap();
        assert!(back.residual.is_nan() && !back.pass);
    }
}
