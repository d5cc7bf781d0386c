use serde::{Deserialize, Serialize};

/// Direction of the comparison for a report entry.
///
/// Most entries assert that a residual is small (`AtMost`). A few checks
/// exist to demonstrate that an identity *fails* (the broken vacuum, the
/// Bogoliubov property of the generalized squeeze operator); those use
/// `Above` and pass when the residual exceeds the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    #[default]
    AtMost,
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub boundary_excluded: bool,
    #[serde(default, skip_serializing_if = "is_at_most")]
    pub expect: Expectation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn is_at_most(e: &Expectation) -> bool {
    *e == Expectation::AtMost
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self::with_expectation(name, residual, tolerance, Expectation::AtMost)
    }

    pub fn above(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self::with_expectation(name, residual, tolerance, Expectation::Above)
    }

    pub fn with_expectation(
        name: impl Into<String>,
        residual: f64,
        tolerance: f64,
        expect: Expectation,
    ) -> Self {
        let pass = match expect {
            Expectation::AtMost => residual <= tolerance,
            Expectation::Above => residual > tolerance,
        };
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass,
            boundary_excluded: false,
            expect,
            note: None,
        }
    }

    pub fn boundary_excluded(mut self, excluded: bool) -> Self {
        self.boundary_excluded = excluded;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.entries.extend(other.entries);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Residual of the named entry; panics if absent.
    pub fn residual(&self, name: &str) -> f64 {
        self.get(name)
            .unwrap_or_else(|| panic!("no report entry named {name:?}"))
            .residual
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_expectation() {
        assert!(CheckEntry::new("a", 1e-13, 1e-12).pass);
        assert!(!CheckEntry::new("a", 2e-12, 1e-12).pass);
        assert!(CheckEntry::new("edge", 1e-12, 1e-12).pass);
        assert!(CheckEntry::above("b", 0.5, 1e-3).pass);
        assert!(!CheckEntry::above("b", 1e-4, 1e-3).pass);
    }

    #[test]
    fn report_aggregates() {
        let mut r = CheckReport::new();
        assert!(r.all_pass());
        r.push(CheckEntry::new("ok", 0.0, 1e-12));
        r.push(CheckEntry::new("bad", 1.0, 1e-12).boundary_excluded(true));
        assert!(!r.all_pass());
        assert_eq!(r.failures().count(), 1);
        assert_eq!(r.residual("bad"), 1.0);
    }
}
