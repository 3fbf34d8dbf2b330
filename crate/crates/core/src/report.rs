use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of one named check, with a counterexample location on failure.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

/// An ordered list of checks. Failing checks are data, not errors.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Pass,
            location: None,
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, location: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Fail,
            location: Some(location.into()),
        });
    }

    pub fn skip(&mut self, name: impl Into<String>, reason: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Skipped,
            location: Some(reason.into()),
        });
    }

    /// Records a pass when `failure` is `None`.
    pub fn record(&mut self, name: impl Into<String>, failure: Option<String>) {
        match failure {
            None => self.pass(name),
            Some(loc) => self.fail(name, loc),
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.failures().next()
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} checks: {} pass, {} fail, {} skipped",
            self.checks.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        )?;
        for c in self.failures() {
            writeln!(f, "  FAIL {}: {}", c.name, c.location.as_deref().unwrap_or(""))?;
        }
        Ok(())
    }
}
