use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    /// The horizon was too short to decide.
    Undetermined,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Undetermined => "undetermined",
        }
    }

    /// Whether this counts as passing; `strict` treats undetermined as failure.
    pub fn ok(self, strict: bool) -> bool {
        match self {
            Status::Pass => true,
            Status::Fail => false,
            Status::Undetermined => !strict,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A global property of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::from_bool(ok),
            detail: detail.into(),
        }
    }
}

/// The outcome for one requirement, with the index of the trace record
/// that justifies it, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub subject: String,
    pub status: Status,
    pub detail: String,
    pub record: Option<usize>,
}

/// Engine-independent summary handed to the harness.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Verification {
    pub checks: Vec<Check>,
    pub verdicts: Vec<Verdict>,
    pub counters: BTreeMap<String, u64>,
}

impl Verification {
    pub fn passed(&self, strict: bool) -> bool {
        self.checks.iter().all(|c| c.status.ok(strict))
            && self.verdicts.iter().all(|v| v.status.ok(strict))
    }

    pub fn failures(&self, strict: bool) -> impl Iterator<Item = String> + '_ {
        let checks = self
            .checks
            .iter()
            .filter(move |c| !c.status.ok(strict))
            .map(|c| format!("{}: {}", c.name, c.detail));
        let verdicts = self
            .verdicts
            .iter()
            .filter(move |v| !v.status.ok(strict))
            .map(|v| format!("{}: {}", v.subject, v.detail));
        checks.chain(verdicts)
    }
}
