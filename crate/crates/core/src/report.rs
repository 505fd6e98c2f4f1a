//! Verification reports: named checks with pass/fail status and the first
//! counterexample found.

use std::fmt;

use serde::Serialize;

use crate::channel::Channel;
use crate::dist::Dist;
use crate::outcome::Outcome;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    /// The parameter or input the check was run on, empty when global.
    pub scope: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn record(
        &mut self,
        name: impl Into<String>,
        scope: impl Into<String>,
        outcome: Result<(), String>,
    ) -> bool {
        let passed = outcome.is_ok();
        self.checks.push(Check {
            name: name.into(),
            scope: scope.into(),
            passed,
            counterexample: outcome.err(),
        });
        passed
    }

    pub fn pass(&mut self, name: impl Into<String>, scope: impl Into<String>) {
        self.record(name, scope, Ok(()));
    }

    pub fn fail(
        &mut self,
        name: impl Into<String>,
        scope: impl Into<String>,
        counterexample: impl Into<String>,
    ) {
        self.record(name, scope, Err(counterexample.into()));
    }

    pub fn check_dists<T: Outcome>(
        &mut self,
        name: impl Into<String>,
        scope: impl Into<String>,
        lhs: &Dist<T>,
        rhs: &Dist<T>,
    ) -> bool {
        self.record(name, scope, dist_diff(lhs, rhs))
    }

    pub fn check_channels<A: Outcome, B: Outcome>(
        &mut self,
        name: impl Into<String>,
        scope: impl Into<String>,
        lhs: &Channel<A, B>,
        rhs: &Channel<A, B>,
    ) -> bool {
        self.record(name, scope, channel_diff(lhs, rhs))
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Appends another report's checks, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.name = format!("{prefix}: {}", c.name);
            }
            self.checks.push(c);
        }
        self.notes.extend(other.notes);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> + '_ {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Check names in first-seen order with (passed, total) counts.
    pub fn summary(&self) -> Vec<(String, usize, usize)> {
        let mut out: Vec<(String, usize, usize)> = Vec::new();
        for c in &self.checks {
            match out.iter_mut().find(|(n, _, _)| *n == c.name) {
                Some(entry) => {
                    entry.1 += usize::from(c.passed);
                    entry.2 += 1;
                }
                None => out.push((c.name.clone(), usize::from(c.passed), 1)),
            }
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{verdict} {}", self.title)?;
        for (name, ok, total) in self.summary() {
            let tag = if ok == total { "ok  " } else { "FAIL" };
            writeln!(f, "  {tag} {name} ({ok}/{total})")?;
        }
        for c in self.failures() {
            write!(f, "  counterexample for {}", c.name)?;
            if !c.scope.is_empty() {
                write!(f, " at {}", c.scope)?;
            }
            writeln!(f, ": {}", c.counterexample.as_deref().unwrap_or("-"))?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

pub fn dist_diff<T: Outcome>(lhs: &Dist<T>, rhs: &Dist<T>) -> Result<(), String> {
    match lhs.first_difference(rhs) {
        None => Ok(()),
        Some((x, a, b)) => Err(format!("at {}: {} vs {}", x.canonical(), a, b)),
    }
}

pub fn channel_diff<A: Outcome, B: Outcome>(
    lhs: &Channel<A, B>,
    rhs: &Channel<A, B>,
) -> Result<(), String> {
    let mut inputs: Vec<&A> = lhs.domain().chain(rhs.domain()).collect();
    inputs.sort();
    inputs.dedup();
    for a in inputs {
        match (lhs.get(a), rhs.get(a)) {
            (Ok(l), Ok(r)) => dist_diff(l, r).map_err(|e| format!("input {}: {e}", a.canonical()))?,
            (Ok(_), Err(_)) => return Err(format!("input {} missing on the right", a.canonical())),
            (Err(_), _) => return Err(format!("input {} missing on the left", a.canonical())),
        }
    }
    Ok(())
}
