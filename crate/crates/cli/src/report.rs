//! Deterministic reports: a command echo, checks with status and detail,
//! regression values, and free-form notes.

use std::fmt::Write as _;

use enriched_sites::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NotChecked,
}

impl Status {
    pub fn word(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotChecked => "not-checked",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Names of the results a check asserts.
pub mod anchor {
    pub const SIEVE_PULLBACK: &str = "pullback of an enriched sieve is a sieve";
    pub const LATTICE: &str = "coverages on a small enriched category form a complete lattice";
    pub const SIEVE_INJECTIVE: &str = "change of base is injective on sieves";
    pub const COVERAGE_INJECTIVE: &str = "change of base is injective on coverages";
    pub const SHEAFIFICATION: &str = "sheafification is the double plus construction";
    pub const COMMUTE: &str = "sheafification commutes with change of base";
    pub const GABRIEL: &str = "Gabriel topologies are the Grothendieck topologies of a ring";
    pub const LOCALIZATION: &str = "localization at H_S is the ring of fractions";
    pub const GRADED: &str = "graded Gabriel topology H_S";
    pub const COUNTEREXAMPLE: &str = "non-faithful change of base identifies distinct graded topologies";
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub anchor: Option<&'static str>,
    pub details: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    pub values: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), ..Report::default() }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn value(&mut self, key: impl Into<String>, v: impl ToString) {
        self.values.push((key.into(), v.to_string()));
    }

    pub fn check(&mut self, name: impl Into<String>, status: Status, anchor: Option<&'static str>, details: Vec<String>) {
        self.checks.push(Check { name: name.into(), status, anchor, details });
    }

    /// Record the outcome of a fallible check. Cap overruns become
    /// `not-checked`, other errors `fail`.
    pub fn check_result(
        &mut self,
        name: impl Into<String>,
        anchor: Option<&'static str>,
        r: Result<(bool, Vec<String>), Error>,
    ) {
        match r {
            Ok((ok, details)) => self.check(name, Status::from_bool(ok), anchor, details),
            Err(e @ Error::TooLarge { .. }) => self.check(name, Status::NotChecked, anchor, vec![e.to_string()]),
            Err(e) => self.check(name, Status::Fail, anchor, vec![e.to_string()]),
        }
    }

    pub fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }

    pub fn success(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn extend(&mut self, other: Report) {
        self.notes.extend(other.notes);
        self.checks.extend(other.checks);
        self.values.extend(other.values);
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for n in &self.notes {
            let _ = writeln!(out, "{n}");
        }
        for c in &self.checks {
            let _ = write!(out, "[{}] {}", c.status.word(), c.name);
            if let Some(a) = c.anchor {
                let _ = write!(out, " (anchor: \"{a}\")");
            }
            out.push('\n');
            for d in &c.details {
                let _ = writeln!(out, "    {d}");
            }
        }
        for (k, v) in &self.values {
            let _ = writeln!(out, "value {k} = {v}");
        }
        let _ = writeln!(
            out,
            "summary: {} passed, {} failed, {} not checked",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::NotChecked)
        );
        out
    }

    /// One `key=value` per line; newlines in values are escaped.
    pub fn machine(&self) -> String {
        let esc = |s: &str| s.replace('\\', "\\\\").replace('\n', "\\n");
        let mut out = String::new();
        let _ = writeln!(out, "command={}", esc(&self.command));
        for (i, n) in self.notes.iter().enumerate() {
            let _ = writeln!(out, "note.{}={}", i + 1, esc(n));
        }
        for (i, c) in self.checks.iter().enumerate() {
            let k = i + 1;
            let _ = writeln!(out, "check.{k}.name={}", esc(&c.name));
            let _ = writeln!(out, "check.{k}.status={}", c.status.word());
            if let Some(a) = c.anchor {
                let _ = writeln!(out, "check.{k}.anchor={a}");
            }
            for (j, d) in c.details.iter().enumerate() {
                let _ = writeln!(out, "check.{k}.detail.{}={}", j + 1, esc(d));
            }
        }
        for (k, v) in &self.values {
            let _ = writeln!(out, "value.{k}={}", esc(v));
        }
        let _ = writeln!(out, "summary.pass={}", self.count(Status::Pass));
        let _ = writeln!(out, "summary.fail={}", self.count(Status::Fail));
        let _ = writeln!(out, "summary.not_checked={}", self.count(Status::NotChecked));
        out
    }
}
