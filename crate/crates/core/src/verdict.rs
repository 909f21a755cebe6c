//! Pass/fail records for verification routines.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl Verdict {
    pub fn new(name: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            passed: true,
            checks: 0,
            failures: Vec::new(),
        }
    }

    /// Records one check; the message is built only on failure.
    pub fn require(&mut self, ok: bool, message: impl FnOnce() -> String) -> bool {
        self.checks += 1;
        if !ok {
            self.passed = false;
            if self.failures.len() < 20 {
                self.failures.push(message());
            }
        }
        ok
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        self.checks += 1;
        self.passed = false;
        if self.failures.len() < 20 {
            self.failures.push(message.into());
        }
    }

    /// Folds another verdict's checks into this one.
    pub fn absorb(&mut self, other: Verdict) {
        self.checks += other.checks;
        if !other.passed {
            self.passed = false;
            for f in other.failures {
                if self.failures.len() < 20 {
                    self.failures.push(format!("{}: {f}", other.name));
                }
            }
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} ({} checks)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.checks
        )?;
        for fail in &self.failures {
            write!(f, "\n  - {fail}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn require_and_absorb() {
        let mut a = Verdict::new("a");
        assert!(a.require(true, || unreachable!()));
        let mut b = Verdict::new("b");
        b.require(false, || "broken".into());
        a.absorb(b);
        assert!(!a.passed);
        assert_eq!(a.checks, 2);
        assert_eq!(a.failures, vec!["b: broken".to_string()]);
        assert!(a.to_string().starts_with("FAIL a (2 checks)"));
    }
}
