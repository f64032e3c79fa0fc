//! Ordered verdict reports with a stable key/value rendering.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Unverified,
    Value(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub path: String,
    pub verdict: Verdict,
    /// Residual or sample point backing a FAIL, or a note for UNVERIFIED.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    entries: Vec<Entry>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pass(&mut self, path: impl Into<String>) {
        self.push(path.into(), Verdict::Pass, None);
    }

    pub fn fail(&mut self, path: impl Into<String>, witness: impl Into<String>) {
        self.push(path.into(), Verdict::Fail, Some(witness.into()));
    }

    /// PASS when `ok`, otherwise FAIL with the lazily built witness.
    pub fn check(&mut self, path: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) {
        if ok {
            self.pass(path);
        } else {
            self.fail(path, witness());
        }
    }

    pub fn unverified(&mut self, path: impl Into<String>, note: impl Into<String>) {
        self.push(path.into(), Verdict::Unverified, Some(note.into()));
    }

    pub fn value(&mut self, path: impl Into<String>, v: impl fmt::Display) {
        self.push(path.into(), Verdict::Value(v.to_string()), None);
    }

    fn push(&mut self, path: String, verdict: Verdict, witness: Option<String>) {
        self.entries.push(Entry { path, verdict, witness });
    }

    /// Append `other`, prefixing each path with `prefix.`.
    pub fn merge(&mut self, prefix: &str, other: Report) {
        for mut e in other.entries {
            if !prefix.is_empty() {
                e.path = format!("{prefix}.{}", e.path);
            }
            self.entries.push(e);
        }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn get(&self, path: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.path == path)
    }

    pub fn verdict(&self, path: &str) -> Option<&Verdict> {
        self.get(path).map(|e| &e.verdict)
    }

    /// No FAIL entries. UNVERIFIED attestations do not count against a pass.
    pub fn passed(&self) -> bool {
        !self.entries.iter().any(|e| e.verdict == Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail)
    }

    /// `path = VERDICT` lines; a FAIL or UNVERIFIED entry is followed by `path.witness = ...`.
    pub fn to_machine(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            let v = match &e.verdict {
                Verdict::Pass => "PASS".to_string(),
                Verdict::Fail => "FAIL".to_string(),
                Verdict::Unverified => "UNVERIFIED".to_string(),
                Verdict::Value(v) => v.clone(),
            };
            s.push_str(&format!("{} = {}\n", e.path, one_line(&v)));
            if let Some(w) = &e.witness {
                s.push_str(&format!("{}.witness = {}\n", e.path, one_line(w)));
            }
        }
        s
    }
}

fn one_line(s: &str) -> String {
    s.replace('\n', " ")
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.entries.iter().map(|e| e.path.len()).max().unwrap_or(0);
        for e in &self.entries {
            let v = match &e.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Unverified => "UNVERIFIED",
                Verdict::Value(v) => v.as_str(),
            };
            writeln!(f, "{:width$}  {v}", e.path)?;
            if let Some(w) = &e.witness {
                writeln!(f, "{:width$}    {w}", "")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_rendering_is_ordered() {
        let mut r = Report::new();
        r.pass("a");
        r.fail("b", "x1 = 2");
        let mut sub = Report::new();
        sub.unverified("complete_j1", "user attestation");
        sub.value("rank", 4);
        r.merge("m", sub);
        assert!(!r.passed());
        assert_eq!(
            r.to_machine(),
            "a = PASS\nb = FAIL\nb.witness = x1 = 2\nm.complete_j1 = UNVERIFIED\nm.complete_j1.witness = user attestation\nm.rank = 4\n"
        );
    }
}
