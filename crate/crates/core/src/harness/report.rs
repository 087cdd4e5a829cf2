use super::ExperimentConfig;
use crate::error::{Error, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check could not be evaluated.
    Error,
    /// Logged for the record; never fails a suite.
    Info,
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The statement being checked, in words.
    pub reference: String,
    pub status: Status,
    pub measured: f64,
    pub bound: f64,
    /// Distance to the bound, positive when the check passes.
    pub slack: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    /// Passes when `measured <= bound`.
    pub fn at_most(name: impl Into<String>, reference: &str, measured: f64, bound: f64) -> Self {
        let slack = bound - measured;
        Self {
            name: name.into(),
            reference: reference.into(),
            status: if slack >= 0.0 { Status::Pass } else { Status::Fail },
            measured,
            bound,
            slack,
            detail: String::new(),
        }
    }

    /// Passes when `measured >= bound`.
    pub fn at_least(name: impl Into<String>, reference: &str, measured: f64, bound: f64) -> Self {
        let slack = measured - bound;
        Self {
            status: if slack >= 0.0 { Status::Pass } else { Status::Fail },
            slack,
            ..Self::at_most(name, reference, measured, bound)
        }
    }

    /// A yes/no property; `measured` is 1 when it holds.
    pub fn flag(name: impl Into<String>, reference: &str, holds: bool) -> Self {
        Self::at_least(name, reference, if holds { 1.0 } else { 0.0 }, 1.0)
    }

    pub fn info(name: impl Into<String>, reference: &str, measured: f64) -> Self {
        Self {
            status: Status::Info,
            slack: f64::NAN,
            ..Self::at_most(name, reference, measured, f64::NAN)
        }
    }

    pub fn error(name: impl Into<String>, reference: &str, err: &Error) -> Self {
        Self {
            status: Status::Error,
            slack: f64::NAN,
            detail: err.to_string(),
            ..Self::at_most(name, reference, f64::NAN, f64::NAN)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass | Status::Info)
    }
}

/// A named CSV trace written beside the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

/// Checks and traces produced by one suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
}

impl SuiteOutcome {
    pub fn new(suite: &str, checks: Vec<Check>, artifacts: Vec<Artifact>, seconds: f64) -> Self {
        Self {
            suite: suite.into(),
            passed: checks.iter().all(Check::passed),
            seconds,
            checks,
            artifacts,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// Full verification report.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: serde_json::Map<String, serde_json::Value>,
    pub config_sha256: String,
    pub passed: bool,
    pub suites: Vec<SuiteOutcome>,
}

impl Report {
    pub fn new(cfg: &ExperimentConfig, suites: Vec<SuiteOutcome>) -> Self {
        let config = cfg
            .entries()
            .into_iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v)))
            .collect();
        Self {
            config,
            config_sha256: cfg.content_hash(),
            passed: suites.iter().all(|s| s.passed),
            suites,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes the JSON report to `path` and every artifact beside it as
    /// `<stem>.<suite>.<artifact>.csv`, each prefixed with the configuration.
    pub fn write(&self, path: &Path, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        std::fs::write(path, self.to_json()?)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
        let mut written = vec![path.to_path_buf()];
        for suite in &self.suites {
            for a in &suite.artifacts {
                let p = dir.join(format!("{stem}.{}.{}.csv", suite.suite, a.name));
                std::fs::write(&p, format!("{}{}", cfg.header_comment(), a.contents))?;
                written.push(p);
            }
        }
        Ok(written)
    }

    /// One line per check, for terminals.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for suite in &self.suites {
            s.push_str(&format!(
                "[{}] {} ({:.1} s)\n",
                if suite.passed { "pass" } else { "FAIL" },
                suite.suite,
                suite.seconds
            ));
            for c in &suite.checks {
                s.push_str(&format!(
                    "  {:<5} {:<48} measured {:<12.6e} bound {:<12.6e}{}\n",
                    format!("{:?}", c.status).to_lowercase(),
                    c.name,
                    c.measured,
                    c.bound,
                    if c.detail.is_empty() {
                        String::new()
                    } else {
                        format!("  {}", c.detail)
                    }
                ));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_and_slack() {
        let c = Check::at_most("a", "r", 1.0, 2.0);
        assert_eq!((c.status, c.slack), (Status::Pass, 1.0));
        let c = Check::at_least("a", "r", 1.0, 2.0);
        assert_eq!((c.status, c.slack), (Status::Fail, -1.0));
        assert!(Check::info("a", "r", 3.0).passed());
        assert!(!Check::error("a", "r", &Error::NonInvertible).passed());
        assert!(!Check::at_most("a", "r", f64::NAN, 1.0).passed());
    }

    #[test]
    fn json_shape_and_artifacts() {
        let cfg = ExperimentConfig::default();
        let suite = SuiteOutcome::new(
            "demo",
            vec![Check::at_most("x", "x below one", 0.5, 1.0)],
            vec![Artifact {
                name: "trace".into(),
                contents: "t,y\n0,1\n".into(),
            }],
            0.0,
        );
        let report = Report::new(&cfg, vec![suite]);
        let v: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        let check = &v["suites"][0]["checks"][0];
        for key in ["name", "reference", "status", "measured", "bound", "slack"] {
            assert!(check.get(key).is_some(), "{key}");
        }
        assert_eq!(v["config_sha256"], cfg.content_hash());
        let dir = tempfile::tempdir().unwrap();
        let files = report.write(&dir.path().join("report.json"), &cfg).unwrap();
        assert_eq!(files.len(), 2);
        let trace = std::fs::read_to_string(&files[1]).unwrap();
        assert!(trace.contains("# config_sha256 = "));
        assert!(trace.ends_with("t,y\n0,1\n"));
    }
}
