//! Check reports: the shared output format of every suite.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// One named check with an optional residual and context.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub residual: Option<f64>,
    pub detail: Option<String>,
}

/// A suite run over one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub instance: String,
    pub checks: Vec<Check>,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn new(suite: impl Into<String>, instance: impl Into<String>) -> Self {
        Report {
            suite: suite.into(),
            instance: instance.into(),
            checks: Vec::new(),
            wall_time_ms: 0.0,
        }
    }

    /// Records a residual-based check: passes iff `residual < tol` and finite.
    pub fn check_residual(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        let ok = residual.is_finite() && residual < tol;
        self.checks.push(Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: Some(residual),
            detail: if ok {
                None
            } else {
                Some(format!("residual {residual:.3e} exceeds tol {tol:.1e}"))
            },
        });
    }

    /// Records a boolean check.
    pub fn check_bool(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        let detail = detail.into();
        self.checks.push(Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: None,
            detail: if detail.is_empty() { None } else { Some(detail) },
        });
    }

    /// Records a negative control: passes iff the probed residual is LARGE.
    /// Guards subspace tests against passing vacuously.
    pub fn check_control(&mut self, name: impl Into<String>, residual: f64, floor: f64) {
        let ok = residual.is_finite() && residual > floor;
        self.checks.push(Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: Some(residual),
            detail: if ok {
                Some("corruption detected as expected".into())
            } else {
                Some(format!(
                    "expected residual above {floor:.1e}, got {residual:.3e}"
                ))
            },
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Fail,
            residual: None,
            detail: Some(detail.into()),
        });
    }

    pub fn skip(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Skip,
            residual: None,
            detail: Some(detail.into()),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter_map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    /// One line per check, plus a header.
    pub fn render_text(&self) -> String {
        let mut out = format!("suite {} :: {}\n", self.suite, self.instance);
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            out.push_str(&format!("  [{tag}] {}", c.name));
            if let Some(rs) = c.residual {
                out.push_str(&format!(" (residual {rs:.3e})"));
            }
            if let Some(d) = &c.detail {
                out.push_str(&format!(" -- {d}"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "  {}/{} passed in {:.1} ms\n",
            self.checks.iter().filter(|c| c.status == Status::Pass).count(),
            self.checks.len(),
            self.wall_time_ms
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_check_thresholds() {
        let mut rep = Report::new("s", "i");
        rep.check_residual("good", 1e-13, 1e-12);
        rep.check_residual("bad", 1e-3, 1e-12);
        rep.check_residual("nan", f64::NAN, 1e-12);
        assert_eq!(rep.checks[0].status, Status::Pass);
        assert_eq!(rep.checks[1].status, Status::Fail);
        assert_eq!(rep.checks[2].status, Status::Fail);
        assert!(!rep.all_passed());
    }

    #[test]
    fn control_check_wants_large_residual() {
        let mut rep = Report::new("s", "i");
        rep.check_control("ctl", 0.5, 1e-6);
        rep.check_control("vacuous", 1e-14, 1e-6);
        assert_eq!(rep.checks[0].status, Status::Pass);
        assert_eq!(rep.checks[1].status, Status::Fail);
    }

    #[test]
    fn json_round_trip_keeps_status_lowercase() {
        let mut rep = Report::new("s", "i");
        rep.check_bool("b", true, "");
        let js = serde_json::to_string(&rep).unwrap();
        assert!(js.contains("\"pass\""));
        let back: Report = serde_json::from_str(&js).unwrap();
        assert_eq!(back.checks.len(), 1);
    }
}
