//! Machine-readable run reports.
//!
//! Every checking subcommand emits one [`Report`]: a config echo, one
//! record per check, and an overall verdict. Reports are deterministic
//! for a fixed configuration except for the `generated_at_unix` stamp,
//! and the schema tag is stable so CI can diff runs.

use serde::Serialize;

/// Schema tag for check reports.
pub const REPORT_SCHEMA: &str = "modrep.report/1";

/// Echo of the effective run configuration.
#[derive(Serialize, Clone, Debug, Default)]
pub struct ConfigEcho {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

/// One named check with its instance counts and worst defect.
#[derive(Serialize, Clone, Debug)]
pub struct CheckRecord {
    pub name: String,
    pub instances: usize,
    pub passed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_defect: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub info: Option<serde_json::Value>,
}

impl CheckRecord {
    pub fn new(name: &str, instances: usize, passed: usize, pass: bool) -> CheckRecord {
        CheckRecord {
            name: name.to_string(),
            instances,
            passed,
            max_defect: None,
            pass,
            info: None,
        }
    }

    pub fn with_defect(mut self, defect: f64) -> CheckRecord {
        self.max_defect = Some(defect);
        self
    }

    pub fn with_info(mut self, info: serde_json::Value) -> CheckRecord {
        self.info = Some(info);
        self
    }
}

/// A full run report.
#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub schema: &'static str,
    pub generated_at_unix: u64,
    pub config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
    pub overall_pass: bool,
}

impl Report {
    pub fn new(config: ConfigEcho) -> Report {
        let generated_at_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Report {
            schema: REPORT_SCHEMA,
            generated_at_unix,
            config,
            checks: Vec::new(),
            overall_pass: true,
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        self.overall_pass &= check.pass;
        self.checks.push(check);
    }

    pub fn exit_code(&self) -> i32 {
        if self.overall_pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    /// One line per check plus a verdict, for the text output mode.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "[{status}] {} instances={} passed={}",
                c.name, c.instances, c.passed
            ));
            if let Some(d) = c.max_defect {
                out.push_str(&format!(" max_defect={d:.3e}"));
            }
            if let Some(info) = &c.info {
                out.push_str(&format!(" {info}"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.overall_pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_follows_checks() {
        let mut r = Report::new(ConfigEcho {
            subcommand: "t".into(),
            ..ConfigEcho::default()
        });
        r.push(CheckRecord::new("a", 3, 3, true));
        assert!(r.overall_pass);
        assert_eq!(r.exit_code(), 0);
        r.push(CheckRecord::new("b", 2, 1, false).with_defect(0.5));
        assert!(!r.overall_pass);
        assert_eq!(r.exit_code(), 1);
        let json = r.to_json();
        assert!(json.contains("\"schema\": \"modrep.report/1\""));
        assert!(r.to_text().contains("[FAIL] b"));
    }
}
