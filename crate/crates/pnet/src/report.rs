//! Evaluation reports as flat `key=value` text and as JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use pnet_core::EvaluationReport;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

/// JSON has no infinities; non-finite scores are written as strings.
fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(x.to_string())
    }
}

fn optional(x: Option<f64>) -> Value {
    x.map_or(Value::Null, number)
}

fn pairs(report: &EvaluationReport, gold: &str) -> Vec<(String, Value)> {
    let cfg = &report.config;
    let mut out = vec![
        ("gold".to_string(), json!(gold)),
        ("records".into(), json!(cfg.sampler.record_count())),
        ("theta_imp".into(), number(cfg.sampler.theta_imp())),
        ("seed".into(), json!(cfg.sampler.seed())),
        ("mode".into(), json!(cfg.sampler.mode().as_str())),
        ("estimator".into(), json!(cfg.estimator.as_str())),
        ("semantics".into(), json!(report.learned.semantics().as_str())),
        ("holdout_fraction".into(), number(cfg.holdout_fraction)),
        ("train_records".into(), json!(report.train_records)),
        ("holdout_records".into(), json!(report.holdout_records)),
        ("omega_cap".into(), json!(cfg.omega_cap)),
    ];
    for (name, s) in report.variables.iter().zip(&report.budget) {
        out.push((format!("budget.{name}"), number(*s)));
    }
    for (name, d) in report.variables.iter().zip(&report.cpt_distance) {
        out.push((format!("cpt_distance.{name}"), number(*d)));
    }
    out.push(("mean_cpt_distance".into(), number(report.mean_cpt_distance)));
    out.push(("joint_distance".into(), optional(report.joint_distance)));
    out.push(("holdout_loglik_gold".into(), number(report.holdout_loglik_gold)));
    out.push(("holdout_loglik_learned".into(), number(report.holdout_loglik_learned)));
    out.push(("holdout_loglik_learned_raw".into(), optional(report.holdout_loglik_learned_raw)));
    out
}

/// One `key=value` line per field; absent values print as `none`.
pub fn report_to_text(report: &EvaluationReport, gold: &str) -> String {
    let mut s = String::new();
    for (k, v) in pairs(report, gold) {
        let v = match v {
            Value::Null => "none".to_string(),
            Value::String(s) => s,
            other => other.to_string(),
        };
        writeln!(s, "{k}={v}").expect("writing to a String");
    }
    s
}

/// Nested JSON with sorted keys.
pub fn report_to_json(report: &EvaluationReport, gold: &str) -> String {
    let mut root = Map::new();
    let mut budget = Map::new();
    let mut cpt = Map::new();
    for (k, v) in pairs(report, gold) {
        if let Some(name) = k.strip_prefix("budget.") {
            budget.insert(name.into(), v);
        } else if let Some(name) = k.strip_prefix("cpt_distance.") {
            cpt.insert(name.into(), v);
        } else {
            root.insert(k, v);
        }
    }
    root.insert("budget".into(), Value::Object(budget));
    root.insert("cpt_distance".into(), Value::Object(cpt));
    let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("report serializes");
    s.push('\n');
    s
}

/// Writes `path` (text) and `path.json`.
pub fn write_report(path: &Path, report: &EvaluationReport, gold: &str) -> Result<()> {
    fs::write(path, report_to_text(report, gold)).map_err(|e| Error::write(path, e))?;
    let json_path = json_path(path);
    fs::write(&json_path, report_to_json(report, gold)).map_err(|e| Error::write(&json_path, e))
}

pub fn json_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".json");
    name.into()
}
