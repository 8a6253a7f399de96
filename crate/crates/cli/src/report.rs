use std::time::Duration;

use rankloss::conditions::ConditionError;
use rankloss::formats::FormatError;
use rankloss::matroid::MatroidError;
use rankloss::randrank::TrialConfigError;
use rankloss::tim::TimError;
use serde_json::{json, Value};
use thiserror::Error;

/// Longest witness list kept in a report.
pub const WITNESS_LIMIT: usize = 100;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Load(String),
    #[error("{0}")]
    Precondition(String),
    /// An internal invariant failed; the partial report is still emitted.
    #[error("{message}")]
    Internal { message: String, report: Option<Box<Report>> },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Load(_) => 3,
            CliError::Precondition(_) => 4,
            CliError::Internal { .. } => 5,
        }
    }

    pub fn into_report(self) -> Option<Report> {
        match self {
            CliError::Internal { report, .. } => report.map(|r| *r),
            _ => None,
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError::Internal {
            message: message.into(),
            report: None,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Load(e.to_string())
    }
}

impl From<TrialConfigError> for CliError {
    fn from(e: TrialConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ConditionError> for CliError {
    fn from(e: ConditionError) -> Self {
        match e {
            ConditionError::TauOutOfRange { .. } => CliError::Usage(e.to_string()),
            ConditionError::TooLarge { .. } => CliError::Precondition(e.to_string()),
            ConditionError::EquivalenceViolation(ref r) => CliError::Internal {
                message: e.to_string(),
                report: Some(Box::new(Report::new("equiv", json!({ "violation": &**r })))),
            },
        }
    }
}

impl From<MatroidError> for CliError {
    fn from(e: MatroidError) -> Self {
        match e {
            MatroidError::Precondition { .. } | MatroidError::TooLarge { .. } => CliError::Precondition(e.to_string()),
            MatroidError::LinAlg(_) => CliError::internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<TimError> for CliError {
    fn from(e: TimError) -> Self {
        match e {
            TimError::Precondition(_) | TimError::Capacity(_) => CliError::Precondition(e.to_string()),
            TimError::Topology(_) | TimError::Shape(_) => CliError::Load(e.to_string()),
            TimError::Internal(_) | TimError::LinAlg(_) => CliError::internal(e.to_string()),
        }
    }
}

/// Command result plus the echo and timing added at render time.
#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    result: Value,
}

impl Report {
    pub fn new(command: &str, result: Value) -> Self {
        let mut result = result;
        truncate_witnesses(&mut result);
        Report {
            command: command.to_string(),
            result,
        }
    }

    pub fn render(&self, argv: &[String], elapsed: Duration, pretty: bool) -> String {
        let v = json!({
            "command": self.command,
            "argv": argv,
            "result": self.result,
            "timing_ms": elapsed.as_secs_f64() * 1e3,
        });
        if pretty {
            serde_json::to_string_pretty(&v)
        } else {
            serde_json::to_string(&v)
        }
        .expect("JSON values serialize")
    }
}

/// Cuts every `witnesses` array to [`WITNESS_LIMIT`] entries and marks the
/// enclosing object with `"truncated": true`.
pub fn truncate_witnesses(v: &mut Value) {
    match v {
        Value::Object(map) => {
            let cut = matches!(map.get("witnesses"), Some(Value::Array(a)) if a.len() > WITNESS_LIMIT);
            if cut {
                if let Some(Value::Array(a)) = map.get_mut("witnesses") {
                    a.truncate(WITNESS_LIMIT);
                }
                map.insert("truncated".into(), Value::Bool(true));
            }
            map.values_mut().for_each(truncate_witnesses);
        }
        Value::Array(a) => a.iter_mut().for_each(truncate_witnesses),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_witness_lists_are_cut() {
        let mut v = json!({ "a": { "witnesses": (0..150).collect::<Vec<_>>() }, "witnesses": [1] });
        truncate_witnesses(&mut v);
        assert_eq!(v["a"]["witnesses"].as_array().unwrap().len(), WITNESS_LIMIT);
        assert_eq!(v["a"]["truncated"], json!(true));
        assert!(v.get("truncated").is_none());
    }
}
