use std::fmt::Display;

use serde_json::{json, Value};

pub enum CliError {
    /// Bad input or a violated precondition: exit code 1.
    Validation {
        kind: &'static str,
        message: String,
        path: Option<String>,
        rule: Option<String>,
    },
    /// A check that ran to completion and failed: exit code 1, after the
    /// report has been written.
    Failed(String),
    /// Anything else: exit code 2.
    Internal(String),
}

impl CliError {
    pub fn input(message: String) -> Self {
        CliError::Validation {
            kind: "input",
            message,
            path: None,
            rule: None,
        }
    }

    /// Precondition failure reported by the module operation `rule`.
    pub fn rule(rule: &str, e: impl Display) -> Self {
        CliError::Validation {
            kind: "precondition",
            message: e.to_string(),
            path: None,
            rule: Some(rule.to_string()),
        }
    }

    pub fn internal(e: impl Display) -> Self {
        CliError::Internal(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 2,
            _ => 1,
        }
    }

    pub fn diagnostic(&self) -> Value {
        match self {
            CliError::Validation {
                kind,
                message,
                path,
                rule,
            } => {
                let mut v = json!({"error": "validation", "kind": kind, "message": message});
                if let Some(p) = path {
                    v["path"] = json!(p);
                }
                if let Some(r) = rule {
                    v["rule"] = json!(r);
                }
                v
            }
            CliError::Failed(message) => json!({"error": "check failed", "message": message}),
            CliError::Internal(message) => json!({"error": "internal", "message": message}),
        }
    }
}
