//! Table ingestion, the command drivers, and JSON run reports.

mod commands;
mod tables;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::elliptic::EllipticError;
use crate::lucas::LucasError;
use crate::model::Solution;
use crate::oracle::OracleError;

pub use commands::{
    cmd_enumerate, cmd_lucas, cmd_reduce, cmd_smooth_scan, cmd_verify_tables, Mode,
};
pub use tables::{
    embedded_tables, ingest_tables, parse_tables, solutions_of, theorem_rows, TableError, TableRow,
    MASTER_TABLES,
};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Lucas(#[from] LucasError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Ok,
    PaperTypo,
    Discrepancy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    /// Table and row, or the named check, the finding is about.
    pub anchor: String,
    pub message: String,
    pub witness: Value,
}

impl Finding {
    pub fn new(
        severity: Severity,
        anchor: impl Into<String>,
        message: impl Into<String>,
        witness: Value,
    ) -> Self {
        Self {
            severity,
            anchor: anchor.into(),
            message: message.into(),
            witness,
        }
    }

    pub fn ok(anchor: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(Severity::Ok, anchor, message, Value::Null)
    }

    /// `Ok` when `holds`, otherwise a discrepancy with the given witness.
    pub fn check(
        holds: bool,
        anchor: impl Into<String>,
        message: impl Into<String>,
        witness: Value,
    ) -> Self {
        let severity = if holds {
            Severity::Ok
        } else {
            Severity::Discrepancy
        };
        Self::new(severity, anchor, message, witness)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub config: Value,
    pub solutions: Vec<Solution>,
    pub findings: Vec<Finding>,
    pub details: Value,
}

impl RunReport {
    pub fn new(command: impl Into<String>, config: Value) -> Self {
        Self {
            command: command.into(),
            config,
            solutions: Vec::new(),
            findings: Vec::new(),
            details: json!({}),
        }
    }

    /// 1 when any finding is a discrepancy, else 0.
    pub fn exit_status(&self) -> i32 {
        i32::from(
            self.findings
                .iter()
                .any(|f| f.severity == Severity::Discrepancy),
        )
    }

    pub fn count(&self, severity: Severity) -> usize {
        self.findings
            .iter()
            .filter(|f| f.severity == severity)
            .count()
    }

    pub fn to_value(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "solutions": self.solutions.iter().map(solution_json).collect::<Vec<_>>(),
            "findings": self.findings,
            "details": self.details,
            "exit_status": self.exit_status(),
        })
    }

    /// Pretty JSON with a trailing newline; identical input gives identical bytes.
    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(&self.to_value()).expect("report values serialize");
        s.push('\n');
        s
    }
}

/// Every integer as a decimal string.
pub fn solution_json(s: &Solution) -> Value {
    json!({
        "x": s.x.to_string(),
        "y": s.y.to_string(),
        "a": s.exp.a.to_string(),
        "b": s.exp.b.to_string(),
        "c": s.exp.c.to_string(),
        "n": s.n.to_string(),
    })
}
