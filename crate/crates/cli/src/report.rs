//! The single output object every subcommand emits, its renderers, and the
//! process exit-code mapping.

use serde::Serialize;
use serde_json::Value;
use std::process::ExitCode;

/// Stable outcome classification; drives both the JSON `status` field and
/// the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Verified,
    BudgetExhausted,
    PremiseFailed,
    ContradictionDetected,
    ContractViolation,
    VerificationFailed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok | Status::Verified => 0,
            Status::BudgetExhausted => 3,
            Status::PremiseFailed
            | Status::ContradictionDetected
            | Status::ContractViolation
            | Status::VerificationFailed => 4,
        }
    }
}

/// Exit code for malformed invocations and unparsable inputs.
pub const USAGE_EXIT: u8 = 2;

#[derive(Debug, Serialize)]
pub struct Report {
    pub status: Status,
    pub value: Value,
    pub certificate: Value,
    pub fuel_used: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Report {
    pub fn ok(value: Value, certificate: Value, fuel_used: Option<u64>) -> Self {
        Report { status: Status::Ok, value, certificate, fuel_used, detail: None }
    }

    pub fn status_only(status: Status, detail: impl Into<String>) -> Self {
        Report {
            status,
            value: Value::Null,
            certificate: Value::Null,
            fuel_used: None,
            detail: Some(detail.into()),
        }
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            serde_json::to_string_pretty(self).expect("report serializes")
        } else {
            let mut out = String::new();
            out.push_str(&format!("status: {}\n", status_name(self.status)));
            if let Some(detail) = &self.detail {
                out.push_str(&format!("detail: {detail}\n"));
            }
            if !self.value.is_null() {
                out.push_str(&format!("value: {}\n", pretty_inline(&self.value)));
            }
            if !self.certificate.is_null() {
                out.push_str(&format!("certificate: {}\n", pretty_inline(&self.certificate)));
            }
            if let Some(fuel) = self.fuel_used {
                out.push_str(&format!("fuel_used: {fuel}\n"));
            }
            out
        }
    }

    pub fn exit(&self, json: bool) -> ExitCode {
        print!("{}", self.render(json));
        ExitCode::from(self.status.exit_code())
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Verified => "verified",
        Status::BudgetExhausted => "budget_exhausted",
        Status::PremiseFailed => "premise_failed",
        Status::ContradictionDetected => "contradiction_detected",
        Status::ContractViolation => "contract_violation",
        Status::VerificationFailed => "verification_failed",
    }
}

fn pretty_inline(v: &Value) -> String {
    serde_json::to_string(v).expect("value serializes")
}
