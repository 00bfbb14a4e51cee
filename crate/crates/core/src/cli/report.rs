use std::time::Duration;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{EXIT_CONFIRMED, EXIT_REFUTED, EXIT_UNKNOWN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Confirmed,
    Refuted,
    Unknown,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Confirmed => EXIT_CONFIRMED,
            Verdict::Refuted => EXIT_REFUTED,
            Verdict::Unknown => EXIT_UNKNOWN,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

/// Machine-readable record of one invocation.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub verdict: Option<Verdict>,
    pub exit_code: Option<i32>,
    pub elapsed_ms: Option<f64>,
    pub result: Value,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report {
            tool: "lpcc",
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs: Vec::new(),
            verdict: None,
            exit_code: None,
            elapsed_ms: None,
            result: Value::Null,
        }
    }

    pub fn input(&mut self, name: &str, bytes: &[u8]) {
        let sha256 = hex::encode(Sha256::digest(bytes));
        self.inputs.push(InputDigest { name: name.to_string(), sha256 });
    }

    pub fn finish(&mut self, verdict: Verdict, result: Value, elapsed: Duration) -> &Report {
        self.verdict = Some(verdict);
        self.exit_code = Some(verdict.exit_code());
        self.elapsed_ms = Some(elapsed.as_secs_f64() * 1e3);
        self.result = result;
        self
    }
}
