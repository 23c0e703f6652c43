//! Canonical JSON experiment reports.
//!
//! Object keys are sorted and floats use the shortest text that parses back
//! to the same value, so equal documents serialize to equal bytes.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA: &str = "tentropy-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Default for Tool {
    fn default() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema: String,
    pub tool: Tool,
    pub command: String,
    /// Every parameter needed to re-run, seeds included.
    pub config: Value,
    pub results: Value,
    /// Input name → SHA-256 hex digest.
    pub provenance: BTreeMap<String, String>,
}

impl ReportDocument {
    pub fn new(command: &str, config: impl Serialize, results: impl Serialize) -> Result<Self> {
        Ok(Self {
            schema: SCHEMA.to_string(),
            tool: Tool::default(),
            command: command.to_string(),
            config: to_value(config)?,
            results: to_value(results)?,
            provenance: BTreeMap::new(),
        })
    }

    pub fn with_input(mut self, name: &str, bytes: &[u8]) -> Self {
        self.provenance.insert(name.to_string(), sha256_hex(bytes));
        self
    }
}

fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Pretty-printed JSON with sorted keys and a trailing newline.
pub fn write_report(doc: &ReportDocument) -> Vec<u8> {
    // Round-tripping through `Value` sorts every nested object.
    let value = serde_json::to_value(doc).expect("report values are serializable");
    let mut out = serde_json::to_vec_pretty(&value).expect("in-memory write");
    out.push(b'\n');
    out
}
