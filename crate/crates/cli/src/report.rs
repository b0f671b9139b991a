//! Report schema shared by every subcommand, plus the output/exit plumbing.

use serde::{Deserialize, Serialize};

/// Machine-readable result of one CLI run. Identical command + seed must
/// reproduce identical verdict, value, and witness; only `elapsed_ms`
/// varies between runs.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: serde_json::Value,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<serde_json::Value>,
    pub seed: u64,
    pub elapsed_ms: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format `{other}` (expected json|text)")),
        }
    }
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.verdict == "fail" {
            1
        } else {
            0
        }
    }

    pub fn print(&self, format: Format) {
        match format {
            Format::Json => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(self).expect("report serializes")
                );
            }
            Format::Text => {
                println!("command: {}", self.command);
                println!("verdict: {}", self.verdict);
                if let Some(v) = &self.value {
                    println!("value: {}", serde_json::to_string(v).expect("serializes"));
                }
                if let Some(w) = &self.witness {
                    println!("witness: {}", serde_json::to_string(w).expect("serializes"));
                }
                println!("seed: {}", self.seed);
                println!("elapsed_ms: {}", self.elapsed_ms);
            }
        }
    }
}
