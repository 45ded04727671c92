use serde::Serialize;
use serde_json::Value;

/// Result document of one command. Everything except `wall_time_ms` is a
/// function of the inputs and the seed.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    /// SHA-256 of the canonical form of every input.
    pub input_digest: String,
    pub solver: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    pub wall_time_ms: u128,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
