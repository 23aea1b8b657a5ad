//! Run headers and small JSON helpers shared by the subcommands.

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "gec";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// SHA-256 of the compact JSON form of `config`, hex encoded.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let bytes = serde_json::to_vec(config).expect("configs serialize");
    hex::encode(Sha256::digest(bytes))
}

/// First line of every JSONL output, and the `header` field of JSON
/// reports.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl Header {
    pub fn new<T: Serialize>(command: &'static str, config: &T) -> Self {
        Header { tool: TOOL, version: VERSION, command, config_hash: config_hash(config), extra: Map::new() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.extra.insert(key.to_string(), serde_json::to_value(value).expect("header fields serialize"));
        self
    }

    pub fn line(&self) -> String {
        serde_json::json!({ "header": self }).to_string()
    }
}

/// True for a JSONL header line as written by [`Header::line`].
pub fn is_header(v: &Value) -> bool {
    v.as_object().is_some_and(|o| o.len() == 1 && o.contains_key("header"))
}

/// A ratio as a percentage rounded to two decimals.
pub fn percent(ratio: f64) -> f64 {
    (ratio * 10_000.0).round() / 100.0
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = config_hash(&serde_json::json!({"mode": "paper"}));
        assert_eq!(a, config_hash(&serde_json::json!({"mode": "paper"})));
        assert_ne!(a, config_hash(&serde_json::json!({"mode": "anchored"})));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn header_round_trip() {
        let h = Header::new("extract", &1).with("policy_hash", "abc");
        let v: Value = serde_json::from_str(&h.line()).unwrap();
        assert!(is_header(&v));
        assert_eq!(v["header"]["policy_hash"], "abc");
        assert_eq!(v["header"]["tool"], "gec");
    }

    #[test]
    fn percent_rounding() {
        assert_eq!(percent(2.0 / 3.0), 66.67);
        assert_eq!(percent(1.0), 100.0);
        assert_eq!(round2(66.536), 66.54);
    }
}
