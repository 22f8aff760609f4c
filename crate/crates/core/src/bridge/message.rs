use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::BridgeError;

/// One protocol message. Field order here is the on-wire key order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Message {
    Hello {
        protocol_version: u32,
        latent_dim: usize,
        embedding_dim: usize,
        /// Free-form notes from the worker, e.g. whether embeddings are
        /// L2-normalized by the model.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        capabilities: Option<Value>,
    },
    SetTarget {
        image_path: String,
    },
    TargetOk {
        embedding: Vec<f64>,
    },
    Eval {
        id: u64,
        latents: Vec<Vec<f64>>,
    },
    Embeddings {
        id: u64,
        embeddings: Vec<Vec<f64>>,
    },
    Error {
        message: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        index: Option<usize>,
    },
    Shutdown,
}

impl Message {
    pub fn kind(&self) -> &'static str {
        match self {
            Message::Hello { .. } => "hello",
            Message::SetTarget { .. } => "set_target",
            Message::TargetOk { .. } => "target_ok",
            Message::Eval { .. } => "eval",
            Message::Embeddings { .. } => "embeddings",
            Message::Error { .. } => "error",
            Message::Shutdown => "shutdown",
        }
    }

    pub(crate) fn from_payload(payload: &[u8]) -> Result<Self, BridgeError> {
        let text = std::str::from_utf8(payload)
            .map_err(|e| BridgeError::Malformed(format!("payload is not UTF-8: {e}")))?;
        let value: Value = serde_json::from_str(text)
            .map_err(|e| BridgeError::Malformed(format!("payload is not JSON: {e}")))?;
        match value.get("type") {
            Some(Value::String(_)) => {}
            _ if !value.is_object() => {
                return Err(BridgeError::Malformed(
                    "payload is not a JSON object".into(),
                ))
            }
            _ => {
                return Err(BridgeError::Malformed(
                    "missing string field \"type\"".into(),
                ))
            }
        }
        serde_json::from_value(value).map_err(|e| BridgeError::Malformed(e.to_string()))
    }
}
