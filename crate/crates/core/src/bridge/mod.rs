//! Client side of the model-worker protocol.
//!
//! The worker is a child process hosting the real generator and embedder.
//! Engine and worker exchange frames over the worker's stdin/stdout: a
//! 4-byte big-endian payload length followed by a UTF-8 JSON object with a
//! string field `"type"`. Message types are `hello`, `set_target`,
//! `target_ok`, `eval`, `embeddings`, `error` and `shutdown`.
//!
//! ```text
//! worker -> {"type":"hello","protocol_version":1,"latent_dim":512,"embedding_dim":128}
//! engine -> {"type":"set_target","image_path":"target.png"}
//! worker -> {"type":"target_ok","embedding":[...]}
//! engine -> {"type":"eval","id":1,"latents":[[...],...]}
//! worker -> {"type":"embeddings","id":1,"embeddings":[[...],...]}
//! engine -> {"type":"shutdown"}
//! ```
//!
//! The worker returns embeddings only; distances are computed engine-side
//! by [`crate::evaluators::TargetEvaluator`].

mod client;
mod frame;
mod message;
pub mod mock;
mod process;
pub mod script;

pub use client::WorkerClient;
pub use frame::{decode_frame, encode_frame, read_frame, write_frame, MAX_FRAME_LEN};
pub use message::Message;
pub use process::WorkerProcess;

use thiserror::Error;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("framing error: {0}")]
    Framing(String),

    #[error("malformed message: {0}")]
    Malformed(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("unsupported protocol version {found} (expected {PROTOCOL_VERSION})")]
    Version { found: u32 },

    #[error(
        "worker dimensions (latent {found_latent}, embedding {found_embedding}) do not match \
         expected (latent {expected_latent}, embedding {expected_embedding})"
    )]
    DimMismatch {
        expected_latent: usize,
        expected_embedding: usize,
        found_latent: usize,
        found_embedding: usize,
    },

    /// An `error` frame from the worker; `message` is passed through verbatim.
    #[error("worker error{}: {message}", .index.map(|i| format!(" at item {i}")).unwrap_or_default())]
    Worker {
        message: String,
        index: Option<usize>,
    },

    #[error("worker closed its output stream{}", fmt_stderr(.stderr))]
    WorkerExited { stderr: String },

    #[error("transport error: {0}")]
    Transport(#[from] std::io::Error),

    #[error("worker startup failed: {source}{}", fmt_stderr(.stderr))]
    Startup {
        source: Box<BridgeError>,
        stderr: String,
    },
}

fn fmt_stderr(stderr: &str) -> String {
    let stderr = stderr.trim();
    if stderr.is_empty() {
        String::new()
    } else {
        format!("\nworker stderr:\n{stderr}")
    }
}
