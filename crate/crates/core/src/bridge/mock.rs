//! Worker-side protocol loop backed by a [`SyntheticWorld`].
//!
//! Used for protocol tests and as a stand-in worker (`latent-evolve
//! mock-worker`). `set_target` accepts either the literal `@optimum`,
//! meaning the world's planted optimum, or a path to a JSON array holding
//! a latent vector, whose embedding becomes the target.

use std::io::{Read, Write};

use super::{read_frame, write_frame, BridgeError, Message, PROTOCOL_VERSION};
use crate::evaluators::{EmbeddingModel, SyntheticWorld};
use crate::types::LatentVector;

pub const PLANTED_TARGET: &str = "@optimum";

fn error(message: impl Into<String>, id: Option<u64>, index: Option<usize>) -> Message {
    Message::Error {
        message: message.into(),
        id,
        index,
    }
}

fn target_for(world: &SyntheticWorld, image_path: &str) -> Message {
    if image_path == PLANTED_TARGET {
        return Message::TargetOk {
            embedding: world.target().as_slice().to_vec(),
        };
    }
    let text = match std::fs::read_to_string(image_path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return error(format!("file not found: {image_path}"), None, None)
        }
        Err(e) => return error(format!("cannot read {image_path}: {e}"), None, None),
    };
    let latent = match serde_json::from_str::<LatentVector>(&text) {
        Ok(z) => z,
        Err(e) => {
            return error(
                format!("{image_path} is not a latent vector: {e}"),
                None,
                None,
            )
        }
    };
    match world.embed_latent(&latent) {
        Ok(e) => Message::TargetOk {
            embedding: e.into_inner(),
        },
        Err(e) => error(e.to_string(), None, None),
    }
}

fn embeddings_for(world: &SyntheticWorld, id: u64, latents: Vec<Vec<f64>>) -> Message {
    let mut embeddings = Vec::with_capacity(latents.len());
    for (index, values) in latents.into_iter().enumerate() {
        let embedded =
            LatentVector::with_dim(values, world.latent_dim()).and_then(|z| world.embed_latent(&z));
        match embedded {
            Ok(e) => embeddings.push(e.into_inner()),
            Err(e) => return error(e.to_string(), Some(id), Some(index)),
        }
    }
    Message::Embeddings { id, embeddings }
}

/// Serves the protocol until `shutdown` or end of input.
///
/// Returns `Ok(true)` when a `shutdown` frame was received.
pub fn serve_synthetic<R: Read, W: Write>(
    mut reader: R,
    mut writer: W,
    world: &SyntheticWorld,
) -> Result<bool, BridgeError> {
    write_frame(
        &mut writer,
        &Message::Hello {
            protocol_version: PROTOCOL_VERSION,
            latent_dim: world.latent_dim(),
            embedding_dim: world.embedding_dim(),
            capabilities: Some(serde_json::json!({ "normalized": true, "synthetic": true })),
        },
    )?;
    let mut target_set = false;
    while let Some(request) = read_frame(&mut reader)? {
        let reply = match request {
            Message::SetTarget { image_path } => {
                let reply = target_for(world, &image_path);
                target_set |= matches!(reply, Message::TargetOk { .. });
                reply
            }
            Message::Eval { id, .. } if !target_set => error("target not set", Some(id), None),
            Message::Eval { id, latents } => embeddings_for(world, id, latents),
            Message::Shutdown => return Ok(true),
            other => error(
                format!("unexpected message type {}", other.kind()),
                None,
                None,
            ),
        };
        write_frame(&mut writer, &reply)?;
    }
    Ok(false)
}
