use std::io::{Read, Write};

use super::{read_frame, write_frame, BridgeError, Message, PROTOCOL_VERSION};
use crate::error::{Error, Result};
use crate::evaluators::{check_batch, EmbeddingModel};
use crate::types::{Embedding, LatentVector};

/// Protocol state machine over an arbitrary byte stream pair.
///
/// One request is outstanding at a time. Request ids start at 1 and
/// increase strictly.
#[derive(Debug)]
pub struct WorkerClient<R, W> {
    reader: R,
    writer: W,
    dims: Option<(usize, usize)>,
    target_set: bool,
    next_id: u64,
    shut_down: bool,
}

impl<R: Read, W: Write> WorkerClient<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self {
            reader,
            writer,
            dims: None,
            target_set: false,
            next_id: 1,
            shut_down: false,
        }
    }

    fn recv(&mut self) -> Result<Message, BridgeError> {
        read_frame(&mut self.reader)?.ok_or(BridgeError::WorkerExited {
            stderr: String::new(),
        })
    }

    fn send(&mut self, message: &Message) -> Result<(), BridgeError> {
        write_frame(&mut self.writer, message)
    }

    fn ready(&self) -> Result<(usize, usize), BridgeError> {
        if self.shut_down {
            return Err(BridgeError::Protocol("worker has been shut down".into()));
        }
        self.dims
            .ok_or_else(|| BridgeError::Protocol("handshake has not completed".into()))
    }

    /// Reads the worker's `hello` and checks version and dimensions.
    pub fn handshake(
        &mut self,
        expected_latent_dim: usize,
        expected_embedding_dim: usize,
    ) -> Result<(usize, usize), BridgeError> {
        if self.dims.is_some() {
            return Err(BridgeError::Protocol("handshake already completed".into()));
        }
        match self.recv()? {
            Message::Hello {
                protocol_version,
                latent_dim,
                embedding_dim,
                ..
            } => {
                if protocol_version != PROTOCOL_VERSION {
                    return Err(BridgeError::Version {
                        found: protocol_version,
                    });
                }
                if (latent_dim, embedding_dim) != (expected_latent_dim, expected_embedding_dim) {
                    return Err(BridgeError::DimMismatch {
                        expected_latent: expected_latent_dim,
                        expected_embedding: expected_embedding_dim,
                        found_latent: latent_dim,
                        found_embedding: embedding_dim,
                    });
                }
                self.dims = Some((latent_dim, embedding_dim));
                Ok((latent_dim, embedding_dim))
            }
            Message::Error { message, index, .. } => Err(BridgeError::Worker { message, index }),
            other => Err(BridgeError::Protocol(format!(
                "expected hello, got {}",
                other.kind()
            ))),
        }
    }

    /// Asks the worker to embed the target image.
    pub fn set_target(&mut self, image_path: &str) -> Result<Embedding> {
        let (_, embedding_dim) = self.ready()?;
        self.send(&Message::SetTarget {
            image_path: image_path.to_owned(),
        })?;
        match self.recv()? {
            Message::TargetOk { embedding } => {
                let embedding = Embedding::with_dim(embedding, embedding_dim)?;
                self.target_set = true;
                Ok(embedding)
            }
            Message::Error { message, index, .. } => {
                Err(BridgeError::Worker { message, index }.into())
            }
            other => Err(BridgeError::Protocol(format!(
                "expected target_ok, got {}",
                other.kind()
            ))
            .into()),
        }
    }

    /// Embeds a batch in one request/response exchange.
    pub fn eval(&mut self, batch: &[LatentVector]) -> Result<Vec<Embedding>> {
        let (latent_dim, embedding_dim) = self.ready()?;
        if !self.target_set {
            return Err(Error::TargetNotSet);
        }
        check_batch(batch, latent_dim)?;
        let id = self.next_id;
        self.next_id += 1;
        self.send(&Message::Eval {
            id,
            latents: batch.iter().map(|z| z.as_slice().to_vec()).collect(),
        })?;
        match self.recv()? {
            Message::Embeddings {
                id: got,
                embeddings,
            } => {
                if got != id {
                    return Err(BridgeError::Protocol(format!(
                        "response id {got} does not match request id {id}"
                    ))
                    .into());
                }
                if embeddings.len() != batch.len() {
                    return Err(BridgeError::Protocol(format!(
                        "received {} embeddings for a batch of {}",
                        embeddings.len(),
                        batch.len()
                    ))
                    .into());
                }
                embeddings
                    .into_iter()
                    .enumerate()
                    .map(|(index, e)| {
                        if e.len() != embedding_dim {
                            return Err(Error::BatchDimension {
                                index,
                                expected: embedding_dim,
                                found: e.len(),
                            });
                        }
                        Embedding::new(e)
                    })
                    .collect()
            }
            Message::Error {
                message,
                id: got,
                index,
            } => {
                if got.is_some_and(|g| g != id) {
                    return Err(BridgeError::Protocol(format!(
                        "error response id {} does not match request id {id}",
                        got.unwrap()
                    ))
                    .into());
                }
                Err(BridgeError::Worker { message, index }.into())
            }
            other => Err(BridgeError::Protocol(format!(
                "expected embeddings, got {}",
                other.kind()
            ))
            .into()),
        }
    }

    /// Sends `shutdown`. A second call does nothing.
    pub fn send_shutdown(&mut self) -> Result<(), BridgeError> {
        if self.shut_down {
            return Ok(());
        }
        self.shut_down = true;
        self.send(&Message::Shutdown)
    }

    pub fn is_shut_down(&self) -> bool {
        self.shut_down
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.dims
    }

    pub fn next_request_id(&self) -> u64 {
        self.next_id
    }

    pub fn into_parts(self) -> (R, W) {
        (self.reader, self.writer)
    }
}

impl<R: Read, W: Write> EmbeddingModel for WorkerClient<R, W> {
    fn latent_dim(&self) -> usize {
        self.dims.map_or(0, |d| d.0)
    }

    fn embedding_dim(&self) -> usize {
        self.dims.map_or(0, |d| d.1)
    }

    fn embed_batch(&mut self, batch: &[LatentVector]) -> Result<Vec<Embedding>> {
        self.eval(batch)
    }
}
