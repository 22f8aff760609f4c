//! Scripted worker that replays a golden transcript.
//!
//! A transcript is a text file with one frame payload per line: lines
//! starting with `<` are sent by the worker, lines starting with `>` are
//! expected from the engine. Blank lines and `#` comments are ignored.
//! Expected frames are compared byte-for-byte, length prefix included.

use std::io::{Read, Write};

use super::BridgeError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// Worker sends this payload.
    Send(Vec<u8>),
    /// Worker expects exactly this payload from the engine.
    Expect(Vec<u8>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub steps: Vec<Step>,
}

/// Wraps a payload in its length prefix.
pub fn frame_bytes(payload: &[u8]) -> Vec<u8> {
    let mut out = (payload.len() as u32).to_be_bytes().to_vec();
    out.extend_from_slice(payload);
    out
}

impl Transcript {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut steps = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (dir, payload) = line.split_at(1);
            let payload = payload
                .strip_prefix(' ')
                .unwrap_or(payload)
                .as_bytes()
                .to_vec();
            steps.push(match dir {
                "<" => Step::Send(payload),
                ">" => Step::Expect(payload),
                _ => return Err(format!("line {}: expected '<' or '>'", n + 1)),
            });
        }
        Ok(Self { steps })
    }

    /// Every frame the engine is expected to write, concatenated.
    pub fn expected_engine_bytes(&self) -> Vec<u8> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                Step::Expect(p) => Some(frame_bytes(p)),
                Step::Send(_) => None,
            })
            .flatten()
            .collect()
    }

    /// Every frame the worker writes, concatenated.
    pub fn worker_bytes(&self) -> Vec<u8> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                Step::Send(p) => Some(frame_bytes(p)),
                Step::Expect(_) => None,
            })
            .flatten()
            .collect()
    }

    /// Plays the worker side. Fails on the first engine frame that differs
    /// from the transcript.
    pub fn play<R: Read, W: Write>(&self, mut reader: R, mut writer: W) -> Result<(), BridgeError> {
        for (i, step) in self.steps.iter().enumerate() {
            match step {
                Step::Send(payload) => {
                    writer.write_all(&frame_bytes(payload))?;
                    writer.flush()?;
                }
                Step::Expect(payload) => {
                    let expected = frame_bytes(payload);
                    let mut got = vec![0u8; expected.len()];
                    reader.read_exact(&mut got).map_err(|e| {
                        BridgeError::Protocol(format!("step {i}: engine frame missing: {e}"))
                    })?;
                    if got != expected {
                        return Err(BridgeError::Protocol(format!(
                            "step {i}: expected {:?}, got {:?}",
                            String::from_utf8_lossy(&expected),
                            String::from_utf8_lossy(&got)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
