use std::io::{BufReader, Read};
use std::process::{Child, ChildStdin, ChildStdout, Command, ExitStatus, Stdio};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use super::{BridgeError, WorkerClient};
use crate::error::{Error, Result};
use crate::evaluators::EmbeddingModel;
use crate::types::{Embedding, LatentVector};

/// A spawned worker process speaking the protocol on stdin/stdout.
///
/// The worker's stderr is collected in the background and attached to
/// startup and transport errors.
pub struct WorkerProcess {
    child: Child,
    client: WorkerClient<BufReader<ChildStdout>, ChildStdin>,
    stderr: Arc<Mutex<String>>,
    stderr_thread: Option<JoinHandle<()>>,
    grace: Duration,
    exit: Option<Option<ExitStatus>>,
}

impl std::fmt::Debug for WorkerProcess {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WorkerProcess")
            .field("pid", &self.child.id())
            .field("dims", &self.client.dims())
            .finish()
    }
}

impl WorkerProcess {
    /// Starts `command` and completes the handshake.
    pub fn spawn(
        mut command: Command,
        expected_latent_dim: usize,
        expected_embedding_dim: usize,
        grace: Duration,
    ) -> Result<Self, BridgeError> {
        let mut child = command
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| BridgeError::Startup {
                source: Box::new(BridgeError::Transport(e)),
                stderr: String::new(),
            })?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let mut stderr_pipe = child.stderr.take().expect("stderr is piped");

        let stderr = Arc::new(Mutex::new(String::new()));
        let sink = Arc::clone(&stderr);
        let stderr_thread = thread::spawn(move || {
            let mut buf = [0u8; 4096];
            while let Ok(n) = stderr_pipe.read(&mut buf) {
                if n == 0 {
                    break;
                }
                sink.lock()
                    .unwrap()
                    .push_str(&String::from_utf8_lossy(&buf[..n]));
            }
        });

        let mut worker = Self {
            child,
            client: WorkerClient::new(BufReader::new(stdout), stdin),
            stderr,
            stderr_thread: Some(stderr_thread),
            grace,
            exit: None,
        };
        if let Err(e) = worker
            .client
            .handshake(expected_latent_dim, expected_embedding_dim)
        {
            let _ = worker.child.kill();
            let _ = worker.child.wait();
            worker.exit = Some(None);
            worker.join_stderr(Duration::from_millis(500));
            return Err(BridgeError::Startup {
                source: Box::new(e),
                stderr: worker.stderr_text(),
            });
        }
        Ok(worker)
    }

    /// Waits briefly for the stderr reader to drain. A grandchild holding the
    /// pipe open must not block us, so the thread is detached on timeout.
    fn join_stderr(&mut self, wait: Duration) {
        let deadline = Instant::now() + wait;
        if let Some(t) = self.stderr_thread.take() {
            while !t.is_finished() && Instant::now() < deadline {
                thread::sleep(Duration::from_millis(5));
            }
            if t.is_finished() {
                let _ = t.join();
            }
        }
    }

    pub fn stderr_text(&self) -> String {
        self.stderr.lock().unwrap().clone()
    }

    pub fn id(&self) -> u32 {
        self.child.id()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.client.dims().expect("handshake completes in spawn")
    }

    fn annotate(&self, err: Error) -> Error {
        match err {
            Error::Bridge(BridgeError::WorkerExited { .. }) => {
                // Give the stderr reader a moment to drain the dying process.
                thread::sleep(Duration::from_millis(50));
                Error::Bridge(BridgeError::WorkerExited {
                    stderr: self.stderr_text(),
                })
            }
            other => other,
        }
    }

    pub fn set_target(&mut self, image_path: &str) -> Result<Embedding> {
        self.client
            .set_target(image_path)
            .map_err(|e| self.annotate(e))
    }

    pub fn eval(&mut self, batch: &[LatentVector]) -> Result<Vec<Embedding>> {
        self.client.eval(batch).map_err(|e| self.annotate(e))
    }

    /// Sends `shutdown` and waits up to the grace period for the worker to
    /// exit, killing it afterwards. Returns `None` if the worker had to be
    /// killed or a previous call already shut it down.
    pub fn shutdown(&mut self) -> Option<ExitStatus> {
        if self.exit.is_some() {
            return None;
        }
        if let Err(e) = self.client.send_shutdown() {
            log::debug!("sending shutdown failed: {e}");
        }
        let deadline = Instant::now() + self.grace;
        let status = loop {
            match self.child.try_wait() {
                Ok(Some(status)) => break Some(status),
                Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(10)),
                Ok(None) | Err(_) => {
                    log::warn!(
                        "worker {} did not exit within {:?}; killing it",
                        self.child.id(),
                        self.grace
                    );
                    let _ = self.child.kill();
                    let _ = self.child.wait();
                    break None;
                }
            }
        };
        if let Some(s) = status.filter(|s| !s.success()) {
            log::warn!("worker exited with {s}");
        }
        self.join_stderr(Duration::from_millis(500));
        self.exit = Some(status);
        status
    }

    pub fn has_exited(&self) -> bool {
        self.exit.is_some()
    }
}

impl Drop for WorkerProcess {
    fn drop(&mut self) {
        self.shutdown();
    }
}

impl EmbeddingModel for WorkerProcess {
    fn latent_dim(&self) -> usize {
        self.dims().0
    }

    fn embedding_dim(&self) -> usize {
        self.dims().1
    }

    fn embed_batch(&mut self, batch: &[LatentVector]) -> Result<Vec<Embedding>> {
        self.eval(batch)
    }
}
