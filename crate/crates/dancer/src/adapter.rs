//! External summarizer adapters.
//!
//! An adapter is any process speaking line-delimited JSON on its standard
//! streams. For every request line `{"id": ..., "source": ...}` it writes one
//! response line `{"id": ..., "summary": ...}`, in request order. Closing its
//! input tells it to exit.

use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, Command, ExitStatus, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdapterRequest {
    pub id: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdapterResponse {
    pub id: String,
    pub summary: String,
}

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("cannot start adapter {command:?}: {source}")]
    Spawn { command: String, source: io::Error },
    #[error("request {id}: adapter did not answer within {timeout:?}")]
    Timeout { id: String, timeout: Duration },
    #[error("request {id}: malformed response line {line:?}")]
    Malformed { id: String, line: String },
    #[error("request {id}: response is for {got:?}")]
    IdMismatch { id: String, got: String },
    #[error("request {id}: adapter exited ({status})")]
    Exited { id: String, status: String },
    #[error("request {id}: {source}")]
    Io { id: String, source: io::Error },
}

/// A running adapter process owned by one caller.
pub struct AdapterProcess {
    command: String,
    child: Child,
    stdin: Option<BufWriter<ChildStdin>>,
    lines: Receiver<io::Result<String>>,
    broken: bool,
}

impl AdapterProcess {
    /// Starts `command` through `sh -c`.
    pub fn spawn(command: &str) -> Result<Self, AdapterError> {
        let spawn_err = |source| AdapterError::Spawn {
            command: command.to_owned(),
            source,
        };
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(spawn_err)?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");

        // Reading happens on a helper thread so requests can time out.
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });

        Ok(AdapterProcess {
            command: command.to_owned(),
            child,
            stdin: Some(BufWriter::new(stdin)),
            lines: rx,
            broken: false,
        })
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    /// False once a request failed in a way that leaves the stream unusable.
    pub fn is_healthy(&self) -> bool {
        !self.broken
    }

    /// Sends one request and waits up to `timeout` for its response.
    pub fn request(
        &mut self,
        id: &str,
        source: &str,
        timeout: Duration,
    ) -> Result<String, AdapterError> {
        let result = self.exchange(id, source, timeout);
        if result.is_err() {
            self.broken = true;
        }
        result
    }

    fn exchange(
        &mut self,
        id: &str,
        source: &str,
        timeout: Duration,
    ) -> Result<String, AdapterError> {
        let io_err = |source| AdapterError::Io {
            id: id.to_owned(),
            source,
        };
        let request = AdapterRequest {
            id: id.to_owned(),
            source: source.to_owned(),
        };
        let stdin = match self.stdin.as_mut() {
            Some(s) => s,
            None => return Err(self.exited(id)),
        };
        let mut line = serde_json::to_string(&request).expect("request serializes");
        line.push('\n');
        if let Err(e) = stdin.write_all(line.as_bytes()).and_then(|_| stdin.flush()) {
            return Err(if e.kind() == io::ErrorKind::BrokenPipe {
                self.exited(id)
            } else {
                io_err(e)
            });
        }

        let line = match self.lines.recv_timeout(timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(io_err(e)),
            Err(RecvTimeoutError::Timeout) => {
                return Err(AdapterError::Timeout {
                    id: id.to_owned(),
                    timeout,
                })
            }
            Err(RecvTimeoutError::Disconnected) => return Err(self.exited(id)),
        };
        let response: AdapterResponse =
            serde_json::from_str(&line).map_err(|_| AdapterError::Malformed {
                id: id.to_owned(),
                line: line.clone(),
            })?;
        if response.id != id {
            return Err(AdapterError::IdMismatch {
                id: id.to_owned(),
                got: response.id,
            });
        }
        Ok(response.summary)
    }

    fn exited(&mut self, id: &str) -> AdapterError {
        // stdout closed; give the process a moment to report its status
        let status = wait_briefly(&mut self.child, Duration::from_millis(500));
        AdapterError::Exited {
            id: id.to_owned(),
            status: match status {
                Some(s) => describe(s),
                None => "still running, output closed".to_owned(),
            },
        }
    }

    /// Closes the adapter's input and waits for it to exit, killing it after
    /// `grace`.
    pub fn close(mut self, grace: Duration) -> Option<ExitStatus> {
        self.stdin.take();
        let status = wait_briefly(&mut self.child, grace);
        if status.is_none() {
            let _ = self.child.kill();
            return self.child.wait().ok();
        }
        status
    }
}

impl Drop for AdapterProcess {
    fn drop(&mut self) {
        self.stdin.take();
        if wait_briefly(&mut self.child, Duration::from_millis(200)).is_none() {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}

fn wait_briefly(child: &mut Child, limit: Duration) -> Option<ExitStatus> {
    let step = Duration::from_millis(10);
    let mut waited = Duration::ZERO;
    loop {
        match child.try_wait() {
            Ok(Some(status)) => return Some(status),
            Ok(None) if waited < limit => {
                thread::sleep(step);
                waited += step;
            }
            _ => return None,
        }
    }
}

fn describe(status: ExitStatus) -> String {
    match status.code() {
        Some(code) => format!("exit code {code}"),
        None => "killed by signal".to_owned(),
    }
}

/// One-shot call: starts `command`, sends `source_text`, returns the summary
/// and shuts the process down.
pub fn run_external(
    source_text: &str,
    command: &str,
    timeout: Duration,
) -> Result<String, AdapterError> {
    let mut process = AdapterProcess::spawn(command)?;
    let summary = process.request("0", source_text, timeout);
    process.close(Duration::from_secs(1));
    summary
}
