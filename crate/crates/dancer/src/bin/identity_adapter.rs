//! Reference adapter: answers every request with its source text.
//!
//! The failure modes exist to exercise error handling in the pipeline.

use std::io::{self, BufRead, Write};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use dancer::adapter::{AdapterRequest, AdapterResponse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Echo the source as the summary.
    Identity,
    /// Echo the source prefixed with the request id.
    Tag,
    /// Answer `--after` requests, then exit with status 3.
    Crash,
    /// Answer with a line that is not JSON.
    Garbage,
    /// Never answer.
    Silent,
}

#[derive(Debug, Parser)]
#[command(
    name = "dancer-identity-adapter",
    about = "Echoing summarizer adapter for testing"
)]
struct Args {
    #[arg(long, value_enum, default_value = "identity")]
    mode: Mode,
    /// Requests answered before a crash.
    #[arg(long, default_value_t = 0)]
    after: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let stdin = io::stdin();
    let mut stdout = io::stdout().lock();
    for (served, line) in stdin.lock().lines().enumerate() {
        let Ok(line) = line else {
            return ExitCode::FAILURE;
        };
        if line.trim().is_empty() {
            continue;
        }
        let request: AdapterRequest = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("dancer-identity-adapter: bad request: {e}");
                return ExitCode::FAILURE;
            }
        };
        let summary = match args.mode {
            Mode::Identity => request.source,
            Mode::Tag => format!("[{}] {}", request.id, request.source),
            Mode::Crash if served >= args.after => return ExitCode::from(3),
            Mode::Crash => request.source,
            Mode::Garbage => {
                let _ = writeln!(stdout, "not json");
                let _ = stdout.flush();
                continue;
            }
            Mode::Silent => {
                std::thread::sleep(Duration::from_secs(3600));
                continue;
            }
        };
        let response = AdapterResponse {
            id: request.id,
            summary,
        };
        let written = serde_json::to_writer(&mut stdout, &response)
            .map_err(io::Error::from)
            .and_then(|_| stdout.write_all(b"\n"))
            .and_then(|_| stdout.flush());
        if written.is_err() {
            return ExitCode::FAILURE;
        }
    }
    ExitCode::SUCCESS
}
