#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub const DANCER: &str = env!("CARGO_BIN_EXE_dancer");
pub const ADAPTER: &str = env!("CARGO_BIN_EXE_dancer-identity-adapter");

pub fn dancer(args: &[&str]) -> Output {
    Command::new(DANCER)
        .args(args)
        .env_remove("DANCER_WORKERS")
        .output()
        .expect("dancer binary runs")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Shell-quoted path, usable inside an `external:` summarizer spec.
pub fn quoted(path: &str) -> String {
    format!("'{}'", path.replace('\'', r"'\''"))
}
