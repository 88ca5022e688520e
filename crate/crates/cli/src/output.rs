//! Output plumbing: format selection, json envelopes, csv rows.

use crate::{CliError, RunConfig};
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Jsonl,
    Csv,
    Text,
}

/// Envelope for single-document json output; keeps (command, params,
/// seed, schema) in the payload so identical runs serialize identically.
#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    pub params: serde_json::Value,
    pub seed: u64,
    pub data: T,
}

pub fn envelope<T: Serialize>(
    command: &'static str,
    params: serde_json::Value,
    seed: u64,
    data: T,
) -> Envelope<T> {
    Envelope {
        schema_version: 1,
        command,
        params,
        seed,
        data,
    }
}

pub struct Sink {
    out: Box<dyn Write>,
}

impl Sink {
    pub fn new(config: &RunConfig) -> Result<Sink, CliError> {
        let out: Box<dyn Write> = match &config.output {
            Some(path) => Box::new(
                std::fs::File::create(path)
                    .map_err(|e| CliError::Resource(format!("cannot open {path:?}: {e}")))?,
            ),
            None => Box::new(std::io::stdout()),
        };
        Ok(Sink { out })
    }

    pub fn line(&mut self, s: &str) -> Result<(), CliError> {
        writeln!(self.out, "{s}").map_err(|e| CliError::Resource(format!("write failed: {e}")))
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let s = serde_json::to_string(value)
            .map_err(|e| CliError::Resource(format!("serialize failed: {e}")))?;
        self.line(&s)
    }
}
