//! Command-line tools and the read-only HTTP service for staircodes.

pub mod commands;
pub mod server;

use std::fmt;
use std::path::Path;

use staircode_core::{io, AugmentedMetricSpace, Error, StaircodeDocument};

/// A failed command together with its process exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

pub const EXIT_PARSE: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Failure { code: EXIT_PARSE, message: message.into() }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVARIANT, message: message.into() }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        Failure { code: EXIT_MISMATCH, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::invariant(e.to_string()),
            _ => Failure::parse(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

/// Load a dataset from a JSON document or a points CSV, with an optional
/// separate distance CSV.
pub fn load_dataset(path: &Path, dist: Option<&Path>) -> Result<AugmentedMetricSpace, Failure> {
    let text = read(path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('{');
    if is_json {
        if dist.is_some() {
            return Err(Failure::parse("--dist only applies to CSV datasets"));
        }
        return Ok(io::parse_dataset_json(&text)?);
    }
    let points = io::parse_points_csv(&text)?;
    let rows = match dist {
        Some(p) => Some(io::parse_distance_csv(&read(p)?, points.ids.len())?),
        None => None,
    };
    Ok(io::assemble(points, rows)?)
}

pub fn load_document(path: &Path) -> Result<StaircodeDocument, Failure> {
    Ok(StaircodeDocument::from_json(&read(path)?)?)
}
