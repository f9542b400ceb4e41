//! File loading, seed parsing and CSV output shared by the subcommands.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Writes `text` to `path`, or to stdout without one.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Up to 64 hex digits, left-padded with zeros to 32 bytes.
pub fn parse_seed(s: &str) -> Result<[u8; 32], String> {
    let s = s.strip_prefix("0x").unwrap_or(s);
    if s.is_empty() || s.len() > 64 {
        return Err(format!("seed must have 1 to 64 hex digits, got {}", s.len()));
    }
    let padded = format!("{s:0>64}");
    let mut out = [0u8; 32];
    hex::decode_to_slice(&padded, &mut out).map_err(|e| format!("invalid hex seed: {e}"))?;
    Ok(out)
}

/// A vector given on the command line as comma-separated reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Floats(pub Vec<f64>);

pub fn parse_vector(s: &str) -> Result<Floats, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}")))
        .collect::<Result<_, _>>()
        .map(Floats)
}

pub fn check_len(what: &str, v: &[f64], want: usize) -> Result<()> {
    if v.len() != want {
        bail!("{what} has {} entries, expected {want}", v.len());
    }
    Ok(())
}

/// `name1, name2, …` column headers.
pub fn numbered(name: &str, k: usize) -> impl Iterator<Item = String> + '_ {
    (1..=k).map(move |i| format!("{name}{i}"))
}
