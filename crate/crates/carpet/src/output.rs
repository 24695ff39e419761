//! Report emission, thread configuration and exit-code mapping.

use std::fs;
use std::io::Write;
use std::path::Path;

use carpet_core::Error;
use serde_json::Value;

use crate::{Cli, Command};

pub struct Outcome {
    pub passed: bool,
    pub report: Value,
    pub svg: Option<String>,
}

/// Honours `CARPET_THREADS` by sizing the global worker pool.
pub fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CARPET_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CARPET_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Writes `contents` to a sibling temporary file and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    {
        let mut f = fs::File::create(tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

pub fn emit(cli: &Cli, outcome: &Outcome) -> std::io::Result<()> {
    // a plot with no destination prints the figure itself
    if let (Command::Plot(_), None, None, Some(svg)) = (&cli.command, &cli.svg, &cli.out, &outcome.svg) {
        return std::io::stdout().write_all(svg.as_bytes());
    }
    let mut json = serde_json::to_string_pretty(&outcome.report).map_err(std::io::Error::other)?;
    json.push('\n');
    match &cli.out {
        Some(p) => write_atomic(p, &json)?,
        None => std::io::stdout().write_all(json.as_bytes())?,
    }
    if let Some(p) = &cli.svg {
        match &outcome.svg {
            Some(svg) => write_atomic(p, svg)?,
            None => eprintln!("note: this run produces no figure; --svg ignored"),
        }
    }
    Ok(())
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BadBase(_)
        | Error::BadDigit { .. }
        | Error::OutOfUnitInterval(_)
        | Error::Parse(_)
        | Error::Invalid(_)
        | Error::NotHyperbolic(_)
        | Error::BaseMismatch(..) => 2,
        _ => 1,
    }
}
