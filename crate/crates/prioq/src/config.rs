//! `--config` files: `key = value` lines naming any command flag.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are flag names
//! without the leading dashes; underscores may stand in for dashes. The file's
//! values are spliced in ahead of the command-line arguments, and since every
//! flag takes its last occurrence, the command line wins.

use std::ffi::OsString;
use std::fs;

use crate::error::CliError;

pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::input(format!("config line {}: expected key = value", i + 1))
        })?;
        let key = key.trim().trim_start_matches('-').replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::input(format!(
                "config line {}: invalid key",
                i + 1
            )));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            return iter.next().cloned();
        }
        if let Some(path) = arg.to_str().and_then(|s| s.strip_prefix("--config=")) {
            return Some(path.into());
        }
    }
    None
}

/// Returns `args` with the entries of the referenced config file inserted
/// right after the subcommand name. Without `--config` it is the identity.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    if args.len() < 2 {
        return Ok(args);
    }
    let text = fs::read_to_string(&path).map_err(|e| {
        CliError::input(format!(
            "cannot read config {}: {e}",
            path.to_string_lossy()
        ))
    })?;
    let injected = parse(&text)?
        .into_iter()
        .map(|(k, v)| OsString::from(format!("--{k}={v}")));
    let mut out = args[..2].to_vec();
    out.extend(injected);
    out.extend(args[2..].iter().cloned());
    Ok(out)
}
