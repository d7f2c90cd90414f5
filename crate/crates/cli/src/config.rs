//! `--config` files: `key = value` lines spliced into the argument list.

use std::fs;
use std::path::Path;

use crate::CliError;

/// Subcommands that take a second word (`fields list`, `verify thm2`, ...).
const TWO_WORD: &[&str] = &["fields", "curvature", "umbilic", "invert", "verify", "pipeline"];

/// Removes `--config PATH` from `args` and inserts the file's entries as
/// flags right after the subcommand words, so that flags typed later on the
/// command line override them.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let path = it.next().ok_or_else(|| CliError::Usage("--config needs a path".into()))?;
            config = Some(path);
        } else if let Some(path) = a.strip_prefix("--config=") {
            config = Some(path.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let entries = read(Path::new(&path))?;
    // rest[0] is the program name
    let mut at = 1;
    if let Some(first) = rest.get(1) {
        at = if TWO_WORD.contains(&first.as_str()) { 3 } else { 2 };
    }
    let at = at.min(rest.len());
    let tail = rest.split_off(at);
    rest.extend(entries);
    rest.extend(tail);
    Ok(rest)
}

fn read(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => out.push(format!("--{key}={value}")),
        }
    }
    Ok(out)
}
