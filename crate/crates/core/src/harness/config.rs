//! Flat `key = value` configuration files.
//!
//! Each key names a long flag of the invoked command without its dashes, e.g.
//! `p = 0.75` or `seed = 42`. Values from the file are used only for flags
//! absent from the command line, so flags override the file and the file
//! overrides built-in defaults. `key = true` turns on a switch; `key = false`
//! leaves it off. Blank lines and lines starting with `#` are ignored.

use std::ffi::OsString;
use std::path::Path;

use crate::error::{Error, Result};

/// Parsed `(key, value)` pairs in file order.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", no + 1)))?;
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(Error::Parse(format!("config line {}: bad key {key:?}", no + 1)));
        }
        pairs.push((key.replace('_', "-"), value.trim().to_string()));
    }
    Ok(pairs)
}

fn flag_present(args: &[OsString], flag: &str) -> bool {
    let eq = format!("{flag}=");
    args.iter().any(|a| {
        let a = a.to_string_lossy();
        a == flag || a.starts_with(&eq)
    })
}

/// Value of `--config` on the command line, if any.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

/// Append file settings for flags the command line leaves unset.
pub fn merge_into_args(mut args: Vec<OsString>, pairs: &[(String, String)]) -> Vec<OsString> {
    for (key, value) in pairs {
        let flag = format!("--{key}");
        if flag_present(&args, &flag) {
            continue;
        }
        match value.as_str() {
            "true" => args.push(flag.into()),
            "false" => {}
            _ => {
                args.push(flag.into());
                args.push(value.into());
            }
        }
    }
    args
}

/// Read the file named by `--config` and fold it into `args`.
pub fn apply_config_file(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))?;
    let pairs = parse_config(&text)?;
    Ok(merge_into_args(args, &pairs))
}
