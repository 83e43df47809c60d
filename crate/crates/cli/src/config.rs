//! Key-value config files mirroring command-line flags.
//!
//! ```text
//! # comments and blank lines are ignored
//! seed = 7
//! json = true
//! n = 100000
//! ```
//!
//! Each `key = value` becomes `--key value`; `true` becomes a bare `--key`
//! and `false` drops it. Flags given on the command line win.

use anyhow::{bail, Context, Result};

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", i + 1);
        };
        let key = k.trim();
        if key.is_empty() || key.starts_with('-') || key.contains(char::is_whitespace) {
            bail!("config line {}: bad key `{key}`", i + 1);
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn present(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    args.iter()
        .any(|a| *a == flag || a.strip_prefix(&flag).is_some_and(|r| r.starts_with('=')))
}

/// Appends config entries to `args` unless already given, after removing
/// the `--config` flag itself.
pub fn expand(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().context("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    for (k, v) in parse(&text)? {
        if present(&rest, &k) {
            continue;
        }
        match v.as_str() {
            "true" => rest.push(format!("--{k}")),
            "false" => {}
            _ => {
                rest.push(format!("--{k}"));
                rest.push(v);
            }
        }
    }
    Ok(rest)
}
