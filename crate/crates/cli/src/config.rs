//! `--config` support: TOML values become command-line flags unless the
//! flag is already given.
//!
//! Keys may sit at the top level (shared by every subcommand that accepts
//! them) or in a table named after the subcommand, which takes precedence.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Command;

fn value_strings(key: &str, value: &toml::Value) -> Result<Vec<String>> {
    Ok(match value {
        toml::Value::String(s) => vec![s.clone()],
        toml::Value::Integer(i) => vec![i.to_string()],
        toml::Value::Float(f) => vec![f.to_string()],
        toml::Value::Boolean(b) => vec![b.to_string()],
        toml::Value::Array(items) => {
            let mut out = Vec::new();
            for item in items {
                out.extend(value_strings(key, item)?);
            }
            out
        }
        _ => bail!("config key {key:?} has an unsupported value type"),
    })
}

fn flag_given(args: &[String], long: &str) -> bool {
    let flag = format!("--{long}");
    let prefix = format!("{flag}=");
    args.iter().any(|a| *a == flag || a.starts_with(&prefix))
}

/// Removes `--config <path>` from `args` and returns the path.
pub fn take_config_path(args: &mut Vec<String>) -> Result<Option<String>> {
    let Some(i) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(None);
    };
    let arg = args.remove(i);
    if let Some(path) = arg.strip_prefix("--config=") {
        return Ok(Some(path.to_string()));
    }
    if i >= args.len() {
        bail!("--config requires a path");
    }
    Ok(Some(args.remove(i)))
}

/// Appends flags from the config file for the subcommand named in `args`.
pub fn inject(args: &mut Vec<String>, path: &Path, cli: &Command) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let table: toml::Table = text.parse().with_context(|| format!("parsing config {}", path.display()))?;
    let Some(sub) = args.iter().skip(1).find_map(|a| cli.find_subcommand(a)) else {
        return Ok(());
    };
    let known: BTreeMap<&str, bool> = sub
        .get_arguments()
        .filter_map(|a| a.get_long().map(|l| (l, a.get_num_args().is_some_and(|n| n.max_values() > 1))))
        .collect();

    let mut values: BTreeMap<String, toml::Value> = BTreeMap::new();
    for (key, value) in &table {
        if value.is_table() {
            if cli.find_subcommand(key).is_none() {
                bail!("config table [{key}] does not name a subcommand");
            }
            continue;
        }
        let shared_somewhere = cli.get_subcommands().any(|s| s.get_arguments().any(|a| a.get_long() == Some(key)));
        if !shared_somewhere {
            bail!("unknown config key {key:?}");
        }
        if known.contains_key(key.as_str()) {
            values.insert(key.clone(), value.clone());
        }
    }
    if let Some(section) = table.get(sub.get_name()).and_then(toml::Value::as_table) {
        for (key, value) in section {
            if !known.contains_key(key.as_str()) {
                bail!("unknown key {key:?} in [{}]", sub.get_name());
            }
            values.insert(key.clone(), value.clone());
        }
    }
    for (key, value) in values {
        if flag_given(args, &key) {
            continue;
        }
        let items = value_strings(&key, &value)?;
        if known[key.as_str()] {
            args.push(format!("--{key}"));
            args.extend(items);
        } else {
            for item in items {
                args.push(format!("--{key}={item}"));
            }
        }
    }
    Ok(())
}
