//! Flag presets from a TOML file.
//!
//! Top-level keys apply to every subcommand that has a flag of that name;
//! keys under a `[subcommand]` table apply to that subcommand only and must
//! name one of its flags. Presets are inserted before the user's own flags,
//! and since later occurrences win, the command line overrides the file.
//!
//! ```toml
//! trunc = 120
//!
//! [e3-sweep]
//! m = 1
//! g-max = 20
//! ```

use clap::CommandFactory;
use toml::{Table, Value};

use crate::commands::Failure;
use crate::Cli;

/// Remove `--config` from `args` and splice in the presets it names.
pub fn apply(mut args: Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(path) = take_config(&mut args)? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::Usage(format!("cannot read config {path}: {e}")))?;
    let table: Table = text
        .parse()
        .map_err(|e| Failure::Usage(format!("config {path}: {e}")))?;

    // the subcommand is the first positional argument
    let Some(pos) = args.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 1) else {
        return Ok(args);
    };
    let sub = args[pos].clone();
    let cmd = Cli::command();
    let Some(sub_cmd) = cmd.find_subcommand(&sub) else {
        return Ok(args);
    };
    let accepted: Vec<String> = sub_cmd
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect();

    let mut presets = Vec::new();
    for (key, value) in &table {
        if value.is_table() || !accepted.contains(key) {
            continue;
        }
        push_flag(&mut presets, key, value, &path)?;
    }
    if let Some(section) = table.get(&sub) {
        let section = section
            .as_table()
            .ok_or_else(|| Failure::Usage(format!("config {path}: [{sub}] must be a table")))?;
        for (key, value) in section {
            if !accepted.contains(key) {
                return Err(Failure::Usage(format!("config {path}: {sub} has no flag --{key}")));
            }
            push_flag(&mut presets, key, value, &path)?;
        }
    }
    args.splice(pos + 1..pos + 1, presets);
    Ok(args)
}

fn take_config(args: &mut Vec<String>) -> Result<Option<String>, Failure> {
    let mut found = None;
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--" {
            break;
        }
        if let Some(v) = args[i].strip_prefix("--config=") {
            found = Some(v.to_string());
            args.remove(i);
        } else if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err(Failure::Usage("--config needs a path".into()));
            }
            found = Some(args.remove(i + 1));
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

fn push_flag(out: &mut Vec<String>, key: &str, value: &Value, path: &str) -> Result<(), Failure> {
    let text = match value {
        Value::Boolean(true) => {
            out.push(format!("--{key}"));
            return Ok(());
        }
        Value::Boolean(false) => return Ok(()),
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::Integer(i) => Ok(i.to_string()),
                Value::Float(f) => Ok(f.to_string()),
                Value::String(s) => Ok(s.clone()),
                _ => Err(Failure::Usage(format!("config {path}: unsupported list item in {key}"))),
            })
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        _ => return Err(Failure::Usage(format!("config {path}: unsupported value for {key}"))),
    };
    out.push(format!("--{key}={text}"));
    Ok(())
}
