//! Key=value configuration files merged into the command line.
//!
//! Each non-empty, non-comment line `key = value` becomes the flag
//! `--key value`. The keys `command` and `figure` fill the subcommand and
//! its positional figure number when the command line omits them. Config
//! flags are placed before the user's flags, and every option keeps its
//! last occurrence, so the command line wins on conflict.

use std::fs;
use std::path::Path;

/// Parsed `key = value` pairs in file order.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", n + 1))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", n + 1));
        }
        out.push((key, v.trim().trim_matches('"').to_string()));
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Vec<(String, String)>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse_config(&text)
}

const SUBCOMMANDS: [&str; 4] = ["analyze", "figure", "cc-limit", "reduce"];
const SWITCHES: [&str; 1] = ["paranoid"];

/// Removes `--config PATH` / `--config=PATH` from `args`, returning its value.
fn take_config(args: &mut Vec<String>) -> Result<Option<String>, String> {
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err("--config needs a path".into());
            }
            let v = args.remove(i + 1);
            args.remove(i);
            return Ok(Some(v));
        }
        if let Some(v) = args[i].strip_prefix("--config=") {
            let v = v.to_string();
            args.remove(i);
            return Ok(Some(v));
        }
        i += 1;
    }
    Ok(None)
}

/// Rewrites the raw argument list with the config file expanded.
pub fn merge_args(mut args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = take_config(&mut args)? else {
        return Ok(args);
    };
    let pairs = load_config(Path::new(&path))?;
    let lookup = |key: &str| pairs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.clone());
    let sub_pos = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str()));
    let (head, mut tail, command) = match sub_pos {
        Some(p) => (args[..=p].to_vec(), args[p + 1..].to_vec(), args[p].clone()),
        None => {
            let cmd = lookup("command").ok_or("no subcommand given on the command line or in the config")?;
            let head = vec![args[0].clone(), cmd.clone()];
            (head, args[1..].to_vec(), cmd)
        }
    };
    let mut injected = Vec::new();
    if command == "figure" {
        let has_positional = tail.first().is_some_and(|a| !a.starts_with('-'));
        if !has_positional {
            let fig = lookup("figure").ok_or("figure number missing")?;
            injected.push(fig);
        } else {
            injected.push(tail.remove(0));
        }
    }
    for (k, v) in &pairs {
        if k == "command" || k == "figure" {
            continue;
        }
        if SWITCHES.contains(&k.as_str()) {
            match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => injected.push(format!("--{k}")),
                "false" | "no" | "0" => {}
                other => return Err(format!("config key {k}: expected a boolean, got '{other}'")),
            }
        } else {
            injected.push(format!("--{k}={v}"));
        }
    }
    let mut out = head;
    out.extend(injected);
    out.extend(tail);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parses_pairs_and_comments() {
        let p = parse_config("# top\ncase = convex\n\nbeta=0.1 # trailing\n").unwrap();
        assert_eq!(p, vec![("case".into(), "convex".into()), ("beta".into(), "0.1".into())]);
        assert!(parse_config("oops").is_err());
    }

    #[test]
    fn flags_follow_config_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "command = analyze\ncase = convex\nbeta = 0.1\necc = 0\n").unwrap();
        let args = s(&["bin", "--config", path.to_str().unwrap(), "--beta", "0.2"]);
        let merged = merge_args(args).unwrap();
        assert_eq!(merged[1], "analyze");
        let last_beta = merged.iter().rposition(|a| a.starts_with("--beta")).unwrap();
        assert_eq!(merged[last_beta], "--beta");
        assert_eq!(merged[last_beta + 1], "0.2");
    }
}
