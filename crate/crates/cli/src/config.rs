//! `--config FILE`: a flat JSON object whose keys are flag names. Its entries
//! are inserted as flags right after the subcommand, ahead of the user's own
//! flags; a repeated flag keeps its last value, so the command line wins.

use anyhow::{bail, Context, Result};
use serde_json::Value;

/// Subcommands that take a nested target (`verify cuts`, `audit subspace`).
const NESTED: [&str; 2] = ["verify", "audit"];

pub fn splice(mut argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = take_config_path(&mut argv)? else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read config file {path}"))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("config file {path} is not valid JSON"))?;
    let Value::Object(map) = value else {
        bail!("config file {path} must hold a JSON object of flag values");
    };

    // position just past the subcommand (and its target, if nested)
    let mut at = 1;
    let mut words = Vec::new();
    while at < argv.len() && words.len() < 2 {
        let tok = &argv[at];
        if tok.starts_with('-') {
            break;
        }
        words.push(tok.clone());
        at += 1;
        if !NESTED.contains(&words[0].as_str()) {
            break;
        }
    }
    let Some(sub) = words.first() else {
        bail!("--config needs a subcommand to apply to");
    };

    let mut flags = Vec::new();
    for (key, value) in map {
        if key == "family" {
            match value.as_str() {
                Some(f) if f == sub => continue,
                _ => bail!("config file {path} is for family {value}, not `{sub}`"),
            }
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => flags.push(flag),
            Value::Number(n) => flags.extend([flag, n.to_string()]),
            Value::String(s) => flags.extend([flag, s]),
            Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                flags.extend([flag, parts.join(",")]);
            }
            Value::Object(_) => bail!("config key `{key}` must be flat, not an object"),
        }
    }
    argv.splice(at..at, flags);
    Ok(argv)
}

fn take_config_path(argv: &mut Vec<String>) -> Result<Option<String>> {
    let mut found = None;
    let mut i = 1;
    while i < argv.len() {
        if argv[i] == "--" {
            break;
        }
        if argv[i] == "--config" {
            if i + 1 >= argv.len() {
                bail!("--config needs a file name");
            }
            found = Some(argv.remove(i + 1));
            argv.remove(i);
        } else if let Some(p) = argv[i].strip_prefix("--config=") {
            found = Some(p.to_string());
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn flags_go_after_the_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"family": "sum-game", "eps": 0.3, "trials": 5, "k": [2, 3]}"#).unwrap();
        let out = splice(argv(&format!("bin --config {} sum-game --eps 0.1", path.display()))).unwrap();
        assert_eq!(out, argv("bin sum-game --eps 0.3 --k 2,3 --trials 5 --eps 0.1"));

        let out = splice(argv(&format!("bin verify cuts --config={} --input x", path.display())));
        assert!(out.is_err(), "family mismatch is rejected");
    }

    #[test]
    fn nested_subcommands() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"c_size": 2}"#).unwrap();
        let out = splice(argv(&format!("bin audit hypergraph --input r.json --config {}", path.display()))).unwrap();
        assert_eq!(out, argv("bin audit hypergraph --c-size 2 --input r.json"));
    }

    #[test]
    fn no_config_is_untouched() {
        assert_eq!(splice(argv("bin sum-game --eps 0.1")).unwrap(), argv("bin sum-game --eps 0.1"));
    }
}
