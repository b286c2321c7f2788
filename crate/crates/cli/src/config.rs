//! `--config <file.json>`: a JSON object whose keys are long flag names.
//! Top-level scalar keys apply to every subcommand; an object under a
//! subcommand's name applies to that subcommand only. Flags given on the
//! command line win over the file.

use std::ffi::OsString;

use serde_json::{Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("--config needs a file path")]
    MissingPath,
    #[error("cannot read config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("config {path} is not valid JSON: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("config must be a JSON object")]
    NotObject,
    #[error("config key {0:?} has an unsupported value")]
    BadValue(String),
}

/// Removes `--config` from `args` and splices the file's flags in right
/// after the subcommand name.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--config") => path = Some(it.next().ok_or(ConfigError::MissingPath)?),
            Some(s) if s.starts_with("--config=") => path = Some(OsString::from(&s["--config=".len()..])),
            _ => rest.push(a),
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let path = path.to_string_lossy().into_owned();
    let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Read {
        path: path.clone(),
        source,
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path, source })?;
    let Value::Object(root) = value else {
        return Err(ConfigError::NotObject);
    };

    // args[0] is the binary; the subcommand is the first bare word after it
    let Some(at) = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 1)
    else {
        return Ok(rest);
    };
    let sub = rest[at].to_string_lossy().into_owned();
    let mut flags = Vec::new();
    for (k, v) in &root {
        if !v.is_object() {
            push_flag(&mut flags, k, v)?;
        }
    }
    if let Some(Value::Object(section)) = root.get(&sub) {
        append_section(&mut flags, section)?;
    }
    let tail = rest.split_off(at + 1);
    rest.extend(flags);
    rest.extend(tail);
    Ok(rest)
}

fn append_section(out: &mut Vec<OsString>, section: &Map<String, Value>) -> Result<(), ConfigError> {
    for (k, v) in section {
        push_flag(out, k, v)?;
    }
    Ok(())
}

fn scalar(k: &str, v: &Value) -> Result<String, ConfigError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(ConfigError::BadValue(k.into())),
    }
}

fn push_flag(out: &mut Vec<OsString>, key: &str, v: &Value) -> Result<(), ConfigError> {
    let flag = format!("--{}", key.replace('_', "-"));
    match v {
        Value::Bool(true) => out.push(flag.into()),
        Value::Bool(false) | Value::Null => {}
        Value::Array(items) => {
            let joined = items
                .iter()
                .map(|x| scalar(key, x))
                .collect::<Result<Vec<_>, _>>()?
                .join(",");
            out.push(flag.into());
            out.push(joined.into());
        }
        other => {
            out.push(flag.into());
            out.push(scalar(key, other)?.into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = std::env::temp_dir().join(format!("pursuit-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("c.json");
        std::fs::write(
            &p,
            r#"{"k": 3, "simulate": {"seeds": [1, 2], "full_traces": true, "quiet": false}, "build": {"green": 9}}"#,
        )
        .unwrap();
        let merged = merge(os(&[
            "pursuit",
            "--config",
            p.to_str().unwrap(),
            "simulate",
            "--k",
            "4",
        ]))
        .unwrap();
        assert_eq!(
            merged,
            os(&[
                "pursuit",
                "simulate",
                "--k",
                "3",
                "--full-traces",
                "--seeds",
                "1,2",
                "--k",
                "4"
            ])
        );
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn no_config_is_identity() {
        let a = os(&["pursuit", "build", "--green", "5"]);
        assert_eq!(merge(a.clone()).unwrap(), a);
    }
}
