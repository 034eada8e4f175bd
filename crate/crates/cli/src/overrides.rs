//! `--set key=value` overrides applied to a JSON document before it is
//! deserialised. Keys are dotted paths; array elements use their index.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub path: Vec<String>,
    pub value: Value,
}

impl std::str::FromStr for Override {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (key, raw) = s
            .split_once('=')
            .ok_or_else(|| format!("override `{s}` is not key=value"))?;
        let path: Vec<String> = key.trim().split('.').map(str::to_owned).collect();
        if path.iter().any(String::is_empty) {
            return Err(format!("override key `{key}` has an empty segment"));
        }
        // bare words that are not valid JSON are taken as strings
        let raw = raw.trim();
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
        Ok(Self { path, value })
    }
}

fn set(root: &mut Value, ov: &Override) -> Result<(), CliError> {
    let mut node = root;
    let key = ov.path.join(".");
    for seg in &ov.path {
        node = match node {
            Value::Object(map) => map
                .get_mut(seg)
                .ok_or_else(|| CliError::Usage(format!("--set {key}: no field `{seg}`")))?,
            Value::Array(items) => {
                let i: usize = seg.parse().map_err(|_| {
                    CliError::Usage(format!("--set {key}: `{seg}` is not an index"))
                })?;
                items.get_mut(i).ok_or_else(|| {
                    CliError::Usage(format!("--set {key}: index {i} out of range"))
                })?
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "--set {key}: `{seg}` is not a container"
                )))
            }
        };
    }
    *node = ov.value.clone();
    Ok(())
}

/// Round-trips `base` through JSON with the overrides applied.
pub fn apply<T: Serialize + DeserializeOwned>(
    base: &T,
    overrides: &[Override],
) -> Result<T, CliError> {
    if overrides.is_empty() {
        return serde_json::to_value(base)
            .and_then(serde_json::from_value)
            .map_err(|e| CliError::Usage(e.to_string()));
    }
    let mut doc = serde_json::to_value(base).map_err(|e| CliError::Usage(e.to_string()))?;
    for ov in overrides {
        set(&mut doc, ov)?;
    }
    serde_json::from_value(doc).map_err(|e| CliError::Usage(format!("after --set: {e}")))
}
