use std::path::Path;

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

pub fn load(path: &Path) -> Result<Value, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))?;
    if !v.is_object() {
        return Err(format!("{} must hold a JSON object", path.display()));
    }
    Ok(v)
}

/// Merges a config object under the parsed flags: a key from the file wins
/// unless the same option was given on the command line. Returns the resolved
/// arguments and their JSON form, which is what gets recorded in outputs.
pub fn resolve<T: Serialize + DeserializeOwned>(
    parsed: T,
    matches: &ArgMatches,
    file: Option<&Value>,
) -> Result<(T, Value), String> {
    let mut v = serde_json::to_value(&parsed).map_err(|e| e.to_string())?;
    if let Some(Value::Object(file)) = file {
        let map = v
            .as_object_mut()
            .expect("argument structs serialize to objects");
        for (key, val) in file {
            // Flag spellings such as "N" or "max-states" name the same option.
            let k = key.replace('-', "_");
            let k = if map.contains_key(&k) {
                k
            } else {
                k.to_lowercase()
            };
            if !map.contains_key(&k) {
                return Err(format!("unknown config key {key:?}"));
            }
            if matches.value_source(&k) != Some(ValueSource::CommandLine) {
                map.insert(k, val.clone());
            }
        }
    }
    let resolved: T = serde_json::from_value(v).map_err(|e| format!("config: {e}"))?;
    let v = serde_json::to_value(&resolved).map_err(|e| e.to_string())?;
    Ok((resolved, v))
}
