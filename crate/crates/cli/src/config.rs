//! JSON configuration files. Keys are flag names without the leading
//! dashes; values are strings, numbers or booleans. Flags given on the
//! command line win over the file.

use std::ffi::OsString;
use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// Reads `path` and returns the extra arguments it contributes.
pub fn config_args(path: &Path, argv: &[OsString]) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    let json: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
    json_args(&json, argv)
}

fn given(argv: &[OsString], flag: &str) -> bool {
    let eq = format!("{flag}=");
    argv.iter().filter_map(|a| a.to_str()).any(|a| a == flag || a.starts_with(&eq))
}

/// Converts a JSON object into `--key value` pairs, skipping keys whose
/// flag already appears in `argv`.
pub fn json_args(json: &Value, argv: &[OsString]) -> Result<Vec<OsString>, CliError> {
    let obj = json
        .as_object()
        .ok_or_else(|| CliError::Input("config must be a JSON object".into()))?;
    let mut out = Vec::new();
    for (key, value) in obj {
        if key == "config" {
            return Err(CliError::Input("config files cannot include other config files".into()));
        }
        let flag = format!("--{key}");
        if given(argv, &flag) {
            continue;
        }
        match value {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Number(n) => {
                out.push(format!("{flag}={n}").into());
            }
            Value::String(s) => {
                out.push(format!("{flag}={s}").into());
            }
            other => {
                return Err(CliError::Input(format!("config key {key:?}: unsupported value {other}")));
            }
        }
    }
    Ok(out)
}
