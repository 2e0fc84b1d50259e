//! Operator configuration: a simple `key=value` config file, environment
//! variables, and flag values, resolved in flags > environment > file order.

use std::collections::BTreeMap;
use std::path::Path;

/// Environment variable naming the default server URL for client commands.
pub const ENV_SERVER: &str = "SEMBLOG_SERVER";
/// Environment variable overriding the annotation extension namespace.
pub const ENV_EXTENSION_NS: &str = "SEMBLOG_EXTENSION_NS";

/// Config file key for the server URL.
pub const KEY_SERVER: &str = "server";
/// Config file key for the extension namespace.
pub const KEY_EXTENSION_NS: &str = "extension_ns";

/// Parses `key=value` lines; `#` starts a comment, blank lines are ignored.
/// Later occurrences of a key win.
pub fn parse_config_file(text: &str) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    map
}

/// Loads the config file when a path is given and it exists; otherwise an
/// empty map.
pub fn load_config_file(path: Option<&Path>) -> BTreeMap<String, String> {
    match path {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => parse_config_file(&text),
            Err(_) => BTreeMap::new(),
        },
        None => BTreeMap::new(),
    }
}

/// Flag value, then environment, then config file.
pub fn resolve(
    flag: Option<String>,
    env_key: &str,
    file: &BTreeMap<String, String>,
    file_key: &str,
) -> Option<String> {
    flag.or_else(|| std::env::var(env_key).ok())
        .or_else(|| file.get(file_key).cloned())
}
