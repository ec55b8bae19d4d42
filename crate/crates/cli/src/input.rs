//! Machine configuration files and `--set` overrides.
//!
//! The file is TOML with one table per bath:
//!
//! ```toml
//! drive_freq = 0.5
//!
//! [hot]
//! temperature = 0.8
//! center = 1.5
//! width = 0.05
//! kappa = 0.01
//!
//! [cold]
//! temperature = 0.2
//! center = 0.75
//! width = 0.05
//! kappa = 0.01
//!
//! [mid]
//! temperature = 0.5
//! ```
//!
//! An optional `[wm]` table sets `omega0` and `mass` (both default to 1).

use std::path::Path;

use qtm_core::MachineConfig;
use toml::{Table, Value};

use crate::error::{CliError, Result};

const REQUIRED: [&str; 10] = [
    "hot.temperature",
    "hot.center",
    "hot.width",
    "hot.kappa",
    "cold.temperature",
    "cold.center",
    "cold.width",
    "cold.kappa",
    "mid.temperature",
    "drive_freq",
];

/// Reads a configuration file, or starts from an empty document.
pub fn load_table(path: Option<&Path>) -> Result<Table> {
    match path {
        None => Ok(Table::new()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", p.display())))?;
            text.parse::<Table>()
                .map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))
        }
    }
}

/// Applies one `key=value` override; dotted keys address nested tables.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Validation(format!("override `{assignment}` is not of the form key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = if let Ok(x) = raw.parse::<f64>() {
        Value::Float(x)
    } else if let Ok(b) = raw.parse::<bool>() {
        Value::Boolean(b)
    } else {
        Value::String(raw.to_string())
    };
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| CliError::Validation(format!("override `{assignment}` has an empty key")))?;
    let mut cursor = table;
    for part in parts {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Validation(format!("`{part}` in `{key}` is not a table")))?;
    }
    cursor.insert(last.to_string(), value);
    Ok(())
}

fn lookup<'a>(table: &'a Table, key: &str) -> Option<&'a Value> {
    let mut parts = key.split('.');
    let mut value = table.get(parts.next()?)?;
    for part in parts {
        value = value.as_table()?.get(part)?;
    }
    Some(value)
}

/// Every numeric field is a float; accept integers written without a decimal point.
fn floats_everywhere(value: &mut Value) {
    match value {
        Value::Integer(i) => *value = Value::Float(*i as f64),
        Value::Table(t) => t.iter_mut().for_each(|(_, v)| floats_everywhere(v)),
        Value::Array(a) => a.iter_mut().for_each(floats_everywhere),
        _ => {}
    }
}

/// Builds the machine from a document, naming the first missing field.
pub fn machine_from_table(table: &Table) -> Result<MachineConfig> {
    if let Some(missing) = REQUIRED.iter().find(|k| lookup(table, k).is_none()) {
        return Err(CliError::Validation(format!("missing field `{missing}`")));
    }
    let mut value = Value::Table(table.clone());
    floats_everywhere(&mut value);
    value
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Validation(format!("invalid configuration: {}", e.message())))
}

/// Loads the file, applies the overrides in order and builds the machine.
pub fn load_machine(path: Option<&Path>, overrides: &[String]) -> Result<MachineConfig> {
    let mut table = load_table(path)?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    machine_from_table(&table)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FILE: &str = r#"
drive_freq = 0.5
[hot]
temperature = 0.8
center = 1.5
width = 0.05
kappa = 0.01
[cold]
temperature = 0.2
center = 0.75
width = 0.05
kappa = 0.01
[mid]
temperature = 0.5
"#;

    #[test]
    fn full_file_parses() {
        let cfg = machine_from_table(&FILE.parse().unwrap()).unwrap();
        assert_eq!(cfg.hot.center, 1.5);
        assert_eq!(cfg.mid.gamma_m, 0.1);
        assert_eq!(cfg.wm.omega0, 1.0);
    }

    #[test]
    fn missing_field_is_named() {
        let text = FILE.replace("[mid]\ntemperature = 0.5\n", "");
        let err = machine_from_table(&text.parse().unwrap()).unwrap_err();
        assert!(err.to_string().contains("mid.temperature"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn overrides_replace_and_create() {
        let mut t: Table = FILE.parse().unwrap();
        apply_override(&mut t, "hot.temperature=0.9").unwrap();
        apply_override(&mut t, "wm.omega0 = 1").unwrap();
        let cfg = machine_from_table(&t).unwrap();
        assert_eq!(cfg.hot.temperature, 0.9);
        assert_eq!(cfg.wm.omega0, 1.0);
        assert!(apply_override(&mut t, "novalue").is_err());
        assert!(apply_override(&mut t, "drive_freq.x=1").is_err());
    }

    #[test]
    fn integers_become_floats() {
        let text = FILE.replace("center = 1.5", "center = 2");
        let cfg = machine_from_table(&text.parse().unwrap()).unwrap();
        assert_eq!(cfg.hot.center, 2.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = FILE.replace("kappa = 0.01\n[cold]", "kappa = 0.01\nkapa = 1.0\n[cold]");
        let err = machine_from_table(&text.parse().unwrap()).unwrap_err();
        assert!(err.to_string().contains("kapa"), "{err}");
    }
}
