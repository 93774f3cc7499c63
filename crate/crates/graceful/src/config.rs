//! Scenario files.
//!
//! A scenario file is TOML whose keys mirror [`ScenarioConfig`]. Every key is
//! optional: the file is laid over the default intersection, so an empty
//! file is the default scenario and `[h]\nintent = 1e9` only changes H's
//! intent.

use std::fs;
use std::path::Path;

use graceful_core::ScenarioConfig;
use toml::{Table, Value};

use crate::error::{Error, Result};

/// A validated scenario together with non-fatal remarks about it.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedScenario {
    pub config: ScenarioConfig,
    pub warnings: Vec<String>,
}

pub fn load(path: &Path) -> Result<LoadedScenario> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    parse_named(&text, &path.display().to_string())
}

pub fn parse(text: &str) -> Result<LoadedScenario> {
    parse_named(text, "<scenario>")
}

fn parse_named(text: &str, origin: &str) -> Result<LoadedScenario> {
    let overrides: Table = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        Error::Parse {
            origin: origin.to_string(),
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    let mut merged = defaults_table();
    overlay(&mut merged, overrides);
    let config: ScenarioConfig = Value::Table(merged).try_into().map_err(|e: toml::de::Error| Error::Schema {
        origin: origin.to_string(),
        message: e.message().trim().to_string(),
    })?;
    let violations = config.validate();
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    let warnings = config.warnings();
    Ok(LoadedScenario { config, warnings })
}

/// TOML text that loads back to exactly `config`.
pub fn to_toml(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("scenario is representable in TOML")
}

pub fn save(config: &ScenarioConfig, path: &Path) -> Result<()> {
    fs::write(path, to_toml(config)).map_err(Error::io(path))
}

fn defaults_table() -> Table {
    match Value::try_from(ScenarioConfig::default()).expect("default scenario serialises") {
        Value::Table(t) => t,
        _ => unreachable!("a struct serialises to a table"),
    }
}

/// Tables merge key by key; anything else replaces the base value. A
/// replaced tagged table (such as a strategy) is taken whole, so switching
/// `kind` never inherits stale fields.
fn overlay(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(t)) if !t.contains_key("kind") => overlay(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}
