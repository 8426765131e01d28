//! Flat `key=value` run manifests.
//!
//! ```text
//! command=plan
//! tool_version=0.1.0
//! seed=none
//! config.field.range=7.0
//! ...
//! artifact.0=out/placement.csv
//! ```
//!
//! `config.*` values are TOML literals, so the resolved configuration can be
//! rebuilt exactly from the file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::Config;
use crate::error::{CliError, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub config: Config,
    /// `None` for commands without randomness.
    pub seed: Option<u64>,
    pub artifacts: Vec<PathBuf>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(command: &str, config: Config, seed: Option<u64>) -> Self {
        Self {
            command: command.to_owned(),
            config,
            seed,
            artifacts: Vec::new(),
            tool_version: TOOL_VERSION.to_owned(),
        }
    }

    pub fn render(&self) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(out, "command={}", self.command);
        let _ = writeln!(out, "tool_version={}", self.tool_version);
        match self.seed {
            Some(seed) => {
                let _ = writeln!(out, "seed={seed}");
            }
            None => out.push_str("seed=none\n"),
        }
        let mut flat = Vec::new();
        flatten("config", &self.config.to_toml_table()?, &mut flat);
        for (key, value) in flat {
            let _ = writeln!(out, "{key}={value}");
        }
        for (i, path) in self.artifacts.iter().enumerate() {
            let _ = writeln!(out, "artifact.{i}={}", path.display());
        }
        Ok(out)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, message: String| CliError::Parse {
            path: origin.to_owned(),
            message: format!("line {line}: {message}"),
        };
        let mut command = None;
        let mut tool_version = String::new();
        let mut seed = None;
        let mut artifacts = Vec::new();
        let mut table = toml::Table::new();

        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, "expected key=value".into()))?;
            match key {
                "command" => command = Some(value.to_owned()),
                "tool_version" => tool_version = value.to_owned(),
                "seed" if value == "none" => seed = None,
                "seed" => {
                    seed = Some(
                        value
                            .parse()
                            .map_err(|_| err(line_no, format!("invalid seed `{value}`")))?,
                    )
                }
                _ if key.starts_with("artifact.") => artifacts.push(PathBuf::from(value)),
                _ if key.starts_with("config.") => {
                    let parsed: toml::Table = toml::from_str(&format!("v = {value}"))
                        .map_err(|e| err(line_no, format!("invalid value for {key}: {e}")))?;
                    let value = parsed.get("v").cloned().expect("parsed key present");
                    insert_path(&mut table, &key["config.".len()..], value)
                        .map_err(|m| err(line_no, m))?;
                }
                _ => return Err(err(line_no, format!("unknown key `{key}`"))),
            }
        }

        Ok(Self {
            command: command.ok_or_else(|| err(0, "missing `command`".into()))?,
            config: Config::from_toml_table(table)?,
            seed,
            artifacts,
            tool_version,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, String)>) {
    for (key, value) in table {
        let path = format!("{prefix}.{key}");
        match value {
            toml::Value::Table(inner) => flatten(&path, inner, out),
            other => out.push((path, other.to_string())),
        }
    }
}

fn insert_path(table: &mut toml::Table, path: &str, value: toml::Value) -> std::result::Result<(), String> {
    match path.split_once('.') {
        None => {
            table.insert(path.to_owned(), value);
            Ok(())
        }
        Some((head, rest)) => {
            let entry = table
                .entry(head.to_owned())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            match entry {
                toml::Value::Table(inner) => insert_path(inner, rest, value),
                _ => Err(format!("key `{head}` is both a value and a section")),
            }
        }
    }
}
