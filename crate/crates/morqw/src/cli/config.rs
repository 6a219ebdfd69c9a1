//! Flat scenario configuration shared by all CLI commands.
//!
//! A scenario is a flat key–value document: either `KEY = VALUE` lines or a
//! single JSON object whose values are scalars. The key set mirrors
//! [`SystemParams`] field names plus the run controls (`alpha_l`, `axis1`,
//! `axis2`, `method`, `format`, `out`, `workers`). Unknown keys and nested
//! values are rejected, and serializing a parsed config reproduces it
//! losslessly.

use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::method;
use crate::sweep::{AxisName, SweepAxis, SweepError};
use crate::types::{ParamError, SystemParams};

/// Table serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    /// Comma-separated values with a header row.
    #[default]
    Csv,
    /// An array of records with the same field names as the CSV columns.
    Json,
}

impl OutputFormat {
    /// Stable name used in configs and flags.
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    /// File extension for emitted tables.
    pub fn extension(&self) -> &'static str {
        self.as_str()
    }
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(ConfigError::InvalidValue {
                key: "format".into(),
                detail: format!("expected csv or json, got {other:?}"),
            }),
        }
    }
}

/// Errors raised while reading or updating a scenario config.
#[derive(Debug, Error)]
pub enum ConfigError {
    /// Key does not belong to the scenario schema.
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    /// Value failed to parse or violates a bound.
    #[error("invalid value for {key}: {detail}")]
    InvalidValue {
        /// Offending key.
        key: String,
        /// Human-readable cause.
        detail: String,
    },
    /// JSON value is not a flat scalar.
    #[error("config must stay flat: key {0:?} holds an array, object, bool, or null")]
    NotFlat(String),
    /// Line in a key=value document is not KEY=VALUE.
    #[error("malformed config line {line}: expected KEY = VALUE, got {text:?}")]
    MalformedLine {
        /// 1-based line number.
        line: usize,
        /// Offending line content.
        text: String,
    },
    /// Document looked like JSON but did not parse as a flat object.
    #[error("config is not a flat JSON object: {0}")]
    Json(String),
    /// Config file could not be read.
    #[error("cannot read config {path}: {detail}")]
    Unreadable {
        /// Offending path.
        path: PathBuf,
        /// Underlying I/O error.
        detail: String,
    },
    /// Parameter-level validation failure.
    #[error(transparent)]
    Param(#[from] ParamError),
    /// Axis-level validation failure.
    #[error(transparent)]
    Axis(#[from] SweepError),
}

/// A fully resolved run scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Model parameters.
    pub params: SystemParams,
    /// Optical depth αl (ignored when `alpha_l` is a sweep axis).
    pub alpha_l: f64,
    /// Outer sweep axis.
    pub axis1: Option<SweepAxis>,
    /// Inner sweep axis.
    pub axis2: Option<SweepAxis>,
    /// Evaluation strategy (registry name).
    pub method: String,
    /// Output path (`figure` treats it as a directory).
    pub out: Option<PathBuf>,
    /// Table format.
    pub format: OutputFormat,
    /// Worker-thread count for sweeps.
    pub workers: Option<usize>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            params: SystemParams::default(),
            alpha_l: 0.0,
            axis1: None,
            axis2: None,
            method: "numeric".into(),
            out: None,
            format: OutputFormat::default(),
            workers: None,
        }
    }
}

impl ScenarioConfig {
    /// Reads and applies a config file (JSON object or key=value lines).
    pub fn apply_file(&mut self, path: &PathBuf) -> Result<(), ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
                path: path.clone(),
                detail: e.to_string(),
            })?;
        self.apply_document(&text)
    }

    /// Applies a whole document; JSON when it starts with `{` or `[`,
    /// otherwise key=value lines (blank lines and lines starting with `#`
    /// ignored).
    pub fn apply_document(&mut self, text: &str) -> Result<(), ConfigError> {
        if matches!(text.trim_start().chars().next(), Some('{' | '[')) {
            self.apply_json(text)
        } else {
            self.apply_key_values(text)
        }
    }

    fn apply_key_values(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::MalformedLine {
                line: idx + 1,
                text: raw.to_string(),
            })?;
            self.apply_key(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn apply_json(&mut self, text: &str) -> Result<(), ConfigError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
        let object = value
            .as_object()
            .ok_or_else(|| ConfigError::Json("top level must be an object".into()))?;
        for (key, value) in object {
            match value {
                serde_json::Value::Number(n) => {
                    let x = n
                        .as_f64()
                        .ok_or_else(|| ConfigError::InvalidValue {
                            key: key.clone(),
                            detail: format!("{n} is not representable as f64"),
                        })?;
                    self.apply_key(key, &x.to_string())?;
                }
                serde_json::Value::String(s) => self.apply_key(key, s)?,
                _ => return Err(ConfigError::NotFlat(key.clone())),
            }
        }
        Ok(())
    }

    /// Applies one `KEY=VALUE` override string (the `--set` form).
    pub fn apply_set_pair(&mut self, pair: &str) -> Result<(), ConfigError> {
        let (key, value) = pair.split_once('=').ok_or_else(|| ConfigError::InvalidValue {
            key: "--set".into(),
            detail: format!("expected KEY=VALUE, got {pair:?}"),
        })?;
        self.apply_key(key.trim(), value.trim())
    }

    /// Applies a single key. The `delta` convenience key sets `delta_p` and
    /// `delta_pi` together, preserving multi-photon resonance.
    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "omega_plus" => self.params.omega_plus = parse_f64(key, value)?,
            "omega_minus" => self.params.omega_minus = parse_f64(key, value)?,
            "omega_1" => self.params.omega_1 = parse_f64(key, value)?,
            "omega_2" => self.params.omega_2 = parse_f64(key, value)?,
            "phi" => self.params.phi = parse_f64(key, value)?,
            "delta_p" => self.params.delta_p = parse_f64(key, value)?,
            "delta_pi" => self.params.delta_pi = parse_f64(key, value)?,
            "delta" => {
                let x = parse_f64(key, value)?;
                self.params.delta_p = x;
                self.params.delta_pi = x;
            }
            "delta_b" => self.params.delta_b = parse_f64(key, value)?,
            "delta_lh" => self.params.delta_lh = parse_f64(key, value)?,
            "gamma_31" => self.params.gamma_31 = parse_f64(key, value)?,
            "gamma_32" => self.params.gamma_32 = parse_f64(key, value)?,
            "gamma_41" => self.params.gamma_41 = parse_f64(key, value)?,
            "gamma_42" => self.params.gamma_42 = parse_f64(key, value)?,
            "gamma_d_21" => self.params.gamma_d_21 = parse_f64(key, value)?,
            "gamma_d_31" => self.params.gamma_d_31 = parse_f64(key, value)?,
            "gamma_d_32" => self.params.gamma_d_32 = parse_f64(key, value)?,
            "gamma_d_41" => self.params.gamma_d_41 = parse_f64(key, value)?,
            "gamma_d_42" => self.params.gamma_d_42 = parse_f64(key, value)?,
            "gamma_d_43" => self.params.gamma_d_43 = parse_f64(key, value)?,
            "alpha_l" => {
                let x = parse_f64(key, value)?;
                if x < 0.0 {
                    return Err(ConfigError::InvalidValue {
                        key: key.into(),
                        detail: format!("optical depth must be >= 0, got {x}"),
                    });
                }
                self.alpha_l = x;
            }
            "axis1" => self.axis1 = Some(parse_axis(key, value)?),
            "axis2" => self.axis2 = Some(parse_axis(key, value)?),
            "method" => self.set_method(value)?,
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "workers" => {
                let n: usize = value.parse().map_err(|_| ConfigError::InvalidValue {
                    key: key.into(),
                    detail: format!("expected a positive integer, got {value:?}"),
                })?;
                if n == 0 {
                    return Err(ConfigError::InvalidValue {
                        key: key.into(),
                        detail: "worker count must be >= 1".into(),
                    });
                }
                self.workers = Some(n);
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Sets the evaluation strategy, rejecting names missing from the
    /// registry.
    pub fn set_method(&mut self, name: &str) -> Result<(), ConfigError> {
        if method::lookup(name).is_none() {
            let known: Vec<&str> = method::methods().iter().map(|m| m.name()).collect();
            return Err(ConfigError::InvalidValue {
                key: "method".into(),
                detail: format!("unknown method {name:?} (available: {})", known.join(", ")),
            });
        }
        self.method = name.to_string();
        Ok(())
    }

    /// Serializes the scenario as a key=value document; parsing the output
    /// reproduces this config exactly.
    pub fn to_document(&self) -> String {
        let p = &self.params;
        let mut lines: Vec<String> = vec![
            format!("omega_plus = {}", p.omega_plus),
            format!("omega_minus = {}", p.omega_minus),
            format!("omega_1 = {}", p.omega_1),
            format!("omega_2 = {}", p.omega_2),
            format!("phi = {}", p.phi),
            format!("delta_p = {}", p.delta_p),
            format!("delta_pi = {}", p.delta_pi),
            format!("delta_b = {}", p.delta_b),
            format!("delta_lh = {}", p.delta_lh),
            format!("gamma_31 = {}", p.gamma_31),
            format!("gamma_32 = {}", p.gamma_32),
            format!("gamma_41 = {}", p.gamma_41),
            format!("gamma_42 = {}", p.gamma_42),
            format!("gamma_d_21 = {}", p.gamma_d_21),
            format!("gamma_d_31 = {}", p.gamma_d_31),
            format!("gamma_d_32 = {}", p.gamma_d_32),
            format!("gamma_d_41 = {}", p.gamma_d_41),
            format!("gamma_d_42 = {}", p.gamma_d_42),
            format!("gamma_d_43 = {}", p.gamma_d_43),
            format!("alpha_l = {}", self.alpha_l),
        ];
        if let Some(axis) = &self.axis1 {
            lines.push(format!("axis1 = {}", format_axis(axis)));
        }
        if let Some(axis) = &self.axis2 {
            lines.push(format!("axis2 = {}", format_axis(axis)));
        }
        lines.push(format!("method = {}", self.method));
        lines.push(format!("format = {}", self.format.as_str()));
        if let Some(out) = &self.out {
            lines.push(format!("out = {}", out.display()));
        }
        if let Some(workers) = self.workers {
            lines.push(format!("workers = {workers}"));
        }
        lines.join("\n") + "\n"
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = value.parse().map_err(|_| ConfigError::InvalidValue {
        key: key.into(),
        detail: format!("expected a number, got {value:?}"),
    })?;
    if !x.is_finite() {
        return Err(ConfigError::InvalidValue {
            key: key.into(),
            detail: format!("value must be finite, got {x}"),
        });
    }
    Ok(x)
}

/// Axis syntax: `name:start:stop:count`, e.g. `delta_b:0:10:501`.
fn parse_axis(key: &str, spec: &str) -> Result<SweepAxis, ConfigError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [name, start, stop, count] = parts.as_slice() else {
        return Err(ConfigError::InvalidValue {
            key: key.into(),
            detail: format!("expected name:start:stop:count, got {spec:?}"),
        });
    };
    let name: AxisName = name.parse()?;
    let start = parse_f64(key, start)?;
    let stop = parse_f64(key, stop)?;
    let count: usize = count.parse().map_err(|_| ConfigError::InvalidValue {
        key: key.into(),
        detail: format!("grid count must be a positive integer, got {count:?}"),
    })?;
    Ok(SweepAxis::new(name, start, stop, count)?)
}

fn format_axis(axis: &SweepAxis) -> String {
    format!(
        "{}:{}:{}:{}",
        axis.name(),
        axis.start(),
        axis.stop(),
        axis.count()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_document_round_trips() {
        let mut cfg = ScenarioConfig::default();
        cfg.apply_document(
            "# scenario under test\n\
             delta_b = 7\n\
             \n\
             alpha_l = 45\n\
             axis1 = delta_b:0:10:501\n\
             axis2 = alpha_l:0:100:11\n\
             method = analytic\n\
             format = json\n\
             out = results/run.json\n\
             workers = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.params.delta_b, 7.0);
        assert_eq!(cfg.alpha_l, 45.0);
        assert_eq!(cfg.axis1.unwrap().count(), 501);
        assert_eq!(cfg.method, "analytic");
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(cfg.workers, Some(3));

        let mut reparsed = ScenarioConfig::default();
        reparsed.apply_document(&cfg.to_document()).unwrap();
        assert_eq!(reparsed, cfg);
        // Serialization is a fixed point.
        assert_eq!(reparsed.to_document(), cfg.to_document());
    }

    #[test]
    fn json_document_matches_key_value_document() {
        let mut from_json = ScenarioConfig::default();
        from_json
            .apply_document(r#"{"delta_b": 7, "alpha_l": 45, "method": "analytic"}"#)
            .unwrap();
        let mut from_kv = ScenarioConfig::default();
        from_kv
            .apply_document("delta_b = 7\nalpha_l = 45\nmethod = analytic\n")
            .unwrap();
        assert_eq!(from_json, from_kv);
    }

    #[test]
    fn delta_sets_both_detunings() {
        let mut cfg = ScenarioConfig::default();
        cfg.apply_key("delta", "2.5").unwrap();
        assert_eq!(cfg.params.delta_p, 2.5);
        assert_eq!(cfg.params.delta_pi, 2.5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut cfg = ScenarioConfig::default();
        assert!(matches!(
            cfg.apply_key("omega_3", "1"),
            Err(ConfigError::UnknownKey(_))
        ));
    }

    #[test]
    fn non_finite_and_malformed_values_are_rejected() {
        let mut cfg = ScenarioConfig::default();
        assert!(matches!(
            cfg.apply_key("delta_b", "inf"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            cfg.apply_key("delta_b", "seven"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            cfg.apply_key("alpha_l", "-1"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            cfg.apply_key("workers", "0"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            cfg.apply_document("delta_b 7\n"),
            Err(ConfigError::MalformedLine { line: 1, .. })
        ));
    }

    #[test]
    fn nested_json_is_rejected() {
        let mut cfg = ScenarioConfig::default();
        assert!(matches!(
            cfg.apply_document(r#"{"params": {"delta_b": 7}}"#),
            Err(ConfigError::NotFlat(_))
        ));
        assert!(matches!(
            cfg.apply_document(r#"[1, 2]"#),
            Err(ConfigError::Json(_))
        ));
    }

    #[test]
    fn axis_specs_are_validated() {
        let mut cfg = ScenarioConfig::default();
        assert!(matches!(
            cfg.apply_key("axis1", "delta_b:0:10"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            cfg.apply_key("axis1", "omega_plus:0:10:11"),
            Err(ConfigError::Axis(_))
        ));
        assert!(matches!(
            cfg.apply_key("axis1", "delta_b:5:5:11"),
            Err(ConfigError::Axis(_))
        ));
    }

    #[test]
    fn method_names_are_checked_against_the_registry() {
        let mut cfg = ScenarioConfig::default();
        cfg.apply_key("method", "analytic").unwrap();
        assert!(matches!(
            cfg.apply_key("method", "exact"),
            Err(ConfigError::InvalidValue { .. })
        ));
    }

    #[test]
    fn set_pairs_tolerate_spaces_and_require_equals() {
        let mut cfg = ScenarioConfig::default();
        cfg.apply_set_pair("delta_b = 7").unwrap();
        assert_eq!(cfg.params.delta_b, 7.0);
        assert!(cfg.apply_set_pair("delta_b").is_err());
    }
}
