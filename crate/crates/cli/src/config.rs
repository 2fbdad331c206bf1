//! Run-config ingestion: JSON document plus `--set` overrides.

use crate::CliError;
use adiabatic_spectra::SlopeParam;
use serde::{Deserialize, Serialize};
use std::io::Read;
use std::path::PathBuf;

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub slope: Option<SlopeParam>,
    pub alpha: Option<f64>,
    pub h: Option<f64>,
    pub h_grid: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub lambda_grid: Option<Vec<f64>>,
    pub t: Option<f64>,
    pub t_grid: Option<Vec<f64>>,
    pub degree: Option<u8>,
    pub cutoff: Option<f64>,
    pub eps: Option<f64>,
    pub mode: Option<String>,
    pub i_max: Option<usize>,
    pub model: Option<String>,
    pub metric: Option<[f64; 4]>,
    pub jump_bound: Option<f64>,
    pub pairing: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

/// Loads the JSON config (file path or `-` for stdin), applies
/// `key=value` overrides on the raw document, then deserializes with
/// field-path diagnostics.
pub fn load(path: Option<&str>, sets: &[String]) -> Result<RunConfig, CliError> {
    let mut doc = match path {
        None => serde_json::Value::Object(Default::default()),
        Some(source) => {
            let text = if source == "-" {
                let mut buf = String::new();
                std::io::stdin()
                    .read_to_string(&mut buf)
                    .map_err(|e| CliError::config(format!("reading stdin: {e}")))?;
                buf
            } else {
                std::fs::read_to_string(source)
                    .map_err(|e| CliError::config(format!("reading {source}: {e}")))?
            };
            serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("config is not valid JSON: {e}")))?
        }
    };
    let map = doc
        .as_object_mut()
        .ok_or_else(|| CliError::config("config must be a JSON object"))?;
    for set in sets {
        let (key, raw) = set
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("--set expects key=value, got `{set}`")))?;
        // value is parsed as JSON when possible, else taken as a string
        let value = serde_json::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        map.insert(key.to_string(), value);
    }
    let cfg: RunConfig = serde_json::from_value(doc)
        .map_err(|e| CliError::config(format!("config field error: {e}")))?;
    if let Some(slope) = &cfg.slope {
        slope
            .validate()
            .map_err(|e| CliError::config(format!("config field `slope`: {e}")))?;
    }
    Ok(cfg)
}

impl RunConfig {
    pub fn require_slope(&self) -> Result<SlopeParam, CliError> {
        self.slope
            .ok_or_else(|| CliError::config("missing field: slope"))
    }

    pub fn require_f64(&self, name: &str, v: Option<f64>) -> Result<f64, CliError> {
        v.ok_or_else(|| CliError::config(format!("missing field: {name}")))
    }

    /// The h-grid: `h_grid` if present, else the single `h`.
    pub fn h_values(&self) -> Result<Vec<f64>, CliError> {
        match (&self.h_grid, self.h) {
            (Some(grid), _) if !grid.is_empty() => Ok(grid.clone()),
            (_, Some(h)) => Ok(vec![h]),
            _ => Err(CliError::config("missing field: h or h_grid")),
        }
    }

    pub fn t_values(&self) -> Result<Vec<f64>, CliError> {
        match (&self.t_grid, self.t) {
            (Some(grid), _) if !grid.is_empty() => Ok(grid.clone()),
            (_, Some(t)) => Ok(vec![t]),
            _ => Err(CliError::config("missing field: t or t_grid")),
        }
    }

    pub fn lambda_values(&self) -> Result<Vec<f64>, CliError> {
        match (&self.lambda_grid, self.lambda) {
            (Some(grid), _) if !grid.is_empty() => Ok(grid.clone()),
            (_, Some(l)) => Ok(vec![l]),
            _ => Err(CliError::config("missing field: lambda or lambda_grid")),
        }
    }
}
