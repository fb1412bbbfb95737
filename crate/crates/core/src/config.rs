//! Kernel documents and mode-list specifications.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{ExponentialKernel, PowerLawFamily};
use crate::symbol::Mode;

/// A kernel as written in a JSON document:
/// `{"type":"finite","terms":[[c,gamma],...]}` or
/// `{"type":"power_law","A":..,"B":..,"alpha":..,"beta":..,"N":..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    Finite { terms: Vec<(f64, f64)> },
    PowerLaw(PowerLawFamily),
}

impl KernelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("kernel JSON: {e}")))
    }

    /// Accepts inline JSON (anything starting with `{`) or a path to a JSON file.
    pub fn from_source(source: &str) -> Result<Self> {
        let trimmed = source.trim_start();
        if trimmed.starts_with('{') {
            return Self::from_json(trimmed);
        }
        let path = Path::new(source);
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read kernel file {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn family(&self) -> Option<PowerLawFamily> {
        match self {
            KernelSpec::PowerLaw(f) => Some(*f),
            KernelSpec::Finite { .. } => None,
        }
    }

    pub fn build(&self) -> Result<ExponentialKernel> {
        match self {
            KernelSpec::Finite { terms } => ExponentialKernel::new(terms),
            KernelSpec::PowerLaw(f) => ExponentialKernel::from_power_law(f),
        }
    }
}

/// Geometric grid `start * ratio^j` for `j = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AGrid {
    pub start: f64,
    pub ratio: f64,
    pub count: usize,
}

impl AGrid {
    /// Parses `start:ratio:count`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let bad = || Error::Config(format!("a-grid '{text}' must look like start:ratio:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let ratio: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        if count == 0 {
            return Err(Error::Config("a-grid count must be at least 1".into()));
        }
        if !(start >= 1.0 && start.is_finite() && ratio > 1.0 && ratio.is_finite()) {
            return Err(Error::Config(format!(
                "a-grid needs start >= 1 and ratio > 1, got '{text}'"
            )));
        }
        Ok(Self { start, ratio, count })
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count)
            .map(|j| self.start * self.ratio.powi(j as i32))
            .collect()
    }
}

/// Parses a comma-separated list of mode eigenvalues.
pub fn parse_mode_list(text: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad mode value '{s}'")))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::Config("mode list is empty".into()));
    }
    Ok(values)
}

pub fn modes_for(values: &[f64], theta: f64) -> Result<Vec<Mode>> {
    values
        .iter()
        .map(|&a| Mode::new(a, theta).map_err(|e| Error::Config(e.to_string())))
        .collect()
}
