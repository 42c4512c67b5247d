//! Run configuration: TOML file merged with command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use qhje::io::Format;
use qhje::model::ModelConfig;
use qhje::PotentialModel;

pub const MIN_GRID: usize = 200;

/// Keys accepted in a configuration file. Flags of the same name win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub m: Option<f64>,
    pub omega: Option<f64>,
    pub lambda: Option<f64>,
    pub hbar: Option<f64>,
    pub coefficients: Option<Vec<f64>>,
    pub n: Option<String>,
    pub bracket: Option<String>,
    pub grid: Option<usize>,
    pub bins: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

/// Validated model and output settings shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn build(file: &FileConfig, flags: &FileConfig) -> Result<Self, String> {
        let model = ModelConfig {
            model: flags.model.clone().or_else(|| file.model.clone()),
            m: flags.m.or(file.m),
            omega: flags.omega.or(file.omega),
            lambda: flags.lambda.or(file.lambda),
            hbar: flags.hbar.or(file.hbar),
            coefficients: flags
                .coefficients
                .clone()
                .or_else(|| file.coefficients.clone()),
        };
        for (name, v) in [
            ("m", model.m),
            ("omega", model.omega),
            ("lambda", model.lambda),
            ("hbar", model.hbar),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(format!("--{name} must be positive, got {v}"));
                }
            }
        }
        let format = match flags.format.as_deref().or(file.format.as_deref()) {
            None => Format::Csv,
            Some(s) => s.parse().map_err(|e: qhje::Error| e.to_string())?,
        };
        Ok(Self {
            model,
            out: flags.out.clone().or_else(|| file.out.clone()),
            format,
        })
    }

    pub fn potential(&self) -> qhje::Result<PotentialModel> {
        PotentialModel::from_config(&self.model)
    }
}

/// `N` or the inclusive range `A..B`.
pub fn parse_levels(s: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("expected N or A..B, got '{s}'");
    match s.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if b < a {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().map_err(|_| bad())?]),
    }
}

/// `LO:HI` with `LO < HI`.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let bad = || format!("expected LO:HI, got '{s}'");
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn check_grid(n: usize) -> Result<usize, String> {
    if n < MIN_GRID {
        Err(format!("grid size {n} below the minimum {MIN_GRID}"))
    } else {
        Ok(n)
    }
}
