//! Merging of command-line flags with an optional key=value config file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use bogoliubov::critical::EIGHT_PI;
use bogoliubov::scattering::PotentialModel;

/// Keys accepted in config files; identical to the long flag names.
pub const KNOWN_KEYS: &[&str] = &[
    "nu", "T", "rho", "a", "potential", "out", "format", "grid", "tol", "d", "sigma", "theta", "s", "rho0", "t0",
    "delta", "pmax", "rmax", "t-min", "t-max", "rho-min", "rho-max", "rho-grid", "c", "sequential",
];

/// Invalid input, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub fn parse_config(path: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let text = fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected key=value, got {line:?}", n + 1)))?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(UsageError(format!("config line {}: unknown key {key:?}", n + 1)));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Flag values (which win) layered over config values.
#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn new(flags: BTreeMap<String, String>, config: BTreeMap<String, String>) -> Self {
        let mut values = config;
        values.extend(flags);
        Settings { values }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, UsageError> {
        self.raw(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| UsageError(format!("--{key}: expected a number, got {v:?}")))
            })
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, UsageError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn f64_required(&self, key: &str) -> Result<f64, UsageError> {
        self.f64_opt(key)?.ok_or_else(|| UsageError(format!("--{key} is required")))
    }

    pub fn positive(&self, key: &str, default: Option<f64>) -> Result<f64, UsageError> {
        let v = match default {
            Some(d) => self.f64_or(key, d)?,
            None => self.f64_required(key)?,
        };
        if v > 0.0 {
            Ok(v)
        } else {
            Err(UsageError(format!("--{key} must be positive, got {v}")))
        }
    }

    pub fn non_negative(&self, key: &str, default: Option<f64>) -> Result<f64, UsageError> {
        let v = match default {
            Some(d) => self.f64_or(key, d)?,
            None => self.f64_required(key)?,
        };
        if v >= 0.0 {
            Ok(v)
        } else {
            Err(UsageError(format!("--{key} must be >= 0, got {v}")))
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, UsageError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| UsageError(format!("--{key}: expected a positive integer, got {v:?}"))),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool, UsageError> {
        match self.raw(key) {
            None => Ok(false),
            Some("" | "true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(UsageError(format!("--{key}: expected true or false, got {v:?}"))),
        }
    }

    /// ν with the symbolic value "8pi"; defaults to 8π.
    pub fn nu(&self) -> Result<f64, UsageError> {
        let nu = match self.raw("nu") {
            None => EIGHT_PI,
            Some(v) => parse_nu(v)?,
        };
        if nu >= EIGHT_PI * (1.0 - 1e-12) {
            Ok(nu)
        } else {
            Err(UsageError(format!("--nu must be >= 8pi, got {nu}")))
        }
    }

    pub fn potential(&self) -> Result<Option<PotentialModel>, UsageError> {
        self.raw("potential").map(parse_potential).transpose()
    }

    pub fn format(&self) -> Result<Format, UsageError> {
        match self.raw("format") {
            None | Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(v) => Err(UsageError(format!("--format must be csv or json, got {v:?}"))),
        }
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.raw("out").map(PathBuf::from)
    }

    /// Parameters that were set, for the dataset header.
    pub fn echo(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values
            .iter()
            .filter(|(k, _)| !matches!(k.as_str(), "out" | "format"))
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

pub fn parse_nu(v: &str) -> Result<f64, UsageError> {
    let v = v.trim();
    let symbolic = |s: &str| -> Option<f64> {
        let stripped = s.strip_suffix("pi").or_else(|| s.strip_suffix("π"))?;
        let factor = match stripped.trim_end_matches('*') {
            "" => 1.0,
            f => f.parse::<f64>().ok()?,
        };
        Some(factor * std::f64::consts::PI)
    };
    symbolic(v)
        .or_else(|| v.parse::<f64>().ok())
        .filter(|x| x.is_finite())
        .ok_or_else(|| UsageError(format!("--nu: expected a number or a multiple of pi such as 8pi, got {v:?}")))
}

/// `square:V0,R` or `gaussian:V0,R`.
pub fn parse_potential(v: &str) -> Result<PotentialModel, UsageError> {
    let bad = || UsageError(format!("--potential: expected square:V0,R or gaussian:V0,R, got {v:?}"));
    let (kind, rest) = v.split_once(':').ok_or_else(bad)?;
    let (v0, r) = rest.split_once(',').ok_or_else(bad)?;
    let v0: f64 = v0.trim().parse().map_err(|_| bad())?;
    let r: f64 = r.trim().parse().map_err(|_| bad())?;
    let model = match kind.trim() {
        "square" => PotentialModel::square_barrier(v0, r),
        "gaussian" => PotentialModel::gaussian(v0, r),
        _ => return Err(bad()),
    };
    model.map_err(|e| UsageError(format!("--potential: {e}")))
}
