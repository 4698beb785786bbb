//! Experiment configuration, read from TOML.
//!
//! Every key is optional; missing keys take the defaults below. Overrides
//! given as dotted `key=value` pairs are merged before validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analytic::GAMMA_FLOOR;
use crate::dynamics::SamplingPlan;
use crate::ergodicity::{BetaGrid, ClassifyOptions, DEFAULT_BAND_FACTOR, DEFAULT_MATCH_TOL};
use crate::error::{Error, Result};
use crate::hamiltonian::DEFAULT_SITE_CAP;
use crate::lattice::Geometry;
use crate::quadrature::QuadratureSpec;

pub const OUTPUT_DIR_ENV: &str = "XY_ERGODICITY_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemGeometry {
    InfiniteChain,
    Finite(Geometry),
}

impl fmt::Display for SystemGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemGeometry::InfiniteChain => f.write_str("infinite-chain"),
            SystemGeometry::Finite(g) => g.fmt(f),
        }
    }
}

impl FromStr for SystemGeometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "infinite-chain" | "infinite" => Ok(SystemGeometry::InfiniteChain),
            other => Ok(SystemGeometry::Finite(other.parse()?)),
        }
    }
}

impl Serialize for SystemGeometry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SystemGeometry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: SystemGeometry,
    pub gamma: f64,
    pub coupling_j: f64,
    /// Pre-quench fields `a/J`.
    pub fields: Vec<f64>,
    pub beta_tilde_init: f64,
    pub band_factor: f64,
    pub match_tol: f64,
    pub site_cap: usize,
    pub output_dir: PathBuf,
    pub beta_grid: BetaGrid,
    pub sampling: SamplingPlan,
    pub quadrature: QuadratureSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            geometry: SystemGeometry::InfiniteChain,
            gamma: 0.5,
            coupling_j: 1.0,
            fields: vec![0.2, 0.6, 1.2, 2.0],
            beta_tilde_init: 20.0,
            band_factor: DEFAULT_BAND_FACTOR,
            match_tol: DEFAULT_MATCH_TOL,
            site_cap: DEFAULT_SITE_CAP,
            output_dir: PathBuf::from("output"),
            beta_grid: BetaGrid::default(),
            sampling: SamplingPlan::default(),
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl ExperimentConfig {
    /// The configuration behind each reproduced figure.
    pub fn for_figure(figure: u8) -> Result<Self> {
        let geometry = match figure {
            1 => SystemGeometry::InfiniteChain,
            2 => SystemGeometry::Finite(Geometry::Chain(12)),
            4 => SystemGeometry::Finite(Geometry::Ladder(4)),
            6 => SystemGeometry::Finite(Geometry::Torus(3, 4)),
            other => {
                return Err(Error::config(
                    "figure",
                    format!("no dataset for figure {other}; expected 1, 2, 4 or 6"),
                ))
            }
        };
        Ok(ExperimentConfig {
            geometry,
            output_dir: PathBuf::from(format!("output/figure{figure}")),
            ..Self::default()
        })
    }

    pub fn from_toml_str(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<file>", e.message().to_string()))?;
        for (key, value) in overrides {
            apply_override(&mut table, key, value)?;
        }
        let config: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::config("<file>", e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, overrides).map_err(|e| e.at(path.display().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config is always representable in TOML")
    }

    pub fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions {
            band_factor: self.band_factor,
            match_tol: self.match_tol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !self.gamma.is_finite() || self.gamma.abs() < GAMMA_FLOOR {
            return Err(Error::config(
                "gamma",
                format!("|gamma| must be at least {GAMMA_FLOOR}, got {}", self.gamma),
            ));
        }
        if !finite_pos(self.coupling_j) {
            return Err(Error::config(
                "coupling_j",
                format!("must be positive and finite, got {}", self.coupling_j),
            ));
        }
        if self.fields.is_empty() {
            return Err(Error::config("fields", "at least one field is required"));
        }
        for (i, a) in self.fields.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::config(
                    format!("fields[{i}]"),
                    format!("must be finite, got {a}"),
                ));
            }
        }
        if !finite_pos(self.beta_tilde_init) {
            return Err(Error::config(
                "beta_tilde_init",
                format!("must be positive and finite, got {}", self.beta_tilde_init),
            ));
        }
        if !(self.band_factor > 1.0 && self.band_factor.is_finite()) {
            return Err(Error::config(
                "band_factor",
                format!("must exceed 1, got {}", self.band_factor),
            ));
        }
        if !(self.match_tol >= 0.0 && self.match_tol.is_finite()) {
            return Err(Error::config(
                "match_tol",
                format!("must be non-negative, got {}", self.match_tol),
            ));
        }
        self.beta_grid
            .validate()
            .map_err(|e| Error::config("beta_grid", e.to_string()))?;
        let band = (
            self.beta_tilde_init / self.band_factor,
            self.beta_tilde_init * self.band_factor,
        );
        if self.beta_grid.lo > band.0 || self.beta_grid.hi < band.1 {
            return Err(Error::config(
                "beta_grid",
                format!(
                    "grid [{}, {}] must cover the band [{}, {}]",
                    self.beta_grid.lo, self.beta_grid.hi, band.0, band.1
                ),
            ));
        }
        if !finite_pos(self.sampling.t_max) {
            return Err(Error::config(
                "sampling.t_max",
                format!("must be positive, got {}", self.sampling.t_max),
            ));
        }
        if self.sampling.n_samples < 2 {
            return Err(Error::config(
                "sampling.n_samples",
                format!("must be at least 2, got {}", self.sampling.n_samples),
            ));
        }
        self.quadrature
            .validate()
            .map_err(|e| Error::config("quadrature", e.to_string()))?;
        if let SystemGeometry::Finite(g) = self.geometry {
            let lattice = crate::lattice::build_lattice(g).map_err(|e| Error::config("geometry", e.to_string()))?;
            if lattice.n_sites > self.site_cap {
                return Err(Error::config(
                    "geometry",
                    format!("{} sites exceed site_cap {}", lattice.n_sites, self.site_cap),
                ));
            }
        }
        Ok(())
    }
}

/// Parses `key=value`; the value is read as a TOML literal and falls back to
/// a bare string.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::config(s, "override must look like key=value"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key is present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn apply_override(table: &mut toml::Table, key: &str, raw: &str) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(key, "empty path segment"));
    }
    let mut cursor = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{part}` is not a table")))?;
    }
    let mut value = parse_value(raw);
    // integers are accepted wherever floats are expected
    if let (Some(toml::Value::Float(_)), toml::Value::Integer(i)) = (cursor.get(parts[parts.len() - 1]), &value) {
        value = toml::Value::Float(*i as f64);
    }
    cursor.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
