//! TOML experiment configuration: parsing, defaulting, and key=value
//! overrides.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{default_t_max, ExperimentConfig, OutputKind};
use crate::system::{Geometry, Model, ModelSpec, SystemSpec, Variant, DEFAULT_OMEGA1};

/// On-disk schema. Unknown keys are rejected; omitted optional keys take
/// the documented defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub n_spins: usize,
    pub geometry: Geometry,
    pub model: Model,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_neighbors: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_coupling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub species: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flipped_site: Option<FlippedSite>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<OutputKind>>,
}

/// `flipped_site = <index>` or `flipped_site = "none"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FlippedSite {
    Site(usize),
    Keyword(String),
}

impl FlippedSite {
    fn resolve(&self) -> Result<Option<usize>> {
        match self {
            FlippedSite::Site(k) => Ok(Some(*k)),
            FlippedSite::Keyword(s) if s == "none" => Ok(None),
            FlippedSite::Keyword(s) => Err(Error::Config(format!(
                "flipped_site must be a site index or \"none\", got \"{s}\""
            ))),
        }
    }
}

/// Parse a TOML config document into a validated [`ExperimentConfig`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::Config(format!("malformed config: {e}")))?;
    build_config(raw)
}

fn build_config(raw: RawConfig) -> Result<ExperimentConfig> {
    let pattern = raw.species.unwrap_or_else(|| "A".to_string());
    let labels: Vec<char> = pattern.chars().collect();
    if labels.is_empty() {
        return Err(Error::Config("species must not be empty".into()));
    }

    // gammas omitted entirely: every label defaults to 1.0; partially
    // provided maps must cover all labels
    let gammas: BTreeMap<char, f64> = match raw.gammas {
        None => labels.iter().map(|&l| (l, 1.0)).collect(),
        Some(map) => {
            let mut out = BTreeMap::new();
            for (key, value) in map {
                let mut chars = key.chars();
                match (chars.next(), chars.next()) {
                    (Some(label), None) => {
                        out.insert(label, value);
                    }
                    _ => {
                        return Err(Error::Config(format!(
                            "gammas key \"{key}\" must be a single species label"
                        )))
                    }
                }
            }
            out
        }
    };

    let system = SystemSpec::with_pattern(raw.n_spins, raw.geometry, &pattern, gammas)?;

    let mut model = ModelSpec::new(raw.model)
        .with_omega1(raw.omega1.unwrap_or(DEFAULT_OMEGA1))
        .with_d1(raw.d1.unwrap_or(1.0))
        .with_m_neighbors(raw.m_neighbors.unwrap_or(1))
        .with_variant(raw.variant.unwrap_or_default());
    model.omega0 = raw.omega0;
    model.j_coupling = raw.j_coupling;

    let flipped_site = match raw.flipped_site {
        None => Some(1),
        Some(fs) => fs.resolve()?,
    };

    let config = ExperimentConfig {
        t_max: raw.t_max.unwrap_or_else(|| default_t_max(&model)),
        n_samples: raw.n_samples.unwrap_or(400),
        dt: raw.dt,
        outputs: raw
            .outputs
            .unwrap_or_else(|| vec![OutputKind::Csv, OutputKind::Metrics]),
        flipped_site,
        system,
        model,
    };
    config.validate()?;
    Ok(config)
}

/// Serialize a validated config back into the on-disk schema (used to
/// apply overrides onto catalog scenarios).
pub fn to_raw(config: &ExperimentConfig) -> RawConfig {
    let species: String = config.system.species().iter().collect();
    let gammas = config
        .system
        .gammas()
        .iter()
        .map(|(&label, &value)| (label.to_string(), value))
        .collect();
    RawConfig {
        n_spins: config.system.n(),
        geometry: config.system.geometry(),
        model: config.model.model,
        m_neighbors: Some(config.model.m_neighbors),
        omega1: Some(config.model.omega1),
        d1: Some(config.model.d1),
        omega0: config.model.omega0,
        j_coupling: config.model.j_coupling,
        variant: Some(config.model.variant),
        species: Some(species),
        gammas: Some(gammas),
        flipped_site: Some(match config.flipped_site {
            Some(site) => FlippedSite::Site(site),
            None => FlippedSite::Keyword("none".into()),
        }),
        t_max: Some(config.t_max),
        n_samples: Some(config.n_samples),
        dt: config.dt,
        outputs: Some(config.outputs.clone()),
    }
}

/// Render a config as a TOML document.
pub fn config_to_toml(config: &ExperimentConfig) -> Result<String> {
    toml::to_string(&to_raw(config)).map_err(|e| Error::Config(format!("serialize config: {e}")))
}

/// Apply `key=value` overrides onto a TOML document. Dotted keys address
/// nested tables (e.g. `gammas.H=42.58`); values are parsed as TOML
/// scalars, falling back to strings.
pub fn apply_overrides(text: &str, overrides: &[String]) -> Result<String> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e| Error::Config(format!("malformed config: {e}")))?;
    for entry in overrides {
        let (key, value) = entry.split_once('=').ok_or_else(|| {
            Error::Config(format!("override `{entry}` must have the form key=value"))
        })?;
        let parsed = parse_override_value(value);
        insert_dotted(&mut table, key.trim(), parsed)?;
    }
    toml::to_string(&table).map_err(|e| Error::Config(format!("serialize config: {e}")))
}

fn parse_override_value(value: &str) -> toml::Value {
    let attempt = format!("v = {value}");
    if let Ok(table) = attempt.parse::<toml::Table>() {
        if let Some(v) = table.get("v") {
            return v.clone();
        }
    }
    toml::Value::String(value.trim().to_string())
}

fn insert_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts = key.split('.').peekable();
    let mut current = table;
    while let Some(part) = parts.next() {
        if part.is_empty() {
            return Err(Error::Config(format!("override key `{key}` is malformed")));
        }
        if parts.peek().is_none() {
            current.insert(part.to_string(), value);
            return Ok(());
        }
        current = current
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| {
                Error::Config(format!("override key `{key}` descends into a non-table"))
            })?;
    }
    Ok(())
}
