//! Manifold spec files and search config files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use umbilic_core::search::SearchConfig;
use umbilic_core::zoo::{ManifoldRequest, ParamValue};

use crate::error::CliError;

/// A manifold either as a catalogue expression or as a structured entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ManifoldInput {
    Expression(String),
    Structured {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, ParamInput>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamInput {
    Number(f64),
    Manifold(ManifoldInput),
}

impl ManifoldInput {
    pub fn to_request(&self) -> Result<ManifoldRequest, CliError> {
        match self {
            ManifoldInput::Expression(s) => parse_expression(s),
            ManifoldInput::Structured { name, params } => {
                let mut r = ManifoldRequest::new(name.clone());
                for (k, v) in params {
                    let v = match v {
                        ParamInput::Number(x) => ParamValue::Number(*x),
                        ParamInput::Manifold(m) => ParamValue::Manifold(m.to_request()?),
                    };
                    r.params.insert(k.clone(), v);
                }
                Ok(r)
            }
        }
    }
}

/// JSON manifold spec file. Run settings are optional defaults that command
/// line flags override.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpecFile {
    pub manifold: ManifoldInput,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// `round_sphere n=3` becomes `round_sphere(n=3)`; full expressions pass through.
pub fn parse_expression(text: &str) -> Result<ManifoldRequest, CliError> {
    let text = text.trim();
    let expr = match text.split_once(char::is_whitespace) {
        Some((head, rest)) if !head.contains('(') => format!("{head}({})", rest.trim()),
        _ => text.to_string(),
    };
    ManifoldRequest::parse(&expr).map_err(CliError::from)
}

/// Resolve positional manifold words: a `.json` path is read as a spec file,
/// anything else is a catalogue expression.
pub fn resolve_manifold(words: &[String]) -> Result<(ManifoldRequest, Option<ManifoldSpecFile>), CliError> {
    if words.is_empty() {
        return Err(CliError::Input("missing manifold".into()));
    }
    if words.len() == 1 && words[0].ends_with(".json") {
        let spec = read_spec_file(Path::new(&words[0]))?;
        let req = spec.manifold.to_request()?;
        return Ok((req, Some(spec)));
    }
    Ok((parse_expression(&words.join(" "))?, None))
}

pub fn read_spec_file(path: &Path) -> Result<ManifoldSpecFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default = "default_converge")]
    pub converge: f64,
    #[serde(default = "default_trust")]
    pub trust_radius: f64,
}

fn default_converge() -> f64 {
    1e-6
}

fn default_trust() -> f64 {
    1.0
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            converge: default_converge(),
            trust_radius: default_trust(),
        }
    }
}

/// JSON search config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfigFile {
    pub family: String,
    pub param_dim: usize,
    pub budget: usize,
    pub seed: u64,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub start_norm: Option<f64>,
    #[serde(default)]
    pub initial_step: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
}

impl SearchConfigFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn to_config(&self) -> Result<SearchConfig, CliError> {
        let mut c = SearchConfig::new(self.family.clone(), self.param_dim);
        c.budget = self.budget;
        c.seed = self.seed;
        c.converge_threshold = self.thresholds.converge;
        c.trust_radius = self.thresholds.trust_radius;
        if let Some(v) = self.start_norm {
            c.start_norm = v;
        }
        if let Some(v) = self.initial_step {
            c.initial_step = v;
        }
        if let Some(v) = self.samples {
            c.samples = v;
        }
        c.validate()?;
        Ok(c)
    }
}
