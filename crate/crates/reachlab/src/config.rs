//! JSON experiment configuration.

use std::path::PathBuf;

use reachlab_core::geometry::{catalog, Halfspace};
use reachlab_core::{Shape, TestFunction};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::grid::GridSpec;

/// Shape schema, discriminated by `"type"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    Ball { center: Vec<f64>, radius: f64 },
    /// Convex hull of the vertices.
    PolytopeV { vertices: Vec<Vec<f64>> },
    /// `{x : ⟨normal, x⟩ ≤ offset}` for every entry.
    PolytopeH { halfspaces: Vec<HalfspaceSpec> },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Minkowski sum of a polytope and a closed ball.
    Rounded { core: std::boxed::Box<ShapeSpec>, radius: f64 },
    Union { parts: Vec<ShapeSpec> },
    /// Simple polygon, vertices counter-clockwise.
    Polygon { vertices: Vec<Vec<f64>> },
    Staircase { steps: usize },
    LShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl ShapeSpec {
    pub fn build(&self) -> Result<Shape, CliError> {
        Ok(match self {
            ShapeSpec::Ball { center, radius } => Shape::ball(center.clone(), *radius)?,
            ShapeSpec::PolytopeV { vertices } => Shape::polytope_from_vertices(vertices.clone())?,
            ShapeSpec::PolytopeH { halfspaces } => {
                let hs = halfspaces
                    .iter()
                    .map(|h| Halfspace::new(h.normal.clone(), h.offset))
                    .collect::<Result<Vec<_>, _>>()?;
                Shape::polytope_from_halfspaces(hs)?
            }
            ShapeSpec::Box { lo, hi } => Shape::cuboid(lo, hi)?,
            ShapeSpec::Rounded { core, radius } => {
                let core = core.build()?;
                let poly = match core.as_polytope() {
                    Some(p) => p.into_owned(),
                    None => return Err(CliError::Validation("rounded core must be a convex polytope".into())),
                };
                Shape::rounded(poly, *radius)?
            }
            ShapeSpec::Union { parts } => Shape::union(parts.iter().map(|p| p.build()).collect::<Result<_, _>>()?)?,
            ShapeSpec::Polygon { vertices } => Shape::polygon(vertices.clone())?,
            ShapeSpec::Staircase { steps } => {
                if *steps == 0 {
                    return Err(CliError::Validation("staircase needs at least one step".into()));
                }
                catalog::staircase(*steps)
            }
            ShapeSpec::LShape => catalog::l_shape(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Validate,
    Strata,
    Steiner,
    Heat,
    Expand,
    Blowup,
    Report,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Strata => "strata",
            Command::Steiner => "steiner",
            Command::Heat => "heat",
            Command::Expand => "expand",
            Command::Blowup => "blowup",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

/// One experiment. Fields a command does not use are ignored by it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeSpec>,
    /// Test function spec, e.g. `const:1` or `bump:0,0;0.5;1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Heat estimator: `auto`, `mc`, `exact`, `ball`, `tube`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Steiner source: `exact` or `mc`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// `auto`, `published`, or a number.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    /// `graph` or `bundle`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nuisance: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    /// Hausdorff grid pitch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pitch: Option<f64>,
    /// Heat CSVs aggregated by `report`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            shape: None,
            phi: None,
            t_grid: None,
            r_grid: None,
            rho_grid: None,
            samples: None,
            seed: None,
            threads: None,
            method: None,
            source: None,
            alpha: None,
            convention: None,
            degree: None,
            nuisance: None,
            point: None,
            window: None,
            pitch: None,
            inputs: Vec::new(),
            outputs: Outputs::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn shape(&self) -> Result<Shape, CliError> {
        self.shape
            .as_ref()
            .ok_or_else(|| CliError::Validation(format!("{} needs a shape", self.command.as_str())))?
            .build()
    }

    pub fn phi(&self) -> Result<TestFunction, CliError> {
        match &self.phi {
            None => Ok(TestFunction::one()),
            Some(s) => Ok(s.parse()?),
        }
    }

    pub fn seed_for_mc(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Validation("a seed is required when a Monte Carlo estimator is selected".into()))
    }

    /// SHA-256 of the canonical JSON of everything that determines the
    /// results (thread count and output paths excluded).
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("threads");
            m.remove("outputs");
        }
        let bytes = serde_json::to_vec(&v).expect("value serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Reads a shape from a JSON file, or inline JSON when the argument
/// starts with `{`.
pub fn load_shape(arg: &str) -> Result<ShapeSpec, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Io(format!("shape file {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("shape: {e}")))
}
