//! Experiment configuration files (TOML). The schema is documented in
//! `CONFIG.md` next to this crate's manifest.

use std::path::PathBuf;

use serde::Deserialize;

use dimerlab::lattice::LatticeGeometry;
use dimerlab::mcmc::{IsingBoundary, IsingInteraction, IsingModel, Schedule, UpdateKind};
use dimerlab::spectral::EdgeWeights;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ExactDimer,
    AsymptoticsCheck,
    HeightGff,
    SurfaceTension,
    IsingPlane,
    IsingCylinder,
    McDimer,
    McIsing,
    BetaC,
    Haldane,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ExactDimer => "exact-dimer",
            Experiment::AsymptoticsCheck => "asymptotics-check",
            Experiment::HeightGff => "height-gff",
            Experiment::SurfaceTension => "surface-tension",
            Experiment::IsingPlane => "ising-plane",
            Experiment::IsingCylinder => "ising-cylinder",
            Experiment::McDimer => "mc-dimer",
            Experiment::McIsing => "mc-ising",
            Experiment::BetaC => "beta-c",
            Experiment::Haldane => "haldane",
        }
    }
}

/// A scalar or a list of scalars.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![*x],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub geometry: Option<GeometryConfig>,
    #[serde(default)]
    pub weights: WeightsConfig,
    #[serde(default)]
    pub model: ModelConfig,
    pub schedule: Option<ScheduleConfig>,
    #[serde(default)]
    pub params: Params,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub boundary: BoundaryName,
    pub l1: usize,
    pub l2: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryName {
    Torus,
    Cylinder,
    Window,
    Free,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    #[serde(default = "one")]
    pub t1: f64,
    #[serde(default = "one")]
    pub t2: f64,
    #[serde(default = "one")]
    pub t3: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for WeightsConfig {
    fn default() -> Self {
        WeightsConfig { t1: 1.0, t2: 1.0, t3: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InteractionName {
    #[default]
    DiagonalPairs,
    Plaquette,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateName {
    #[default]
    Metropolis,
    Wolff,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "zero")]
    pub lambda: OneOrMany,
    /// Inverse temperature; defaults to the nearest-neighbour critical point.
    pub beta: Option<f64>,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default)]
    pub interaction: InteractionName,
    #[serde(default)]
    pub update: UpdateName,
}

fn zero() -> OneOrMany {
    OneOrMany::One(0.0)
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            lambda: zero(),
            beta: None,
            j: 1.0,
            interaction: InteractionName::default(),
            update: UpdateName::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub burn_in: usize,
    pub samples: usize,
    #[serde(default = "one_usize")]
    pub thin: usize,
}

fn one_usize() -> usize {
    1
}

/// Experiment-specific keys; each experiment reads the ones it needs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub distances: Option<Vec<i64>>,
    pub direction: Option<[i64; 2]>,
    pub edge_types: Option<[u8; 2]>,
    pub quadruples: Option<Vec<[[i64; 2]; 4]>>,
    pub rectangles: Option<Vec<[i64; 2]>>,
    pub table_radius: Option<usize>,
    pub slopes: Option<Vec<[f64; 2]>>,
    pub points: Option<Vec<[f64; 2]>>,
    pub directions: Option<Vec<u8>>,
    pub domain: Option<String>,
    pub field: Option<String>,
    pub cylinder: Option<[f64; 2]>,
    pub scales: Option<Vec<f64>>,
    pub z2: Option<f64>,
    pub edges: Option<Vec<[i64; 3]>>,
    pub observables: Option<Vec<String>>,
    pub sizes: Option<Vec<usize>>,
    pub window: Option<[f64; 2]>,
    pub fit_range: Option<[i64; 2]>,
}

pub fn parse(text: &str) -> Result<Config, CliError> {
    let c: Config = toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
    c.validate()?;
    Ok(c)
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl Config {
    fn validate(&self) -> Result<(), CliError> {
        for l in self.model.lambda.values() {
            if !l.is_finite() {
                return Err(invalid(format!("lambda = {l} is not finite")));
            }
        }
        if self.model.lambda.values().is_empty() {
            return Err(invalid("lambda list is empty"));
        }
        if let Some(b) = self.model.beta {
            if !(b.is_finite() && b >= 0.0) {
                return Err(invalid(format!("beta = {b} must be finite and non-negative")));
            }
        }
        let needs_geometry = matches!(
            self.experiment,
            Experiment::ExactDimer | Experiment::McDimer | Experiment::McIsing | Experiment::Haldane
        );
        if needs_geometry && self.geometry.is_none() {
            return Err(invalid(format!("experiment {} needs a [geometry] table", self.experiment.name())));
        }
        let needs_schedule = matches!(self.experiment, Experiment::McDimer | Experiment::McIsing | Experiment::Haldane);
        if needs_schedule && self.schedule.is_none() {
            return Err(invalid(format!("experiment {} needs a [schedule] table", self.experiment.name())));
        }
        Ok(())
    }

    pub fn weights(&self) -> Result<EdgeWeights, CliError> {
        let w = &self.weights;
        Ok(EdgeWeights::new(w.t1, w.t2, w.t3)?)
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.model.lambda.values()
    }

    pub fn schedule(&self) -> Result<Schedule, CliError> {
        let s = self.schedule.ok_or_else(|| invalid("missing [schedule]"))?;
        Ok(Schedule::new(s.burn_in, s.samples, s.thin)?)
    }

    pub fn beta(&self) -> f64 {
        self.model.beta.unwrap_or(0.5 * (2f64.sqrt() + 1.0).ln() / self.model.j)
    }

    pub fn dimer_geometry(&self) -> Result<LatticeGeometry, CliError> {
        let g = self.geometry.ok_or_else(|| invalid("missing [geometry]"))?;
        Ok(match g.boundary {
            BoundaryName::Torus => LatticeGeometry::torus(g.l1, g.l2)?,
            BoundaryName::Cylinder => LatticeGeometry::cylinder(g.l1, g.l2)?,
            BoundaryName::Window => LatticeGeometry::window(g.l1, g.l2)?,
            other => return Err(invalid(format!("boundary {other:?} is not a dimer geometry"))),
        })
    }

    pub fn ising_boundary(&self) -> Result<(usize, usize, IsingBoundary), CliError> {
        let g = self.geometry.ok_or_else(|| invalid("missing [geometry]"))?;
        let bc = match g.boundary {
            BoundaryName::Torus => IsingBoundary::Periodic,
            BoundaryName::Cylinder => IsingBoundary::Cylinder,
            BoundaryName::Free => IsingBoundary::Free,
            BoundaryName::Plus => IsingBoundary::Plus,
            BoundaryName::Minus => IsingBoundary::Minus,
            BoundaryName::Window => return Err(invalid("use boundary = \"free\" for open Ising lattices")),
        };
        Ok((g.l1, g.l2, bc))
    }

    pub fn ising_model(&self, lambda: f64) -> Result<IsingModel, CliError> {
        let inter = match self.model.interaction {
            InteractionName::DiagonalPairs => IsingInteraction::DiagonalPairs,
            InteractionName::Plaquette => IsingInteraction::Plaquette,
        };
        Ok(IsingModel::with_coupling(self.model.j, lambda, inter)?)
    }

    pub fn update(&self) -> UpdateKind {
        match self.model.update {
            UpdateName::Metropolis => UpdateKind::Metropolis,
            UpdateName::Wolff => UpdateKind::Wolff,
        }
    }
}
