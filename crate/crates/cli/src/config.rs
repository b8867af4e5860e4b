//! Experiment configuration: a TOML document, validated and with every
//! default materialized before anything runs.

use std::path::PathBuf;

use pcf_core::diagnostics::{Scale, Window};
use pcf_core::initdata::{BumpSpec, Launch, Shape, SolitonParams};
use pcf_core::{Boundary, Direction, Grid, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Run,
    SolitonCheck,
    VirialStudy,
    DecayStudy,
    Convergence,
    Sweep,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Run => "run",
            Experiment::SolitonCheck => "soliton-check",
            Experiment::VirialStudy => "virial-study",
            Experiment::DecayStudy => "decay-study",
            Experiment::Convergence => "convergence",
            Experiment::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverSection,
    pub initial: InitialData,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x_min: -50.0,
            x_max: 50.0,
            nx: 2048,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryName {
    #[default]
    Outgoing,
    Frozen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub t_end: f64,
    pub cfl: f64,
    pub boundary: BoundaryName,
    pub singularity_floor: f64,
    pub record_every: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            t_end: 20.0,
            cfl: pcf_core::solver::DEFAULT_CFL,
            boundary: BoundaryName::Outgoing,
            singularity_floor: pcf_core::solver::DEFAULT_SINGULARITY_FLOOR,
            record_every: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeName {
    #[default]
    SmoothCompact,
    GaussianTruncated,
    Mollifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaunchName {
    #[default]
    AtRest,
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionName {
    Left,
    #[default]
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BumpConfig {
    pub epsilon: f64,
    pub center: f64,
    pub width: f64,
    pub shape: ShapeName,
    pub launch: LaunchName,
    pub kick: f64,
}

impl Default for BumpConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            center: 0.0,
            width: 1.0,
            shape: ShapeName::SmoothCompact,
            launch: LaunchName::AtRest,
            kick: 0.0,
        }
    }
}

impl BumpConfig {
    pub fn spec(&self) -> BumpSpec {
        let shape = match self.shape {
            ShapeName::SmoothCompact => Shape::SmoothCompact,
            ShapeName::GaussianTruncated => Shape::GaussianTruncated,
            ShapeName::Mollifier => Shape::Mollifier,
        };
        let launch = match self.launch {
            LaunchName::AtRest => Launch::AtRest,
            LaunchName::Right => Launch::Right,
            LaunchName::Left => Launch::Left,
        };
        BumpSpec::new(self.epsilon, self.center, self.width)
            .with_shape(shape)
            .with_launch(launch)
            .with_kick(self.kick)
    }
}

fn default_lambda() -> f64 {
    1.0
}

pub fn default_theta() -> BumpConfig {
    BumpConfig {
        epsilon: 1.0,
        shape: ShapeName::Mollifier,
        ..BumpConfig::default()
    }
}

/// Initial data, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    Bump {
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default)]
        ltil: BumpConfig,
        #[serde(default)]
        phi: BumpConfig,
    },
    TravelingWave {
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default)]
        direction: DirectionName,
        #[serde(default)]
        ltil: BumpConfig,
        #[serde(default)]
        phi: BumpConfig,
    },
    SingularSoliton {
        mu: f64,
    },
    FiniteEnergySoliton {
        #[serde(default = "default_lambda")]
        lambda: f64,
        epsilon: f64,
        mu: f64,
        #[serde(default = "default_theta")]
        theta: BumpConfig,
    },
}

impl InitialData {
    pub fn direction(d: DirectionName) -> Direction {
        match d {
            DirectionName::Left => Direction::Left,
            DirectionName::Right => Direction::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowName {
    Sharp,
    #[default]
    Sech4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleName {
    #[default]
    LogSquared,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    /// Window speeds; the first one feeds the time series.
    pub v: Vec<f64>,
    pub delta: f64,
    pub window: WindowName,
    pub scale: ScaleName,
    pub norms: bool,
    pub continuity: bool,
    pub chiral: bool,
    /// Times at which field snapshots are written.
    pub snapshots: Vec<f64>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            v: vec![0.0],
            delta: pcf_core::diagnostics::DEFAULT_DELTA,
            window: WindowName::Sech4,
            scale: ScaleName::LogSquared,
            norms: true,
            continuity: true,
            chiral: false,
            snapshots: Vec::new(),
        }
    }
}

impl DiagnosticsConfig {
    pub fn window(&self) -> Window {
        match self.window {
            WindowName::Sharp => Window::Sharp,
            WindowName::Sech4 => Window::Sech4,
        }
    }

    pub fn scale(&self) -> Scale {
        match self.scale {
            ScaleName::LogSquared => Scale::LogSquared,
            ScaleName::Quadratic => Scale::Quadratic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// Exact solution for closed-form data, self-convergence otherwise.
    #[default]
    Auto,
    SelfConvergence,
    /// Free linear wave from the initial data.
    Dalembert,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceConfig {
    pub levels: usize,
    pub reference: Reference,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            levels: 3,
            reference: Reference::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    /// Amplitude of the Λ̃ bump (or of the finite-energy soliton).
    Epsilon,
    Lambda,
    Mu,
    Nx,
    TEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

fn config_err(path: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.to_string(),
        msg: msg.into(),
    }
}

impl ExperimentConfig {
    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::with_cfl(self.grid.x_min, self.grid.x_max, self.grid.nx, self.solver.cfl)
            .map_err(|e| config_err("grid", e.to_string()))
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            t_end: self.solver.t_end,
            cfl: self.solver.cfl,
            boundary: match self.solver.boundary {
                BoundaryName::Outgoing => Boundary::Outgoing,
                BoundaryName::Frozen => Boundary::Frozen,
            },
            singularity_floor: self.solver.singularity_floor,
            record_every: self.solver.record_every,
        }
    }

    /// Checks every numeric bound, naming the offending key.
    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        if !(g.x_min.is_finite() && g.x_max.is_finite() && g.x_min < g.x_max) {
            return Err(config_err("grid", format!("need finite x_min < x_max, got [{}, {}]", g.x_min, g.x_max)));
        }
        if g.nx < pcf_core::grid::MIN_NODES {
            return Err(config_err("grid.nx", format!("nx = {} is below the minimum {}", g.nx, pcf_core::grid::MIN_NODES)));
        }
        let s = &self.solver;
        if !(s.t_end.is_finite() && s.t_end >= 0.0) {
            return Err(config_err("solver.t_end", format!("t_end = {} must be finite and non-negative", s.t_end)));
        }
        if !(s.cfl > 0.0 && s.cfl <= 1.0) {
            return Err(config_err("solver.cfl", format!("cfl = {} must lie in (0, 1]", s.cfl)));
        }
        if !(s.singularity_floor > 0.0 && s.singularity_floor.is_finite()) {
            return Err(config_err("solver.singularity_floor", "must be finite and positive"));
        }
        if s.record_every == 0 {
            return Err(config_err("solver.record_every", "must be a positive integer"));
        }
        let d = &self.diagnostics;
        if !(d.delta > 0.0 && d.delta < 1.0) {
            return Err(config_err("diagnostics.delta", format!("delta = {} must lie in (0, 1)", d.delta)));
        }
        let windowed = matches!(self.experiment, Experiment::DecayStudy | Experiment::VirialStudy);
        for (i, v) in d.v.iter().enumerate() {
            if !v.is_finite() || (windowed && v.abs() >= 1.0) {
                return Err(config_err(
                    &format!("diagnostics.v[{i}]"),
                    format!("v = {v} violates the window constraint |v| < 1"),
                ));
            }
        }
        if windowed && d.v.is_empty() {
            return Err(config_err("diagnostics.v", "at least one window speed is required"));
        }
        if let Some(i) = d.snapshots.iter().position(|t| !t.is_finite()) {
            return Err(config_err(&format!("diagnostics.snapshots[{i}]"), "must be finite"));
        }
        if self.convergence.levels < 3 {
            return Err(config_err(
                "convergence.levels",
                format!("levels = {} but at least 3 are needed for an order", self.convergence.levels),
            ));
        }
        match (&self.sweep, self.experiment) {
            (None, Experiment::Sweep) => return Err(config_err("sweep", "a [sweep] table is required")),
            (Some(sw), _) if sw.values.is_empty() => return Err(config_err("sweep.values", "must not be empty")),
            (Some(sw), _) => {
                if let Some(i) = sw.values.iter().position(|v| !v.is_finite()) {
                    return Err(config_err(&format!("sweep.values[{i}]"), "must be finite"));
                }
            }
            _ => {}
        }
        self.validate_initial()
    }

    fn validate_initial(&self) -> Result<(), CliError> {
        let lam = |l: f64| {
            if l > 0.0 && l.is_finite() {
                Ok(())
            } else {
                Err(config_err("initial.lambda", format!("lambda = {l} must be finite and positive")))
            }
        };
        let bump = |name: &str, b: &BumpConfig| {
            b.spec()
                .validate()
                .map_err(|e| config_err(&format!("initial.{name}"), e.to_string()))
        };
        match &self.initial {
            InitialData::Bump { lambda, ltil, phi } | InitialData::TravelingWave { lambda, ltil, phi, .. } => {
                lam(*lambda)?;
                bump("ltil", ltil)?;
                bump("phi", phi)?;
            }
            InitialData::SingularSoliton { mu } => {
                SolitonParams::new(*mu)
                    .and_then(|p| p.require_singular().map(|_| p))
                    .map_err(|e| config_err("initial.mu", e.to_string()))?;
            }
            InitialData::FiniteEnergySoliton { lambda, epsilon, mu, theta } => {
                lam(*lambda)?;
                if !epsilon.is_finite() {
                    return Err(config_err("initial.epsilon", "must be finite"));
                }
                SolitonParams::new(*mu)
                    .and_then(|p| p.require_finite_energy().map(|_| p))
                    .map_err(|e| config_err("initial.mu", e.to_string()))?;
                bump("theta", theta)?;
            }
        }
        Ok(())
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let cfg: ExperimentConfig = toml::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Serializes a configuration with every field present.
pub fn emit_config(cfg: &ExperimentConfig) -> Result<String, CliError> {
    toml::to_string(cfg).map_err(|e| config_err("", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
experiment = "run"

[initial]
kind = "bump"
ltil = { epsilon = 0.01, width = 5.0 }
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.solver.cfl, 0.4);
        assert_eq!(c.diagnostics.delta, 0.5);
        assert_eq!(c.solver.boundary, BoundaryName::Outgoing);
        assert_eq!(c.grid.nx, 2048);
        match &c.initial {
            InitialData::Bump { lambda, ltil, phi } => {
                assert_eq!(*lambda, 1.0);
                assert_eq!(ltil.epsilon, 0.01);
                assert_eq!(phi.epsilon, 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let err = parse_config(&format!("{MINIMAL}\n[solver]\ncfll = 0.3\n")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cfll"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
        let err = parse_config(&MINIMAL.replace("width", "wdth")).unwrap_err();
        assert!(err.to_string().contains("wdth"));
    }

    #[test]
    fn superluminal_window_is_rejected() {
        let text = MINIMAL.replace("\"run\"", "\"decay-study\"") + "\n[diagnostics]\nv = [0.0, 1.5]\n";
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("diagnostics.v[1]") && msg.contains("|v| < 1"), "{msg}");
    }

    #[test]
    fn soliton_parameters_are_checked() {
        let text = "experiment = \"run\"\n[initial]\nkind = \"singular-soliton\"\nmu = 0.5\n";
        assert!(parse_config(text).unwrap_err().to_string().contains("initial.mu"));
        let text = "experiment = \"run\"\n[initial]\nkind = \"finite-energy-soliton\"\nepsilon = 0.05\nmu = 2.0\n";
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn emitted_config_parses_back() {
        let c = parse_config(MINIMAL).unwrap();
        let text = emit_config(&c).unwrap();
        assert_eq!(parse_config(&text).unwrap(), c);
    }
}
