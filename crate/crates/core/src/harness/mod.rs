//! Experiment driver: convergence and conditioning tables, field output and
//! consistency checks, each written as CSV/VTK plus a run manifest.

mod checks;
mod conditioning;
mod convergence;
mod fields;

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checks::{run_checks, CheckOutcome, ChecksReport};
pub use conditioning::{run_conditioning, CondRow, ConditioningTable, Representation};
pub use convergence::{run_convergence, ConvergenceRow, ConvergenceTable};
pub use fields::{run_fields, sample_fields, FieldArtifact, FieldSamples};

use crate::basis::BasisError;
use crate::hdg::{HdgError, Method};
use crate::linalg::LinalgError;
use crate::mesh::{streamline_mesh, structured_unit_square, Diagonal, Mesh, MeshError, StreamlineOptions};
use crate::post::Region;
use crate::problems::{builtin_problem, smooth_with_beta, CustomProblem, ProblemError, ProblemSpec};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Hdg(#[from] HdgError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl HarnessError {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        HarnessError::Io { path: path.to_path_buf(), message: e.to_string() }
    }
}

/// Built-in problem by name, or one given by expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemChoice {
    Builtin(String),
    Custom(CustomProblem),
}

impl Default for ProblemChoice {
    fn default() -> Self {
        ProblemChoice::Builtin("smooth".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingMode {
    #[default]
    Unscaled,
    Scaled,
    Both,
}

impl ScalingMode {
    pub fn variants(self) -> &'static [bool] {
        match self {
            ScalingMode::Unscaled => &[false],
            ScalingMode::Scaled => &[true],
            ScalingMode::Both => &[false, true],
        }
    }
}

impl std::str::FromStr for ScalingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unscaled" => Ok(ScalingMode::Unscaled),
            "scaled" => Ok(ScalingMode::Scaled),
            "both" => Ok(ScalingMode::Both),
            _ => Err(format!("unknown scaling mode {s:?}, expected unscaled, scaled or both")),
        }
    }
}

/// How the mesh for level `n` is built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeshChoice {
    /// `n x n` squares, each cut in two.
    Structured { diagonal: Diagonal },
    /// Streamline-aligned mesh with target size `1/n`.
    Streamline { c: f64 },
}

impl Default for MeshChoice {
    fn default() -> Self {
        MeshChoice::Structured { diagonal: Diagonal::NE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemChoice,
    /// Velocity override for the `smooth` problem.
    pub beta: Option<[f64; 2]>,
    pub epsilons: Vec<f64>,
    pub ks: Vec<usize>,
    pub levels: Vec<usize>,
    pub mesh: MeshChoice,
    pub methods: Vec<Method>,
    pub scaling: ScalingMode,
    /// Where errors are measured.
    pub region: Region,
    /// Also compute and report the postprocessed scalar.
    pub postprocess: bool,
    /// Check the discrete identities on every solve.
    pub identities: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemChoice::default(),
            beta: None,
            epsilons: vec![1.0],
            ks: vec![0, 1, 2, 3],
            levels: vec![5, 10, 20, 40],
            mesh: MeshChoice::default(),
            methods: vec![Method::Hdg1],
            scaling: ScalingMode::default(),
            region: Region::Full,
            postprocess: false,
            identities: true,
        }
    }
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(s).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn problem_name(&self) -> String {
        match &self.problem {
            ProblemChoice::Builtin(name) => name.clone(),
            ProblemChoice::Custom(c) => c.name.clone(),
        }
    }

    pub fn build_problem(&self, epsilon: f64) -> Result<ProblemSpec, HarnessError> {
        match (&self.problem, self.beta) {
            (ProblemChoice::Builtin(name), Some(beta)) if name == "smooth" => Ok(smooth_with_beta(epsilon, beta)?),
            (_, Some(_)) => Err(HarnessError::Config("a velocity override is only supported for the smooth problem".into())),
            (ProblemChoice::Builtin(name), None) => Ok(builtin_problem(name, epsilon)?),
            (ProblemChoice::Custom(c), None) => Ok(c.build(epsilon)?),
        }
    }

    /// Mesh for level `n`. The velocity is only consulted by the streamline
    /// mesher.
    pub fn build_mesh(&self, n: usize, problem: &ProblemSpec) -> Result<Mesh, HarnessError> {
        if n == 0 {
            return Err(HarnessError::Config("mesh level must be positive".into()));
        }
        match self.mesh {
            MeshChoice::Structured { diagonal } => Ok(structured_unit_square(n, diagonal)?),
            MeshChoice::Streamline { c } => {
                let beta = problem.beta.clone();
                let opts = StreamlineOptions { c, ..StreamlineOptions::default() };
                Ok(streamline_mesh(&move |x| beta.eval(x), 1.0 / n as f64, opts)?.mesh)
            }
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.into()));
        if self.epsilons.is_empty() || self.ks.is_empty() || self.levels.is_empty() || self.methods.is_empty() {
            return bad("epsilons, ks, levels and methods must be non-empty");
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return bad("every epsilon must be positive and finite");
        }
        if self.levels.contains(&0) {
            return bad("mesh levels must be positive");
        }
        Ok(())
    }
}

/// Record written next to every set of outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: RunConfig,
    pub package: &'static str,
    pub version: &'static str,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig, wall: Duration, outputs: Vec<String>) -> Self {
        Self {
            command: command.into(),
            config: config.clone(),
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            wall_time_seconds: wall.as_secs_f64(),
            outputs,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, HarnessError> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| HarnessError::io(&path, e))?;
        Ok(path)
    }
}

pub(crate) fn create_file(path: &Path) -> Result<BufWriter<fs::File>, HarnessError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    fs::File::create(path).map(BufWriter::new).map_err(|e| HarnessError::io(path, e))
}

/// `1e-9` -> `1e-9`, `0.001` -> `1e-3`, `1` -> `1e0`; safe in file names.
pub(crate) fn eps_tag(eps: f64) -> String {
    format!("{eps:e}").replace('+', "")
}

pub(crate) fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.prec$e}"),
        Some(x) => x.to_string(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_overrides() {
        let c = RunConfig::from_json(r#"{"problem": "boundary_layer", "epsilons": [1e-2], "methods": ["hdg2"], "scaling": "both"}"#).unwrap();
        assert_eq!(c.problem, ProblemChoice::Builtin("boundary_layer".into()));
        assert_eq!(c.ks, vec![0, 1, 2, 3]);
        assert_eq!(c.methods, vec![Method::Hdg2]);
        assert_eq!(c.scaling.variants(), &[false, true]);
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn custom_problem_config() {
        let c = RunConfig::from_json(r#"{"problem": {"beta": ["1", "0"], "source": "1"}}"#).unwrap();
        let p = c.build_problem(0.5).unwrap();
        assert_eq!(p.name, "custom");
        assert!(RunConfig::from_json(r#"{"problm": "smooth"}"#).is_err());
    }

    #[test]
    fn beta_override_only_for_smooth() {
        let mut c = RunConfig { beta: Some([1.0, 1.0]), ..RunConfig::default() };
        assert!(c.build_problem(1.0).is_ok());
        c.problem = ProblemChoice::Builtin("rotating".into());
        assert!(matches!(c.build_problem(1.0), Err(HarnessError::Config(_))));
    }

    #[test]
    fn eps_tags() {
        assert_eq!(eps_tag(1e-9), "1e-9");
        assert_eq!(eps_tag(1.0), "1e0");
        assert_eq!(eps_tag(0.001), "1e-3");
    }
}
