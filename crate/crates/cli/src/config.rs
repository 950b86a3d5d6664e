use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Select profile parameters and write `profile.json`.
    BuildProfile,
    /// Run the verifier suite for a preset and write `reports.json`.
    Verify,
    /// Compare closed-form and finite-difference scalar curvature.
    ScanCurvature,
    /// Discretise a drawstring sequence and compare with the pulled distance.
    Pulled,
    /// Tabulate the conformal inversion curve.
    Inversion,
    /// Solve the Jacobi equation for constant curvature.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    /// Flat `T² × S¹` drawstring with parameters from the selection inequalities.
    FlatTorus,
    /// Flat drawstring with desk-scale parameters (`r1 = 0.2`).
    FlatTorusDesk,
    /// Round `S³` drawstring with parameters from the selection inequalities.
    RoundS3,
    /// Round `S³` drawstring with desk-scale parameters (`r1 = 0.2`).
    RoundS3Desk,
    FlatBaseline,
    RoundS3Baseline,
    /// Spherical cap glued into Schwarzschild of mass `mass`.
    Af,
    /// Conformally inverted round sphere with parameter `delta`.
    ConformalInversion,
    /// Two-parameter warped prototype with `proto_c1`, `proto_c2`.
    Prototype,
}

impl PresetName {
    pub fn is_drawstring(self) -> bool {
        matches!(
            self,
            PresetName::FlatTorus | PresetName::FlatTorusDesk | PresetName::RoundS3 | PresetName::RoundS3Desk
        )
    }
}

/// Everything a run depends on. Fields left out of a config file take
/// their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Model preset; see [`RunConfig::preset`] for the default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetName>,
    pub eps: f64,
    /// Constant nonpositive boundary value `v0`.
    pub v0_const: f64,
    /// Pull exponent `c`; `inf` collapses the axis to a point.
    pub c_pull: f64,
    pub resolution: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Integration steps for `jacobi`; command default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Sample count for grids and scans; command default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    pub t_period: f64,
    pub mass: f64,
    pub delta: f64,
    /// Constant curvature for `jacobi`.
    pub kappa: f64,
    pub proto_c1: f64,
    pub proto_c2: f64,
    /// Also write the baseline lattice of `pulled` as node and edge CSV.
    pub export_space: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Verify,
            preset: None,
            eps: 0.01,
            v0_const: -1.0,
            c_pull: f64::INFINITY,
            resolution: 128,
            output_dir: PathBuf::from("out"),
            seed: 0,
            steps: None,
            points: None,
            t_period: 2.0 * PI,
            mass: 0.1,
            delta: 0.0,
            kappa: 1.0,
            proto_c1: 0.01,
            proto_c2: 0.1,
            export_space: false,
        }
    }
}

impl RunConfig {
    /// The configured preset, or the command's default: desk scale for
    /// `pulled` and `scan-curvature`, whose lattices and finite differences
    /// cannot resolve a fully selected tube, and `flat-torus` otherwise.
    pub fn preset(&self) -> PresetName {
        self.preset.unwrap_or(match self.command {
            Command::Pulled | Command::ScanCurvature => PresetName::FlatTorusDesk,
            _ => PresetName::FlatTorus,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(CliError::Config(msg.into()));
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps must be positive and finite");
        }
        if !(self.v0_const <= 0.0 && self.v0_const.is_finite()) {
            return bad("v0 must be finite and nonpositive");
        }
        if !(self.c_pull >= 0.0) {
            return bad("c must be nonnegative or inf");
        }
        if self.resolution == 0 {
            return bad("resolution must be positive");
        }
        if !(self.t_period > 0.0 && self.t_period.is_finite()) {
            return bad("t_period must be positive and finite");
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad("delta must be finite and nonnegative");
        }
        if !self.mass.is_finite() || !self.kappa.is_finite() {
            return bad("mass and kappa must be finite");
        }
        if self.steps == Some(0) || self.points == Some(0) {
            return bad("steps and points must be positive");
        }
        Ok(())
    }
}

/// Command-line flags. A value given here overrides the config file, which
/// overrides the defaults.
#[derive(Debug, Clone, Parser)]
#[command(name = "drawstring", version, about = "Drawstring deformations: profiles, checks and tables")]
pub struct Flags {
    pub command: Command,
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Model to run; the default depends on the command.
    #[arg(long, value_enum)]
    pub preset: Option<PresetName>,
    /// Target accuracy of the drawstring profile.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Constant boundary value `v0 < 0`.
    #[arg(long, allow_hyphen_values = true)]
    pub v0: Option<f64>,
    /// Pull exponent; a nonnegative number or `inf`.
    #[arg(long = "c")]
    pub c: Option<f64>,
    /// Lattice points per side of each `t` layer (even).
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for random sample points.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Integration steps of the Jacobi solver.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Number of sample points or radii.
    #[arg(long)]
    pub points: Option<usize>,
    /// Period of the circle factor.
    #[arg(long)]
    pub t_period: Option<f64>,
    /// Mass of the asymptotically flat model.
    #[arg(long)]
    pub mass: Option<f64>,
    /// Parameter of the conformal inversion, `delta >= 0`.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Constant curvature of the Jacobi equation.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Also write the lattice as `nodes.csv` and `edges.csv`.
    #[arg(long)]
    pub export_space: bool,
}

impl Flags {
    pub fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.command = self.command;
        if self.preset.is_some() {
            cfg.preset = self.preset;
        }
        if let Some(v) = self.eps {
            cfg.eps = v;
        }
        if let Some(v) = self.v0 {
            cfg.v0_const = v;
        }
        if let Some(v) = self.c {
            cfg.c_pull = v;
        }
        if let Some(v) = self.resolution {
            cfg.resolution = v;
        }
        if let Some(v) = self.out {
            cfg.output_dir = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if self.steps.is_some() {
            cfg.steps = self.steps;
        }
        if self.points.is_some() {
            cfg.points = self.points;
        }
        if let Some(v) = self.t_period {
            cfg.t_period = v;
        }
        if let Some(v) = self.mass {
            cfg.mass = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.kappa {
            cfg.kappa = v;
        }
        cfg.export_space |= self.export_space;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_file_takes_defaults() {
        let cfg = RunConfig::from_toml_str("command = \"pulled\"\nc_pull = 0.5\n").unwrap();
        assert_eq!(cfg.command, Command::Pulled);
        assert_eq!(cfg.c_pull, 0.5);
        assert_eq!(cfg.eps, 0.01);
    }

    #[test]
    fn rejects_unknown_and_invalid_fields() {
        assert!(RunConfig::from_toml_str("colour = 1").is_err());
        assert!(RunConfig::from_toml_str("v0_const = 0.5").is_err());
        assert!(RunConfig::from_toml_str("eps = -1.0").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "eps = 0.5\nseed = 7\n").unwrap();
        let flags = Flags::parse_from([
            "drawstring",
            "verify",
            "--config",
            path.to_str().unwrap(),
            "--eps",
            "0.25",
            "--v0",
            "-2",
            "--c",
            "inf",
        ]);
        let cfg = flags.into_config().unwrap();
        assert_eq!(cfg.eps, 0.25);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.v0_const, -2.0);
        assert_eq!(cfg.c_pull, f64::INFINITY);
    }
}
