//! Run configuration, read from TOML. Every field is optional; scenarios
//! fill in their own defaults and record the resolved values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::Engine;
use crate::harness::units::{lab_to_dimensionless, LabUnits};
use crate::state::Component;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub physics: Physics,
    pub sweep: Sweep,
    pub numerics: Numerics,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    pub phi_d: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub kicks: Option<usize>,
    /// Scaled period; ignored when `period_s` is given.
    pub tau: Option<f64>,
    /// Lab pulse period in seconds, converted with `units`.
    pub period_s: Option<f64>,
    pub engine: Engine,
    /// Explicit initial state; replaces the scenario's built-in states.
    pub initial: Option<Vec<Component>>,
    pub units: LabUnits,
}

impl Physics {
    /// Resolved scaled period, falling back to `default_tau`.
    pub fn tau_or(&self, default_tau: f64) -> Result<f64> {
        match (self.period_s, self.tau) {
            (Some(t), _) => lab_to_dimensionless(&self.units, t),
            (None, Some(tau)) => Ok(tau),
            (None, None) => Ok(default_tau),
        }
    }
}

/// Inclusive-start, exclusive-stop angle grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl AngleGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.step.is_nan() || self.step <= 0.0 || self.start.is_nan() || self.stop.is_nan() || self.stop <= self.start {
            return Err(Error::InvalidSweep(format!("empty angle grid {self:?}")));
        }
        let n = ((self.stop - self.start) / self.step - 1e-9).ceil() as usize;
        Ok((0..n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub gammas: Option<AngleGrid>,
    pub counts: Option<Vec<usize>>,
    pub kicks: Option<Vec<usize>>,
    pub epsilons: Option<Vec<f64>>,
    pub phis: Option<Vec<f64>>,
    pub zs: Option<Vec<f64>>,
}

fn non_empty<T: Clone>(name: &str, v: &Option<Vec<T>>, default: Vec<T>) -> Result<Vec<T>> {
    match v {
        Some(list) if list.is_empty() => Err(Error::InvalidSweep(format!("sweep.{name} is empty"))),
        Some(list) => Ok(list.clone()),
        None => Ok(default),
    }
}

impl Sweep {
    pub fn counts_or(&self, d: Vec<usize>) -> Result<Vec<usize>> {
        non_empty("counts", &self.counts, d)
    }
    pub fn kicks_or(&self, d: Vec<usize>) -> Result<Vec<usize>> {
        non_empty("kicks", &self.kicks, d)
    }
    pub fn epsilons_or(&self, d: Vec<f64>) -> Result<Vec<f64>> {
        non_empty("epsilons", &self.epsilons, d)
    }
    pub fn phis_or(&self, d: Vec<f64>) -> Result<Vec<f64>> {
        non_empty("phis", &self.phis, d)
    }
    pub fn zs_or(&self, d: Vec<f64>) -> Result<Vec<f64>> {
        non_empty("zs", &self.zs, d)
    }
    pub fn gammas_or(&self, d: AngleGrid) -> Result<Vec<f64>> {
        self.gammas.unwrap_or(d).points()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub grid: usize,
    pub n_theta: usize,
    pub steps_per_unit: usize,
    pub min_steps: usize,
    pub workers: Option<usize>,
}

impl Default for Numerics {
    fn default() -> Self {
        let r = crate::epsiclassical::Resolution::default();
        Self {
            grid: crate::state::DEFAULT_GRID,
            n_theta: r.n_theta,
            steps_per_unit: r.steps_per_unit,
            min_steps: r.min_steps,
            workers: None,
        }
    }
}

impl Numerics {
    pub fn resolution(&self) -> crate::epsiclassical::Resolution {
        crate::epsiclassical::Resolution {
            n_theta: self.n_theta,
            steps_per_unit: self.steps_per_unit,
            min_steps: self.min_steps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: None, formats: vec![Format::Csv] }
    }
}

impl ExperimentConfig {
    pub fn for_scenario(name: &str) -> Self {
        Self { scenario: name.to_string(), ..Self::default() }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_sections() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
            scenario = "fig8_phase_scan"
            [physics]
            phi_d = 1.4
            period_s = 5.2e-5
            engine = "grid"
            [sweep]
            counts = [2, 5]
            gammas = { start = 0.0, stop = 6.283185307179586, step = 0.0872664625997165 }
            [numerics]
            workers = 2
            [output]
            formats = ["csv", "svg"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.scenario, "fig8_phase_scan");
        assert_eq!(cfg.physics.engine, Engine::Grid);
        assert_eq!(cfg.sweep.counts, Some(vec![2, 5]));
        assert_eq!(cfg.sweep.gammas.unwrap().points().unwrap().len(), 72);
        assert_eq!(cfg.numerics.grid, 1024);
        assert_eq!(cfg.output.formats, vec![Format::Csv, Format::Svg]);
        assert!(cfg.physics.tau_or(0.0).unwrap() > 6.0);
    }

    #[test]
    fn rejects_unknown_keys_and_empty_sweeps() {
        assert!(ExperimentConfig::from_toml_str("bogus = 1").is_err());
        let cfg = ExperimentConfig::from_toml_str("[sweep]\ncounts = []").unwrap();
        assert!(matches!(cfg.sweep.counts_or(vec![2]), Err(Error::InvalidSweep(_))));
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = ExperimentConfig::for_scenario("fig7_meanp");
        cfg.physics.phi_d = Some(1.4);
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
