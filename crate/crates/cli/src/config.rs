//! TOML run configurations and their content digests.

use std::fs;
use std::path::Path;

use critspectra::fitting::{FitWindow, StudyTemplate};
use critspectra::ising::{critical_beta2j, SimConfig, DEFAULT_EQUILIBRATION_STEPS};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Either a number or the name `"critical"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Beta2J {
    Value(f64),
    Named(String),
}

impl Default for Beta2J {
    fn default() -> Self {
        Beta2J::Named("critical".into())
    }
}

impl Beta2J {
    fn resolve(&self) -> CliResult<f64> {
        match self {
            Beta2J::Value(v) => Ok(*v),
            Beta2J::Named(n) if n == "critical" => Ok(critical_beta2j()),
            Beta2J::Named(n) => Err(CliError::Config(format!(
                "beta2j must be a number or \"critical\", got {n:?}"
            ))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub side: usize,
    pub tau: usize,
    #[serde(default)]
    pub beta2j: Beta2J,
    pub coupling: Option<f64>,
    pub equilibration_steps: Option<u64>,
    pub flips_per_step: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFile {
    pub seed: u64,
    pub simulation: SimulationSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub sizes: Vec<usize>,
    pub runs_per_size: usize,
    #[serde(default)]
    pub beta2j: Beta2J,
    pub tau_per_site: Option<f64>,
    pub equilibration_steps: Option<u64>,
    pub window: Option<[usize; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyFile {
    pub seed: u64,
    pub study: StudySection,
}

/// Fully resolved simulation settings; the digest is taken over this form.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedSimulation {
    pub seed: u64,
    pub side: usize,
    pub tau: usize,
    pub beta2j: f64,
    pub coupling: f64,
    pub equilibration_steps: u64,
    pub flips_per_step: u64,
}

impl ResolvedSimulation {
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            side: self.side,
            coupling: self.coupling,
            beta2j: self.beta2j,
            seed: self.seed,
            equilibration_steps: self.equilibration_steps,
            tau: self.tau,
            flips_per_step: self.flips_per_step,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedStudy {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub runs_per_size: usize,
    pub beta2j: f64,
    pub tau_per_site: f64,
    pub equilibration_steps: u64,
    pub window: Option<[usize; 2]>,
}

impl ResolvedStudy {
    pub fn template(&self) -> CliResult<StudyTemplate> {
        let window = self
            .window
            .map(|[a, b]| FitWindow::new(a, b))
            .transpose()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(StudyTemplate {
            beta2j: self.beta2j,
            tau_per_site: self.tau_per_site,
            equilibration_steps: self.equilibration_steps,
            seed: self.seed,
            window,
        })
    }
}

fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse<T: DeserializeOwned>(text: &str) -> CliResult<T> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

pub fn resolve_simulation(file: SimulateFile) -> CliResult<ResolvedSimulation> {
    let s = file.simulation;
    let resolved = ResolvedSimulation {
        seed: file.seed,
        side: s.side,
        tau: s.tau,
        beta2j: s.beta2j.resolve()?,
        coupling: s.coupling.unwrap_or(1.0),
        equilibration_steps: s.equilibration_steps.unwrap_or(DEFAULT_EQUILIBRATION_STEPS),
        flips_per_step: s.flips_per_step.unwrap_or(10 * (s.side * s.side) as u64),
    };
    Ok(resolved)
}

pub fn load_simulation(path: &Path) -> CliResult<ResolvedSimulation> {
    resolve_simulation(load(path)?)
}

pub fn resolve_study(file: StudyFile) -> CliResult<ResolvedStudy> {
    let s = file.study;
    Ok(ResolvedStudy {
        seed: file.seed,
        sizes: s.sizes,
        runs_per_size: s.runs_per_size,
        beta2j: s.beta2j.resolve()?,
        tau_per_site: s.tau_per_site.unwrap_or(5.0),
        equilibration_steps: s.equilibration_steps.unwrap_or(DEFAULT_EQUILIBRATION_STEPS),
        window: s.window,
    })
}

pub fn load_study(path: &Path) -> CliResult<ResolvedStudy> {
    resolve_study(load(path)?)
}

/// Canonical TOML text of a resolved configuration.
pub fn canonical<T: Serialize>(resolved: &T) -> String {
    toml::to_string(resolved).expect("resolved configs serialize to TOML")
}

/// Hex SHA-256.
pub fn digest(content: impl AsRef<[u8]>) -> String {
    Sha256::digest(content.as_ref())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_simulation_config() {
        let file: SimulateFile = parse("seed = 1\n[simulation]\nside = 8\ntau = 16\n").unwrap();
        let r = resolve_simulation(file).unwrap();
        assert_eq!(r.flips_per_step, 640);
        assert_eq!(r.beta2j, critical_beta2j());
        assert_eq!(r.equilibration_steps, DEFAULT_EQUILIBRATION_STEPS);
    }

    #[test]
    fn missing_field_is_named() {
        let err = parse::<SimulateFile>("seed = 1\n[simulation]\nside = 8\n").unwrap_err();
        assert!(err.to_string().contains("tau"), "{err}");
    }

    #[test]
    fn unknown_field_and_bad_beta() {
        assert!(parse::<SimulateFile>("seed = 1\n[simulation]\nside = 8\ntau = 2\nbogus = 1\n").is_err());
        let file: SimulateFile =
            parse("seed = 1\n[simulation]\nside = 8\ntau = 2\nbeta2j = \"hot\"\n").unwrap();
        assert!(matches!(resolve_simulation(file), Err(CliError::Config(_))));
    }

    #[test]
    fn digest_tracks_content() {
        let a = canonical(&resolve_simulation(parse("seed = 1\n[simulation]\nside = 8\ntau = 16\n").unwrap()).unwrap());
        let b = canonical(
            &resolve_simulation(parse("seed=1\n[simulation]\ntau=16\nside=8\nbeta2j=\"critical\"\n").unwrap()).unwrap(),
        );
        let c = canonical(&resolve_simulation(parse("seed = 2\n[simulation]\nside = 8\ntau = 16\n").unwrap()).unwrap());
        assert_eq!(digest(&a), digest(&b));
        assert_ne!(digest(&a), digest(&c));
        assert_eq!(digest(&a).len(), 64);
    }
}
