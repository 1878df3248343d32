//! Flat JSON configuration, merged in order: defaults, config file, flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use spinmz::evolve::{Method, PropagatorConfig};
use spinmz::interferometer::{default_bias_grid, BiasPlacement, InterferometerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Populations,
    FidelityScan,
    SchemeCompare,
    Fringe,
    Sensitivity,
    BiasScan,
    Spectrum,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Populations => "populations",
            Experiment::FidelityScan => "fidelity-scan",
            Experiment::SchemeCompare => "scheme-compare",
            Experiment::Fringe => "fringe",
            Experiment::Sensitivity => "sensitivity",
            Experiment::BiasScan => "bias-scan",
            Experiment::Spectrum => "spectrum",
        }
    }
}

/// Sweep program for the populations experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// J ramped 0 → `j_final` at fixed B = `b_fixed`.
    #[serde(rename = "single-J", alias = "single-j")]
    SingleJ,
    /// B ramped `b_start` → 0 at fixed J = `j_fixed`.
    #[serde(rename = "single-B", alias = "single-b")]
    SingleB,
    #[serde(rename = "two-step")]
    TwoStep,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::SingleJ, Scheme::SingleB, Scheme::TwoStep];

    pub fn column_tag(self) -> &'static str {
        match self {
            Scheme::SingleJ => "single_j",
            Scheme::SingleB => "single_b",
            Scheme::TwoStep => "two_step",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every knob of every experiment. Times are in units of 1/J0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub n: Vec<usize>,
    /// Duration of each sweep step; the two-step BS1 takes 2τ.
    pub tau: f64,
    pub j0: f64,
    pub b0: f64,
    pub omega0: f64,
    /// Longitudinal bias δ/J0.
    pub delta: f64,
    pub bias_placement: BiasPlacement,
    pub dt: f64,
    pub method: Method,
    pub renormalize_every: usize,
    /// Trace sampling stride in integrator steps.
    pub sample_every: usize,
    pub scheme: Scheme,
    pub b_fixed: f64,
    pub j_final: f64,
    pub j_fixed: f64,
    pub b_start: f64,
    /// Total sweep times 2τ for fidelity-scan.
    pub two_tau_grid: Vec<f64>,
    pub phi_points: usize,
    /// Replace BS1 by an exact NOON state (fringe, sensitivity).
    pub ideal: bool,
    pub delta_grid: Vec<f64>,
    pub levels: usize,
    pub spectrum_points: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    /// Reserved; every experiment is deterministic.
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let prop = PropagatorConfig::default();
        Self {
            experiment: None,
            n: vec![2, 4, 6, 8],
            tau: 5.0,
            j0: 1.0,
            b0: 1.0,
            omega0: 1.0,
            delta: 0.0,
            bias_placement: BiasPlacement::default(),
            dt: prop.dt,
            method: prop.method,
            renormalize_every: prop.renormalize_every,
            sample_every: 100,
            scheme: Scheme::TwoStep,
            b_fixed: 0.4,
            j_final: 2.0,
            j_fixed: 0.4,
            b_start: 2.0,
            two_tau_grid: vec![2.0, 4.0, 6.0, 8.0, 10.0],
            phi_points: 64,
            ideal: false,
            delta_grid: default_bias_grid(),
            levels: 4,
            spectrum_points: 41,
            output_path: None,
            format: Format::Csv,
            seed: 0,
            threads: None,
        }
    }
}

impl ExperimentConfig {
    /// Layer the config file (if any) and flag overrides over the defaults.
    pub fn resolve(experiment: Experiment, file: Option<&Path>, overrides: Map<String, Value>) -> Result<Self> {
        let Value::Object(mut merged) = serde_json::to_value(Self::default())? else {
            unreachable!("config serializes to an object")
        };
        if let Some(path) = file {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            let value: Value =
                serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
            let Value::Object(entries) = value else {
                bail!("config {} must be a JSON object", path.display());
            };
            for (key, value) in entries {
                ensure!(
                    !value.is_object(),
                    "config key `{key}` is nested; the config file is flat"
                );
                merged.insert(key, value);
            }
        }
        merged.extend(overrides);
        merged.insert("experiment".into(), serde_json::to_value(experiment)?);
        let cfg: Self = serde_json::from_value(Value::Object(merged)).context("invalid configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.n.is_empty(), "`n` must list at least one chain length");
        ensure!(self.n.iter().all(|&n| n >= 1), "chain lengths must be positive");
        ensure!(self.tau.is_finite() && self.tau > 0.0, "`tau` must be positive");
        ensure!(self.dt.is_finite() && self.dt > 0.0, "`dt` must be positive");
        ensure!(!self.two_tau_grid.is_empty(), "`two_tau_grid` is empty");
        ensure!(!self.delta_grid.is_empty(), "`delta_grid` is empty");
        ensure!(self.phi_points >= 5, "`phi_points` must be at least 5");
        ensure!(self.levels >= 1, "`levels` must be at least 1");
        ensure!(self.spectrum_points >= 1, "`spectrum_points` must be at least 1");
        ensure!(self.threads != Some(0), "`threads` must be at least 1");
        Ok(())
    }

    pub fn experiment(&self) -> Result<Experiment> {
        self.experiment.context("no experiment selected")
    }

    pub fn propagator(&self) -> PropagatorConfig {
        PropagatorConfig {
            dt: self.dt,
            method: self.method,
            renormalize_every: self.renormalize_every,
        }
    }

    pub fn interferometer(&self, n_spins: usize) -> InterferometerConfig {
        InterferometerConfig {
            n_spins,
            tau: self.tau,
            j0: self.j0,
            b0: self.b0,
            omega0: self.omega0,
            propagator: self.propagator(),
            delta_bias: self.delta,
            bias_placement: self.bias_placement,
        }
    }
}

/// Parse `key=value`; the value is read as JSON, falling back to a bare string.
pub fn parse_assignment(text: &str) -> Result<(String, Value)> {
    let (key, raw) = text
        .split_once('=')
        .with_context(|| format!("expected KEY=VALUE, got `{text}`"))?;
    let key = key.trim();
    ensure!(!key.is_empty(), "empty key in `{text}`");
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    Ok((key.to_string(), value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn overrides(pairs: &[(&str, Value)]) -> Map<String, Value> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn defaults_resolve() {
        let cfg = ExperimentConfig::resolve(Experiment::Fringe, None, Map::new()).unwrap();
        assert_eq!(cfg.experiment, Some(Experiment::Fringe));
        assert_eq!(cfg.n, vec![2, 4, 6, 8]);
        assert_eq!(cfg.delta_grid.len(), 21);
    }

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(
            &path,
            r#"{"tau": 2.0, "n": [3], "scheme": "single-B", "experiment": "spectrum"}"#,
        )
        .unwrap();
        let cfg =
            ExperimentConfig::resolve(Experiment::Populations, Some(&path), overrides(&[("tau", json!(3.5))])).unwrap();
        assert_eq!(cfg.tau, 3.5);
        assert_eq!(cfg.n, vec![3]);
        assert_eq!(cfg.scheme, Scheme::SingleB);
        assert_eq!(cfg.experiment, Some(Experiment::Populations));
    }

    #[test]
    fn rejects_unknown_and_nested_keys() {
        let typo = overrides(&[("taus", json!(1.0))]);
        assert!(ExperimentConfig::resolve(Experiment::Fringe, None, typo).is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(&path, r#"{"propagator": {"dt": 0.01}}"#).unwrap();
        assert!(ExperimentConfig::resolve(Experiment::Fringe, Some(&path), Map::new()).is_err());
    }

    #[test]
    fn rejects_bad_scheme_and_empty_lists() {
        let bad = overrides(&[("scheme", json!("three-step"))]);
        assert!(ExperimentConfig::resolve(Experiment::Populations, None, bad).is_err());
        let empty = overrides(&[("n", json!([]))]);
        assert!(ExperimentConfig::resolve(Experiment::Populations, None, empty).is_err());
    }

    #[test]
    fn assignments() {
        assert_eq!(parse_assignment("dt=0.002").unwrap(), ("dt".into(), json!(0.002)));
        assert_eq!(parse_assignment("n=[2,4]").unwrap(), ("n".into(), json!([2, 4])));
        assert_eq!(
            parse_assignment("scheme=single-J").unwrap(),
            ("scheme".into(), json!("single-J"))
        );
        assert!(parse_assignment("novalue").is_err());
    }
}
