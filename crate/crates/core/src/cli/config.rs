//! Run configuration: file schema, defaults and flag overrides.
//!
//! A config file is TOML (or JSON, detected by a leading `{`). A
//! `manifest.json` written by a previous run is also accepted; its `config`
//! member is used. Every section is optional; unknown keys are rejected.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::DEFAULT_DECAY_TOL;
use crate::discretization::GridSpec;
use crate::error::{Error, Result};
use crate::integrator::{BoundaryModel, Manufactured, Scheme, SimConfig, TensionModel};
use crate::model::{validate_params, ForcingSpec, ProfileSpec, RawParams};

fn default_t_end() -> f64 {
    10.0
}

fn default_cfl() -> f64 {
    0.5
}

fn default_stride() -> f64 {
    100.0
}

fn default_params() -> RawParams {
    RawParams {
        v: 0.3,
        b: 1.0,
        delta: 0.2,
        eta: 0.05,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default)]
    pub f: ProfileSpec,
    #[serde(default)]
    pub g: ProfileSpec,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            f: ProfileSpec::sine(0.2, 1),
            g: ProfileSpec::Zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub v_values: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            v_values: vec![0.0, 0.2, 0.4, 0.6, 0.7],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSection {
    /// Defaults to `n/4, n/2, n` with `n = grid.n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    #[serde(default = "Manufactured::decaying_sine")]
    pub solution: Manufactured,
    #[serde(default = "default_converge_t_end")]
    pub t_end: f64,
}

fn default_converge_t_end() -> f64 {
    1.0
}

impl Default for ConvergeSection {
    fn default() -> Self {
        Self {
            levels: None,
            solution: Manufactured::decaying_sine(),
            t_end: default_converge_t_end(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesSection {
    /// Displacement; evaluated on `n`, `2n` and `4n`.
    #[serde(default = "default_identity_y")]
    pub y: ProfileSpec,
    /// Stands in for the velocity.
    #[serde(default = "default_identity_w")]
    pub w: ProfileSpec,
}

fn default_identity_y() -> ProfileSpec {
    ProfileSpec::PolyBump { amplitude: 1.0 }
}

fn default_identity_w() -> ProfileSpec {
    ProfileSpec::sine(1.0, 2)
}

impl Default for IdentitiesSection {
    fn default() -> Self {
        Self {
            y: default_identity_y(),
            w: default_identity_w(),
        }
    }
}

fn default_k_v() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    #[serde(default = "default_k_v")]
    pub k_v: f64,
    #[serde(default)]
    pub tension: TensionModel,
}

impl Default for ControlSection {
    fn default() -> Self {
        Self {
            k_v: default_k_v(),
            tension: TensionModel::Linear,
        }
    }
}

/// Complete file schema. Also the config echo stored in a run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    /// Samples per unit time.
    #[serde(default = "default_stride")]
    pub output_stride: f64,
    /// Relative slack of the command's check; the command's own default
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default = "default_params")]
    pub params: RawParams,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub boundary: BoundaryModel,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub converge: ConvergeSection,
    #[serde(default)]
    pub identities: IdentitiesSection,
    #[serde(default)]
    pub control: ControlSection,
}

impl Default for FileConfig {
    fn default() -> Self {
        Self {
            t_end: default_t_end(),
            scheme: Scheme::default(),
            cfl_safety: default_cfl(),
            output_stride: default_stride(),
            tol: None,
            params: default_params(),
            grid: GridSection::default(),
            initial: InitialSection::default(),
            forcing: ForcingSpec::Zero,
            boundary: BoundaryModel::FixedFixed,
            sweep: SweepSection::default(),
            converge: ConvergeSection::default(),
            identities: IdentitiesSection::default(),
            control: ControlSection::default(),
        }
    }
}

/// Values given on the command line; each one replaces the file value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub scheme: Option<Scheme>,
    pub t_end: Option<f64>,
    pub v: Option<f64>,
    pub delta: Option<f64>,
    pub eta: Option<f64>,
    pub b: Option<f64>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub profile: Option<ProfileSpec>,
    pub k_v: Option<f64>,
    pub tension: Option<TensionModel>,
}

#[derive(Deserialize)]
struct ManifestShell {
    config: serde_json::Value,
}

fn with_path<T: DeserializeOwned>(
    result: std::result::Result<T, serde_path_to_error::Error<impl std::fmt::Display>>,
) -> Result<T> {
    result.map_err(|e| {
        let path = e.path().to_string();
        let key = if path == "." { "<root>".to_string() } else { path };
        Error::config(key, e.inner().to_string())
    })
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            let value: serde_json::Value =
                serde_json::from_str(text).map_err(|e| Error::config("<root>", e.to_string()))?;
            let value = match value.get("schema_version") {
                Some(_) => {
                    serde_json::from_value::<ManifestShell>(value)
                        .map_err(|e| Error::config("config", e.to_string()))?
                        .config
                }
                None => value,
            };
            with_path(serde_path_to_error::deserialize(value))
        } else {
            let de = toml::Deserializer::new(text);
            with_path(serde_path_to_error::deserialize(de))
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(n) = o.n {
            self.grid.n = n;
        }
        if let Some(s) = o.scheme {
            self.scheme = s;
        }
        if let Some(t) = o.t_end {
            self.t_end = t;
            self.converge.t_end = t;
        }
        if let Some(v) = o.v {
            self.params.v = v;
        }
        if let Some(d) = o.delta {
            self.params.delta = d;
        }
        if let Some(e) = o.eta {
            self.params.eta = e;
        }
        if let Some(b) = o.b {
            self.params.b = b;
        }
        if let Some(t) = o.tol {
            self.tol = Some(t);
        }
        if let Some(p) = &o.profile {
            self.initial.f = p.clone();
            self.identities.y = p.clone();
        }
        if let Some(k) = o.k_v {
            self.control.k_v = k;
        }
        if let Some(t) = o.tension {
            self.control.tension = t;
        }
        if let Some(seed) = o.seed {
            match &mut self.forcing {
                ForcingSpec::BoundedNoise { seed: s, .. } => *s = seed,
                _ => {
                    return Err(Error::config(
                        "seed",
                        "only bounded_noise forcing takes a seed",
                    ))
                }
            }
        }
        Ok(())
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn decay_tol(&self) -> f64 {
        self.tol_or(DEFAULT_DECAY_TOL)
    }

    /// Grid levels for `converge`: the file's list, or `n/4, n/2, n`.
    pub fn converge_levels(&self) -> Vec<usize> {
        match &self.converge.levels {
            Some(l) => l.clone(),
            None => {
                let n = self.grid.n;
                vec![n / 4, n / 2, n]
            }
        }
    }

    /// Validates everything and builds the simulation config; errors carry
    /// the key path of the offending value.
    pub fn to_sim_config(&self) -> Result<SimConfig> {
        let params = validate_params(self.params).map_err(|e| match e {
            Error::OutOfRange { name, reason, .. } => {
                Error::config(format!("params.{name}"), reason)
            }
            other => other,
        })?;
        let grid = GridSpec::new(self.grid.n).map_err(|e| Error::config("grid.n", e.to_string()))?;
        let keyed = |key: &str, r: Result<()>| r.map_err(|e| Error::config(key, e.to_string()));
        keyed("initial.f", self.initial.f.validate())?;
        keyed("initial.g", self.initial.g.validate())?;
        keyed("forcing", self.forcing.validate())?;
        keyed("boundary", self.boundary.validate())?;

        let mut sim = SimConfig::new(params, grid, self.t_end);
        sim.f = self.initial.f.clone();
        sim.g = self.initial.g.clone();
        sim.forcing = self.forcing.clone();
        sim.scheme = self.scheme;
        sim.cfl_safety = self.cfl_safety;
        sim.output_stride = self.output_stride;
        sim.boundary = self.boundary;
        sim.validate().map_err(|e| match e {
            Error::OutOfRange { name, reason, .. } => Error::config(name, reason),
            other => other,
        })?;
        Ok(sim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let c = FileConfig::parse(
            "t_end = 3.0\n[params]\nv = 0.1\nb = 1.0\ndelta = 0.2\neta = 0.05\n",
        )
        .unwrap();
        assert_eq!(c.t_end, 3.0);
        assert_eq!(c.scheme, Scheme::ImexCn);
        assert_eq!(c.grid.n, 256);
        assert_eq!(c.cfl_safety, 0.5);
        assert_eq!(c.output_stride, 100.0);
        let sim = c.to_sim_config().unwrap();
        assert_eq!(sim.f, ProfileSpec::sine(0.2, 1));
    }

    #[test]
    fn bad_speed_names_key() {
        let c = FileConfig::parse("[params]\nv = 1.2\nb = 1.0\ndelta = 0.2\neta = 0.05\n")
            .unwrap();
        match c.to_sim_config() {
            Err(Error::Config { key, .. }) => assert_eq!(key, "params.v"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flag_overrides_file() {
        let mut c =
            FileConfig::parse("[params]\nv = 0.1\nb = 1.0\ndelta = 0.2\neta = 0.05\n").unwrap();
        c.apply(&Overrides {
            v: Some(0.3),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(c.to_sim_config().unwrap().params.v(), 0.3);
    }

    #[test]
    fn unknown_keys_rejected_with_path() {
        match FileConfig::parse("[grid]\nn = 64\ncells = 3\n") {
            Err(Error::Config { key, reason }) => {
                assert!(key.starts_with("grid"), "{key}");
                assert!(reason.contains("cells"));
            }
            other => panic!("{other:?}"),
        }
        assert!(FileConfig::parse("speed = 1\n").is_err());
    }

    #[test]
    fn json_and_manifest_forms() {
        let c = FileConfig::parse(r#"{"t_end": 2.0, "grid": {"n": 64}}"#).unwrap();
        assert_eq!(c.grid.n, 64);
        let echo = serde_json::json!({"schema_version": 1, "config": c});
        let back = FileConfig::parse(&echo.to_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn toml_round_trip_of_full_schema() {
        let mut c = FileConfig::default();
        c.forcing = ForcingSpec::BoundedNoise {
            amplitude: 0.05,
            seed: 3,
            switch_rate: 100.0,
        };
        c.boundary = BoundaryModel::VelocityFeedback {
            k_v: 2.0,
            tension: TensionModel::Nonlinear,
        };
        let text = toml::to_string(&c).unwrap();
        assert_eq!(FileConfig::parse(&text).unwrap(), c);
    }

    #[test]
    fn noise_seed_is_mandatory_and_overridable() {
        let text = "[forcing]\nkind = \"bounded_noise\"\namplitude = 0.05\n";
        assert!(FileConfig::parse(text).is_err());
        let mut c = FileConfig::parse(&format!("{text}seed = 1\n")).unwrap();
        c.apply(&Overrides {
            seed: Some(9),
            ..Default::default()
        })
        .unwrap();
        assert!(matches!(c.forcing, ForcingSpec::BoundedNoise { seed: 9, .. }));
        let mut plain = FileConfig::default();
        assert!(plain
            .apply(&Overrides {
                seed: Some(9),
                ..Default::default()
            })
            .is_err());
    }

    #[test]
    fn grid_and_cfl_errors_are_keyed() {
        let mut c = FileConfig::default();
        c.grid.n = 3;
        assert!(matches!(c.to_sim_config(), Err(Error::Config { key, .. }) if key == "grid.n"));
        let mut c = FileConfig::default();
        c.cfl_safety = 2.0;
        assert!(matches!(c.to_sim_config(), Err(Error::Config { key, .. }) if key == "cfl_safety"));
    }
}
