//! Experiment description read from a TOML file.
//!
//! Every constant the experiments depend on lives here; see
//! `examples/default.toml` for the annotated default file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{
    build_memberships, FuzzyPdConfig, Inference, RuleTable, SfDcGenes, Universes, DEFAULT_RULES,
};
use crate::ga::GaConfig;
use crate::ilc::{DisturbanceSpec, Feedback};
use crate::pid::PidGains;
use crate::plant::PlantParams;
use crate::trajectory::TrajectorySpec;
use crate::wavelet::{Boundary, Wavelet, WaveletConfig};

/// Genes of a previously tuned controller, used when a config gives none.
pub const DEFAULT_GENES: [f64; 6] = [0.21943, 0.26153, 0.9749, 0.82935, 0.64842, 0.64076];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seeds the disturbance noise and the GA.
    pub seed: u64,
    pub output_dir: PathBuf,
    pub plant: PlantParams,
    pub trial: TrialConfig,
    pub trajectory: TrajectorySpec,
    pub controller: ControllerConfig,
    pub pid: PidConfig,
    pub ilc: IlcConfig,
    pub ga: Option<GaConfig>,
    pub disturbance: DisturbanceSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            output_dir: PathBuf::from("out"),
            plant: PlantParams::default(),
            trial: TrialConfig::default(),
            trajectory: TrajectorySpec::default(),
            controller: ControllerConfig::default(),
            pid: PidConfig::default(),
            ilc: IlcConfig::default(),
            ga: None,
            disturbance: DisturbanceSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialConfig {
    /// Trial length (s); must be a whole number of samples.
    pub duration: f64,
    pub sample_period: f64,
    /// Actuator clamp on `u_l + u_f`.
    pub u_limit: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            duration: 4.0,
            sample_period: 1e-3,
            u_limit: 1.0,
        }
    }
}

impl TrialConfig {
    pub fn samples(&self) -> usize {
        (self.duration / self.sample_period).round() as usize
    }
}

/// Feedback law used inside every trial after the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ControllerConfig {
    Fuzzy {
        #[serde(default = "default_genes")]
        genes: [f64; 6],
        /// Defaults to bounds derived from the plant stroke.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        universes: Option<Universes>,
        #[serde(default = "default_rules")]
        rules: RuleTable,
        #[serde(default)]
        inference: Inference,
    },
    Pd {
        kp: f64,
        kd: f64,
    },
    Pid {
        kp: f64,
        ki: f64,
        kd: f64,
    },
}

fn default_genes() -> [f64; 6] {
    DEFAULT_GENES
}

fn default_rules() -> RuleTable {
    DEFAULT_RULES
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig::Fuzzy {
            genes: DEFAULT_GENES,
            universes: None,
            rules: DEFAULT_RULES,
            inference: Inference::default(),
        }
    }
}

impl ControllerConfig {
    /// The fuzzy controller with the given genes and otherwise default settings.
    pub fn fuzzy(genes: SfDcGenes) -> Self {
        ControllerConfig::Fuzzy {
            genes: genes.to_array(),
            universes: None,
            rules: DEFAULT_RULES,
            inference: Inference::default(),
        }
    }

    pub fn universes(&self, stroke: f64) -> Universes {
        match self {
            ControllerConfig::Fuzzy {
                universes: Some(u), ..
            } => *u,
            _ => Universes::for_stroke(stroke),
        }
    }

    pub fn fuzzy_config(&self, stroke: f64) -> Result<Option<FuzzyPdConfig>> {
        match self {
            ControllerConfig::Fuzzy {
                genes,
                rules,
                inference,
                ..
            } => {
                let cfg =
                    build_memberships(&SfDcGenes::from_array(*genes), &self.universes(stroke))?;
                Ok(Some(cfg.with_rules(*rules).with_inference(*inference)))
            }
            _ => Ok(None),
        }
    }

    pub fn feedback(&self, stroke: f64) -> Result<Feedback> {
        Ok(match self {
            ControllerConfig::Fuzzy { .. } => {
                Feedback::Fuzzy(self.fuzzy_config(stroke)?.expect("fuzzy"))
            }
            ControllerConfig::Pd { kp, kd } => Feedback::Pd { kp: *kp, kd: *kd },
            ControllerConfig::Pid { kp, ki, kd } => Feedback::Pid(PidGains {
                kp: *kp,
                ki: *ki,
                kd: *kd,
            }),
        })
    }
}

/// First-trial PID: explicit gains, or found from the stability limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PidConfig {
    /// When absent, gains come from the ultimate-gain search.
    pub gains: Option<PidGains>,
    /// Step start for the search; defaults to a quarter of the stroke.
    pub step_start: Option<f64>,
    /// Step target; defaults to three quarters of the stroke (a 50% step).
    pub step_target: Option<f64>,
    pub k_lo: f64,
    pub k_hi: f64,
    /// Simulated time per candidate gain (s).
    pub horizon: f64,
}

impl Default for PidConfig {
    fn default() -> Self {
        PidConfig {
            gains: None,
            step_start: None,
            step_target: None,
            k_lo: 0.1,
            k_hi: 1000.0,
            horizon: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConfig {
    #[default]
    Normal,
    GaBootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IlcConfig {
    pub alpha: f64,
    pub wavelet: Wavelet,
    pub level: usize,
    pub boundary: Boundary,
    pub iterations: usize,
    pub mode: ModeConfig,
    /// Wavelet-filter the feedback before learning it.
    pub filter: bool,
}

impl Default for IlcConfig {
    fn default() -> Self {
        IlcConfig {
            alpha: 1.0,
            wavelet: Wavelet::Db(4),
            level: 8,
            boundary: Boundary::Symmetric,
            iterations: 10,
            mode: ModeConfig::Normal,
            filter: true,
        }
    }
}

impl IlcConfig {
    pub fn wavelet_config(&self) -> WaveletConfig {
        WaveletConfig::new(self.wavelet, self.level).with_boundary(self.boundary)
    }
}

fn toml_error(e: toml::de::Error) -> Error {
    let field = e
        .span()
        .map(|s| format!("bytes {}..{}", s.start, s.end))
        .unwrap_or_else(|| "file".into());
    Error::Config {
        field,
        message: e.message().trim().to_string(),
    }
}

/// `[plant]` is flattened, so unknown keys are caught by comparing against
/// the serialized defaults.
fn check_plant_keys(root: &toml::Table) -> Result<()> {
    let Some(plant) = root.get("plant") else {
        return Ok(());
    };
    let Some(plant) = plant.as_table() else {
        return Err(Error::config("plant", "must be a table"));
    };
    let known: BTreeSet<String> = toml::Table::try_from(PlantParams::default())
        .expect("plant parameters serialize")
        .keys()
        .cloned()
        .collect();
    for key in plant.keys() {
        if !known.contains(key) {
            return Err(Error::config(format!("plant.{key}"), "unknown parameter"));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let root: toml::Table = toml::from_str(text).map_err(toml_error)?;
        check_plant_keys(&root)?;
        let cfg: ExperimentConfig = toml::from_str(text).map_err(toml_error)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Samples per trial.
    pub fn samples(&self) -> usize {
        self.trial.samples()
    }

    /// Field-level consistency checks.
    pub fn validate(&self) -> Result<()> {
        self.plant.validate().map_err(|e| match e {
            Error::Config { field, message } => Error::Config {
                field: format!("plant.{field}"),
                message,
            },
            other => other,
        })?;

        let t = &self.trial;
        if !(t.sample_period > 0.0 && t.sample_period.is_finite()) {
            return Err(Error::config("trial.sample_period", "must be positive"));
        }
        if !(t.duration > 0.0 && t.duration.is_finite()) {
            return Err(Error::config("trial.duration", "must be positive"));
        }
        let n = t.duration / t.sample_period;
        if (n - n.round()).abs() > 1e-6 * n.max(1.0) || n.round() < 2.0 {
            return Err(Error::config(
                "trial.duration",
                format!(
                    "{} s is not a whole number (>= 2) of {} s samples",
                    t.duration, t.sample_period
                ),
            ));
        }
        if !(t.u_limit > 0.0) {
            return Err(Error::config("trial.u_limit", "must be positive"));
        }

        self.trajectory.validate(Some((0.0, self.plant.stroke)))?;

        if let ControllerConfig::Fuzzy {
            genes, universes, ..
        } = &self.controller
        {
            SfDcGenes::from_array(*genes)
                .validate()
                .map_err(|e| match e {
                    Error::Config { field, message } => Error::Config {
                        field: format!("controller.{field}"),
                        message,
                    },
                    other => other,
                })?;
            if let Some(u) = universes {
                if !(u.e > 0.0 && u.de > 0.0 && u.out > 0.0) {
                    return Err(Error::config(
                        "controller.universes",
                        "bounds must be positive",
                    ));
                }
            }
        }

        let ilc = &self.ilc;
        if !(ilc.alpha >= 0.0 && ilc.alpha < 2.0) {
            return Err(Error::config(
                "ilc.alpha",
                format!("must lie in [0, 2), got {}", ilc.alpha),
            ));
        }
        if ilc.iterations == 0 {
            return Err(Error::config("ilc.iterations", "must be >= 1"));
        }
        if ilc.filter {
            ilc.wavelet_config()
                .validate_for(self.samples())
                .map_err(|e| Error::config("ilc.level", e.to_string()))?;
        }

        let p = &self.pid;
        if !(p.k_lo > 0.0 && p.k_hi > p.k_lo) {
            return Err(Error::config("pid.k_lo", "need 0 < k_lo < k_hi"));
        }
        if !(p.horizon > 0.0) {
            return Err(Error::config("pid.horizon", "must be positive"));
        }

        if let Some(ga) = &self.ga {
            ga.validate()?;
        }
        self.disturbance.validate(self.samples())
    }
}
