//! Experiment configuration: one JSON document carrying the family description and
//! the per-subcommand parameters. Unknown keys are rejected and the whole
//! document is echoed into every output artifact.

use serde::{Deserialize, Serialize};
use skewflow_core::presets;
use skewflow_core::{CocycleFamily, FamilyConfig};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version_default() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version_default")]
    pub schema_version: u32,
    pub family: FamilyConfig,
    /// Seed for random point sampling (the `proximal` pair draws).
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub validate: ValidateParams,
    #[serde(default)]
    pub rigidity: RigidityParams,
    #[serde(default)]
    pub proximal: ProximalParams,
    #[serde(default)]
    pub aps: ApsParams,
    #[serde(default)]
    pub liyorke: LiYorkeParams,
    #[serde(default)]
    pub density: DensityParams,
}

impl ExperimentConfig {
    pub fn family(&self) -> Result<CocycleFamily, skewflow_core::Error> {
        CocycleFamily::from_config(&self.family)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateParams {
    pub levels: u32,
    pub samples: u32,
    pub tol: f64,
}

impl Default for ValidateParams {
    fn default() -> Self {
        ValidateParams {
            levels: 6,
            samples: 64,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RigidityParams {
    pub k_max: u32,
    pub base_samples: u32,
    pub fiber_samples: u32,
    /// The profile must end below this many radians.
    pub threshold: f64,
}

impl Default for RigidityParams {
    fn default() -> Self {
        RigidityParams {
            k_max: 6,
            base_samples: 32,
            fiber_samples: 32,
            threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProximalParams {
    pub k_max: u32,
    /// Number of random fiber pairs over `0^∞`, drawn from the seed.
    pub pairs: u32,
    /// Every pair's distance at the last witness time must fall below this.
    pub threshold: f64,
}

impl Default for ProximalParams {
    fn default() -> Self {
        ProximalParams {
            k_max: 3,
            pairs: 20,
            threshold: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApsParams {
    /// Anchor angle of the equally spaced configuration.
    pub anchor: f64,
    pub horizon: u64,
    pub k_max: u32,
    /// Pairs expected to produce proximal witnesses below the threshold.
    pub same_arc_pairs: Vec<(f64, f64)>,
    /// Pairs expected to produce none.
    pub cross_arc_pairs: Vec<(f64, f64)>,
    pub witness_threshold: f64,
    pub witness_k_max: u32,
}

impl Default for ApsParams {
    fn default() -> Self {
        ApsParams {
            anchor: 0.2,
            horizon: 10_000,
            k_max: 6,
            same_arc_pairs: vec![(0.05, 0.25)],
            cross_arc_pairs: vec![(0.1, 0.6)],
            witness_threshold: 1e-2,
            witness_k_max: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LiYorkeParams {
    pub z1: f64,
    pub z2: f64,
    pub k_max: u32,
    pub eps_prox: f64,
    pub eps_rec: f64,
}

impl Default for LiYorkeParams {
    fn default() -> Self {
        LiYorkeParams {
            z1: 0.3,
            z2: 0.7,
            k_max: 6,
            eps_prox: 1e-2,
            eps_rec: 1e-1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityParams {
    pub prefix_len: u32,
    pub fiber_bins: u32,
    pub k_max: u32,
    pub anchor: f64,
    pub target_coverage: f64,
    /// When set, dump the first N direct steps of the orbit as a
    /// trajectory CSV (time, base literal, fiber).
    pub trajectory_steps: Option<u64>,
}

impl Default for DensityParams {
    fn default() -> Self {
        DensityParams {
            prefix_len: 3,
            fiber_bins: 3,
            k_max: 1,
            anchor: 0.9,
            target_coverage: 1.0,
            trajectory_steps: None,
        }
    }
}

/// Built-in configurations for the two reference families.
pub fn preset(name: &str) -> Result<ExperimentConfig, skewflow_core::Error> {
    let family = presets::by_name(name)?.config();
    Ok(ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        family,
        seed: 0,
        validate: ValidateParams::default(),
        rigidity: RigidityParams::default(),
        proximal: ProximalParams::default(),
        aps: ApsParams::default(),
        liyorke: LiYorkeParams::default(),
        density: DensityParams::default(),
    })
}
