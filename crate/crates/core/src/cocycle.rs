//! The cocycle family `Φ = {φ_k^j : 0 <= j <= 2^(n_k) - 2}` and its
//! structural conditions.
//!
//! Odd levels rotate by an exact rational angle determined by the schedule;
//! even levels apply arc power maps with exponents from a decreasing
//! sequence tending to 1. Index j = 0 is always the identity, the lower half
//! of the remaining indices selects the level map and the upper half its
//! inverse, which makes the full level composite cancel.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::{apply, arc_metric, compose, invert, CircleAngle, CircleHomeo, Turns};
use crate::error::{Error, Result};
use crate::odometer::{BlockSchedule, ScheduleExtension};

/// The exponent sequence `{t_k}` for even levels; strictly decreasing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TSequence {
    /// `t_k = 1 + 2^(shift - k)`.
    OnePlusPow2 {
        #[serde(default)]
        shift: i32,
    },
    /// Explicit leading values; levels beyond the list are an error.
    Explicit { values: Vec<f64> },
}

impl TSequence {
    pub fn value(&self, kappa: u32) -> Result<f64> {
        assert!(kappa >= 1);
        match self {
            TSequence::OnePlusPow2 { shift } => {
                Ok(1.0 + 2f64.powi(shift - kappa as i32))
            }
            TSequence::Explicit { values } => {
                values.get((kappa - 1) as usize).copied().ok_or_else(|| {
                    Error::InvalidFamily(format!(
                        "explicit t sequence has {} values but level 2*{kappa} was requested",
                        values.len()
                    ))
                })
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let TSequence::Explicit { values } = self {
            if values.is_empty() {
                return Err(Error::InvalidFamily("empty explicit t sequence".into()));
            }
            if values.iter().any(|&t| t <= 1.0 || !t.is_finite()) {
                return Err(Error::InvalidFamily(
                    "t values must be finite and > 1".into(),
                ));
            }
            if values.windows(2).any(|w| w[0] <= w[1]) {
                return Err(Error::InvalidFamily(
                    "t values must be strictly decreasing".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Rule fixing the odd-level rotation angles from the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RotationRule {
    /// `θ_k = 2π / (2^(n_(2k-1) - 1) - 1)`.
    #[default]
    C4,
}

/// JSON-facing description of a cocycle family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub schedule: Vec<u32>,
    #[serde(default = "FamilyConfig::default_extension")]
    pub schedule_extension: ScheduleExtension,
    #[serde(default = "FamilyConfig::default_t")]
    pub t: TSequence,
    #[serde(default = "FamilyConfig::default_arcs")]
    pub arcs: u32,
    #[serde(default)]
    pub rotation_rule: RotationRule,
}

impl FamilyConfig {
    fn default_extension() -> ScheduleExtension {
        ScheduleExtension::RepeatLast
    }

    fn default_t() -> TSequence {
        TSequence::OnePlusPow2 { shift: 0 }
    }

    fn default_arcs() -> u32 {
        1
    }
}

/// Per-level parameters: odd levels rotate, even levels apply arc powers.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSpec {
    Rotation { theta: Turns },
    Power { log_t: f64, arcs: u32 },
}

/// The full cocycle specification: schedule plus per-level map parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleFamily {
    schedule: BlockSchedule,
    t: TSequence,
    arcs: u32,
    rotation_rule: RotationRule,
}

impl CocycleFamily {
    pub fn new(schedule: BlockSchedule, t: TSequence, arcs: u32) -> Result<Self> {
        if arcs < 1 {
            return Err(Error::InvalidFamily("arc count must be >= 1".into()));
        }
        t.validate()?;
        Ok(CocycleFamily {
            schedule,
            t,
            arcs,
            rotation_rule: RotationRule::C4,
        })
    }

    pub fn from_config(cfg: &FamilyConfig) -> Result<Self> {
        let schedule = BlockSchedule::new(cfg.schedule.clone(), cfg.schedule_extension.clone())?;
        let mut fam = CocycleFamily::new(schedule, cfg.t.clone(), cfg.arcs)?;
        fam.rotation_rule = cfg.rotation_rule;
        Ok(fam)
    }

    /// Echo of the construction parameters (stored schedule only).
    pub fn config(&self) -> FamilyConfig {
        FamilyConfig {
            schedule: self.schedule.stored_blocks().to_vec(),
            schedule_extension: self.schedule.extension().clone(),
            t: self.t.clone(),
            arcs: self.arcs,
            rotation_rule: self.rotation_rule,
        }
    }

    pub fn schedule(&self) -> &BlockSchedule {
        &self.schedule
    }

    pub fn arcs(&self) -> u32 {
        self.arcs
    }

    /// Rotation angle of odd-level pair index `kappa` (level `2κ-1`) in turns.
    pub fn theta(&self, kappa: u32) -> Turns {
        let n = self.schedule.block_len(2 * kappa - 1);
        let denom = (BigInt::one() << (n - 1)) - BigInt::one();
        Turns::new(num_rational::BigRational::new(BigInt::one(), denom))
    }

    /// Power exponent of even-level pair index `kappa` (level `2κ`).
    pub fn t_value(&self, kappa: u32) -> Result<f64> {
        self.t.value(kappa)
    }

    pub fn level_spec(&self, k: u32) -> Result<LevelSpec> {
        assert!(k >= 1);
        if k % 2 == 1 {
            Ok(LevelSpec::Rotation {
                theta: self.theta(k.div_ceil(2)),
            })
        } else {
            Ok(LevelSpec::Power {
                log_t: self.t_value(k / 2)?.ln(),
                arcs: self.arcs,
            })
        }
    }

    /// The level map `φ_k` shared by the lower branch indices; the upper
    /// branch applies its inverse.
    pub fn base_map(&self, k: u32) -> Result<CircleHomeo> {
        Ok(match self.level_spec(k)? {
            LevelSpec::Rotation { theta } => CircleHomeo::rotation(theta),
            LevelSpec::Power { log_t, arcs } => CircleHomeo::arc_power(arcs, log_t),
        })
    }

    /// Largest valid cocycle index at level k: `2^(n_k) - 2`.
    pub fn phi_index_max(&self, k: u32) -> BigUint {
        (BigUint::one() << self.schedule.block_len(k)) - BigUint::from(2u8)
    }

    /// The cocycle map `φ_k^j`.
    pub fn phi(&self, k: u32, j: &BigUint) -> Result<CircleHomeo> {
        let max = self.phi_index_max(k);
        if *j > max {
            return Err(Error::IndexOutOfRange {
                level: k,
                index: j.to_string(),
                max: max.to_string(),
            });
        }
        if j.is_zero() {
            return Ok(CircleHomeo::Identity);
        }
        // lower branch 1 <= j <= 2^(n_k - 1) - 1, upper branch the rest;
        // both branches then hold the same number of indices, which the
        // level composite cancellation requires
        let split = (BigUint::one() << (self.schedule.block_len(k) - 1)) - BigUint::one();
        let base = self.base_map(k)?;
        if *j <= split {
            Ok(base)
        } else {
            Ok(invert(&base))
        }
    }
}

/// Per-level validation outcome.
#[derive(Debug, Clone, Serialize)]
pub struct LevelCheck {
    pub level: u32,
    /// Sup distance of the level maps to the identity over the sample grid.
    pub c1_sup: f64,
    /// Whether `φ_k^0` is the identity at the representation level.
    pub c2_identity: bool,
    /// Max deviation of the full level composite `Ψ_k` from the identity.
    pub c3_max_dev: f64,
}

/// Validation of the structural conditions on a family.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub levels: Vec<LevelCheck>,
    /// The C1 sup profile must decay within each parity class; the two
    /// classes interleave on distinct scales so the joint sequence is not
    /// monotone in general.
    pub c1_odd_strictly_decreasing: bool,
    pub c1_even_strictly_decreasing: bool,
    pub samples: u32,
    pub tol: f64,
}

impl ValidationReport {
    /// First violated condition, if any.
    pub fn violation(&self) -> Option<(&'static str, u32)> {
        for lc in &self.levels {
            if !lc.c2_identity {
                return Some(("C2", lc.level));
            }
            if lc.c3_max_dev > self.tol {
                return Some(("C3", lc.level));
            }
        }
        if !self.c1_odd_strictly_decreasing {
            return Some(("C1", 0));
        }
        if !self.c1_even_strictly_decreasing {
            return Some(("C1", 0));
        }
        None
    }

    pub fn pass(&self) -> bool {
        self.violation().is_none()
    }

    pub fn ensure(&self) -> Result<()> {
        match self.violation() {
            None => Ok(()),
            Some((condition, level)) => Err(Error::ValidationFailure {
                condition,
                level,
                detail: format!(
                    "checked {} levels at {} samples, tol {}",
                    self.levels.len(),
                    self.samples,
                    self.tol
                ),
            }),
        }
    }
}

fn fiber_grid(samples: u32) -> impl Iterator<Item = CircleAngle> {
    (0..samples).map(move |i| CircleAngle::new(i as f64 / samples as f64))
}

fn sup_distance_to_identity(h: &CircleHomeo, samples: u32) -> f64 {
    fiber_grid(samples)
        .map(|z| arc_metric(apply(h, z), z))
        .fold(0.0, f64::max)
}

/// Validates C1 (level maps shrink to the identity), C2 (`φ^0 = id`) and C3
/// (the full level composite is the identity) for an arbitrary map source.
pub fn validate_with(
    phi: impl Fn(u32, &BigUint) -> Result<CircleHomeo>,
    schedule: &BlockSchedule,
    levels: u32,
    samples: u32,
    tol: f64,
) -> Result<ValidationReport> {
    assert!(levels >= 1 && samples >= 1);
    let mut checks = Vec::new();
    for k in 1..=levels {
        let n_k = schedule.block_len(k);
        if n_k > 24 {
            return Err(Error::InvalidFamily(format!(
                "level {k} has 2^{n_k} - 1 composite factors; refusing to validate"
            )));
        }
        let max_index = (1u64 << n_k) - 2;
        let mut c1_sup: f64 = 0.0;
        let mut composite = CircleHomeo::Identity;
        for j in 0..=max_index {
            let map = phi(k, &BigUint::from(j))?;
            c1_sup = c1_sup.max(sup_distance_to_identity(&map, samples));
            composite = compose(&map, &composite);
        }
        let c2_identity = phi(k, &BigUint::zero())?.is_identity();
        let c3_max_dev = sup_distance_to_identity(&composite, samples);
        checks.push(LevelCheck {
            level: k,
            c1_sup,
            c2_identity,
            c3_max_dev,
        });
    }
    let strictly_decreasing = |parity: u32| {
        let sups: Vec<f64> = checks
            .iter()
            .filter(|lc| lc.level % 2 == parity)
            .map(|lc| lc.c1_sup)
            .collect();
        sups.windows(2).all(|w| w[0] > w[1])
    };
    Ok(ValidationReport {
        c1_odd_strictly_decreasing: strictly_decreasing(1),
        c1_even_strictly_decreasing: strictly_decreasing(0),
        levels: checks,
        samples,
        tol,
    })
}

/// Validates the structural conditions of a family over the first `levels`
/// levels, sampling each map at `samples` fiber points.
pub fn validate_family(
    fam: &CocycleFamily,
    levels: u32,
    samples: u32,
    tol: f64,
) -> Result<ValidationReport> {
    validate_with(|k, j| fam.phi(k, j), fam.schedule(), levels, samples, tol)
}
