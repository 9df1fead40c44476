//! Numerical certification of dynamical properties of constructed flows:
//! uniform-rigidity profiles, proximality traces, almost-periodic fiber
//! configurations, strong Li-Yorke evidence, and orbit-density coverage.
//!
//! Everything here is finite evidence, not proof: each report echoes the
//! grid, horizon, and tolerance parameters it was computed with.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{arc_metric, CircleAngle};
use crate::cocycle::CocycleFamily;
use crate::error::{Error, Result};
use crate::flow::{fast_m_k, fast_zero_orbit, step, FlowPoint, DIRECT_ITERATION_BUDGET};
use crate::odometer::{metric_d, OdometerPoint};

/// Deviation tolerance for almost-periodic configuration spacing.
pub const AP_TOLERANCE: f64 = 1e-12;

/// Serializes big-integer times as decimal strings (they exceed 64 bits).
pub mod biguint_string {
    use num_bigint::BigUint;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(v)
    }
}

/// Max-metric on the product space: base metric vs fiber arc length.
///
/// The two factors enter unscaled (base diameter 1, fiber diameter π);
/// rigidity thresholds are relative to this choice.
pub fn product_metric(p: &FlowPoint, q: &FlowPoint) -> f64 {
    metric_d(&p.base, &q.base).max(arc_metric(p.fiber, q.fiber))
}

/// Sampling grid for rigidity profiles.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    /// Number of base points, spread evenly over the prefix cylinders of
    /// length `off(k_max)`.
    pub base_samples: u32,
    /// Number of equally spaced fiber points.
    pub fiber_samples: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct RigidityEntry {
    pub level: u32,
    #[serde(with = "biguint_string")]
    pub time: BigUint,
    pub sup_displacement: f64,
}

/// Sup displacement of `F^(m_k)` over a sample grid, per level.
#[derive(Debug, Clone, Serialize)]
pub struct RigidityProfile {
    pub entries: Vec<RigidityEntry>,
    pub grid: GridSpec,
    pub threshold: f64,
}

impl RigidityProfile {
    /// The certified claim is the trend toward zero: the profile ends below
    /// both its first entry and the threshold.
    pub fn trend_pass(&self) -> bool {
        match (self.entries.first(), self.entries.last()) {
            (Some(first), Some(last)) => {
                last.sup_displacement < first.sup_displacement
                    && last.sup_displacement < self.threshold
            }
            _ => false,
        }
    }
}

/// Evaluates the rigidity profile over `base_samples x fiber_samples` grid
/// points; each entry costs O(k) homeomorphism operations per point.
pub fn rigidity_profile(
    fam: &CocycleFamily,
    k_max: u32,
    grid: GridSpec,
    threshold: f64,
) -> Result<RigidityProfile> {
    assert!(k_max >= 1 && grid.base_samples >= 1 && grid.fiber_samples >= 1);
    let schedule = fam.schedule();
    let off = schedule.offset(k_max);
    // Weyl stride through the 2^off prefix cylinders: all digit positions
    // vary across samples (a plain stride would pin the low blocks at zero
    // and hide the low-level fiber displacement), and the first half of a
    // doubled grid is the original grid, so refining never loses points.
    let modulus = BigUint::one() << off;
    let multiplier = ((&modulus * BigUint::from(0x9E37_79B9u32)) >> 32u32) | BigUint::one();
    let points: Vec<FlowPoint> = (0..grid.base_samples)
        .flat_map(|i| {
            let v = (BigUint::from(i) * &multiplier) % &modulus;
            let base = OdometerPoint::from_integer(&v);
            (0..grid.fiber_samples).map(move |j| {
                FlowPoint::new(
                    base.clone(),
                    CircleAngle::new(j as f64 / grid.fiber_samples as f64),
                )
            })
        })
        .collect();
    let sups: Vec<f64> = (1..=k_max)
        .map(|k| {
            points
                .par_iter()
                .map(|p| {
                    let moved = fast_m_k(fam, p, k)?;
                    Ok(product_metric(&moved, p))
                })
                .try_reduce(|| 0.0f64, |a, b| Ok(a.max(b)))
        })
        .collect::<Result<_>>()?;
    Ok(RigidityProfile {
        entries: sups
            .into_iter()
            .zip(1..=k_max)
            .map(|(sup, k)| RigidityEntry {
                level: k,
                time: schedule.return_time(k),
                sup_displacement: sup,
            })
            .collect(),
        grid,
        threshold,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProximalSample {
    pub kappa: u32,
    #[serde(with = "biguint_string")]
    pub time: BigUint,
    pub distance: f64,
}

/// Fiber distances of a pair over `0^∞` at the closed-form witness times
/// `T_κ = 2^(n_(2κ)-1) · m_(2κ-1)`.
#[derive(Debug, Clone, Serialize)]
pub struct ProximalTrace {
    pub z1: f64,
    pub z2: f64,
    pub samples: Vec<ProximalSample>,
}

impl ProximalTrace {
    pub fn final_distance(&self) -> Option<f64> {
        self.samples.last().map(|s| s.distance)
    }
}

/// Traces a same-fiber pair over `0^∞` through the proximality witness
/// times. At `T_κ` the fiber has absorbed `2^(n_(2κ)-1) - 1` applications of
/// the level-`2κ` power map, evaluated in log space as one closed-form jump.
pub fn proximal_trace(
    fam: &CocycleFamily,
    z1: CircleAngle,
    z2: CircleAngle,
    k_max: u32,
) -> Result<ProximalTrace> {
    let mut samples = Vec::new();
    for kappa in 1..=k_max {
        let level = 2 * kappa - 1;
        let s = BigUint::one() << (fam.schedule().block_len(2 * kappa) - 1);
        let q1 = fast_zero_orbit(fam, z1, level, &s)?;
        let q2 = fast_zero_orbit(fam, z2, level, &s)?;
        // same time, same base orbit
        debug_assert_eq!(q1.base, q2.base);
        samples.push(ProximalSample {
            kappa,
            time: s * fam.schedule().return_time(level),
            distance: arc_metric(q1.fiber, q2.fiber),
        });
    }
    Ok(ProximalTrace {
        z1: z1.turns(),
        z2: z2.turns(),
        samples,
    })
}

/// An almost-periodic candidate: `n` fiber points equally spaced by `1/n` of
/// a turn over one base point.
#[derive(Debug, Clone, Serialize)]
pub struct APConfiguration {
    pub base: OdometerPoint,
    pub anchor: f64,
    pub count: u32,
}

impl APConfiguration {
    pub fn new(base: OdometerPoint, anchor: CircleAngle, count: u32) -> Self {
        assert!(count >= 1);
        APConfiguration {
            base,
            anchor: anchor.turns(),
            count,
        }
    }

    pub fn points(&self) -> Vec<FlowPoint> {
        (0..self.count)
            .map(|j| {
                FlowPoint::new(
                    self.base.clone(),
                    CircleAngle::new(self.anchor + j as f64 / self.count as f64),
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApReport {
    pub count: u32,
    pub horizon: u64,
    pub checked_levels: u32,
    /// Max deviation of consecutive arc distances from `2π/n` seen anywhere.
    pub max_deviation: f64,
    pub tolerance: f64,
}

fn max_spacing_deviation(points: &[FlowPoint], target: f64) -> f64 {
    points
        .windows(2)
        .map(|w| (arc_metric(w[0].fiber, w[1].fiber) - target).abs())
        .fold(0.0, f64::max)
}

/// Checks that the configuration's consecutive spacing `2π/n` survives
/// `horizon` direct steps and the recurrence times `m_k`, `k <= levels`.
/// Errors with the first violating time if the spacing ever drifts past the
/// tolerance.
pub fn verify_ap_configuration(
    fam: &CocycleFamily,
    cfg: &APConfiguration,
    horizon: u64,
    levels: u32,
) -> Result<ApReport> {
    if fam.arcs() != cfg.count {
        return Err(Error::Precondition(format!(
            "family has {} arcs but the configuration has {} points",
            fam.arcs(),
            cfg.count
        )));
    }
    if horizon > DIRECT_ITERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            requested: horizon.to_string(),
            budget: DIRECT_ITERATION_BUDGET,
        });
    }
    let target = std::f64::consts::TAU / cfg.count as f64;
    let mut max_dev: f64 = 0.0;
    let mut points = cfg.points();
    if cfg.count > 1 {
        for t in 0..=horizon {
            let dev = max_spacing_deviation(&points, target);
            max_dev = max_dev.max(dev);
            if dev > AP_TOLERANCE {
                return Err(Error::ConfigurationBroken {
                    time: t.to_string(),
                    deviation: dev,
                });
            }
            if t < horizon {
                points = points
                    .iter()
                    .map(|p| step(fam, p))
                    .collect::<Result<_>>()?;
            }
        }
        let start = cfg.points();
        for k in 1..=levels {
            let moved: Vec<FlowPoint> = start
                .iter()
                .map(|p| fast_m_k(fam, p, k))
                .collect::<Result<_>>()?;
            let dev = max_spacing_deviation(&moved, target);
            max_dev = max_dev.max(dev);
            if dev > AP_TOLERANCE {
                return Err(Error::ConfigurationBroken {
                    time: fam.schedule().return_time(k).to_string(),
                    deviation: dev,
                });
            }
        }
    }
    Ok(ApReport {
        count: cfg.count,
        horizon,
        checked_levels: levels,
        max_deviation: max_dev,
        tolerance: AP_TOLERANCE,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    #[serde(with = "biguint_string")]
    pub time: BigUint,
    pub value: f64,
}

/// Evidence that a pair is strong Li-Yorke: proximal witness times where the
/// fiber distance collapses, recurrence witness times where the pair returns
/// near itself, and the separation at time zero.
#[derive(Debug, Clone, Serialize)]
pub struct LiYorkeEvidence {
    pub base: OdometerPoint,
    pub z1: f64,
    pub z2: f64,
    pub eps_prox: f64,
    pub eps_rec: f64,
    pub separated_at_zero: bool,
    /// Times with pair fiber distance below `eps_prox`; strictly increasing.
    pub proximal_witnesses: Vec<Witness>,
    /// Times `m_k` with pair displacement below `eps_rec`; strictly increasing.
    pub recurrence_witnesses: Vec<Witness>,
    pub strong_li_yorke: bool,
}

/// Scans a same-fiber pair over `0^∞` for strong Li-Yorke evidence:
/// proximality witnesses from the closed-form trace times, recurrence
/// witnesses from the rigidity times `m_k` (uniform rigidity returns every
/// pair near itself).
pub fn scan_strong_li_yorke(
    fam: &CocycleFamily,
    p1: &FlowPoint,
    p2: &FlowPoint,
    k_max: u32,
    eps_prox: f64,
    eps_rec: f64,
) -> Result<LiYorkeEvidence> {
    if p1.base != p2.base {
        return Err(Error::Precondition(
            "strong Li-Yorke scan requires a same-fiber pair".into(),
        ));
    }
    if !p1.base.is_zero() {
        return Err(Error::Precondition(
            "closed-form witness times require the fiber over 0^∞".into(),
        ));
    }
    let trace = proximal_trace(fam, p1.fiber, p2.fiber, k_max)?;
    let proximal_witnesses: Vec<Witness> = trace
        .samples
        .into_iter()
        .filter(|s| s.distance < eps_prox)
        .map(|s| Witness {
            time: s.time,
            value: s.distance,
        })
        .collect();
    let mut recurrence_witnesses = Vec::new();
    for k in 1..=k_max {
        let d1 = product_metric(&fast_m_k(fam, p1, k)?, p1);
        let d2 = product_metric(&fast_m_k(fam, p2, k)?, p2);
        let displacement = d1.max(d2);
        if displacement < eps_rec {
            recurrence_witnesses.push(Witness {
                time: fam.schedule().return_time(k),
                value: displacement,
            });
        }
    }
    let separated_at_zero = arc_metric(p1.fiber, p2.fiber) > eps_prox;
    let strong_li_yorke =
        separated_at_zero && !proximal_witnesses.is_empty() && !recurrence_witnesses.is_empty();
    Ok(LiYorkeEvidence {
        base: p1.base.clone(),
        z1: p1.fiber.turns(),
        z2: p2.fiber.turns(),
        eps_prox,
        eps_rec,
        separated_at_zero,
        proximal_witnesses,
        recurrence_witnesses,
        strong_li_yorke,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityStage {
    /// 0 for the direct-iteration phase, then the odd rotation level driving
    /// each closed-form burst.
    pub k: u32,
    pub cells_hit: u64,
    pub cells_total: u64,
    pub coverage: f64,
}

/// Coverage of (prefix cylinder) x (fiber bin) cells along an orbit.
#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub prefix_len: u32,
    pub fiber_bins: u32,
    pub k_max: u32,
    /// Direct-iteration horizon used for the small-time phase.
    pub horizon: u64,
    pub stages: Vec<DensityStage>,
    pub coverage: f64,
    /// First-hit time per cell (cylinder-major), decimal strings.
    pub first_hits: Vec<Option<String>>,
}

const DENSITY_DIRECT_CAP: u64 = 1 << 14;

/// Accumulates cell coverage along the orbit of `p`: direct steps for small
/// times plus, when the orbit starts over `0^∞`, the closed-form rotation
/// bursts at times `s · m_(2κ-2)`. Coverage is nondecreasing in `k_max`.
pub fn orbit_density(
    fam: &CocycleFamily,
    p: &FlowPoint,
    prefix_len: u32,
    fiber_bins: u32,
    k_max: u32,
) -> Result<DensityReport> {
    assert!(prefix_len <= 20, "cell table would not fit");
    assert!(fiber_bins >= 1);
    struct CellTable {
        first_hits: Vec<Option<BigUint>>,
        hits: u64,
        prefix_len: u32,
        fiber_bins: u32,
    }
    impl CellTable {
        fn record(&mut self, q: &FlowPoint, time: BigUint) {
            let cyl = q
                .base
                .prefix_value(self.prefix_len as usize)
                .to_u64()
                .expect("prefix_len <= 20");
            let bin = ((q.fiber.turns() * self.fiber_bins as f64) as u64)
                .min(self.fiber_bins as u64 - 1);
            let idx = (cyl * self.fiber_bins as u64 + bin) as usize;
            if self.first_hits[idx].is_none() {
                self.first_hits[idx] = Some(time);
                self.hits += 1;
            }
        }

        fn stage(&self, k: u32) -> DensityStage {
            let cells_total = self.first_hits.len() as u64;
            DensityStage {
                k,
                cells_hit: self.hits,
                cells_total,
                coverage: self.hits as f64 / cells_total as f64,
            }
        }
    }
    let cells_total = (1u64 << prefix_len) * fiber_bins as u64;
    let mut table = CellTable {
        first_hits: vec![None; cells_total as usize],
        hits: 0,
        prefix_len,
        fiber_bins,
    };

    let horizon = fam
        .schedule()
        .return_time(k_max + 1)
        .to_u64()
        .unwrap_or(DENSITY_DIRECT_CAP)
        .min(DENSITY_DIRECT_CAP);
    let mut q = p.clone();
    for t in 0..horizon {
        table.record(&q, BigUint::from(t));
        q = step(fam, &q)?;
    }
    let mut stages = vec![table.stage(0)];

    // Rotation bursts sweep the fiber through the θ multiples while the base
    // walks the cylinders; they are only anchored at 0^∞.
    if p.base.is_zero() {
        let mut rot_level = 1u32;
        while rot_level <= k_max {
            let width = fam.schedule().block_len(rot_level);
            let mut s = BigUint::one();
            let bound = BigUint::one() << width;
            while s < bound {
                let burst = fast_zero_orbit(fam, p.fiber, rot_level - 1, &s)?;
                let time = &s * fam.schedule().return_time(rot_level - 1);
                table.record(&burst, time);
                s += BigUint::one();
            }
            stages.push(table.stage(rot_level));
            rot_level += 2;
        }
    }

    Ok(DensityReport {
        prefix_len,
        fiber_bins,
        k_max,
        horizon,
        coverage: table.hits as f64 / cells_total as f64,
        stages,
        first_hits: table
            .first_hits
            .into_iter()
            .map(|h| h.map(|t| t.to_string()))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::TSequence;
    use crate::odometer::BlockSchedule;
    use crate::presets;

    fn c5_family() -> CocycleFamily {
        presets::proximal_c5()
    }

    fn ang(x: f64) -> CircleAngle {
        CircleAngle::new(x)
    }

    #[test]
    fn rigidity_profile_reference_family() {
        let fam = c5_family();
        let grid = GridSpec {
            base_samples: 16,
            fiber_samples: 16,
        };
        let profile = rigidity_profile(&fam, 4, grid, 0.08).unwrap();
        assert_eq!(profile.entries.len(), 4);
        for e in &profile.entries {
            assert!(e.sup_displacement >= 0.0);
        }
        // the grid freezes block k_max+1 at zero, so at k = k_max the fiber
        // term telescopes away and only the base displacement remains
        let last = profile.entries.last().unwrap();
        let base_only = 1.0 / (fam.schedule().offset(4) as f64 + 1.0);
        assert!((last.sup_displacement - base_only).abs() < 1e-15);
        assert!(profile.trend_pass());
    }

    #[test]
    fn rigidity_metamorphic_grid_doubling() {
        let fam = c5_family();
        let coarse = rigidity_profile(
            &fam,
            3,
            GridSpec {
                base_samples: 8,
                fiber_samples: 8,
            },
            0.1,
        )
        .unwrap();
        let fine = rigidity_profile(
            &fam,
            3,
            GridSpec {
                base_samples: 16,
                fiber_samples: 16,
            },
            0.1,
        )
        .unwrap();
        assert_eq!(coarse.trend_pass(), fine.trend_pass());
        for (c, f) in coarse.entries.iter().zip(&fine.entries) {
            // a finer grid can only see more displacement, within 2x slack
            assert!(f.sup_displacement + 1e-15 >= c.sup_displacement);
            assert!(f.sup_displacement <= 2.0 * c.sup_displacement.max(1e-6));
        }
    }

    #[test]
    fn proximal_trace_equal_points_is_zero() {
        let fam = c5_family();
        let t = proximal_trace(&fam, ang(0.3), ang(0.3), 3).unwrap();
        assert!(t.samples.iter().all(|s| s.distance == 0.0));
    }

    #[test]
    fn proximal_trace_collapses_on_c5() {
        let fam = c5_family();
        let t = proximal_trace(&fam, ang(0.3), ang(0.7), 3).unwrap();
        assert!(t.final_distance().unwrap() < 1e-3, "{:?}", t.samples);
        // nonincreasing distances along the witness sequence
        for w in t.samples.windows(2) {
            assert!(w[1].distance <= w[0].distance + 1e-12);
        }
    }

    #[test]
    fn proximal_trace_c6_splits_by_arc() {
        let schedule = BlockSchedule::repeat_last(vec![3, 3, 4, 4, 5, 5]).unwrap();
        let fam =
            CocycleFamily::new(schedule, TSequence::OnePlusPow2 { shift: 3 }, 2).unwrap();
        // same arc: both local coordinates sink to the arc endpoint
        let same = proximal_trace(&fam, ang(0.1), ang(0.3), 3).unwrap();
        assert!(same.final_distance().unwrap() < 1e-3);
        // different arcs: the points settle on distinct endpoints half a turn apart
        let cross = proximal_trace(&fam, ang(0.1), ang(0.6), 3).unwrap();
        let limit = std::f64::consts::PI;
        assert!((cross.final_distance().unwrap() - limit).abs() < 1e-3);
    }

    #[test]
    fn ap_configuration_holds_for_matching_arcs() {
        let fam = presets::almost_proximal_c6_n3();
        let cfg = APConfiguration::new(OdometerPoint::zero(), ang(0.2), 3);
        let report = verify_ap_configuration(&fam, &cfg, 2_000, 4).unwrap();
        assert!(report.max_deviation <= AP_TOLERANCE);
    }

    #[test]
    fn ap_configuration_guards() {
        let fam = presets::almost_proximal_c6_n3();
        // single point: vacuous pass
        let single = APConfiguration::new(OdometerPoint::zero(), ang(0.4), 1);
        let fam1 = CocycleFamily::new(
            fam.schedule().clone(),
            TSequence::OnePlusPow2 { shift: 3 },
            1,
        )
        .unwrap();
        assert!(verify_ap_configuration(&fam1, &single, 100, 2).is_ok());
        // arc count mismatch is a precondition error
        let cfg = APConfiguration::new(OdometerPoint::zero(), ang(0.2), 3);
        let fam2 = CocycleFamily::new(
            fam.schedule().clone(),
            TSequence::OnePlusPow2 { shift: 3 },
            2,
        )
        .unwrap();
        assert!(matches!(
            verify_ap_configuration(&fam2, &cfg, 10, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn li_yorke_evidence_on_c5_pair() {
        let fam = c5_family();
        let p1 = FlowPoint::over_zero(ang(0.3));
        let p2 = FlowPoint::over_zero(ang(0.7));
        let ev = scan_strong_li_yorke(&fam, &p1, &p2, 6, 1e-2, 1e-1).unwrap();
        assert!(ev.separated_at_zero);
        assert!(!ev.proximal_witnesses.is_empty());
        assert!(!ev.recurrence_witnesses.is_empty());
        assert!(ev.strong_li_yorke);
        // witness times strictly increase
        for w in ev.proximal_witnesses.windows(2) {
            assert!(w[0].time < w[1].time);
        }
        for w in ev.recurrence_witnesses.windows(2) {
            assert!(w[0].time < w[1].time);
        }
    }

    #[test]
    fn li_yorke_equal_pair_is_not_scrambled() {
        let fam = c5_family();
        let p = FlowPoint::over_zero(ang(0.3));
        let ev = scan_strong_li_yorke(&fam, &p, &p, 4, 1e-2, 1e-1).unwrap();
        assert!(!ev.separated_at_zero);
        assert!(!ev.strong_li_yorke);
    }

    #[test]
    fn li_yorke_cross_arc_pair_has_no_proximal_witness() {
        let schedule = BlockSchedule::repeat_last(vec![3, 3, 4, 4, 5, 5]).unwrap();
        let fam =
            CocycleFamily::new(schedule, TSequence::OnePlusPow2 { shift: 3 }, 2).unwrap();
        let p1 = FlowPoint::over_zero(ang(0.1));
        let p2 = FlowPoint::over_zero(ang(0.6));
        let ev = scan_strong_li_yorke(&fam, &p1, &p2, 3, 1e-2, 1e-1).unwrap();
        assert!(ev.proximal_witnesses.is_empty());
        assert!(!ev.strong_li_yorke);
    }

    #[test]
    fn li_yorke_preconditions() {
        let fam = c5_family();
        let p1 = FlowPoint::over_zero(ang(0.3));
        let p2 = FlowPoint::new("1*0".parse().unwrap(), ang(0.7));
        assert!(scan_strong_li_yorke(&fam, &p1, &p2, 2, 1e-2, 1e-1).is_err());
        let q1 = FlowPoint::new("1*0".parse().unwrap(), ang(0.3));
        assert!(scan_strong_li_yorke(&fam, &q1, &p2, 2, 1e-2, 1e-1).is_err());
    }

    #[test]
    fn density_trivial_cell_grid() {
        let fam = c5_family();
        let report = orbit_density(&fam, &FlowPoint::over_zero(ang(0.5)), 0, 1, 1).unwrap();
        assert_eq!(report.coverage, 1.0);
        assert_eq!(report.first_hits[0].as_deref(), Some("0"));
    }

    #[test]
    fn density_full_coverage_via_level_one_burst() {
        let fam = c5_family();
        let report = orbit_density(&fam, &FlowPoint::over_zero(ang(0.9)), 3, 3, 1).unwrap();
        assert_eq!(report.coverage, 1.0, "stages: {:?}", report.stages);
        assert!(report.first_hits.iter().all(|h| h.is_some()));
    }

    #[test]
    fn density_nondecreasing_in_k_max() {
        let fam = c5_family();
        let p = FlowPoint::over_zero(ang(0.5));
        let c1 = orbit_density(&fam, &p, 3, 3, 1).unwrap().coverage;
        let c3 = orbit_density(&fam, &p, 3, 3, 3).unwrap().coverage;
        assert!(c3 >= c1);
        // stage coverage is cumulative within one run as well
        let report = orbit_density(&fam, &p, 3, 3, 3).unwrap();
        for w in report.stages.windows(2) {
            assert!(w[1].coverage >= w[0].coverage);
        }
    }

    #[test]
    fn rigidity_times_are_recurrence_witnesses() {
        // consistency: a level with sup displacement < ε certifies every
        // pair's return at tolerance 2ε
        let fam = c5_family();
        let grid = GridSpec {
            base_samples: 8,
            fiber_samples: 8,
        };
        let profile = rigidity_profile(&fam, 4, grid, 0.05).unwrap();
        let eps = profile.entries.last().unwrap().sup_displacement;
        let k = profile.entries.last().unwrap().level;
        for z in [0.12, 0.48, 0.77] {
            let p = FlowPoint::over_zero(ang(z));
            let moved = fast_m_k(&fam, &p, k).unwrap();
            assert!(product_metric(&moved, &p) <= 2.0 * eps.max(f64::EPSILON));
        }
    }
}
