//! Executes the named analysis against a configuration and assembles the
//! JSON report plus the plot-data CSV files.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use skewflow_core::analysis::{
    orbit_density, proximal_trace, rigidity_profile, scan_strong_li_yorke,
    verify_ap_configuration, APConfiguration, DensityReport, GridSpec, LiYorkeEvidence,
    ProximalTrace, RigidityProfile,
};
use skewflow_core::circle::CircleAngle;
use skewflow_core::cocycle::validate_family;
use skewflow_core::flow::{step, FlowPoint};
use skewflow_core::odometer::OdometerPoint;
use skewflow_core::{Error, ValidationReport};

use crate::config::ExperimentConfig;

/// Result of one experiment: evidence verdict plus the artifacts to write.
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
    pub json: String,
    pub csv_files: Vec<(String, String)>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    pass: bool,
    config: &'a ExperimentConfig,
    report: T,
}

fn envelope<T: Serialize>(
    command: &str,
    cfg: &ExperimentConfig,
    pass: bool,
    report: T,
) -> String {
    let doc = Envelope {
        schema_version: cfg.schema_version,
        command,
        pass,
        config: cfg,
        report,
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("report serializes");
    json.push('\n');
    json
}

pub fn run(command: &str, cfg: &ExperimentConfig) -> Result<Outcome, Error> {
    match command {
        "validate" => run_validate(cfg),
        "rigidity" => run_rigidity(cfg),
        "proximal" => run_proximal(cfg),
        "aps" => run_aps(cfg),
        "liyorke" => run_liyorke(cfg),
        "density" => run_density(cfg),
        other => Err(Error::Precondition(format!("unknown subcommand {other}"))),
    }
}

fn run_validate(cfg: &ExperimentConfig) -> Result<Outcome, Error> {
    let fam = cfg.family()?;
    let p = &cfg.validate;
    let report: ValidationReport = validate_family(&fam, p.levels, p.samples, p.tol)?;
    let pass = report.pass();
    let summary = match report.violation() {
        None => format!("conditions hold over {} levels", p.levels),
        Some((cond, level)) => format!("condition {cond} violated at level {level}"),
    };
    Ok(Outcome {
        pass,
        summary,
        json: envelope("validate", cfg, pass, report),
        csv_files: Vec::new(),
    })
}

fn run_rigidity(cfg: &ExperimentConfig) -> Result<Outcome, Error> {
    let fam = cfg.family()?;
    let p = &cfg.rigidity;
    let grid = GridSpec {
        base_samples: p.base_samples,
        fiber_samples: p.fiber_samples,
    };
    let profile: RigidityProfile = rigidity_profile(&fam, p.k_max, grid, p.threshold)?;
    let pass = profile.trend_pass();
    let mut csv = String::from("k,m_k,sup_displacement\n");
    for e in &profile.entries {
        writeln!(csv, "{},{},{:.17e}", e.level, e.time, e.sup_displacement).unwrap();
    }
    let last = profile.entries.last().expect("k_max >= 1");
    let summary = format!(
        "sup displacement {:.4} rad at k={} (threshold {})",
        last.sup_displacement, last.level, p.threshold
    );
    Ok(Outcome {
        pass,
        summary,
        json: envelope("rigidity", cfg, pass, profile),
        csv_files: vec![("rigidity.csv".into(), csv)],
    })
}

#[derive(Serialize)]
struct ProximalReport {
    pairs: Vec<ProximalTrace>,
    threshold: f64,
    worst_final_distance: f64,
}

fn run_proximal(cfg: &ExperimentConfig) -> Result<Outcome, Error> {
    let fam = cfg.family()?;
    let p = &cfg.proximal;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut pairs = Vec::new();
    let mut csv_files = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..p.pairs {
        let z1 = CircleAngle::new(rng.gen_range(0.0..1.0));
        let z2 = CircleAngle::new(rng.gen_range(0.0..1.0));
        let trace = proximal_trace(&fam, z1, z2, p.k_max)?;
        let mut csv = String::from("kappa,time,distance\n");
        for s in &trace.samples {
            writeln!(csv, "{},{},{:.17e}", s.kappa, s.time, s.distance).unwrap();
        }
        csv_files.push((format!("proximal_pair_{i:02}.csv"), csv));
        worst = worst.max(trace.final_distance().unwrap_or(0.0));
        pairs.push(trace);
    }
    let pass = worst < p.threshold;
    let summary = format!(
        "worst pair distance at T_{}: {worst:.3e} (threshold {:.0e})",
        p.k_max, p.threshold
    );
    let report = ProximalReport {
        pairs,
        threshold: p.threshold,
        worst_final_distance: worst,
    };
    Ok(Outcome {
        pass,
        summary,
        json: envelope("proximal", cfg, pass, report),
        csv_files,
    })
}

#[derive(Serialize)]
struct PairWitness {
    z1: f64,
    z2: f64,
    min_distance: f64,
    has_witness: bool,
}

#[derive(Serialize)]
struct ApsReport {
    configuration_intact: bool,
    max_spacing_deviation: Option<f64>,
    first_violation_time: Option<String>,
    same_arc: Vec<PairWitness>,
    cross_arc: Vec<PairWitness>,
    witness_threshold: f64,
}

fn run_aps(cfg: &ExperimentConfig) -> Result<Outcome, Error> {
    let fam = cfg.family()?;
    let p = &cfg.aps;
    let configuration = APConfiguration::new(
        OdometerPoint::zero(),
        CircleAngle::new(p.anchor),
        fam.arcs(),
    );
    let (intact, max_dev, violation) =
        match verify_ap_configuration(&fam, &configuration, p.horizon, p.k_max) {
            Ok(rep) => (true, Some(rep.max_deviation), None),
            Err(Error::ConfigurationBroken { time, deviation }) => {
                (false, Some(deviation), Some(time))
            }
            Err(other) => return Err(other),
        };
    let check_pair = |(a, b): (f64, f64)| -> Result<PairWitness, Error> {
        let trace = proximal_trace(
            &fam,
            CircleAngle::new(a),
            CircleAngle::new(b),
            p.witness_k_max,
        )?;
        let min = trace
            .samples
            .iter()
            .map(|s| s.distance)
            .fold(f64::INFINITY, f64::min);
        Ok(PairWitness {
            z1: a,
            z2: b,
            min_distance: min,
            has_witness: min < p.witness_threshold,
        })
    };
    let same_arc: Vec<PairWitness> = p
        .same_arc_pairs
        .iter()
        .copied()
        .map(check_pair)
        .collect::<Result<_, _>>()?;
    let cross_arc: Vec<PairWitness> = p
        .cross_arc_pairs
        .iter()
        .copied()
        .map(check_pair)
        .collect::<Result<_, _>>()?;
    let pass = intact
        && same_arc.iter().all(|w| w.has_witness)
        && cross_arc.iter().all(|w| !w.has_witness);
    let summary = if intact {
        format!(
            "{}-point configuration intact over {} steps; same-arc witnesses {}/{}, cross-arc {}/{}",
            fam.arcs(),
            p.horizon,
            same_arc.iter().filter(|w| w.has_witness).count(),
            same_arc.len(),
            cross_arc.iter().filter(|w| w.has_witness).count(),
            cross_arc.len(),
        )
    } else {
        format!(
            "configuration broken at time {}",
            violation.as_deref().unwrap_or("?")
        )
    };
    let report = ApsReport {
        configuration_intact: intact,
        max_spacing_deviation: max_dev,
        first_violation_time: violation,
        same_arc,
        cross_arc,
        witness_threshold: p.witness_threshold,
    };
    Ok(Outcome {
        pass,
        summary,
        json: envelope("aps", cfg, pass, report),
        csv_files: Vec::new(),
    })
}

fn run_liyorke(cfg: &ExperimentConfig) -> Result<Outcome, Error> {
    let fam = cfg.family()?;
    let p = &cfg.liyorke;
    let p1 = FlowPoint::over_zero(CircleAngle::new(p.z1));
    let p2 = FlowPoint::over_zero(CircleAngle::new(p.z2));
    let evidence: LiYorkeEvidence =
        scan_strong_li_yorke(&fam, &p1, &p2, p.k_max, p.eps_prox, p.eps_rec)?;
    let pass = evidence.strong_li_yorke;
    let summary = format!(
        "{} proximal / {} recurrence witnesses, separated {}",
        evidence.proximal_witnesses.len(),
        evidence.recurrence_witnesses.len(),
        evidence.separated_at_zero,
    );
    Ok(Outcome {
        pass,
        summary,
        json: envelope("liyorke", cfg, pass, evidence),
        csv_files: Vec::new(),
    })
}

fn run_density(cfg: &ExperimentConfig) -> Result<Outcome, Error> {
    let fam = cfg.family()?;
    let p = &cfg.density;
    let start = FlowPoint::over_zero(CircleAngle::new(p.anchor));
    let report: DensityReport =
        orbit_density(&fam, &start, p.prefix_len, p.fiber_bins, p.k_max)?;
    let pass = report.coverage >= p.target_coverage;
    let mut csv = String::from("k,cells_hit,cells_total,coverage\n");
    for s in &report.stages {
        writeln!(csv, "{},{},{},{:.6}", s.k, s.cells_hit, s.cells_total, s.coverage).unwrap();
    }
    let mut csv_files = vec![("density.csv".into(), csv)];
    if let Some(steps) = p.trajectory_steps {
        let mut traj = String::from("time,base,fiber\n");
        let mut q = start.clone();
        for t in 0..steps {
            writeln!(traj, "{t},{},{:.17}", q.base, q.fiber.turns()).unwrap();
            q = step(&fam, &q)?;
        }
        csv_files.push(("trajectory.csv".into(), traj));
    }
    let summary = format!(
        "coverage {:.1}% of {} cells (target {:.1}%)",
        100.0 * report.coverage,
        report.stages[0].cells_total,
        100.0 * p.target_coverage,
    );
    Ok(Outcome {
        pass,
        summary,
        json: envelope("density", cfg, pass, report),
        csv_files,
    })
}
