//! `skewflow`: run property-certification experiments on odometer-based
//! skew product flows and emit JSON reports plus CSV plot data.
//!
//! Exit codes: 0 when the certified property holds, 2 when the evidence
//! check fails, 1 on configuration or usage errors.

mod config;
mod run;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(
    name = "skewflow",
    about = "Simulator and property certifier for skew product flows over the dyadic odometer",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural conditions of the cocycle family
    Validate(RunArgs),
    /// Sup displacement profile at the block recurrence times
    Rigidity(RunArgs),
    /// Fiber pair distances at the closed-form proximality witness times
    Proximal(RunArgs),
    /// Almost-periodic configuration spacing plus arc-witness checks
    Aps(RunArgs),
    /// Strong Li-Yorke evidence scan for one fiber pair
    Liyorke(RunArgs),
    /// Orbit coverage of prefix-cylinder x fiber-bin cells
    Density(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file (JSON)
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in reference configuration (proximal-c5, almost-proximal-c6-n3)
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output directory for the JSON report and CSV files
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Override the configuration's random seed
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Override the subcommand's level bound
    #[arg(long, value_name = "K")]
    kmax: Option<u32>,
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Validate(a) => ("validate", a),
        Command::Rigidity(a) => ("rigidity", a),
        Command::Proximal(a) => ("proximal", a),
        Command::Aps(a) => ("aps", a),
        Command::Liyorke(a) => ("liyorke", a),
        Command::Density(a) => ("density", a),
    };
    match execute(name, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("skewflow: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Honor the SKEWFLOW_THREADS cap for the parallel analysis grids.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("SKEWFLOW_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("skewflow: ignoring invalid SKEWFLOW_THREADS={v:?}"),
        }
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, String> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let cfg: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| format!("invalid config {}: {e}", path.display()))?;
            if cfg.schema_version != config::SCHEMA_VERSION {
                return Err(format!(
                    "unsupported schema_version {} (expected {})",
                    cfg.schema_version,
                    config::SCHEMA_VERSION
                ));
            }
            cfg
        }
        (None, Some(name)) => config::preset(name).map_err(|e| e.to_string())?,
        (None, None) => return Err("one of --config or --preset is required".into()),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn apply_kmax(name: &str, cfg: &mut ExperimentConfig, kmax: u32) {
    match name {
        "validate" => cfg.validate.levels = kmax,
        "rigidity" => cfg.rigidity.k_max = kmax,
        "proximal" => cfg.proximal.k_max = kmax,
        "aps" => cfg.aps.k_max = kmax,
        "liyorke" => cfg.liyorke.k_max = kmax,
        "density" => cfg.density.k_max = kmax,
        _ => {}
    }
}

fn execute(name: &str, args: &RunArgs) -> Result<bool, String> {
    let mut cfg = load_config(args)?;
    if let Some(k) = args.kmax {
        apply_kmax(name, &mut cfg, k);
    }
    let family = cfg.family().map_err(|e| e.to_string())?;
    for warning in family.schedule().warnings() {
        eprintln!("skewflow: warning: {warning}");
    }
    let outcome = run::run(name, &cfg).map_err(|e| e.to_string())?;
    fs::create_dir_all(&args.out)
        .map_err(|e| format!("cannot create {}: {e}", args.out.display()))?;
    let report_path = args.out.join(format!("{name}_report.json"));
    fs::write(&report_path, &outcome.json)
        .map_err(|e| format!("cannot write {}: {e}", report_path.display()))?;
    let mut written = vec![report_path.display().to_string()];
    for (file, contents) in &outcome.csv_files {
        let path = args.out.join(file);
        fs::write(&path, contents)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        written.push(path.display().to_string());
    }
    println!(
        "{name}: {} — {} ({})",
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.summary,
        written.join(", "),
    );
    Ok(outcome.pass)
}
