use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pilotwave::analysis::{classify_trajectory, mean_wave_field, Label};
use pilotwave::bohm::path_record;
use pilotwave::error::{Error, Result};
use pilotwave::io::classification::{write_classification, ClassificationRow};
use pilotwave::io::config::{config_hash, load_run_file, RunFile};
use pilotwave::io::grid::{write_grid, GridHeader};
use pilotwave::io::manifest::RunManifest;
use pilotwave::io::trajectory::{read_trajectory, sidecar_path, write_trajectory};
use pilotwave::io::write_atomic;
use pilotwave::params::faraday_wavenumber;
use pilotwave::simulation::{
    fit_nu_eff, run_ensemble, run_single, sweep_memory, Prepared, SimConfig, Termination, TrajectoryRecord,
};

#[derive(Debug, Parser)]
#[command(name = "pilotwave", version, about = "Walking-droplet pilot-wave simulator")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// TOML run file; omitted sections take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed of the run file (simulation and Bohmian launches).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for ensembles; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One trajectory with wave snapshots.
    Run,
    /// The `[ensemble]` launch set, classified.
    Ensemble,
    /// The launch set at each `ensemble.memory` value of γ/γ_F.
    SweepMemory,
    /// Faraday threshold on an open bath, with `nu_eff` fitted to `forcing.gamma_faraday`.
    CalibrateThreshold,
    /// Classifies every trajectory CSV in a directory.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Weighted mean wave field of the launch set.
    Meanfield,
    /// Bohmian trajectories of the symmetric two-packet scenario.
    Bohm,
}

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_BLOW_UP: u8 = 3;
const EXIT_DOMAIN_EXIT: u8 = 4;
const EXIT_CALIBRATION: u8 = 5;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConfigParse { .. }
        | Error::Validation(_)
        | Error::InvalidParameter(_)
        | Error::AboveThreshold { .. }
        | Error::UnderResolved { .. }
        | Error::Geometry(_)
        | Error::Domain(_) => EXIT_CONFIG,
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        Error::Calibration(_) | Error::NoBracket(_) => EXIT_CALIBRATION,
        _ => EXIT_OTHER,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load(global: &Global) -> Result<RunFile> {
    let mut run = match &global.config {
        Some(path) => load_run_file(path)?,
        None => RunFile::default(),
    };
    if let Some(seed) = global.seed {
        run.seed = seed;
        run.bohm.seed = seed;
    }
    Ok(run)
}

fn execute(cli: &Cli) -> Result<u8> {
    let run = load(&cli.global)?;
    let out = &cli.global.out;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let threads = cli.global.threads;
    match &cli.command {
        Command::Run => cmd_run(&run, out),
        Command::Ensemble => cmd_ensemble(&run, out, threads),
        Command::SweepMemory => cmd_sweep(&run, out, threads),
        Command::CalibrateThreshold => cmd_calibrate(&run, out),
        Command::Classify { input } => cmd_classify(&run, input, out),
        Command::Meanfield => cmd_meanfield(&run, out, threads),
        Command::Bohm => cmd_bohm(&run, out),
    }
}

/// Writes `name` under `dir` and records it in the manifest.
struct Outputs<'a> {
    dir: &'a Path,
    manifest: RunManifest,
}

impl<'a> Outputs<'a> {
    fn new(dir: &'a Path, run: &RunFile) -> Self {
        Self {
            dir,
            manifest: RunManifest::start(config_hash(&run.sim()), run.seed),
        }
    }

    fn path(&mut self, name: &str) -> Result<PathBuf> {
        let p = self.dir.join(name);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        self.manifest.outputs.push(name.to_string());
        Ok(p)
    }

    fn bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let p = self.path(name)?;
        write_atomic(&p, bytes)
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Validation(format!("{name}: {e}")))?;
        self.bytes(name, &bytes)
    }

    fn trajectory(&mut self, name: &str, record: &TrajectoryRecord) -> Result<()> {
        let p = self.path(name)?;
        write_trajectory(record, &p)?;
        let side = sidecar_path(Path::new(name));
        self.manifest.outputs.push(side.to_string_lossy().into_owned());
        Ok(())
    }

    fn config(&mut self, run: &RunFile) -> Result<()> {
        let text = toml::to_string_pretty(run).map_err(|e| Error::Validation(format!("run file: {e}")))?;
        self.bytes("config.toml", text.as_bytes())
    }

    fn finish(self, termination: &str) -> Result<()> {
        self.manifest.finish(self.dir, termination).map(|_| ())
    }
}

fn classify_all(records: &[TrajectoryRecord], fallback: &SimConfig) -> Result<Vec<ClassificationRow>> {
    let mut geometry = None;
    records
        .iter()
        .enumerate()
        .map(|(index, r)| {
            let cfg = r.meta.config.unwrap_or(*fallback);
            let spec = match &geometry {
                Some((c, g)) if *c == cfg.geometry => g,
                _ => {
                    let p = Prepared::new(&cfg)?;
                    &geometry.insert((cfg.geometry, p.geometry)).1
                }
            };
            let c = classify_trajectory(r, spec)?;
            Ok(ClassificationRow {
                index,
                impact_parameter_mm: r.meta.impact_parameter * 1e3,
                gamma_over_gamma_f: r.meta.gamma_ratio,
                label: c.label.name().to_string(),
                first_crossing_time_s: c.first_crossing_time,
                detector_side: c.detector_side.name().to_string(),
            })
        })
        .collect()
}

/// Exit status for a finished set of runs: any blow-up wins, then all
/// members leaving the domain.
fn termination_code(records: &[TrajectoryRecord]) -> (u8, &'static str) {
    let blow_up = records.iter().any(|r| matches!(r.meta.termination, Termination::BlowUp { .. }));
    let all_exit = !records.is_empty()
        && records
            .iter()
            .all(|r| matches!(r.meta.termination, Termination::DomainExit { .. }));
    if blow_up {
        (EXIT_BLOW_UP, "blow_up")
    } else if all_exit {
        (EXIT_DOMAIN_EXIT, "domain_exit")
    } else {
        (0, "completed")
    }
}

fn cmd_run(run: &RunFile, dir: &Path) -> Result<u8> {
    let mut out = Outputs::new(dir, run);
    out.config(run)?;
    let record = run_single(&run.sim())?;
    out.trajectory("trajectory.csv", &record)?;
    let grid = record.grid();
    for (k, s) in record.snapshots.iter().enumerate() {
        let header = GridHeader::new(&grid, s.t);
        let p = out.path(&format!("snapshots/eta_{k:05}.pwhf"))?;
        write_grid(&s.eta, &header, &p)?;
        let p = out.path(&format!("snapshots/phi_{k:05}.pwhf"))?;
        write_grid(&s.phi, &header, &p)?;
    }
    let rows = classify_all(std::slice::from_ref(&record), &run.sim())?;
    let p = out.path("classification.csv")?;
    write_classification(&rows, &p)?;
    let (code, _) = termination_code(std::slice::from_ref(&record));
    out.finish(record.meta.termination.name())?;
    Ok(code)
}

fn require_launches(run: &RunFile) -> Result<()> {
    if run.ensemble.impact_parameters.is_empty() {
        return Err(Error::Validation("ensemble.impact_parameters is empty".into()));
    }
    Ok(())
}

fn cmd_ensemble(run: &RunFile, dir: &Path, threads: usize) -> Result<u8> {
    require_launches(run)?;
    let mut out = Outputs::new(dir, run);
    out.config(run)?;
    let records = run_ensemble(&run.ensemble_spec(), threads)?;
    for (i, r) in records.iter().enumerate() {
        out.trajectory(&format!("traj_{i:03}.csv"), r)?;
    }
    let rows = classify_all(&records, &run.sim())?;
    let p = out.path("classification.csv")?;
    write_classification(&rows, &p)?;
    let (code, cause) = termination_code(&records);
    out.finish(cause)?;
    Ok(code)
}

#[derive(Serialize)]
struct SweepSummary {
    gamma_ratio: f64,
    expected: usize,
    surreal: usize,
    indeterminate: usize,
}

fn cmd_sweep(run: &RunFile, dir: &Path, threads: usize) -> Result<u8> {
    require_launches(run)?;
    let mut out = Outputs::new(dir, run);
    out.config(run)?;
    let results = sweep_memory(&run.ensemble_spec(), &run.ensemble.memory, threads)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut all = Vec::new();
    for res in &results {
        for (i, r) in res.records.iter().enumerate() {
            out.trajectory(&format!("gamma_{:.3}/traj_{i:03}.csv", res.gamma_ratio), r)?;
        }
        let part = classify_all(&res.records, &run.sim())?;
        let count = |l: Label| part.iter().filter(|r| r.label == l.name()).count();
        summary.push(SweepSummary {
            gamma_ratio: res.gamma_ratio,
            expected: count(Label::Expected),
            surreal: count(Label::Surreal),
            indeterminate: count(Label::Indeterminate),
        });
        rows.extend(part);
        all.extend(res.records.iter().cloned());
    }
    let p = out.path("classification.csv")?;
    write_classification(&rows, &p)?;
    out.json("sweep.json", &summary)?;
    let (code, cause) = termination_code(&all);
    out.finish(cause)?;
    Ok(code)
}

#[derive(Serialize)]
struct CalibrationReport {
    target_gamma_f: f64,
    lambda_f: f64,
    fit: pilotwave::simulation::NuFit,
}

fn cmd_calibrate(run: &RunFile, dir: &Path) -> Result<u8> {
    let mut out = Outputs::new(dir, run);
    out.config(run)?;
    let fit = fit_nu_eff(&run.fluid, &run.forcing, &run.calibration, run.forcing.gamma_f)?;
    let k = faraday_wavenumber(&run.fluid, &run.forcing)?;
    out.json(
        "calibration.json",
        &CalibrationReport {
            target_gamma_f: run.forcing.gamma_f,
            lambda_f: 2.0 * std::f64::consts::PI / k,
            fit,
        },
    )?;
    out.finish("completed")?;
    Ok(0)
}

fn cmd_classify(run: &RunFile, input: &Path, dir: &Path) -> Result<u8> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(input)
        .map_err(|e| Error::io(input, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv") && sidecar_path(p).exists())
        .collect();
    paths.sort();
    let records = paths.iter().map(|p| read_trajectory(p)).collect::<Result<Vec<_>>>()?;
    let mut out = Outputs::new(dir, run);
    let rows = classify_all(&records, &run.sim())?;
    let p = out.path("classification.csv")?;
    write_classification(&rows, &p)?;
    out.finish("completed")?;
    Ok(0)
}

fn cmd_meanfield(run: &RunFile, dir: &Path, threads: usize) -> Result<u8> {
    require_launches(run)?;
    let mut out = Outputs::new(dir, run);
    out.config(run)?;
    let records = run_ensemble(&run.ensemble_spec(), threads)?;
    for (i, r) in records.iter().enumerate() {
        out.trajectory(&format!("traj_{i:03}.csv"), r)?;
    }
    let (code, cause) = termination_code(&records);
    if code != 0 {
        out.finish(cause)?;
        return Ok(code);
    }
    let lambda_f = records[0].meta.lambda_f;
    let sigma_b = run.ensemble.sigma_b.unwrap_or(1.4 * lambda_f);
    let field = mean_wave_field(&records, sigma_b)?;
    let header = GridHeader::new(&records[0].grid(), 0.0);
    let p = out.path("meanfield.pwhf")?;
    write_grid(&field.eta, &header, &p)?;
    out.json("meanfield.json", &field)?;
    out.finish(cause)?;
    Ok(0)
}

#[derive(Serialize)]
struct BohmSummary {
    trajectories: usize,
    min_x: f64,
    crossed_axis: usize,
}

fn cmd_bohm(run: &RunFile, dir: &Path) -> Result<u8> {
    let mut out = Outputs::new(dir, run);
    out.config(run)?;
    let scenario = &run.bohm;
    let launches = scenario.launch_points()?;
    let paths = scenario.run()?;
    for (i, (path, x0)) in paths.iter().zip(&launches).enumerate() {
        out.trajectory(&format!("bohm_{i:03}.csv"), &path_record(path, scenario, x0[0]))?;
    }
    let summary = BohmSummary {
        trajectories: paths.len(),
        min_x: paths.iter().map(|p| p.min_x()).fold(f64::INFINITY, f64::min),
        crossed_axis: paths.iter().filter(|p| p.min_x() <= 0.0).count(),
    };
    out.json("bohm.json", &summary)?;
    out.finish("completed")?;
    Ok(0)
}
