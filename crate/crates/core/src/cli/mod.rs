//! Batch front end: parse a config plus flag overrides, run one physics
//! module, write CSV/JSON artifacts into the output directory.

pub mod args;
pub mod config;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::constants::{UnitSystem, COHESIVE_POTENTIAL_EV};
use crate::electron::{ElectronParams, Helicity, PlaneWaveElectron, ProfileRow};
use crate::epr::{self, AnalyzerPair, ChshSettings, Outcome, Side};
use crate::spin_dynamics::{
    self, classify_deflection, FieldRamp, LLParams, RampShape, SpinState, Vec3,
};
use crate::uncertainty::{budget_report, BudgetInputs};

pub use config::{parse_config, Command, ConfigError, Format, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

/// Runs the configured command. Human-readable notes go to `console`.
pub fn run(cfg: &RunConfig, console: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let dir = cfg.output_path.as_path();
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = vec![output::write_report(dir, "config", cfg, &serde_json::json!({ "command": cfg.command }))?];
    match cfg.command {
        Command::Electron => run_electron(cfg, dir, &mut files)?,
        Command::Epr => run_epr(cfg, dir, &mut files)?,
        Command::SternGerlach => run_stern_gerlach(cfg, dir, &mut files)?,
        Command::Budget => run_budget(cfg, dir, &mut files, console)?,
    }
    for f in &files {
        let _ = writeln!(console, "wrote {}", f.display());
    }
    Ok(files)
}

#[derive(Serialize)]
struct ElectronSummary {
    lambda: f64,
    nu: f64,
    e0: f64,
    h0: f64,
    s0: f64,
    group_velocity: f64,
    volume: f64,
    total_energy: f64,
    cohesive_potential_ev: f64,
    helicity: Helicity,
    born_max_deviation: f64,
}

fn run_electron(cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let helicity: Helicity = cfg.text("electron.helicity").parse()?;
    let units = match cfg.text("electron.units") {
        "si" => UnitSystem::si(),
        _ => UnitSystem::atomic(),
    };
    let e = PlaneWaveElectron::new(ElectronParams {
        rho0: cfg.float("electron.rho0"),
        u: cfg.float("electron.u"),
        helicity,
        phi: cfg.float("electron.phi"),
        mass: cfg.float("electron.mass"),
        electric_fraction: cfg.float("electron.electric_fraction"),
        units,
    })?;
    let rows = e.profile(
        cfg.float("electron.zmin"),
        cfg.float("electron.zmax"),
        cfg.int("electron.points") as usize,
        cfg.float("electron.t"),
    )?;
    let mut born_max_deviation = 0.0_f64;
    for r in &rows {
        let w = e.wavefunction(r.z, r.t)?;
        born_max_deviation = born_max_deviation.max((w.born() - crate::Multivector3::scalar(e.rho0())).max_abs());
    }
    let table: Vec<Vec<f64>> = rows.iter().map(|r| r.values().to_vec()).collect();
    files.push(output::write_table(dir, "electron_profile", cfg, &ProfileRow::HEADER, &table)?);
    let volume = e.mass() / e.rho0();
    let summary = ElectronSummary {
        lambda: e.lambda(),
        nu: e.nu(),
        e0: e.e0(),
        h0: e.h0(),
        s0: e.s0(),
        group_velocity: e.group_velocity(),
        volume,
        total_energy: e.total_energy(volume)?,
        cohesive_potential_ev: COHESIVE_POTENTIAL_EV,
        helicity,
        born_max_deviation,
    };
    files.push(output::write_report(dir, "electron_summary", cfg, &summary)?);
    Ok(())
}

#[derive(Serialize)]
struct ChshReport {
    settings_deg: [f64; 4],
    #[serde(rename = "E_matrix")]
    e_matrix: [[f64; 2]; 2],
    #[serde(rename = "S")]
    s: f64,
}

#[derive(Serialize)]
struct SinglesReport {
    angle_deg: f64,
    side: Side,
    delta_deg: f64,
    seed: u64,
    n: u64,
    hits: u64,
    rate: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct PairReport {
    phi1_deg: f64,
    phi2_deg: f64,
    delta_deg: f64,
    coincidence_probability: f64,
    table: epr::CoincidenceTable,
    #[serde(rename = "E")]
    e: f64,
    b_given_a_plus: epr::Conditional,
    b_given_a_minus: epr::Conditional,
}

fn run_epr(cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let mode = cfg.text("epr.mode");
    let delta_deg = cfg.float("epr.delta_deg");
    if mode == "all" {
        let (phi1_deg, phi2_deg) = (cfg.float("epr.phi1_deg"), cfg.float("epr.phi2_deg"));
        let pair = AnalyzerPair::from_degrees(phi1_deg, phi2_deg, delta_deg);
        let report = PairReport {
            phi1_deg,
            phi2_deg,
            delta_deg,
            coincidence_probability: epr::coincidence_probability(&pair),
            table: epr::coincidence_table(&pair),
            e: epr::expectation(&pair),
            b_given_a_plus: epr::conditional_outcome(Outcome::Plus, &pair),
            b_given_a_minus: epr::conditional_outcome(Outcome::Minus, &pair),
        };
        files.push(output::write_report(dir, "epr_pair", cfg, &report)?);
    }
    if mode == "all" || mode == "curve" {
        let curve = epr::correlation_curve(cfg.float("epr.curve_step_deg"))?;
        let rows: Vec<Vec<f64>> = curve.iter().map(|&(d, e)| vec![d, e]).collect();
        files.push(output::write_table(dir, "epr_curve", cfg, &["phi_deg", "E"], &rows)?);
    }
    if mode == "all" || mode == "chsh" {
        let a = cfg.floats("epr.angles_deg");
        let settings = ChshSettings::from_degrees([a[0], a[1], a[2], a[3]]);
        let report = ChshReport {
            settings_deg: [a[0], a[1], a[2], a[3]],
            e_matrix: settings.expectation_matrix(),
            s: epr::chsh_sum(&settings),
        };
        files.push(output::write_report(dir, "epr_chsh", cfg, &report)?);
    }
    if mode == "all" || mode == "singles" {
        let angle_deg = cfg.float("epr.angle_deg");
        let side: Side = cfg.text("epr.side").parse()?;
        let r = epr::monte_carlo_singles(
            angle_deg.to_radians(),
            side,
            delta_deg.to_radians(),
            cfg.int("epr.n"),
            cfg.seed,
        )?;
        let report = SinglesReport {
            angle_deg,
            side,
            delta_deg,
            seed: cfg.seed,
            n: r.n,
            hits: r.hits,
            rate: r.rate,
            stderr: r.stderr,
        };
        files.push(output::write_report(dir, "epr_singles", cfg, &report)?);
    }
    Ok(())
}

#[derive(Serialize)]
struct SternGerlachSummary {
    classification: spin_dynamics::Deflection,
    threshold: f64,
    kappa: f64,
    u: [f64; 3],
    ramp: FieldRamp,
    dt: f64,
    initial_e_s: [f64; 3],
    final_e_s: [f64; 3],
    final_dot_b: f64,
    max_norm_deviation: f64,
    samples: usize,
}

fn run_stern_gerlach(cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let shape: RampShape = cfg.text("sterngerlach.ramp").parse()?;
    let ramp = FieldRamp::new(
        Vec3::from(cfg.vec3("sterngerlach.bdir")),
        cfg.float("sterngerlach.brate"),
        cfg.float("sterngerlach.duration"),
        shape,
    )?;
    let params = LLParams::new(
        cfg.float("sterngerlach.kappa"),
        Vec3::from(cfg.vec3("sterngerlach.u")),
        cfg.float("sterngerlach.dt"),
    )?;
    let s0 = SpinState::new(Vec3::from(cfg.vec3("sterngerlach.s0")), cfg.float("sterngerlach.smag"))?;
    let threshold = cfg.float("sterngerlach.threshold");
    let traj = spin_dynamics::integrate_strided(&s0, &ramp, &params, cfg.int("sterngerlach.stride") as usize)?;
    let last = traj.last().expect("trajectory holds the initial state").state;
    let classification = classify_deflection(&last, ramp.b_dir, threshold)?;
    let rows: Vec<Vec<f64>> = traj
        .iter()
        .map(|p| {
            let e = p.state.e_s;
            vec![p.t, e.x, e.y, e.z, e.dot(ramp.b_dir)]
        })
        .collect();
    let max_norm_deviation = traj
        .iter()
        .map(|p| (p.state.e_s.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    files.push(output::write_table(dir, "sg_trajectory", cfg, &["t", "ex", "ey", "ez", "dot_B"], &rows)?);
    let summary = SternGerlachSummary {
        classification,
        threshold,
        kappa: params.kappa,
        u: params.u.to_array(),
        ramp,
        dt: params.dt,
        initial_e_s: s0.e_s.to_array(),
        final_e_s: last.e_s.to_array(),
        final_dot_b: last.e_s.dot(ramp.b_dir),
        max_norm_deviation,
        samples: traj.len(),
    };
    files.push(output::write_report(dir, "sg_summary", cfg, &summary)?);
    Ok(())
}

fn run_budget(
    cfg: &RunConfig,
    dir: &Path,
    files: &mut Vec<PathBuf>,
    console: &mut dyn Write,
) -> Result<(), CliError> {
    let b = budget_report(&BudgetInputs {
        band_energy_mev: cfg.float("budget.band_energy_mev"),
        mass: cfg.float("budget.mass_kg"),
        lateral_resolution_pm: cfg.float("budget.resolution_pm"),
        feature_height_pm: cfg.float("budget.feature_pm"),
        height_error_pm: cfg.float("budget.error_pm"),
        convention_factor: cfg.float("budget.convention"),
    })?;
    let _ = writeln!(console, "{:<28} {:>14}", "quantity", "value");
    let rows = [
        ("band energy [eV]", b.band_energy),
        ("mass [kg]", b.mass),
        ("convention factor c", b.convention_factor),
        ("dp [kg m/s]", b.dp),
        ("dx = c hbar / dp [pm]", b.dx),
        ("lateral resolution [pm]", b.lateral_resolution),
        ("feature height [pm]", b.feature_height),
        ("height error [pm]", b.height_error),
        ("relative error [%]", 100.0 * b.relative_error),
        ("compliance energy [eV]", b.compliance_energy),
    ];
    for (name, v) in rows {
        let _ = writeln!(console, "{name:<28} {v:>14.6e}");
    }
    let _ = writeln!(console, "{:<28} {:>14}", "contradiction", b.contradiction);
    files.push(output::write_report(dir, "budget", cfg, &b)?);
    Ok(())
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I, console: &mut dyn Write, errors: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match args::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(console, "{e}");
            } else {
                let _ = write!(errors, "{e}");
            }
            return code;
        }
    };
    let result = cli.resolve().and_then(|cfg| run(&cfg, console));
    match result {
        Ok(_) => 0,
        Err(e) => {
            let _ = writeln!(errors, "error: {e}");
            e.exit_code()
        }
    }
}
