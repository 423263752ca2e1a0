//! Command-line flags. Each flag becomes a `(key, value)` override on top of
//! the config file, so flag values go through the same validation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{parse_config, split_assignment, RunConfig};
use super::CliError;

#[derive(Debug, Parser)]
#[command(name = "eelab", version, about = "Extended-electron model laboratory")]
pub struct Cli {
    /// `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Format of tabular artifacts: csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Override any config key, e.g. `--set epr.phi1_deg=45`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", allow_hyphen_values = true)]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Density, energy and wavefunction profiles of a plane-wave electron.
    Electron(ElectronArgs),
    /// Correlation curve, CHSH sum and Monte Carlo single rates.
    Epr(EprArgs),
    /// Spin precession under a field ramp and deflection sign.
    Sterngerlach(SternGerlachArgs),
    /// STM uncertainty budget.
    Budget(BudgetArgs),
}

#[derive(Debug, Args)]
pub struct ElectronArgs {
    /// Accepted for symmetry; the profile is always written.
    #[arg(long)]
    pub profile: bool,
    #[arg(long)]
    pub rho0: Option<String>,
    #[arg(long)]
    pub u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub helicity: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub zmin: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub zmax: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
}

#[derive(Debug, Args)]
pub struct EprArgs {
    #[arg(long, conflicts_with_all = ["chsh", "singles"])]
    pub curve: bool,
    #[arg(long, conflicts_with = "singles")]
    pub chsh: bool,
    #[arg(long)]
    pub singles: bool,
    /// CHSH settings in degrees: phi1,phi1',phi2,phi2'.
    #[arg(long, allow_hyphen_values = true)]
    pub angles: Option<String>,
    /// Singles analyzer angle, degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub side: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Correlation curve spacing, degrees.
    #[arg(long)]
    pub step: Option<String>,
}

#[derive(Debug, Args)]
pub struct SternGerlachArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Velocity ux,uy,uz.
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Field direction x,y,z.
    #[arg(long, allow_hyphen_values = true)]
    pub bdir: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub brate: Option<String>,
    #[arg(long)]
    pub ramp: Option<String>,
    #[arg(long)]
    pub duration: Option<String>,
    #[arg(long)]
    pub dt: Option<String>,
    /// Initial spin direction x,y,z.
    #[arg(long, allow_hyphen_values = true)]
    pub s0: Option<String>,
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long)]
    pub stride: Option<String>,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[arg(long = "band-energy-mev")]
    pub band_energy_mev: Option<String>,
    #[arg(long = "resolution-pm")]
    pub resolution_pm: Option<String>,
    #[arg(long = "feature-pm")]
    pub feature_pm: Option<String>,
    #[arg(long = "error-pm")]
    pub error_pm: Option<String>,
    #[arg(long)]
    pub convention: Option<String>,
}

struct Overrides(Vec<(String, String)>);

impl Overrides {
    fn opt(&mut self, key: &str, v: &Option<String>) {
        if let Some(v) = v {
            self.0.push((key.to_string(), v.clone()));
        }
    }
    fn set(&mut self, key: &str, v: &str) {
        self.0.push((key.to_string(), v.to_string()));
    }
}

impl Cli {
    /// Config-file entries, then `--set`, then global and subcommand flags.
    pub fn overrides(&self) -> Result<Vec<(String, String)>, CliError> {
        let mut o = Overrides(Vec::new());
        for s in &self.set {
            o.0.push(split_assignment(s)?);
        }
        o.opt("seed", &self.seed);
        o.opt("out", &self.out);
        o.opt("format", &self.format);
        match &self.command {
            Cmd::Electron(a) => {
                o.set("command", "electron");
                o.opt("electron.rho0", &a.rho0);
                o.opt("electron.u", &a.u);
                o.opt("electron.helicity", &a.helicity);
                o.opt("electron.zmin", &a.zmin);
                o.opt("electron.zmax", &a.zmax);
                o.opt("electron.points", &a.points);
                o.opt("electron.t", &a.t);
            }
            Cmd::Epr(a) => {
                o.set("command", "epr");
                if a.curve {
                    o.set("epr.mode", "curve");
                } else if a.chsh {
                    o.set("epr.mode", "chsh");
                } else if a.singles {
                    o.set("epr.mode", "singles");
                }
                o.opt("epr.angles_deg", &a.angles);
                o.opt("epr.angle_deg", &a.angle);
                o.opt("epr.n", &a.n);
                o.opt("epr.side", &a.side);
                o.opt("epr.phi1_deg", &a.phi1);
                o.opt("epr.phi2_deg", &a.phi2);
                o.opt("epr.delta_deg", &a.delta);
                o.opt("epr.curve_step_deg", &a.step);
            }
            Cmd::Sterngerlach(a) => {
                o.set("command", "sterngerlach");
                o.opt("sterngerlach.kappa", &a.kappa);
                o.opt("sterngerlach.u", &a.u);
                o.opt("sterngerlach.bdir", &a.bdir);
                o.opt("sterngerlach.brate", &a.brate);
                o.opt("sterngerlach.ramp", &a.ramp);
                o.opt("sterngerlach.duration", &a.duration);
                o.opt("sterngerlach.dt", &a.dt);
                o.opt("sterngerlach.s0", &a.s0);
                o.opt("sterngerlach.threshold", &a.threshold);
                o.opt("sterngerlach.stride", &a.stride);
            }
            Cmd::Budget(a) => {
                o.set("command", "budget");
                o.opt("budget.band_energy_mev", &a.band_energy_mev);
                o.opt("budget.resolution_pm", &a.resolution_pm);
                o.opt("budget.feature_pm", &a.feature_pm);
                o.opt("budget.error_pm", &a.error_pm);
                o.opt("budget.convention", &a.convention);
            }
        }
        Ok(o.0)
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?,
            None => String::new(),
        };
        Ok(parse_config(&text, &self.overrides()?)?)
    }
}
