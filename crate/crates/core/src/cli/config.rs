//! Line-oriented `key = value` run configuration.
//!
//! Every key is declared in [`KEYS`] with a type and a default. A config
//! file may set any subset; overrides (from command-line flags) are applied
//! afterwards in order, so the last writer wins. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Electron,
    Epr,
    SternGerlach,
    Budget,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Electron => "electron",
            Command::Epr => "epr",
            Command::SternGerlach => "sterngerlach",
            Command::Budget => "budget",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "electron" => Ok(Command::Electron),
            "epr" => Ok(Command::Epr),
            "sterngerlach" => Ok(Command::SternGerlach),
            "budget" => Ok(Command::Budget),
            other => Err(format!("unknown command `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Text(String),
    Floats(Vec<f64>),
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Float(x) => s.serialize_f64(*x),
            Value::Int(n) => s.serialize_u64(*n),
            Value::Text(t) => s.serialize_str(t),
            Value::Floats(v) => v.serialize(s),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(x) => write!(f, "{x}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Text(t) => f.write_str(t),
            Value::Floats(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Kind {
    Float,
    /// Float strictly greater than zero.
    Positive,
    Int,
    /// Integer of at least one.
    Count,
    Choice(&'static [&'static str]),
    /// Comma-separated floats of exactly this length.
    Floats(usize),
    Text,
}

pub struct KeySpec {
    pub key: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub doc: &'static str,
}

const fn key(key: &'static str, kind: Kind, default: &'static str, doc: &'static str) -> KeySpec {
    KeySpec {
        key,
        kind,
        default,
        doc,
    }
}

pub const KEYS: &[KeySpec] = &[
    key("command", Kind::Choice(&["electron", "epr", "sterngerlach", "budget"]), "electron", "subcommand to run"),
    key("seed", Kind::Int, "0", "random seed"),
    key("out", Kind::Text, "out", "output directory"),
    key("format", Kind::Choice(&["csv", "json"]), "csv", "format of tabular artifacts"),
    key("electron.rho0", Kind::Positive, "1", "mass-density amplitude"),
    key("electron.u", Kind::Positive, "1", "velocity"),
    key("electron.helicity", Kind::Choice(&["+", "-", "plus", "minus"]), "+", "spin relative to motion"),
    key("electron.phi", Kind::Float, "1.5707963267948966", "field phase, radians"),
    key("electron.mass", Kind::Positive, "1", "inertial mass"),
    key("electron.electric_fraction", Kind::Float, "0.5", "share of field energy in E"),
    key("electron.units", Kind::Choice(&["atomic", "si"]), "atomic", "unit system"),
    key("electron.zmin", Kind::Float, "0", "profile window start"),
    key("electron.zmax", Kind::Float, "6.283185307179586", "profile window end"),
    key("electron.points", Kind::Count, "201", "profile samples"),
    key("electron.t", Kind::Float, "0", "profile time"),
    key("epr.mode", Kind::Choice(&["all", "curve", "chsh", "singles"]), "all", "which reports to emit"),
    key("epr.phi1_deg", Kind::Float, "0", "analyzer A angle"),
    key("epr.phi2_deg", Kind::Float, "0", "analyzer B angle"),
    key("epr.delta_deg", Kind::Float, "0", "source phase difference"),
    key("epr.angles_deg", Kind::Floats(4), "0,45,22.5,67.5", "CHSH settings phi1,phi1',phi2,phi2'"),
    key("epr.curve_step_deg", Kind::Positive, "1", "correlation curve spacing"),
    key("epr.angle_deg", Kind::Float, "0", "singles analyzer angle"),
    key("epr.side", Kind::Choice(&["A", "B"]), "A", "singles analyzer"),
    key("epr.n", Kind::Count, "1000000", "singles trials"),
    key("sterngerlach.kappa", Kind::Float, "1", "coupling constant"),
    key("sterngerlach.u", Kind::Floats(3), "0,0,1", "electron velocity"),
    key("sterngerlach.bdir", Kind::Floats(3), "1,0,0", "field direction"),
    key("sterngerlach.brate", Kind::Float, "1", "mean dB/dt"),
    key("sterngerlach.ramp", Kind::Choice(&["linear", "cosine"]), "linear", "ramp shape"),
    key("sterngerlach.duration", Kind::Positive, "1.5707963267948966", "ramp duration"),
    key("sterngerlach.dt", Kind::Positive, "0.001", "RK4 step"),
    key("sterngerlach.s0", Kind::Floats(3), "0,0,1", "initial spin direction"),
    key("sterngerlach.smag", Kind::Float, "1", "spin magnitude"),
    key("sterngerlach.threshold", Kind::Float, "0.99", "classification threshold"),
    key("sterngerlach.stride", Kind::Count, "1", "keep every n-th step"),
    key("budget.band_energy_mev", Kind::Positive, "80", "band energy"),
    key("budget.resolution_pm", Kind::Positive, "20", "lateral resolution"),
    key("budget.feature_pm", Kind::Positive, "30", "feature height"),
    key("budget.error_pm", Kind::Float, "0.1", "height error"),
    key("budget.convention", Kind::Positive, "0.5", "prefactor c in dx = c hbar / dp"),
    key("budget.mass_kg", Kind::Positive, "9.1093837e-31", "particle mass"),
];

fn lookup(key: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|s| s.key == key)
}

fn parse_value(spec: &KeySpec, raw: &str) -> Result<Value, ConfigError> {
    let invalid = |message: String| ConfigError::Validation {
        key: spec.key.to_string(),
        message,
    };
    let float = |s: &str| -> Result<f64, ConfigError> {
        let x: f64 = s
            .trim()
            .parse()
            .map_err(|_| invalid(format!("`{}` is not a number", s.trim())))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(invalid(format!("`{}` is not finite", s.trim())))
        }
    };
    let raw = raw.trim();
    match spec.kind {
        Kind::Float => float(raw).map(Value::Float),
        Kind::Positive => {
            let x = float(raw)?;
            if x > 0.0 {
                Ok(Value::Float(x))
            } else {
                Err(invalid(format!("must be positive, got {x}")))
            }
        }
        Kind::Int => raw
            .parse()
            .map(Value::Int)
            .map_err(|_| invalid(format!("`{raw}` is not a non-negative integer"))),
        Kind::Count => match raw.parse::<u64>() {
            Ok(n) if n >= 1 => Ok(Value::Int(n)),
            Ok(_) => Err(invalid("must be at least 1".into())),
            Err(_) => Err(invalid(format!("`{raw}` is not a non-negative integer"))),
        },
        Kind::Choice(options) => {
            if options.contains(&raw) {
                Ok(Value::Text(raw.to_string()))
            } else {
                Err(invalid(format!("`{raw}` is not one of {}", options.join(", "))))
            }
        }
        Kind::Floats(len) => {
            let v = raw.split(',').map(float).collect::<Result<Vec<_>, _>>()?;
            if v.len() == len {
                Ok(Value::Floats(v))
            } else {
                Err(invalid(format!("expected {len} comma-separated numbers, got {}", v.len())))
            }
        }
        Kind::Text => {
            if raw.is_empty() {
                Err(invalid("must not be empty".into()))
            } else {
                Ok(Value::Text(raw.to_string()))
            }
        }
    }
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: BTreeMap<String, Value>,
    pub output_path: PathBuf,
    pub seed: u64,
    pub format: Format,
}

impl RunConfig {
    fn get(&self, key: &str) -> &Value {
        self.params
            .get(key)
            .unwrap_or_else(|| panic!("config key `{key}` is not declared"))
    }

    pub fn float(&self, key: &str) -> f64 {
        match self.get(key) {
            Value::Float(x) => *x,
            v => panic!("config key `{key}` holds {v:?}, not a float"),
        }
    }

    pub fn int(&self, key: &str) -> u64 {
        match self.get(key) {
            Value::Int(n) => *n,
            v => panic!("config key `{key}` holds {v:?}, not an integer"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.get(key) {
            Value::Text(t) => t,
            v => panic!("config key `{key}` holds {v:?}, not text"),
        }
    }

    pub fn floats(&self, key: &str) -> &[f64] {
        match self.get(key) {
            Value::Floats(v) => v,
            v => panic!("config key `{key}` holds {v:?}, not a list"),
        }
    }

    pub fn vec3(&self, key: &str) -> [f64; 3] {
        let v = self.floats(key);
        [v[0], v[1], v[2]]
    }
}

/// Parses `file_text` and applies `overrides` as `(key, value)` pairs.
pub fn parse_config(file_text: &str, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let mut raw: BTreeMap<&'static str, String> = BTreeMap::new();
    for (idx, line) in file_text.lines().enumerate() {
        let line_no = idx + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
            line: line_no,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Parse {
                line: line_no,
                message: "missing key before `=`".into(),
            });
        }
        let s = lookup(k).ok_or_else(|| ConfigError::UnknownKey { key: k.to_string() })?;
        raw.insert(s.key, v.trim().to_string());
    }
    for (k, v) in overrides {
        let s = lookup(k.trim()).ok_or_else(|| ConfigError::UnknownKey { key: k.clone() })?;
        raw.insert(s.key, v.clone());
    }

    let mut params = BTreeMap::new();
    for s in KEYS {
        let text = raw.get(s.key).map(String::as_str).unwrap_or(s.default);
        params.insert(s.key.to_string(), parse_value(s, text)?);
    }

    let mut cfg = RunConfig {
        command: Command::Electron,
        params,
        output_path: PathBuf::new(),
        seed: 0,
        format: Format::Csv,
    };
    cfg.command = cfg.text("command").parse().expect("validated choice");
    cfg.seed = cfg.int("seed");
    cfg.output_path = PathBuf::from(cfg.text("out"));
    cfg.format = match cfg.text("format") {
        "json" => Format::Json,
        _ => Format::Csv,
    };
    Ok(cfg)
}

/// `key=value` from a `--set` flag.
pub fn split_assignment(s: &str) -> Result<(String, String), ConfigError> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| ConfigError::Parse {
            line: 0,
            message: format!("override `{s}` is not of the form key=value"),
        })
}
