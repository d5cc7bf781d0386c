//! Command-line flags, the JSON run configuration, and their merge.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gdo_core::phase::ScheduleValue;
use gdo_core::{Complex64, StructureSpec};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "gdo", version, about = "Deformed oscillator algebras, their states and phase operators")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Global {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Replace the tolerance of every upper-bound check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized parameter draws.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON run configuration; flags win on conflict.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structure functions.
    #[command(subcommand)]
    Structure(StructureCmd),
    /// Fock and cyclic representations.
    #[command(subcommand)]
    Rep(RepCmd),
    /// Coherent and squeezed states.
    #[command(subcommand)]
    States(StatesCmd),
    /// Multiphoton sector realizations.
    #[command(subcommand)]
    Multiphoton(MultiphotonCmd),
    /// Isospectral oscillator system.
    #[command(subcommand)]
    Isos(IsosCmd),
    /// Hermitian phase operators.
    #[command(subcommand)]
    Phase(PhaseCmd),
}

#[derive(Debug, Subcommand)]
pub enum StructureCmd {
    /// Positivity, reality and Fock/cyclic conditions.
    Check(Params),
    /// Tabulate F(x), [F(n)]! and [F(n)]!!.
    Eval(Params),
}

#[derive(Debug, Subcommand)]
pub enum RepCmd {
    /// Emit the representation matrices.
    Build(Params),
    /// Verify the defining relations.
    Check(Params),
}

#[derive(Debug, Subcommand)]
pub enum StatesCmd {
    /// Coherent states: eigen-residuals and series against D(alpha)|0>.
    Coherent(Params),
    /// Squeezed states: eigen-residuals and series against S(z)|0>.
    Squeezed(Params),
    /// Displaced squeezed states.
    DisplacedSqueezed(Params),
    /// Operator identities, displacement covariance and the Bogoliubov test.
    Identities(Params),
}

#[derive(Debug, Subcommand)]
pub enum MultiphotonCmd {
    /// Single-mode sector realization of order m.
    Sector(Params),
    /// Vacuum breaking of the multiphoton q-realization.
    BrokenVacuum(Params),
    /// Two-mode realization with optional coherent and squeezed states.
    TwoMode(Params),
}

#[derive(Debug, Subcommand)]
pub enum IsosCmd {
    /// Representation and algebra check.
    Rep(Params),
    /// Coherent state eigen-residual.
    Coherent(Params),
    /// Squeezed state.
    Squeezed(Params),
    /// Coherent states intertwined by the ladder operators.
    Intertwine(Params),
}

#[derive(Debug, Subcommand)]
pub enum PhaseCmd {
    /// Phase states, Phi and e^(i Phi) with their checks.
    Build(Params),
    /// Truncated ladder operators and their commutator.
    Ladder(Params),
    /// Band elements against the oscillator as S grows.
    LimitSweep(Params),
    /// Action of q^N on the phase states.
    ShiftCheck(Params),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Structure(StructureCmd::Check(_)) => "structure check",
            Command::Structure(StructureCmd::Eval(_)) => "structure eval",
            Command::Rep(RepCmd::Build(_)) => "rep build",
            Command::Rep(RepCmd::Check(_)) => "rep check",
            Command::States(StatesCmd::Coherent(_)) => "states coherent",
            Command::States(StatesCmd::Squeezed(_)) => "states squeezed",
            Command::States(StatesCmd::DisplacedSqueezed(_)) => "states displaced-squeezed",
            Command::States(StatesCmd::Identities(_)) => "states identities",
            Command::Multiphoton(MultiphotonCmd::Sector(_)) => "multiphoton sector",
            Command::Multiphoton(MultiphotonCmd::BrokenVacuum(_)) => "multiphoton broken-vacuum",
            Command::Multiphoton(MultiphotonCmd::TwoMode(_)) => "multiphoton two-mode",
            Command::Isos(IsosCmd::Rep(_)) => "isos rep",
            Command::Isos(IsosCmd::Coherent(_)) => "isos coherent",
            Command::Isos(IsosCmd::Squeezed(_)) => "isos squeezed",
            Command::Isos(IsosCmd::Intertwine(_)) => "isos intertwine",
            Command::Phase(PhaseCmd::Build(_)) => "phase build",
            Command::Phase(PhaseCmd::Ladder(_)) => "phase ladder",
            Command::Phase(PhaseCmd::LimitSweep(_)) => "phase limit-sweep",
            Command::Phase(PhaseCmd::ShiftCheck(_)) => "phase shift-check",
        }
    }

    pub fn into_params(self) -> Params {
        match self {
            Command::Structure(StructureCmd::Check(p) | StructureCmd::Eval(p))
            | Command::Rep(RepCmd::Build(p) | RepCmd::Check(p))
            | Command::States(
                StatesCmd::Coherent(p)
                | StatesCmd::Squeezed(p)
                | StatesCmd::DisplacedSqueezed(p)
                | StatesCmd::Identities(p),
            )
            | Command::Multiphoton(
                MultiphotonCmd::Sector(p) | MultiphotonCmd::BrokenVacuum(p) | MultiphotonCmd::TwoMode(p),
            )
            | Command::Isos(IsosCmd::Rep(p) | IsosCmd::Coherent(p) | IsosCmd::Squeezed(p) | IsosCmd::Intertwine(p))
            | Command::Phase(
                PhaseCmd::Build(p) | PhaseCmd::Ladder(p) | PhaseCmd::LimitSweep(p) | PhaseCmd::ShiftCheck(p),
            ) => p,
        }
    }
}

pub const COMMANDS: [&str; 19] = [
    "structure check",
    "structure eval",
    "rep build",
    "rep check",
    "states coherent",
    "states squeezed",
    "states displaced-squeezed",
    "states identities",
    "multiphoton sector",
    "multiphoton broken-vacuum",
    "multiphoton two-mode",
    "isos rep",
    "isos coherent",
    "isos squeezed",
    "isos intertwine",
    "phase build",
    "phase ladder",
    "phase limit-sweep",
    "phase shift-check",
];

/// Every operation parameter. All are optional here; each command checks
/// the ones it needs.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Family name (harmonic, q_symmetric, q_abs, q_abs_shift, isos,
    /// self_similar); the config file also accepts a full structure object.
    #[arg(long)]
    pub structure: Option<StructureArg>,
    /// Custom structure function in `x` (and `q`, `bracket(...)`).
    #[arg(long)]
    pub expr: Option<String>,
    /// Named constants for `--expr`, as `a=1,b=2`.
    #[arg(long)]
    pub params: Option<ParamMap>,
    /// Deformation parameter, `re` or `re,im`.
    #[arg(long)]
    pub q: Option<CArg>,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[arg(long)]
    pub omegas: Option<FloatList>,
    /// gdo or q_gdo.
    #[arg(long)]
    pub arg_kind: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Cyclic order; a list for sweeps.
    #[arg(long = "S")]
    #[serde(rename = "S")]
    pub s: Option<UsizeList>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Phase of xi: xi = e^(i xi_phase).
    #[arg(long)]
    pub xi_phase: Option<f64>,
    #[arg(long)]
    pub theta0: Option<f64>,
    /// Coherent amplitude, `re` or `re,im`.
    #[arg(long)]
    pub alpha: Option<CArg>,
    /// Squeezing parameter, `re` or `re,im`.
    #[arg(long)]
    pub z: Option<CArg>,
    /// Evaluation points.
    #[arg(long)]
    pub x: Option<FloatList>,
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Number of random amplitude draws inside |alpha| (or |z|).
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub i: Option<usize>,
    #[arg(long)]
    pub j: Option<usize>,
    /// Multiphoton coupling f(N) or f(N1, N2).
    #[arg(long)]
    pub coupling: Option<String>,
    /// Sweep family: q_abs or q_abs_shift.
    #[arg(long)]
    pub family: Option<String>,
    /// `inverse`, `const:v` or `power:c,p`.
    #[arg(long)]
    pub eta_schedule: Option<ScheduleArg>,
    #[arg(long = "K-schedule")]
    #[serde(rename = "K_schedule")]
    pub k_schedule: Option<ScheduleArg>,
}

macro_rules! overlay {
    ($top:expr, $base:expr; $($field:ident),*) => {
        $( if $top.$field.is_none() { $top.$field = $base.$field; } )*
    };
}

impl Params {
    /// Fill unset fields from `base`.
    pub fn overlay(mut self, base: Params) -> Params {
        overlay!(self, base; structure, expr, params, q, k, omegas, arg_kind, dim, s, eta, xi_phase,
            theta0, alpha, z, x, kmax, nmax, draws, m, n, i, j, coupling, family, eta_schedule, k_schedule);
        self
    }
}

impl Global {
    pub fn overlay(mut self, base: Global) -> Global {
        overlay!(self, base; out, format, tol, seed);
        self
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<String>,
    #[serde(flatten)]
    pub global: Global,
    #[serde(flatten)]
    pub params: Params,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
        let mut map = match value {
            serde_json::Value::Object(map) => map,
            _ => return Err(CliError::Usage("config must be a JSON object".into())),
        };
        let command = match map.remove("command") {
            None => None,
            Some(serde_json::Value::String(s)) => Some(s),
            Some(_) => return Err(CliError::Usage("config \"command\" must be a string".into())),
        };
        let global: Global = pick(&mut map, &["out", "format", "tol", "seed"])?;
        let params: Params = serde_json::from_value(serde_json::Value::Object(map))
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        if let Some(c) = &command {
            if !COMMANDS.contains(&c.as_str()) {
                return Err(CliError::Usage(format!("unknown command {c:?} in config")));
            }
        }
        Ok(RunConfig { command, global, params })
    }
}

fn pick<T: for<'de> Deserialize<'de>>(
    map: &mut serde_json::Map<String, serde_json::Value>,
    keys: &[&str],
) -> Result<T, CliError> {
    let mut sub = serde_json::Map::new();
    for k in keys {
        if let Some(v) = map.remove(*k) {
            sub.insert((*k).to_string(), v);
        }
    }
    serde_json::from_value(serde_json::Value::Object(sub)).map_err(|e| CliError::Usage(format!("config: {e}")))
}

/// A family name from the command line, or a full structure object from a
/// config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StructureArg {
    Name(String),
    Spec(StructureSpec),
}

impl FromStr for StructureArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(StructureArg::Name(s.trim().to_string()))
    }
}

/// A complex number written as `re`, `re,im`, a JSON number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CArg(pub Complex64);

impl FromStr for CArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts = parse_floats(s)?;
        match parts.as_slice() {
            [re] => Ok(CArg(Complex64::new(*re, 0.0))),
            [re, im] => Ok(CArg(Complex64::new(*re, *im))),
            _ => Err(format!("expected `re` or `re,im`, got {s:?}")),
        }
    }
}

impl<'de> Deserialize<'de> for CArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Real(re) => Ok(CArg(Complex64::new(re, 0.0))),
            Raw::Pair([re, im]) => Ok(CArg(Complex64::new(re, im))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {:?}", p.trim()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_floats(s).map(FloatList)
    }
}

impl<'de> Deserialize<'de> for FloatList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(f64),
            Many(Vec<f64>),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::One(v) => FloatList(vec![v]),
            Raw::Many(v) => FloatList(v),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UsizeList(pub Vec<usize>);

impl FromStr for UsizeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("not a non-negative integer: {:?}", p.trim()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(UsizeList)
    }
}

impl<'de> Deserialize<'de> for UsizeList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(usize),
            Many(Vec<usize>),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::One(v) => UsizeList(vec![v]),
            Raw::Many(v) => UsizeList(v),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ParamMap(pub BTreeMap<String, f64>);

impl FromStr for ParamMap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for item in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| format!("expected name=value, got {item:?}"))?;
            let v: f64 = v.trim().parse().map_err(|_| format!("not a number: {:?}", v.trim()))?;
            map.insert(k.trim().to_string(), v);
        }
        Ok(ParamMap(map))
    }
}

/// A sweep schedule entry: `inverse`, `const:v` or `power:c,p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleArg(pub ScheduleValue);

impl FromStr for ScheduleArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "inverse" {
            return Ok(ScheduleArg(ScheduleValue::InverseSPlusOne));
        }
        if let Some(v) = s.strip_prefix("const:") {
            let v: f64 = v.trim().parse().map_err(|_| format!("not a number: {v:?}"))?;
            return Ok(ScheduleArg(ScheduleValue::Const(v)));
        }
        if let Some(rest) = s.strip_prefix("power:") {
            if let [c, p] = parse_floats(rest)?.as_slice() {
                return Ok(ScheduleArg(ScheduleValue::Power { c: *c, p: *p }));
            }
        }
        Err(format!("schedule must be inverse, const:v or power:c,p; got {s:?}"))
    }
}

impl<'de> Deserialize<'de> for ScheduleArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ScheduleArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            ScheduleValue::InverseSPlusOne => write!(f, "inverse"),
            ScheduleValue::Const(v) => write!(f, "const:{v}"),
            ScheduleValue::Power { c, p } => write!(f, "power:{c},{p}"),
        }
    }
}
