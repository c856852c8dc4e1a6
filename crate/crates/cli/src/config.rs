//! Run configuration: built-in defaults, then a JSON file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ringergo::model::{bell_state, current_state, superposition_state};
use ringergo::{Complex64, Coupling, PureState1x, RingSpec, WindingSet};

use crate::output::{num_value, rounded};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every command. All are optional so that a config file can
/// supply them.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Number of sites.
    #[arg(long = "L", global = true)]
    pub sites: Option<usize>,
    /// Nearest-neighbour exchange (J = 2 g_nn for power-law rings).
    #[arg(long = "J", global = true, allow_hyphen_values = true)]
    pub j: Option<f64>,
    /// Longitudinal field.
    #[arg(long = "Delta", global = true, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Power-law exponent; selects the power-law ring ("inf" allowed).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Ring radius for the power law (default: unit lattice spacing).
    #[arg(long = "R", global = true)]
    pub radius: Option<f64>,
    /// Power-law strength; defaults to the value giving nearest-neighbour exchange J.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub g: Option<f64>,
    /// First winding of a two-current superposition.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub l1: Option<i64>,
    /// Second winding of a two-current superposition.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub l2: Option<i64>,
    /// Relative phase of the second winding, radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi21: Option<f64>,
    /// Single current state with this winding.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub ell: Option<i64>,
    /// Bell pair on sites i,j.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..=2, value_name = "I,J")]
    pub bell: Option<Vec<usize>>,
    /// Amplitude file: one "re im" pair per line.
    #[arg(long, global = true)]
    pub amplitudes: Option<PathBuf>,
    /// Site used by per-site summaries (default depends on the command).
    #[arg(long = "S", global = true)]
    pub site: Option<usize>,
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Delta grid as start:stop:count.
    #[arg(long = "delta-grid", global = true, allow_hyphen_values = true)]
    pub delta_grid: Option<String>,
    /// J grid as start:stop:count.
    #[arg(long = "j-grid", global = true, allow_hyphen_values = true)]
    pub j_grid: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

/// Everything a config file may set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "L")]
    pub sites: Option<usize>,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    #[serde(rename = "Delta")]
    pub delta: Option<f64>,
    pub alpha: Option<Number>,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub g: Option<f64>,
    pub state: Option<StateSpec>,
    #[serde(rename = "S")]
    pub site: Option<usize>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub delta_grid: Option<Grid>,
    pub j_grid: Option<Grid>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// A float that may be written as the string "inf" in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Value(f64),
    Text(String),
}

impl Number {
    fn value(&self) -> Result<f64, CliError> {
        match self {
            Number::Value(v) => Ok(*v),
            Number::Text(t) => t
                .parse()
                .map_err(|_| CliError::config(format!("not a number: {t}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Superposition { windings: Vec<(i64, f64)> },
    Current { ell: i64 },
    Bell { i: usize, j: usize },
    Amplitudes { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Grid, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("bad grid value {s:?}")))
        };
        match parts.as_slice() {
            [v] => Ok(Grid {
                start: num(v)?,
                stop: num(v)?,
                count: 1,
            }),
            [a, b, n] => Ok(Grid {
                start: num(a)?,
                stop: num(b)?,
                count: n
                    .trim()
                    .parse()
                    .map_err(|_| CliError::config(format!("bad grid count {n:?}")))?,
            }),
            _ => Err(CliError::config(format!(
                "grid must be start:stop:count, got {text:?}"
            ))),
        }
    }

    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if self.count == 0 {
            return Err(CliError::config("grid needs at least one point"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::config("grid bounds must be finite"));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| self.start + step * i as f64)
            .collect())
    }
}

/// Fully resolved configuration, echoed into JSON output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub ring: RingSpec,
    pub delta: f64,
    pub state: StateSpec,
    pub site: Option<usize>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub delta_grid: Option<Grid>,
    pub j_grid: Option<Grid>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))
}

fn state_from_flags(a: &CommonArgs) -> Result<Option<StateSpec>, CliError> {
    let mut specs = Vec::new();
    if a.l1.is_some() || a.l2.is_some() || a.phi21.is_some() {
        match (a.l1, a.l2) {
            (Some(l1), Some(l2)) => specs.push(StateSpec::Superposition {
                windings: vec![(l1, 0.0), (l2, a.phi21.unwrap_or(0.0))],
            }),
            _ => return Err(CliError::config("--l1 and --l2 must be given together")),
        }
    }
    if let Some(ell) = a.ell {
        specs.push(StateSpec::Current { ell });
    }
    if let Some(b) = &a.bell {
        if b.len() != 2 {
            return Err(CliError::config("--bell takes two sites, e.g. --bell 1,11"));
        }
        specs.push(StateSpec::Bell { i: b[0], j: b[1] });
    }
    if let Some(p) = &a.amplitudes {
        specs.push(StateSpec::Amplitudes { path: p.clone() });
    }
    match specs.len() {
        0 => Ok(None),
        1 => Ok(specs.pop()),
        _ => Err(CliError::config(
            "give exactly one state: --l1/--l2, --ell, --bell or --amplitudes",
        )),
    }
}

pub fn resolve(command: &str, a: &CommonArgs) -> Result<RunConfig, CliError> {
    let file = match &a.config {
        Some(p) => read_file_config(p)?,
        None => FileConfig::default(),
    };
    let state = match state_from_flags(a)? {
        Some(s) => s,
        None => file.state.clone().unwrap_or(StateSpec::Superposition {
            windings: vec![(1, 0.0), (2, 0.0)],
        }),
    };
    let alpha = match a.alpha {
        Some(v) => Some(v),
        None => file.alpha.as_ref().map(Number::value).transpose()?,
    };
    let sites = match (a.sites.or(file.sites), &state) {
        (Some(l), _) => l,
        (None, StateSpec::Amplitudes { path }) => load_amplitudes(path)?.len(),
        (None, _) => 11,
    };
    let j = a.j.or(file.j).unwrap_or(1.0);
    let radius = a.radius.or(file.radius);
    let ring = match alpha {
        None => RingSpec::nearest_neighbor(sites, j)?,
        Some(alpha) => {
            let g = match a.g.or(file.g) {
                Some(g) => g,
                None => g_for_exchange(sites, alpha, radius, j)?,
            };
            RingSpec::power_law(sites, g, alpha, radius)?
        }
    };
    let delta_grid = match &a.delta_grid {
        Some(t) => Some(Grid::parse(t)?),
        None => file.delta_grid,
    };
    let j_grid = match &a.j_grid {
        Some(t) => Some(Grid::parse(t)?),
        None => file.j_grid,
    };
    Ok(RunConfig {
        command: command.to_string(),
        ring,
        delta: a.delta.or(file.delta).unwrap_or(0.0),
        state,
        site: a.site.or(file.site),
        t_max: a.t_max.or(file.t_max),
        dt: a.dt.or(file.dt),
        delta_grid,
        j_grid,
        format: a.format.or(file.format).unwrap_or(Format::Csv),
        out: a.out.clone().or(file.out),
        seed: a
            .seed
            .or(file.seed)
            .unwrap_or(ringergo::verify::DEFAULT_SEED),
    })
}

/// Power-law strength whose nearest-neighbour exchange `2 g / d_1^alpha` equals `j`.
pub fn g_for_exchange(
    sites: usize,
    alpha: f64,
    radius: Option<f64>,
    j: f64,
) -> Result<f64, CliError> {
    if alpha.is_infinite() {
        return Ok(j / 2.0);
    }
    let probe = RingSpec::power_law(sites, 1.0, alpha, radius)?;
    Ok(j * probe.chord(1).powf(alpha) / 2.0)
}

impl RunConfig {
    pub fn to_json(&self) -> Value {
        let opt = |x: Option<f64>| x.map_or(Value::Null, num_value);
        let ring = match self.ring.coupling {
            Coupling::NearestNeighbor { j } => {
                json!({"L": self.ring.sites, "law": "nearest_neighbor", "J": num_value(j)})
            }
            Coupling::PowerLaw { g, alpha, radius } => json!({
                "L": self.ring.sites,
                "law": "power_law",
                "g": num_value(g),
                "alpha": num_value(alpha),
                "R": num_value(radius),
            }),
        };
        json!({
            "command": self.command,
            "ring": ring,
            "Delta": num_value(self.delta),
            "state": rounded(serde_json::to_value(&self.state).expect("state serializes")),
            "S": self.site,
            "t_max": opt(self.t_max),
            "dt": opt(self.dt),
            "delta_grid": self.delta_grid.map(|g| rounded(json!(g))),
            "j_grid": self.j_grid.map(|g| rounded(json!(g))),
            "format": self.format,
            "seed": self.seed,
        })
    }

    pub fn sites(&self) -> usize {
        self.ring.sites
    }

    /// The same ring with nearest-neighbour exchange `j`.
    pub fn ring_with_exchange(&self, j: f64) -> Result<RingSpec, CliError> {
        Ok(match self.ring.coupling {
            Coupling::NearestNeighbor { .. } => RingSpec::nearest_neighbor(self.sites(), j)?,
            Coupling::PowerLaw { alpha, radius, .. } => RingSpec::power_law(
                self.sites(),
                g_for_exchange(self.sites(), alpha, Some(radius), j)?,
                alpha,
                Some(radius),
            )?,
        })
    }

    pub fn build_state(&self) -> Result<PureState1x, CliError> {
        let l = self.sites();
        Ok(match &self.state {
            StateSpec::Superposition { windings } => {
                superposition_state(l, &WindingSet::new(windings.clone()))?
            }
            StateSpec::Current { ell } => current_state(l, *ell)?,
            StateSpec::Bell { i, j } => bell_state(l, *i, *j)?,
            StateSpec::Amplitudes { path } => {
                let amps = load_amplitudes(path)?;
                if amps.len() != l {
                    return Err(CliError::config(format!(
                        "amplitude file has {} lines, ring has {l} sites",
                        amps.len()
                    )));
                }
                let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                if (n2 - 1.0).abs() > 1e-8 {
                    eprintln!("warning: amplitudes normalized (norm^2 was {n2})");
                }
                PureState1x::normalized(amps)?
            }
        })
    }

    /// Windings of a plane-wave state, if it is one.
    pub fn windings(&self) -> Option<Vec<i64>> {
        match &self.state {
            StateSpec::Superposition { windings } => Some(windings.iter().map(|w| w.0).collect()),
            StateSpec::Current { ell } => Some(vec![*ell]),
            _ => None,
        }
    }
}

pub fn load_amplitudes(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read amplitudes {}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(n, line)| {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad =
                || CliError::config(format!("{}:{}: expected \"re im\"", path.display(), n + 1));
            if parts.len() != 2 {
                return Err(bad());
            }
            let re: f64 = parts[0].parse().map_err(|_| bad())?;
            let im: f64 = parts[1].parse().map_err(|_| bad())?;
            Ok(Complex64::new(re, im))
        })
        .collect()
}
