//! Input files, flag parsing, and seeds.
//!
//! Every malformed input maps to [`ConfigError`], which the binary
//! reports on stderr with exit status 2. Inputs are hashed on load so
//! reports can echo exactly what they were produced from.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use zdm_core::encoder::psi::CircleMeasure;
use zdm_core::encoder::MetricSystem;
use zdm_core::simplex::glue::EpsSchedule;
use zdm_core::simplex::FiniteSimplex;
use zdm_core::symbolic::{Alphabet, Shape, Subshift};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type Result<T> = std::result::Result<T, ConfigError>;

pub fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

/// Path and content hash of a loaded input, echoed in reports.
#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

fn read_input(path: &Path) -> Result<(Vec<u8>, InputDigest)> {
    let bytes = fs::read(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let hash = Sha256::digest(&bytes);
    let sha256 = hash.iter().map(|b| format!("{b:02x}")).collect();
    Ok((
        bytes,
        InputDigest {
            path: path.display().to_string(),
            sha256,
        },
    ))
}

fn parse_json<'a, T: Deserialize<'a>>(bytes: &'a [u8], path: &Path) -> Result<T> {
    serde_json::from_slice(bytes)
        .map_err(|e| ConfigError(format!("cannot parse {}: {e}", path.display())))
}

/// Dynamical system description accepted by `--system` flags.
#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SystemConfig {
    Fibonacci,
    ThueMorse,
    FullShift {
        alphabet: Vec<String>,
    },
    Sft {
        alphabet: Vec<String>,
        forbidden: Vec<String>,
    },
    Substitution {
        alphabet: Vec<String>,
        rules: Vec<String>,
    },
    CircleRotation {
        alpha: AlphaSpec,
    },
}

/// Rotation parameter: a decimal in (0, 1) or one of the named
/// quadratic irrationals `sqrt2-1`, `sqrt5-2`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum AlphaSpec {
    Named(String),
    Value(f64),
}

/// A parsed `--system` input.
pub enum LoadedSystem {
    Shift(Subshift),
    Rotation(MetricSystem),
}

impl LoadedSystem {
    pub fn into_shift(self, path: &Path) -> Result<Subshift> {
        match self {
            LoadedSystem::Shift(s) => Ok(s),
            LoadedSystem::Rotation(_) => err(format!(
                "{} describes a circle rotation; this command needs a subshift",
                path.display()
            )),
        }
    }

    pub fn into_rotation(self, path: &Path) -> Result<MetricSystem> {
        match self {
            LoadedSystem::Rotation(m) => Ok(m),
            LoadedSystem::Shift(_) => err(format!(
                "{} describes a subshift; this command needs a circle rotation",
                path.display()
            )),
        }
    }

    pub fn metric_system(self) -> MetricSystem {
        match self {
            LoadedSystem::Rotation(m) => m,
            LoadedSystem::Shift(subshift) => MetricSystem::Symbolic { subshift },
        }
    }
}

fn alphabet_of(symbols: Vec<String>, path: &Path) -> Result<Alphabet> {
    Alphabet::new(symbols).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

pub fn load_system(path: &Path) -> Result<(LoadedSystem, InputDigest)> {
    let (bytes, digest) = read_input(path)?;
    let cfg: SystemConfig = parse_json(&bytes, path)?;
    let ctx = |e: &dyn fmt::Display| ConfigError(format!("{}: {e}", path.display()));
    let system = match cfg {
        SystemConfig::Fibonacci => LoadedSystem::Shift(Subshift::fibonacci()),
        SystemConfig::ThueMorse => LoadedSystem::Shift(Subshift::thue_morse()),
        SystemConfig::FullShift { alphabet } => {
            LoadedSystem::Shift(Subshift::full_shift(alphabet_of(alphabet, path)?))
        }
        SystemConfig::Sft {
            alphabet,
            forbidden,
        } => {
            let alphabet = alphabet_of(alphabet, path)?;
            let words = forbidden
                .iter()
                .map(|w| alphabet.parse_word(w))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| ctx(&e))?;
            LoadedSystem::Shift(Subshift::sft(alphabet, words).map_err(|e| ctx(&e))?)
        }
        SystemConfig::Substitution { alphabet, rules } => {
            let alphabet = alphabet_of(alphabet, path)?;
            let words = rules
                .iter()
                .map(|w| alphabet.parse_word(w))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| ctx(&e))?;
            LoadedSystem::Shift(Subshift::substitution(alphabet, words).map_err(|e| ctx(&e))?)
        }
        SystemConfig::CircleRotation { alpha } => {
            let value = match alpha {
                AlphaSpec::Value(v) => v,
                AlphaSpec::Named(name) => match name.as_str() {
                    "sqrt2-1" => std::f64::consts::SQRT_2 - 1.0,
                    "sqrt5-2" => 5.0f64.sqrt() - 2.0,
                    other => {
                        return err(format!(
                            "{}: unknown rotation parameter {other:?} \
                             (use sqrt2-1, sqrt5-2, or a decimal)",
                            path.display()
                        ))
                    }
                },
            };
            LoadedSystem::Rotation(MetricSystem::circle(value).map_err(|e| ctx(&e))?)
        }
    };
    Ok((system, digest))
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum MeasureConfig {
    Lebesgue,
    Orbit { base: f64 },
    Synthetic {
        lebesgue_weight: f64,
        atoms: Vec<AtomConfig>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomConfig {
    position: f64,
    weight: f64,
}

/// Loads `--measures`: a JSON array of circle measures.
pub fn load_measures(path: &Path) -> Result<(Vec<CircleMeasure>, InputDigest)> {
    let (bytes, digest) = read_input(path)?;
    let cfgs: Vec<MeasureConfig> = parse_json(&bytes, path)?;
    if cfgs.is_empty() {
        return err(format!("{}: no measures listed", path.display()));
    }
    let measures = cfgs
        .into_iter()
        .map(|cfg| match cfg {
            MeasureConfig::Lebesgue => CircleMeasure::Lebesgue,
            MeasureConfig::Orbit { base } => CircleMeasure::Orbit { base },
            MeasureConfig::Synthetic {
                lebesgue_weight,
                atoms,
            } => CircleMeasure::Synthetic {
                lebesgue_weight,
                atoms: atoms.into_iter().map(|a| (a.position, a.weight)).collect(),
            },
        })
        .collect();
    Ok((measures, digest))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimplexConfig {
    vertices: Vec<Vec<f64>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

pub fn load_simplex(path: &Path) -> Result<(FiniteSimplex, InputDigest)> {
    let (bytes, digest) = read_input(path)?;
    let cfg: SimplexConfig = parse_json(&bytes, path)?;
    let simplex = match cfg.labels {
        Some(labels) => FiniteSimplex::new(cfg.vertices, labels),
        None => FiniteSimplex::unlabeled(cfg.vertices),
    }
    .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    Ok((simplex, digest))
}

/// Loads `--groups`: a JSON array of vertex-index groups.
pub fn load_groups(path: &Path) -> Result<(Vec<Vec<usize>>, InputDigest)> {
    let (bytes, digest) = read_input(path)?;
    let groups: Vec<Vec<usize>> = parse_json(&bytes, path)?;
    Ok((groups, digest))
}

/// Parses `--shapes` values like `1x1,1x2`.
pub fn parse_shapes(text: &str) -> Result<Vec<Shape>> {
    let mut shapes = Vec::new();
    for part in text.split(',') {
        let (rows, cols) = part
            .split_once('x')
            .ok_or_else(|| ConfigError(format!("bad shape {part:?}, expected ROWSxCOLS")))?;
        let rows: usize = rows
            .trim()
            .parse()
            .map_err(|_| ConfigError(format!("bad shape rows in {part:?}")))?;
        let cols: usize = cols
            .trim()
            .parse()
            .map_err(|_| ConfigError(format!("bad shape cols in {part:?}")))?;
        shapes.push(Shape::new(rows, cols));
    }
    if shapes.is_empty() {
        return err("no shapes given");
    }
    Ok(shapes)
}

/// Parses `--eps-schedule` values: `geometric:BASE` or
/// `explicit:V1,V2,...`.
pub fn parse_schedule(text: &str) -> Result<EpsSchedule> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| ConfigError(format!("bad schedule {text:?}, expected KIND:ARGS")))?;
    match kind {
        "geometric" => {
            let base: f64 = rest
                .parse()
                .map_err(|_| ConfigError(format!("bad geometric base {rest:?}")))?;
            EpsSchedule::geometric(base).map_err(|e| ConfigError(e.to_string()))
        }
        "explicit" => {
            let values = rest
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| ConfigError(format!("bad schedule value {v:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            EpsSchedule::explicit(values).map_err(|e| ConfigError(e.to_string()))
        }
        other => err(format!("unknown schedule kind {other:?}")),
    }
}

/// Parses `--face` and `--d-list` style comma lists.
pub fn parse_indices(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| ConfigError(format!("bad index {v:?}")))
        })
        .collect()
}

pub fn parse_floats(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| ConfigError(format!("bad number {v:?}")))
        })
        .collect()
}

/// Seed precedence: `ZDM_SEED` environment variable, then the flag,
/// then zero.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    match std::env::var("ZDM_SEED") {
        Ok(text) => text
            .parse()
            .map_err(|_| ConfigError(format!("ZDM_SEED must be an integer, got {text:?}"))),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}
