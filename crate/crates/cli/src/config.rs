//! Experiment configuration: a JSON file whose keys match the command line
//! flags, overlaid by the flags themselves.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use wwlab_core::defaults;
use wwlab_core::nil::{CircleMap, GroupElement};
use wwlab_core::wwdr::Rational;
use wwlab_core::{Observable, SystemSpec};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Ww,
    Seminorm,
    Spectral,
    KernelCheck,
    Ineq,
    Maxisom,
    Lift,
    Nil,
    Weyl,
    Report,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::Ww,
        Experiment::Seminorm,
        Experiment::Spectral,
        Experiment::KernelCheck,
        Experiment::Ineq,
        Experiment::Maxisom,
        Experiment::Lift,
        Experiment::Nil,
        Experiment::Weyl,
        Experiment::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Ww => "ww",
            Experiment::Seminorm => "seminorm",
            Experiment::Spectral => "spectral",
            Experiment::KernelCheck => "kernel-check",
            Experiment::Ineq => "ineq",
            Experiment::Maxisom => "maxisom",
            Experiment::Lift => "lift",
            Experiment::Nil => "nil",
            Experiment::Weyl => "weyl",
            Experiment::Report => "report",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown experiment `{s}`; expected one of {}",
                    names()
                ))
            })
    }
}

fn names() -> String {
    Experiment::ALL.map(Experiment::name).join(", ")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// A frequency given either as a real number or as `p/q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Frequency {
    Real(f64),
    #[serde(with = "rational_text")]
    Rational(Rational),
}

impl Frequency {
    pub fn to_f64(self) -> f64 {
        match self {
            Frequency::Real(t) => t,
            Frequency::Rational(r) => r.to_f64(),
        }
    }
}

impl FromStr for Frequency {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        if s.contains('/') {
            rational_text::parse(s).map(Frequency::Rational)
        } else {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|t| t.is_finite())
                .map(Frequency::Real)
                .ok_or_else(|| {
                    CliError::Config(format!("frequency `{s}` is neither a real number nor p/q"))
                })
        }
    }
}

mod rational_text {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn parse(s: &str) -> Result<Rational, CliError> {
        let bad = || {
            CliError::Config(format!(
                "rational frequency `{s}` must look like p/q with q > 0"
            ))
        };
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        Rational::new(p, q).map_err(|_| bad())
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.p, r.q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

/// The cocycle equation inputs for `nil --which cl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleConfig {
    pub rho: CircleMap,
    #[serde(default)]
    pub transfer: CircleMap,
    pub s: f64,
    pub c: f64,
}

/// Every key is optional; missing values fall back to the defaults table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Frequency>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oversampling: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub powers: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen_index: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<[[f64; 3]; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<CocycleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub timing: bool,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        ExperimentConfig::from_json(&text)
    }

    /// Values set in `flags` replace those of `self`.
    pub fn overlay(mut self, flags: &ExperimentConfig) -> ExperimentConfig {
        overlay!(self, flags; experiment, system, alpha, q, generator, f, f1, f2, a, b, t, n, ladder, h, k, nodes,
            oversampling, samples, seed, which, order, trials, constant, threshold, powers, x, y, alpha1, alpha2,
            eigen_index, theta, generators, cocycle, out, format);
        self.timing |= flags.timing;
        self
    }

    pub fn experiment(&self) -> Result<Experiment, CliError> {
        self.experiment.ok_or_else(|| {
            CliError::Usage(format!(
                "no experiment given; run `wwlab <EXPERIMENT> [FLAGS]` with one of {}",
                names()
            ))
        })
    }

    pub fn system_name(&self) -> &str {
        self.system.as_deref().unwrap_or("rotation")
    }

    pub fn system_spec(&self) -> Result<SystemSpec, CliError> {
        let alpha = self.alpha.unwrap_or(defaults::ALPHA);
        let spec = match self.system_name() {
            "rotation" => SystemSpec::rotation(alpha),
            "skew" | "skew-product" => SystemSpec::skew_product(alpha),
            "doubling" => Ok(SystemSpec::doubling()),
            "cyclic" | "cyclic-product" => SystemSpec::cyclic_product(self.q.unwrap_or(4), alpha),
            "heisenberg" => {
                let [a, b, c] = self.generator.unwrap_or([alpha, 2f64.sqrt() - 1.0, 0.0]);
                SystemSpec::heisenberg(a, b, c)
            }
            other => {
                return Err(CliError::Config(format!(
                "unknown system `{other}`; expected rotation, skew, doubling, cyclic or heisenberg"
            )))
            }
        };
        spec.map_err(CliError::from)
    }

    pub fn observable(&self, key: &str, default: &str) -> Result<Observable, CliError> {
        let text = match key {
            "f" => self.f.as_deref().or(self.f1.as_deref()),
            "f1" => self.f1.as_deref().or(self.f.as_deref()),
            "f2" => self.f2.as_deref(),
            _ => None,
        }
        .unwrap_or(default);
        text.parse()
            .map_err(|e| CliError::Config(format!("--{key} `{text}`: {e}")))
    }

    pub fn which(&self, default: &str) -> String {
        self.which.clone().unwrap_or_else(|| default.to_string())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(defaults::MASTER_SEED)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(defaults::SAMPLES)
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling.unwrap_or(defaults::OVERSAMPLING)
    }

    pub fn constant(&self) -> f64 {
        self.constant.unwrap_or(defaults::BOUND_CONSTANT)
    }

    pub fn ladder_or(&self, default: &[usize]) -> Vec<usize> {
        match (&self.ladder, self.n) {
            (Some(l), _) => l.clone(),
            (None, Some(n)) => vec![n],
            (None, None) => default.to_vec(),
        }
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n
            .or_else(|| self.ladder.as_ref().and_then(|l| l.last().copied()))
            .unwrap_or(default)
    }

    pub fn generators(&self) -> Option<[GroupElement; 3]> {
        self.generators
            .map(|g| g.map(|[x, y, z]| GroupElement::new(x, y, z)))
    }
}
