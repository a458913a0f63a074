//! TOML experiment configs.
//!
//! ```toml
//! experiment = "swap-decay"
//! seed = 7              # optional
//! output = "out/swap"   # optional
//!
//! [parameters]
//! r_i = 1.0
//! k_max = 40
//! ```
//!
//! Every violation is collected before failing. Unknown keys only warn.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SwapDecay,
    GraphLe,
    TransportDecay,
    Percolation,
    RepeaterChain,
    OracleValidate,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::SwapDecay,
        Experiment::GraphLe,
        Experiment::TransportDecay,
        Experiment::Percolation,
        Experiment::RepeaterChain,
        Experiment::OracleValidate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SwapDecay => "swap-decay",
            Experiment::GraphLe => "graph-le",
            Experiment::TransportDecay => "transport-decay",
            Experiment::Percolation => "percolation",
            Experiment::RepeaterChain => "repeater-chain",
            Experiment::OracleValidate => "oracle-validate",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::SwapDecay => "swap-chain squeezing F(k) and its exponential fit",
            Experiment::GraphLe => "localizable-entanglement bound versus distance on a bond grid",
            Experiment::TransportDecay => "exact transport probabilities p_N of Kraus wires",
            Experiment::Percolation => "left-right bond percolation crossing probabilities",
            Experiment::RepeaterChain => "filtered repeater chains and the filter success law",
            Experiment::OracleValidate => "phase-space results against the number-basis oracle",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown experiment {s:?}")))
    }
}

/// Where transport-decay gets its Kraus ensembles.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleSource {
    Damping { beta: f64 },
    Random { count: usize, num_ops: usize },
    BeamsplitterWire { theta: f64, cutoff: usize },
    Slab { k: usize, dim: usize, theta: f64, cutoff: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Parameters {
    SwapDecay {
        r_i: f64,
        k_max: usize,
    },
    GraphLe {
        width: usize,
        height: usize,
        r: f64,
        weak_r: f64,
    },
    TransportDecay {
        source: EnsembleSource,
        n_max: usize,
    },
    Percolation {
        width: usize,
        height: usize,
        p_values: Vec<f64>,
        trials: u64,
    },
    RepeaterChain {
        lambdas: Vec<f64>,
        n_links: usize,
        trials: u64,
    },
    OracleValidate {
        r_values: Vec<f64>,
        cutoff: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub parameters: Parameters,
}

/// A parsed config plus non-fatal warnings.
#[derive(Debug, Clone)]
pub struct ParsedConfig {
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
}

struct Reader<'a> {
    table: &'a toml::Table,
    errors: &'a mut Vec<String>,
    seen: BTreeSet<String>,
}

impl<'a> Reader<'a> {
    fn new(table: &'a toml::Table, errors: &'a mut Vec<String>) -> Self {
        Reader {
            table,
            errors,
            seen: BTreeSet::new(),
        }
    }

    fn raw(&mut self, key: &str) -> Option<&'a toml::Value> {
        self.seen.insert(key.to_string());
        self.table.get(key)
    }

    fn float(&mut self, key: &str, default: Option<f64>, ok: impl Fn(f64) -> bool, range: &str) -> f64 {
        let value = match self.raw(key) {
            Some(toml::Value::Float(x)) => *x,
            Some(toml::Value::Integer(i)) => *i as f64,
            Some(other) => {
                self.errors.push(format!("parameters.{key}: expected a number, got {}", other.type_str()));
                return f64::NAN;
            }
            None => match default {
                Some(d) => return d,
                None => {
                    self.errors.push(format!("parameters.{key}: missing required key"));
                    return f64::NAN;
                }
            },
        };
        if !ok(value) {
            self.errors.push(format!("parameters.{key}: {value} is out of range ({range})"));
        }
        value
    }

    fn int(&mut self, key: &str, default: Option<u64>, lo: u64, hi: u64) -> u64 {
        let value = match self.raw(key) {
            Some(toml::Value::Integer(i)) => *i,
            Some(other) => {
                self.errors.push(format!("parameters.{key}: expected an integer, got {}", other.type_str()));
                return lo;
            }
            None => match default {
                Some(d) => return d,
                None => {
                    self.errors.push(format!("parameters.{key}: missing required key"));
                    return lo;
                }
            },
        };
        if value < lo as i64 || value > hi as i64 {
            self.errors.push(format!("parameters.{key}: {value} is out of range ({lo}..={hi})"));
            return lo;
        }
        value as u64
    }

    fn size(&mut self, key: &str, default: Option<usize>, lo: usize, hi: usize) -> usize {
        self.int(key, default.map(|d| d as u64), lo as u64, hi as u64) as usize
    }

    fn floats(&mut self, key: &str, default: &[f64], ok: impl Fn(f64) -> bool, range: &str) -> Vec<f64> {
        let items = match self.raw(key) {
            None => return default.to_vec(),
            Some(toml::Value::Array(items)) => items,
            Some(other) => {
                self.errors.push(format!("parameters.{key}: expected an array of numbers, got {}", other.type_str()));
                return Vec::new();
            }
        };
        if items.is_empty() {
            self.errors.push(format!("parameters.{key}: array must not be empty"));
        }
        let mut out = Vec::with_capacity(items.len());
        for (i, v) in items.iter().enumerate() {
            let x = match v {
                toml::Value::Float(x) => *x,
                toml::Value::Integer(n) => *n as f64,
                other => {
                    self.errors.push(format!("parameters.{key}[{i}]: expected a number, got {}", other.type_str()));
                    continue;
                }
            };
            if !ok(x) {
                self.errors.push(format!("parameters.{key}[{i}]: {x} is out of range ({range})"));
            }
            out.push(x);
        }
        out
    }

    fn string(&mut self, key: &str) -> Option<&'a str> {
        match self.raw(key) {
            Some(toml::Value::String(s)) => Some(s),
            Some(other) => {
                self.errors.push(format!("parameters.{key}: expected a string, got {}", other.type_str()));
                None
            }
            None => {
                self.errors.push(format!("parameters.{key}: missing required key"));
                None
            }
        }
    }

    fn unknown(&self, prefix: &str) -> Vec<String> {
        self.table
            .keys()
            .filter(|k| !self.seen.contains(*k))
            .map(|k| format!("ignoring unknown key {prefix}{k}"))
            .collect()
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

fn probability(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

fn parse_parameters(exp: Experiment, r: &mut Reader) -> Parameters {
    match exp {
        Experiment::SwapDecay => Parameters::SwapDecay {
            r_i: r.float("r_i", None, |x| positive(x) && x <= 20.0, "0 < r_i <= 20"),
            k_max: r.size("k_max", None, 2, 100_000),
        },
        Experiment::GraphLe => {
            let width = r.size("width", None, 2, 64);
            let height = r.size("height", None, 1, 64);
            let strong = r.float("r", Some(1.0), |x| positive(x) && x <= 20.0, "0 < r <= 20");
            let weak_r = r.float("weak_r", Some(0.5 * strong), |x| positive(x) && x <= strong, "0 < weak_r <= r");
            Parameters::GraphLe {
                width,
                height,
                r: strong,
                weak_r,
            }
        }
        Experiment::TransportDecay => {
            let kind = r.string("ensemble");
            let n_max = r.size("n_max", Some(8), 1, 40);
            let source = match kind {
                Some("damping") => Some(EnsembleSource::Damping {
                    beta: r.float("beta", Some(std::f64::consts::FRAC_PI_4), |x| x.is_finite(), "finite"),
                }),
                Some("random") => Some(EnsembleSource::Random {
                    count: r.size("count", Some(50), 1, 10_000),
                    num_ops: r.size("num_ops", Some(3), 2, 16),
                }),
                Some("beamsplitter-wire") => Some(EnsembleSource::BeamsplitterWire {
                    theta: r.float("theta", Some(0.6), |x| x.is_finite(), "finite"),
                    cutoff: r.size("cutoff", Some(3), 2, 64),
                }),
                Some("slab") => Some(EnsembleSource::Slab {
                    k: r.size("k", Some(2), 1, 4),
                    dim: r.size("dim", Some(2), 1, 3),
                    theta: r.float("theta", Some(0.6), |x| x.is_finite(), "finite"),
                    cutoff: r.size("cutoff", Some(3), 2, 8),
                }),
                Some(other) => {
                    r.errors.push(format!(
                        "parameters.ensemble: unknown ensemble {other:?} (damping, random, beamsplitter-wire, slab)"
                    ));
                    None
                }
                None => None,
            };
            Parameters::TransportDecay {
                source: source.unwrap_or(EnsembleSource::Damping { beta: f64::NAN }),
                n_max,
            }
        }
        Experiment::Percolation => Parameters::Percolation {
            width: r.size("width", None, 2, 4096),
            height: r.size("height", None, 1, 4096),
            p_values: r.floats(
                "p_values",
                &[0.0, 0.3, 0.45, 0.5, 0.55, 0.7, 1.0],
                probability,
                "0 <= p <= 1",
            ),
            trials: r.int("trials", Some(2000), 1, 100_000_000),
        },
        Experiment::RepeaterChain => Parameters::RepeaterChain {
            lambdas: r.floats(
                "lambdas",
                &[0.3, 0.5, 0.6, std::f64::consts::FRAC_1_SQRT_2, 0.8, 0.9],
                |x| (0.0..1.0).contains(&x),
                "0 <= lambda < 1",
            ),
            n_links: r.size("n_links", Some(10), 0, 10_000),
            trials: r.int("trials", Some(10_000), 1, 100_000_000),
        },
        Experiment::OracleValidate => Parameters::OracleValidate {
            r_values: r.floats(
                "r_values",
                &[0.1, 0.3, 0.5, 0.8, 1.0],
                |x| positive(x) && x <= 3.0,
                "0 < r <= 3",
            ),
            cutoff: r.size("cutoff", Some(40), 4, 80),
        },
    }
}

pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    let experiment = match doc.get("experiment") {
        Some(toml::Value::String(s)) => match s.parse::<Experiment>() {
            Ok(e) => Some(e),
            Err(_) => {
                let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
                errors.push(format!("experiment: unknown experiment {s:?} (one of {})", names.join(", ")));
                None
            }
        },
        Some(other) => {
            errors.push(format!("experiment: expected a string, got {}", other.type_str()));
            None
        }
        None => {
            errors.push("experiment: missing required key".to_string());
            None
        }
    };
    let seed = match doc.get("seed") {
        None => 0,
        Some(toml::Value::Integer(i)) if *i >= 0 => *i as u64,
        Some(other) => {
            errors.push(format!("seed: expected a nonnegative integer, got {other}"));
            0
        }
    };
    let output = match doc.get("output") {
        None => None,
        Some(toml::Value::String(s)) => Some(PathBuf::from(s)),
        Some(other) => {
            errors.push(format!("output: expected a string, got {}", other.type_str()));
            None
        }
    };
    for key in doc.keys() {
        if !["experiment", "seed", "output", "parameters"].contains(&key.as_str()) {
            warnings.push(format!("ignoring unknown key {key}"));
        }
    }
    let empty = toml::Table::new();
    let table = match doc.get("parameters") {
        None => &empty,
        Some(toml::Value::Table(t)) => t,
        Some(other) => {
            errors.push(format!("parameters: expected a table, got {}", other.type_str()));
            &empty
        }
    };

    let parameters = experiment.map(|exp| {
        let mut reader = Reader::new(table, &mut errors);
        let p = parse_parameters(exp, &mut reader);
        warnings.extend(reader.unknown("parameters."));
        p
    });

    match (experiment, parameters) {
        (Some(experiment), Some(parameters)) if errors.is_empty() => Ok(ParsedConfig {
            config: ExperimentConfig {
                experiment,
                seed,
                output,
                parameters,
            },
            warnings,
        }),
        _ => Err(Error::Config(errors)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_swap_decay() {
        let p = parse_config("experiment = \"swap-decay\"\n[parameters]\nr_i = 1\nk_max = 40\n").unwrap();
        assert_eq!(p.config.parameters, Parameters::SwapDecay { r_i: 1.0, k_max: 40 });
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn negative_r_names_key() {
        let err = parse_config("experiment = \"swap-decay\"\n[parameters]\nr_i = -1.0\nk_max = 40\n").unwrap_err();
        match err {
            Error::Config(msgs) => assert!(msgs.len() == 1 && msgs[0].contains("r_i")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_warns() {
        let p = parse_config("experiment = \"swap-decay\"\ncolour = 3\n[parameters]\nr_i = 1.0\nk_max = 40\nfoo = 1\n")
            .unwrap();
        assert_eq!(p.warnings.len(), 2);
    }

    #[test]
    fn errors_are_collected() {
        let err = parse_config("experiment = \"percolation\"\nseed = -3\n[parameters]\nwidth = 1\ntrials = \"x\"\n")
            .unwrap_err();
        match err {
            // seed, width range, missing height, trials type
            Error::Config(msgs) => assert_eq!(msgs.len(), 4, "{msgs:?}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("experiment = \"nope\""), Err(Error::Config(_))));
    }
}
