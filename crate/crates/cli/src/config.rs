//! Command-line arguments, the flat `key = value` config file, and the
//! resolved run configuration embedded in every output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dno_core::analysis::EpsRule;
use dno_core::constructor::DnoForm;
use dno_core::Precision;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "dno", version, about = "Build, sweep and qualify sigmoid deep-net operators")]
pub struct Cli {
    /// Seed for every random choice; required here or in the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Deterministic grid size used for sup-norm estimates (default 10000).
    #[arg(long, global = true)]
    pub grid_res: Option<usize>,
    /// Evaluation precision: standard or extended.
    #[arg(long, global = true)]
    pub precision: Option<Precision>,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct an operator and write it as a network file.
    Build(BuildArgs),
    /// Measure sup errors over a list of n and write a CSV or JSON table.
    Sweep(SweepArgs),
    /// Estimate smoothness and radialness from approximation rates.
    Qualify(QualifyArgs),
    /// Run the property suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Default)]
pub struct SourceArgs {
    /// Corpus entry id.
    #[arg(long)]
    pub corpus: Option<String>,
    /// Corpus manifest replacing the built-in one.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Tabulated function: coordinates then value on each line.
    #[arg(long, conflicts_with = "corpus")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Operator form: rescaled or as-printed.
    #[arg(long)]
    pub form: Option<DnoForm>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Comma-separated n values.
    #[arg(long)]
    pub n_list: Option<String>,
    /// `fixed:<eps>` or `n^-<p>`.
    #[arg(long)]
    pub eps_rule: Option<EpsRule>,
}

#[derive(Debug, Args)]
pub struct QualifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub n_list: Option<String>,
    /// Leading n values left out of the rate fits.
    #[arg(long)]
    pub skip: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated suite names; all when absent.
    #[arg(long)]
    pub suites: Option<String>,
    /// Negative control: corrupts the partition suite.
    #[arg(long, hide = true)]
    pub sabotage: bool,
}

const KEYS: [&str; 14] =
    ["seed", "out", "grid-res", "precision", "corpus", "manifest", "input", "n", "eps", "form", "n-list", "eps-rule", "skip", "suites"];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key = value", lineno + 1);
        };
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            bail!("config line {}: unknown key `{key}`", lineno + 1);
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            bail!("config line {}: duplicate key `{key}`", lineno + 1);
        }
    }
    Ok(map)
}

/// Flag value if given, else the config file's, parsed.
pub struct Layered {
    file: BTreeMap<String, String>,
}

impl Layered {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                parse_config(&text).with_context(|| format!("in {}", p.display()))?
            }
            None => BTreeMap::new(),
        };
        Ok(Self { file })
    }

    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(v) => v.parse().map(Some).map_err(|e| anyhow::anyhow!("config key `{key}`: {e}")),
            None => Ok(None),
        }
    }
}

pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    let list = s
        .split(',')
        .map(|v| v.trim().parse::<usize>().with_context(|| format!("bad n value `{}`", v.trim())))
        .collect::<Result<Vec<_>>>()?;
    if list.contains(&0) || list.windows(2).any(|w| w[0] >= w[1]) {
        bail!("n list must be positive and strictly increasing: {s}");
    }
    Ok(list)
}

/// Where the sampled function comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SourceInfo {
    Corpus {
        id: String,
        manifest: Option<String>,
    },
    Table {
        path: String,
        samples: usize,
        interpolation: &'static str,
    },
}

/// Fully resolved settings of one run. The output path is left out so that
/// reruns into different files stay byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub seed: u64,
    pub grid_res: usize,
    pub grid_random: usize,
    pub precision: Precision,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<DnoForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skip: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<String>>,
}

impl RunConfig {
    pub fn new(command: &'static str, seed: u64, grid_res: usize, precision: Precision) -> Self {
        Self {
            command,
            seed,
            grid_res,
            grid_random: 1000,
            precision,
            source: None,
            d: None,
            n: None,
            eps: None,
            form: None,
            n_list: None,
            eps_rule: None,
            skip: None,
            suites: None,
        }
    }

    /// `key=value` lines for CSV headers.
    pub fn header_lines(&self) -> Result<Vec<String>> {
        let value = serde_json::to_value(self)?;
        let mut lines = Vec::new();
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                let text = match v {
                    serde_json::Value::String(s) => s,
                    other => other.to_string(),
                };
                lines.push(format!("{k}={text}"));
            }
        }
        Ok(lines)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let map = parse_config("# comment\nseed = 4\nn_list=8,16 # trailing\n\n").unwrap();
        assert_eq!(map["seed"], "4");
        assert_eq!(map["n-list"], "8,16");
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("seed").is_err());
        assert!(parse_config("seed = 1\nseed = 2").is_err());
    }

    #[test]
    fn flags_override_the_file() {
        let layered = Layered { file: parse_config("seed = 4\nn = 9").unwrap() };
        assert_eq!(layered.pick(Some(7u64), "seed").unwrap(), Some(7));
        assert_eq!(layered.pick(None::<u64>, "seed").unwrap(), Some(4));
        assert_eq!(layered.pick(None::<usize>, "skip").unwrap(), None);
        assert!(Layered { file: parse_config("n = x").unwrap() }.pick(None::<usize>, "n").is_err());
    }

    #[test]
    fn n_lists() {
        assert_eq!(parse_n_list("8, 16,32").unwrap(), vec![8, 16, 32]);
        assert!(parse_n_list("8,8").is_err());
        assert!(parse_n_list("0,8").is_err());
        assert!(parse_n_list("a").is_err());
    }
}
