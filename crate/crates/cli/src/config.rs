use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use ejs_core::dmc::{Channel, ChannelSpec};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Monte Carlo experiments for variable-length feedback coding with EJS-driven encoders.
#[derive(Debug, Parser)]
#[command(name = "ejs-sim", version)]
pub struct Cli {
    /// Channel JSON file, or a built-in: `bsc:<p>`, `kary:<K>:<p>`, `ternary:<eta>`.
    #[arg(long)]
    pub channel: String,
    /// Comma-separated scheme ids (pm, maxejs, ghbz, bz-prop, bz-nu[:p], alg1, alg2, kary, const).
    #[arg(long, default_value = "alg2")]
    pub scheme: String,
    /// Comma-separated message-set sizes.
    #[arg(long, default_value = "16")]
    pub messages: String,
    /// Comma-separated target error probabilities.
    #[arg(long, default_value = "1e-3")]
    pub epsilon: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Audit every trace; in-scope violations fail the run.
    #[arg(long)]
    pub audit: bool,
    /// Emit a sweep table along this axis.
    #[arg(long, value_enum)]
    pub sweep: Option<Axis>,
    #[arg(long, default_value = "ejs-out")]
    pub out: PathBuf,
    /// Per-trial step cap (default: ten times the expected-length bound).
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Write per-trial outcomes and step traces for every cell.
    #[arg(long)]
    pub traces: bool,
    /// Samples per step for Monte Carlo EJS estimates of product-form encoders.
    #[arg(long, default_value_t = ejs_core::divergences::DEFAULT_MC_SAMPLES)]
    pub ejs_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    #[value(name = "epsilon")]
    Epsilon,
    #[value(name = "M")]
    Messages,
}

/// A loaded channel and its provenance line for output preambles.
#[derive(Debug, Clone)]
pub struct ChannelSource {
    pub label: String,
    pub sha256: String,
    pub channel: Channel<f64>,
}

/// Everything an experiment needs, validated.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub channel: ChannelSource,
    pub schemes: Vec<String>,
    pub messages: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub audit: bool,
    pub max_steps: Option<usize>,
    pub traces: bool,
    pub ejs_samples: usize,
}

impl ExperimentConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let schemes: Vec<String> = parse_list(&cli.scheme, "--scheme")?;
        let messages: Vec<usize> = parse_list(&cli.messages, "--messages")?;
        let epsilons: Vec<f64> = parse_list(&cli.epsilon, "--epsilon")?;
        if cli.trials == 0 {
            return Err(CliError::Config("--trials must be at least 1".into()));
        }
        if let Some(&m) = messages.iter().find(|&&m| m < 2) {
            return Err(CliError::Config(format!("--messages entries must be at least 2, got {m}")));
        }
        if let Some(&e) = epsilons.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            return Err(CliError::Config(format!("--epsilon entries must lie in (0, 1), got {e}")));
        }
        if cli.ejs_samples == 0 {
            return Err(CliError::Config("--ejs-samples must be at least 1".into()));
        }
        if cli.max_steps == Some(0) {
            return Err(CliError::Config("--max-steps must be at least 1".into()));
        }
        Ok(Self {
            channel: load_channel(&cli.channel)?,
            schemes,
            messages,
            epsilons,
            trials: cli.trials,
            seed: cli.seed,
            out: cli.out.clone(),
            audit: cli.audit,
            max_steps: cli.max_steps,
            traces: cli.traces,
            ejs_samples: cli.ejs_samples,
        })
    }
}

fn parse_list<T: FromStr>(text: &str, flag: &str) -> Result<Vec<T>, CliError> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(CliError::Config(format!("{flag} needs at least one value")));
    }
    items
        .into_iter()
        .map(|s| s.parse().map_err(|_| CliError::Config(format!("{flag}: cannot parse `{s}`"))))
        .collect()
}

fn hex_sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads a channel file, falling back to the built-in names when no such file exists.
pub fn load_channel(spec: &str) -> Result<ChannelSource, CliError> {
    let path = Path::new(spec);
    if path.exists() {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::Core(ejs_core::Error::ChannelFormat("file is not UTF-8".into())))?;
        let channel = ejs_core::dmc::parse_channel(&text)?;
        return Ok(ChannelSource { label: spec.to_string(), sha256: hex_sha256(&bytes), channel });
    }
    let channel = builtin_channel(spec)?;
    let canonical = ChannelSpec::from_channel(&channel).to_json();
    Ok(ChannelSource { label: spec.to_string(), sha256: hex_sha256(canonical.as_bytes()), channel })
}

fn builtin_channel(spec: &str) -> Result<Channel<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<f64, CliError> {
        s.parse().map_err(|_| CliError::Config(format!("bad number `{s}` in channel `{spec}`")))
    };
    let ch = match parts.as_slice() {
        ["bsc", p] => Channel::bsc(num(p)?)?,
        ["kary", k, p] => {
            let k = k.parse().map_err(|_| CliError::Config(format!("bad alphabet size in `{spec}`")))?;
            Channel::kary_symmetric(k, num(p)?)?
        }
        ["ternary", eta] => Channel::ternary_uniform_input(num(eta)?)?,
        _ => return Err(CliError::Config(format!("channel file `{spec}` not found"))),
    };
    Ok(ch)
}
