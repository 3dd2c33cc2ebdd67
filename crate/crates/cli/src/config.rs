use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use ipdsaw::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    /// Rejection sampler at the critical point.
    Perfect,
    /// Backward sampling through the exact walk table.
    Exact,
    /// Geometric-lifetime rejection sampler (collapsed phase).
    Lifetime,
    /// Area-tilted walk conditioned on the bead window.
    Tilted,
    /// Exact mixture over lengths near L.
    Mixture,
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Thermodynamic constants at the given inverse temperature.
    Constants,
    /// log Z̃_L for L = 1..=max(L).
    Zpartition,
    /// Exact laws of the horizontal extension for each L.
    Extension,
    /// Draw polymer configurations, one JSON record per line.
    Sample {
        #[arg(value_enum)]
        kind: SampleKind,
    },
    /// Critical excursions of the auxiliary walk.
    Excursions,
    /// Wulff profile and envelopes on n + 1 points of [0, 1].
    Shape,
    /// Run a named experiment from the registry.
    Experiment { name: String },
    /// Run the acceptance suite.
    Selftest,
}

/// Flags shared by every subcommand; each one overrides the config file.
#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// JSON run configuration; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// One or more lengths, comma separated.
    #[arg(long = "L", global = true, value_delimiter = ',')]
    pub l: Vec<usize>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub replicas: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory; without it results go to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Table cache directory (falls back to $IPDSAW_CACHE).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Trial or step budget of the sampler in use.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[arg(long, global = true)]
    pub quick: bool,
}

/// Everything needed to repeat a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Option<Command>,
    pub beta: Option<f64>,
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    pub q: Option<f64>,
    pub n: Option<usize>,
    pub replicas: Option<usize>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub budget: Option<u64>,
    pub quick: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Defaults, then the config file, then the command line.
    pub fn resolve(command: Option<Command>, flags: Flags) -> Result<Self> {
        let mut c = match &flags.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if command.is_some() {
            c.command = command;
        }
        if c.command.is_none() {
            return Err(Error::InvalidParameter("no subcommand given and none in the config".into()));
        }
        c.beta = flags.beta.or(c.beta);
        if !flags.l.is_empty() {
            c.l = flags.l;
        }
        c.q = flags.q.or(c.q);
        c.n = flags.n.or(c.n);
        c.replicas = flags.replicas.or(c.replicas);
        c.seed = flags.seed.unwrap_or(c.seed);
        c.threads = flags.threads.or(c.threads);
        c.out = flags.out.or(c.out);
        c.cache = flags
            .cache
            .or(c.cache)
            .or_else(|| std::env::var_os("IPDSAW_CACHE").map(PathBuf::from));
        c.budget = flags.budget.or(c.budget);
        c.quick |= flags.quick;
        Ok(c)
    }

    pub fn beta(&self) -> Result<f64> {
        self.beta
            .ok_or_else(|| Error::InvalidParameter("--beta is required".into()))
    }

    pub fn lengths(&self) -> Result<Vec<usize>> {
        if self.l.is_empty() {
            return Err(Error::InvalidParameter("--L is required".into()));
        }
        Ok(self.l.clone())
    }

    pub fn max_length(&self) -> Result<usize> {
        Ok(*self.lengths()?.iter().max().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let dir = std::env::temp_dir().join(format!("ipdsaw-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("c.json");
        let saved = RunConfig {
            command: Some(Command::Sample { kind: SampleKind::Perfect }),
            beta: Some(1.0),
            l: vec![10],
            seed: 4,
            ..Default::default()
        };
        std::fs::write(&file, serde_json::to_string(&saved).unwrap()).unwrap();
        let flags = Flags {
            config: Some(file),
            seed: Some(9),
            ..Default::default()
        };
        let c = RunConfig::resolve(None, flags).unwrap();
        assert_eq!(c.command, saved.command);
        assert_eq!(c.l, vec![10]);
        assert_eq!(c.seed, 9);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn missing_command_is_an_error() {
        assert!(RunConfig::resolve(None, Flags::default()).is_err());
    }
}
