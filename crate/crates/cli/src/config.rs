use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Plain,
}

/// Worker count; `auto` lets rayon pick one per core.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Count(usize),
}

impl FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Threads::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!(
                "threads must be `auto` or a positive count, got {s:?}"
            )),
            Ok(n) => Ok(Threads::Count(n)),
        }
    }
}

impl fmt::Display for Threads {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threads::Auto => f.write_str("auto"),
            Threads::Count(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for Threads {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Threads::Auto => s.serialize_str("auto"),
            Threads::Count(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Threads {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Threads::from_str(&n.to_string()),
            Raw::Text(t) => Threads::from_str(&t),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Effective settings of one run. Defaults: json, seed 0, tol 1e-10, threads auto.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CliConfig {
    pub output_format: OutputFormat,
    pub seed: u64,
    pub tol: f64,
    pub threads: Threads,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            output_format: OutputFormat::Json,
            seed: 0,
            tol: 1e-10,
            threads: Threads::Auto,
        }
    }
}

/// Contents of a `--config` file; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub output_format: Option<OutputFormat>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub threads: Option<Threads>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Parameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Parameter(format!("invalid config {}: {e}", path.display())))
    }
}

/// Flag values; `None` means the flag was not given.
#[derive(Debug, Default, Clone, Copy)]
pub struct Overrides {
    pub output_format: Option<OutputFormat>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub threads: Option<Threads>,
}

impl CliConfig {
    /// Defaults, then the config file, then flags.
    pub fn resolve(file: Option<ConfigFile>, flags: Overrides) -> Result<Self, CliError> {
        let file = file.unwrap_or_default();
        let d = CliConfig::default();
        let cfg = CliConfig {
            output_format: flags
                .output_format
                .or(file.output_format)
                .unwrap_or(d.output_format),
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
            tol: flags.tol.or(file.tol).unwrap_or(d.tol),
            threads: flags.threads.or(file.threads).unwrap_or(d.threads),
        };
        if !(cfg.tol.is_finite() && cfg.tol > 0.0) {
            return Err(CliError::Parameter(format!(
                "tol must be positive, got {}",
                cfg.tol
            )));
        }
        Ok(cfg)
    }

    pub fn thread_pool(&self) -> Result<rayon::ThreadPool, CliError> {
        let n = match self.threads {
            Threads::Auto => 0,
            Threads::Count(n) => n,
        };
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Parameter(format!("cannot start {n} threads: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: ConfigFile =
            serde_json::from_str(r#"{"seed": 7, "tol": 1e-6, "threads": 2}"#).unwrap();
        let flags = Overrides {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = CliConfig::resolve(Some(file), flags).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.tol, 1e-6);
        assert_eq!(cfg.threads, Threads::Count(2));
        assert_eq!(cfg.output_format, OutputFormat::Json);
    }

    #[test]
    fn threads_parse() {
        assert_eq!("auto".parse::<Threads>().unwrap(), Threads::Auto);
        assert_eq!("3".parse::<Threads>().unwrap(), Threads::Count(3));
        assert!("0".parse::<Threads>().is_err());
        let t: Threads = serde_json::from_str(r#""auto""#).unwrap();
        assert_eq!(t, Threads::Auto);
        assert!(serde_json::from_str::<ConfigFile>(r#"{"sed": 1}"#).is_err());
    }
}
