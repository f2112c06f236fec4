//! `mlgamma`: command-line access to Mittag-Leffler evaluation, existence
//! classification, sampling, identity checks and ID certificates.
//!
//! Exit codes: 0 success, 2 parameter error, 3 numerical non-convergence,
//! 4 internal consistency failure, 1 I/O failure.

mod config;
mod output;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use mlgamma_core::classify::{self, Outcome, RegionSpec};
use mlgamma_core::dists::{self, AlphaCauchyParams, GammaTypeParams, SampleBatch};
use mlgamma_core::idcert::{self, Certificate, Mode};
use mlgamma_core::specfun::{self, MLParams};

use config::{CliConfig, ConfigFile, OutputFormat, Overrides, Threads};
use output::sig12;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl From<mlgamma_core::Error> for CliError {
    fn from(e: mlgamma_core::Error) -> Self {
        use mlgamma_core::Error as E;
        match e {
            E::Parameter(m) => CliError::Parameter(m),
            E::Range(_) | E::EmptyStrip => CliError::Parameter(e.to_string()),
            E::NonConvergence(m) => CliError::NonConvergence(m),
            E::Consistency(m) => CliError::Consistency(m),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parameter(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Consistency(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "mlgamma",
    version,
    about = "Mittag-Leffler functions, gamma-type laws and ID certificates"
)]
struct Cli {
    /// JSON file with any of output_format, seed, tol, threads; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output format [default: json]
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Seed for every random stream [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Numerical tolerance [default: 1e-10]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads, `auto` or a count [default: auto]
    #[arg(long, global = true)]
    threads: Option<Threads>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate E^γ_{ρ,μ}(z).
    MlEval {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
    /// Scan t ↦ E^γ_{ρ,μ}(−t) for negative values.
    MlScan {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = idcert::SCAN_T_MAX)]
        tmax: f64,
    },
    /// Existence of X_{a,b,c,d}, cross-checked through the ML mapping.
    Exists {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        /// Scan range of the numeric cross-check.
        #[arg(long, default_value_t = idcert::SCAN_T_MAX)]
        tmax: f64,
    },
    /// Non-negativity of E^γ_{ρ,μ} on the negative half line.
    MlNonneg {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        mu: f64,
        /// Omit for the two-parameter classifier.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = idcert::SCAN_T_MAX)]
        tmax: f64,
    },
    /// Infinite-divisibility certificate; comma-separated values run as a batch.
    Certify {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<i8>,
        #[arg(long, value_delimiter = ',')]
        nu: Vec<f64>,
    },
    /// Verify a registered identity in law.
    Verify {
        #[arg(long)]
        identity: String,
        #[arg(long, default_value = "symbolic")]
        mode: Mode,
        /// Sample size for monte-carlo mode.
        #[arg(long, default_value_t = 200_000)]
        n: usize,
        #[command(flatten)]
        params: IdentityParams,
    },
    /// Draw a sample and write it as single-column CSV.
    Sample {
        #[arg(long, value_enum)]
        dist: DistTag,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: DistParams,
    },
    /// Classify a (ρ, μ) grid and write it as CSV.
    RegionMap {
        #[arg(long)]
        rho_min: f64,
        #[arg(long)]
        rho_max: f64,
        #[arg(long)]
        mu_min: f64,
        #[arg(long)]
        mu_max: f64,
        #[arg(long)]
        step: f64,
        /// Three-parameter classifier with this γ; two-parameter when omitted.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = idcert::SCAN_T_MAX)]
        tmax: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    AlphaCauchy,
    HalfPower,
    HalfStable,
    HalfStudent,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistTag {
    AlphaCauchy,
    Gamma,
    Beta,
    SymStable,
    Student,
    WrightM,
    Xabcd,
    Y,
}

#[derive(Args)]
struct IdentityParams {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
}

impl IdentityParams {
    fn to_map(&self) -> BTreeMap<String, f64> {
        [
            ("alpha", self.alpha),
            ("q", self.q),
            ("eps", self.eps),
            ("mu", self.mu),
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("nu", self.nu),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
    }
}

#[derive(Args)]
struct DistParams {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
}

fn need(v: Option<f64>, flag: &str, what: &str) -> Result<f64> {
    v.ok_or_else(|| CliError::Parameter(format!("{what} needs --{flag}")))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn draw(dist: DistTag, p: &DistParams, n: usize, seed: u64) -> Result<SampleBatch> {
    let batch = match dist {
        DistTag::AlphaCauchy => {
            let a = AlphaCauchyParams::new(need(p.alpha, "alpha", "alpha-cauchy")?)?;
            dists::sample_alpha_cauchy(&a, n, seed)
        }
        DistTag::Gamma => dists::sample_gamma(need(p.c, "c", "gamma")?, n, seed)?,
        DistTag::Beta => {
            dists::sample_beta(need(p.a, "a", "beta")?, need(p.b, "b", "beta")?, n, seed)?
        }
        DistTag::SymStable => {
            dists::sample_sym_stable(need(p.alpha, "alpha", "sym-stable")?, n, seed)?
        }
        DistTag::Student => dists::sample_student(need(p.nu, "nu", "student")?, n, seed)?,
        DistTag::WrightM => {
            let alpha = need(p.alpha, "alpha", "wright-m")?;
            let beta = need(p.beta, "beta", "wright-m")?;
            let t = p.t.unwrap_or(0.0);
            let v = classify::classify_m(alpha, beta, t)?;
            if v.outcome != Outcome::Exists {
                return Err(CliError::Parameter(format!(
                    "M law with alpha={alpha}, beta={beta} does not exist"
                )));
            }
            dists::sample_wright_m(alpha, beta, t, n, seed)?
        }
        DistTag::Xabcd => {
            let x = GammaTypeParams::new(
                need(p.a, "a", "xabcd")?,
                need(p.b, "b", "xabcd")?,
                need(p.c, "c", "xabcd")?,
                need(p.d, "d", "xabcd")?,
            )?;
            dists::sample_xabcd(&x, n, seed)?
        }
        DistTag::Y => dists::sample_y(n, seed),
    };
    Ok(batch)
}

fn write_sample<W: Write>(out: &mut W, cfg: &CliConfig, batch: &SampleBatch) -> io::Result<()> {
    writeln!(
        out,
        "# dist={} seed={} n={}",
        batch.dist_tag, batch.seed, batch.n
    )?;
    writeln!(out, "{}", output::config_comment(cfg))?;
    writeln!(out, "value")?;
    for v in &batch.values {
        writeln!(out, "{}", sig12(*v))?;
    }
    Ok(())
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(sig12).unwrap_or_default()
}

fn write_region<W: Write>(
    out: &mut W,
    cfg: &CliConfig,
    rows: &[Vec<classify::RegionCell>],
) -> io::Result<()> {
    writeln!(out, "{}", output::config_comment(cfg))?;
    writeln!(out, "rho,mu,gamma,outcome,rule,numeric_min")?;
    for cell in rows.iter().flatten() {
        let outcome = match cell.verdict.outcome {
            Outcome::Exists => "exists",
            Outcome::NotExists => "not-exists",
            Outcome::Unknown => "unknown",
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            sig12(cell.rho),
            sig12(cell.mu),
            opt_cell(cell.gamma),
            outcome,
            output::csv_field(&cell.verdict.rule),
            opt_cell(cell.numeric_min)
        )?;
    }
    Ok(())
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn certify_batch(
    cfg: &CliConfig,
    target: Target,
    alpha: &[f64],
    p: &[f64],
    eps: Option<i8>,
    nu: &[f64],
) -> Result<Value> {
    let jobs: Vec<Box<dyn Fn() -> mlgamma_core::Result<Certificate> + Send + Sync>> = match target {
        Target::AlphaCauchy => alpha
            .iter()
            .map(|&a| boxed(move || idcert::certify_alpha_cauchy(a)))
            .collect(),
        Target::HalfStable => alpha
            .iter()
            .map(|&a| boxed(move || idcert::certify_half_stable(a)))
            .collect(),
        Target::HalfStudent => nu
            .iter()
            .map(|&v| boxed(move || idcert::certify_half_student(v)))
            .collect(),
        Target::HalfPower => {
            let eps = eps.ok_or_else(|| {
                CliError::Parameter("half-power needs --eps 1 or --eps -1".into())
            })?;
            alpha
                .iter()
                .flat_map(|&a| {
                    p.iter()
                        .map(move |&q| boxed(move || idcert::certify_half_power(a, q, eps)))
                })
                .collect()
        }
    };
    if jobs.is_empty() {
        let flags = match target {
            Target::HalfStudent => "--nu",
            Target::HalfPower => "--alpha and --p",
            _ => "--alpha",
        };
        return Err(CliError::Parameter(format!("certify needs {flags}")));
    }
    let pool = cfg.thread_pool()?;
    let certs = pool.install(|| {
        jobs.par_iter()
            .map(|job| job())
            .collect::<mlgamma_core::Result<Vec<_>>>()
    })?;
    Ok(if certs.len() == 1 {
        to_value(&certs[0])
    } else {
        to_value(&certs)
    })
}

fn boxed<F>(f: F) -> Box<dyn Fn() -> mlgamma_core::Result<Certificate> + Send + Sync>
where
    F: Fn() -> mlgamma_core::Result<Certificate> + Send + Sync + 'static,
{
    Box::new(f)
}

fn run(cli: Cli) -> Result<()> {
    let file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    let flags = Overrides {
        output_format: cli.format,
        seed: cli.seed,
        tol: cli.tol,
        threads: cli.threads,
    };
    let cfg = CliConfig::resolve(file, flags)?;
    let stdout = io::stdout();
    let emit = |name: &str, v: Value| -> Result<()> {
        let mut out = BufWriter::new(stdout.lock());
        output::emit(&mut out, &cfg, name, v)?;
        out.flush()?;
        Ok(())
    };
    match cli.command {
        Command::MlEval { rho, mu, gamma, z } => {
            let params = MLParams::new(rho, mu, gamma)?;
            let r = specfun::eval_ml(&params, z)?;
            let mut v = to_value(&r);
            v["params"] = to_value(&params);
            v["z"] = to_value(&z);
            emit("ml-eval", v)
        }
        Command::MlScan {
            rho,
            mu,
            gamma,
            tmax,
        } => {
            let r = specfun::sign_scan(&MLParams::new(rho, mu, gamma)?, tmax, cfg.tol)?;
            emit("ml-scan", to_value(&r))
        }
        Command::Exists { a, b, c, d, tmax } => {
            let check = classify::cross_check(&GammaTypeParams::new(a, b, c, d)?, tmax)?;
            emit("exists", to_value(&check.existence))
        }
        Command::MlNonneg {
            rho,
            mu,
            gamma,
            tmax,
        } => {
            let (verdict, params) = match gamma {
                None => (
                    classify::classify_two_param(rho, mu)?,
                    MLParams::two(rho, mu)?,
                ),
                Some(g) => {
                    let p = MLParams::new(rho, mu, g)?;
                    (classify::classify_ml_nonneg(&p)?, p)
                }
            };
            if verdict.outcome == Outcome::Exists {
                if let Ok(scan) = specfun::sign_scan(&params, tmax, cfg.tol) {
                    if scan.certified {
                        return Err(CliError::Consistency(format!(
                            "rule {} claims non-negativity but E(-{}) = {} (error {})",
                            verdict.rule, scan.argmin, scan.min_value, scan.err_at_min
                        )));
                    }
                }
            }
            emit("ml-nonneg", to_value(&verdict))
        }
        Command::Certify {
            target,
            alpha,
            p,
            eps,
            nu,
        } => {
            let v = certify_batch(&cfg, target, &alpha, &p, eps, &nu)?;
            emit("certify", v)
        }
        Command::Verify {
            identity,
            mode,
            n,
            params,
        } => {
            let r = idcert::verify_identity(&identity, &params.to_map(), mode, n, cfg.seed)?;
            emit("verify", to_value(&r))
        }
        Command::Sample {
            dist,
            n,
            out,
            params,
        } => {
            let batch = draw(dist, &params, n, cfg.seed)?;
            let mut w = open_out(&out)?;
            write_sample(&mut w, &cfg, &batch)?;
            w.flush()?;
            Ok(())
        }
        Command::RegionMap {
            rho_min,
            rho_max,
            mu_min,
            mu_max,
            step,
            gamma,
            tmax,
            out,
        } => {
            let spec = RegionSpec {
                rho_min,
                rho_max,
                mu_min,
                mu_max,
                step,
                gamma,
                scan_t_max: tmax,
            };
            spec.validate()?;
            let pool = cfg.thread_pool()?;
            let rows = pool.install(|| {
                spec.rho_axis()
                    .par_iter()
                    .map(|&rho| classify::region_row(&spec, rho))
                    .collect::<mlgamma_core::Result<Vec<_>>>()
            })?;
            let mut w = open_out(&out)?;
            write_region(&mut w, &cfg, &rows)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mlgamma: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mlgamma_core::Error;

    #[test]
    fn exit_codes_follow_error_kind() {
        let code = |e: Error| CliError::from(e).exit_code();
        assert_eq!(code(Error::Parameter("x".into())), 2);
        assert_eq!(code(Error::Range("x".into())), 2);
        assert_eq!(code(Error::EmptyStrip), 2);
        assert_eq!(code(Error::NonConvergence("x".into())), 3);
        assert_eq!(code(Error::Consistency("x".into())), 4);
    }
}
