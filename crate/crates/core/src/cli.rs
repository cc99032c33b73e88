//! Command line front end.
//!
//! Six subcommands, all emitting plot-ready CSV:
//!
//! - `dist` — entrance PMF per sector (or, with `--arrival`, the arrival
//!   PMF per entry slot): `index,probability`;
//! - `sequence` — a scan schedule: `slot,sector`;
//! - `analytic` — exact discovery-time summary: `quantity,value` rows for
//!   mean, variance and censored_mass, plus an optional PMF dump;
//! - `simulate` — Monte-Carlo histogram: `tau,count,frequency`;
//! - `sweep-L` / `sweep-mu` — parameter sweeps over all three strategies:
//!   `param,strategy,mean,std_error,censored`.
//!
//! Flags override an optional `key=value` config file (`--config`). Float
//! fields are printed with 12 significant digits and identical invocations
//! produce byte-identical files.

use std::collections::HashMap;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::analytic::{
    deterministic_discovery_pmf, deterministic_mean_discovery, ea_discovery_variance,
    ea_mean_discovery, ea_uniform_phase_pmf, mlri_discovery_pmf, mlri_discovery_variance,
    mlri_mean_discovery, DiscoveryPmf,
};
use crate::dist::DEFAULT_TAIL_TOLERANCE;
use crate::error::{Error, Result};
use crate::sim::{
    run_experiment, sweep_l, sweep_mu, trial_rng, ArrivalSpec, EntranceSpec, SimConfig,
    StrategyKind, SweepRow,
};
use crate::strategies::{
    ea_sequence, mlri_optimal_q, mlri_sample, random_permutation, smbi_sequence_with_flags,
    ScanSequence,
};

/// Version of the CSV schemas emitted by [`execute`].
pub const FORMAT_VERSION: u32 = 1;

const DEFAULT_N: usize = 17;
const DEFAULT_L: u64 = 10;
const DEFAULT_MU: f64 = 0.1;
const DEFAULT_TRIALS: u64 = 100_000;
const DEFAULT_SEED: u64 = 42;
const DEFAULT_HORIZON: usize = 1000;

/// A fully resolved, validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub format_version: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Dist {
        n_sectors: usize,
        entrance: EntranceSpec,
        arrival: ArrivalSpec,
        dump_arrival: bool,
        out: PathBuf,
    },
    Sequence {
        n_sectors: usize,
        entrance: EntranceSpec,
        arrival: ArrivalSpec,
        strategy: StrategyKind,
        horizon: usize,
        seed: u64,
        out: PathBuf,
    },
    Analytic {
        n_sectors: usize,
        entrance: EntranceSpec,
        arrival: ArrivalSpec,
        strategy: StrategyKind,
        horizon: usize,
        tau_max: usize,
        out: PathBuf,
        pmf_out: Option<PathBuf>,
    },
    Simulate {
        config: SimConfig,
        out: PathBuf,
    },
    SweepL {
        base: SimConfig,
        l_values: Vec<u64>,
        out: PathBuf,
    },
    SweepMu {
        base: SimConfig,
        mu_values: Vec<f64>,
        out: PathBuf,
    },
}

#[derive(Parser, Debug)]
#[command(
    name = "iascan",
    version,
    about = "Sector-scanning strategies for mmWave initial access",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Dump the entrance PMF (or the arrival PMF) as index,probability CSV
    Dist(DistArgs),
    /// Dump a scan schedule as slot,sector CSV
    Sequence(SequenceArgs),
    /// Exact discovery-time summary (quantity,value CSV)
    Analytic(AnalyticArgs),
    /// Run a Monte-Carlo experiment (tau,count,frequency CSV)
    Simulate(SimulateArgs),
    /// Sweep the triangular width L over all three strategies
    #[command(name = "sweep-L", alias = "sweep-l")]
    SweepL(SweepLArgs),
    /// Sweep the arrival rate mu over all three strategies
    #[command(name = "sweep-mu")]
    SweepMu(SweepMuArgs),
}

/// Flags shared by every subcommand. All optional here: values are
/// resolved against the config file and the documented defaults, and
/// validated afterwards so errors can name the offending flag.
#[derive(Args, Debug, Clone, Default)]
struct CommonOpts {
    /// Number of sectors
    #[arg(long = "N")]
    n: Option<usize>,
    /// Entrance distribution family: triangular, uniform or custom
    #[arg(long = "dist")]
    dist: Option<String>,
    /// Comma-separated non-negative weights for --dist custom
    #[arg(long)]
    weights: Option<String>,
    /// Scanning strategy: ea, mlri or smbi
    #[arg(long)]
    strategy: Option<String>,
    /// Monte-Carlo trials
    #[arg(long)]
    trials: Option<u64>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum slots scanned per trial / schedule length
    #[arg(long)]
    horizon: Option<usize>,
    /// Largest discovery time materialized in PMF dumps
    #[arg(long = "tau-max")]
    tau_max: Option<usize>,
    /// Arrival-PMF truncation tolerance, in (0,1)
    #[arg(long = "tail-tol")]
    tail_tol: Option<f64>,
    /// key=value config file; command-line flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DistArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Triangular base width (even)
    #[arg(long = "L")]
    l: Option<u64>,
    /// Arrival rate
    #[arg(long)]
    mu: Option<f64>,
    /// Dump the arrival PMF over entry slots instead of the entrance PMF
    #[arg(long)]
    arrival: bool,
}

#[derive(Args, Debug)]
struct SequenceArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long = "L")]
    l: Option<u64>,
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args, Debug)]
struct AnalyticArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long = "L")]
    l: Option<u64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Also dump the discovery-time PMF (tau,probability CSV) here
    #[arg(long = "pmf-out")]
    pmf_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long = "L")]
    l: Option<u64>,
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepLArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// L values: start:stop:step range or comma-separated list
    #[arg(long = "L")]
    l: Option<String>,
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepMuArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long = "L")]
    l: Option<u64>,
    /// mu values: start:stop:step range or comma-separated list
    #[arg(long)]
    mu: Option<String>,
}

/// Parses and validates a full argv (program name included).
pub fn parse_args<I, S>(argv: I) -> Result<ExperimentSpec>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&argv).map_err(|e| Error::Usage(e.to_string()))?;
    let command = match cli.command {
        CliCommand::Dist(args) => resolve_dist(args)?,
        CliCommand::Sequence(args) => resolve_sequence(args)?,
        CliCommand::Analytic(args) => resolve_analytic(args)?,
        CliCommand::Simulate(args) => resolve_simulate(args)?,
        CliCommand::SweepL(args) => resolve_sweep_l(args)?,
        CliCommand::SweepMu(args) => resolve_sweep_mu(args)?,
    };
    Ok(ExperimentSpec {
        command,
        format_version: FORMAT_VERSION,
    })
}

/// Values from an optional `key=value` config file.
struct ConfigFile {
    values: HashMap<String, String>,
}

const CONFIG_KEYS: [&str; 12] = [
    "N", "dist", "weights", "strategy", "trials", "seed", "horizon", "tau-max", "tail-tol",
    "out", "L", "mu",
];

impl ConfigFile {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut values = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    Error::Usage(format!(
                        "--config {}: line {} is not key=value: {line:?}",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                let key = key.trim();
                if !CONFIG_KEYS.contains(&key) {
                    return Err(Error::Usage(format!(
                        "--config {}: unknown key {key:?}",
                        path.display()
                    )));
                }
                values.insert(key.to_string(), value.trim().to_string());
            }
        }
        Ok(Self { values })
    }

    fn get(&self, key: &str) -> Option<&String> {
        self.values.get(key)
    }
}

/// Flag value, else config value, else default; parse failures name the
/// flag they came from.
fn resolve<T>(flag: Option<T>, cfg: &ConfigFile, key: &str, default: T) -> Result<T>
where
    T: FromStr,
    <T as FromStr>::Err: Display,
{
    resolve_opt(flag, cfg, key)?.map_or(Ok(default), Ok)
}

fn resolve_opt<T>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    <T as FromStr>::Err: Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|e| Error::Usage(format!("--config {key}={raw}: {e}"))),
        None => Ok(None),
    }
}

/// Everything the non-sweep subcommands share, resolved and validated.
struct ResolvedCommon {
    n_sectors: usize,
    entrance: EntranceSpec,
    arrival: ArrivalSpec,
    strategy: Option<StrategyKind>,
    trials: u64,
    seed: u64,
    horizon: usize,
    tau_max: usize,
    out: Option<PathBuf>,
}

/// Which of the shared flags carry scalar values for this subcommand; the
/// sweep commands own the corresponding flag as a range and resolve it
/// themselves.
#[derive(Clone, Copy)]
struct ScalarFlags {
    l: bool,
    mu: bool,
}

fn resolve_common(
    common: &CommonOpts,
    l: Option<u64>,
    mu: Option<f64>,
    scalars: ScalarFlags,
) -> Result<ResolvedCommon> {
    let cfg = ConfigFile::load(common.config.as_deref())?;

    let weights = match resolve_opt(common.weights.clone(), &cfg, "weights")? {
        Some(raw) => Some(parse_f64_list(&raw, "--weights")?),
        None => None,
    };
    let dist_name = resolve(
        common.dist.clone(),
        &cfg,
        "dist",
        if weights.is_some() {
            "custom".to_string()
        } else {
            "triangular".to_string()
        },
    )?;
    let n_sectors = match resolve_opt(common.n, &cfg, "N")? {
        Some(n) => n,
        None => match &weights {
            Some(w) if dist_name == "custom" => w.len(),
            _ => DEFAULT_N,
        },
    };
    if n_sectors == 0 {
        return Err(Error::Usage("--N must be >= 1".into()));
    }

    let width_l = if scalars.l {
        resolve(l, &cfg, "L", DEFAULT_L)?
    } else {
        l.unwrap_or(DEFAULT_L)
    };
    if !width_l.is_multiple_of(2) {
        return Err(Error::Usage(format!("--L must be even, got {width_l}")));
    }
    let entrance = match dist_name.as_str() {
        "triangular" => EntranceSpec::Triangular { width_l },
        "uniform" => EntranceSpec::Uniform,
        "custom" => {
            let weights = weights.clone().ok_or_else(|| {
                Error::Usage("--dist custom requires --weights".into())
            })?;
            if weights.len() != n_sectors {
                return Err(Error::Usage(format!(
                    "--weights has {} entries but --N is {n_sectors}",
                    weights.len()
                )));
            }
            EntranceSpec::Custom { weights }
        }
        other => {
            return Err(Error::Usage(format!(
                "--dist must be triangular, uniform or custom, got {other:?}"
            )));
        }
    };

    let mu = if scalars.mu {
        resolve(mu, &cfg, "mu", DEFAULT_MU)?
    } else {
        mu.unwrap_or(DEFAULT_MU)
    };
    if mu <= 0.0 || !mu.is_finite() {
        return Err(Error::Usage(format!("--mu must be > 0, got {mu}")));
    }
    let tail_tolerance = resolve(common.tail_tol, &cfg, "tail-tol", DEFAULT_TAIL_TOLERANCE)?;
    if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
        return Err(Error::Usage(format!(
            "--tail-tol must lie in (0, 1), got {tail_tolerance}"
        )));
    }

    let strategy = match resolve_opt(common.strategy.clone(), &cfg, "strategy")? {
        Some(name) => Some(
            name.parse::<StrategyKind>()
                .map_err(|_| Error::Usage(format!("--strategy must be ea, mlri or smbi, got {name:?}")))?,
        ),
        None => None,
    };

    let trials = resolve(common.trials, &cfg, "trials", DEFAULT_TRIALS)?;
    if trials == 0 {
        return Err(Error::Usage("--trials must be >= 1".into()));
    }
    let seed = resolve(common.seed, &cfg, "seed", DEFAULT_SEED)?;
    let horizon = resolve(common.horizon, &cfg, "horizon", DEFAULT_HORIZON)?;
    if horizon == 0 {
        return Err(Error::Usage("--horizon must be >= 1".into()));
    }
    let tau_max = resolve(common.tau_max, &cfg, "tau-max", 10 * n_sectors)?;
    if tau_max == 0 {
        return Err(Error::Usage("--tau-max must be >= 1".into()));
    }
    let out = resolve_opt(common.out.clone(), &cfg, "out")?;

    Ok(ResolvedCommon {
        n_sectors,
        entrance,
        arrival: ArrivalSpec { mu, tail_tolerance },
        strategy,
        trials,
        seed,
        horizon,
        tau_max,
        out,
    })
}

fn require_strategy(r: &ResolvedCommon) -> Result<StrategyKind> {
    r.strategy
        .ok_or_else(|| Error::Usage("missing required flag --strategy".into()))
}

fn out_path(r: &ResolvedCommon, default: &str) -> PathBuf {
    r.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn resolve_dist(args: DistArgs) -> Result<Command> {
    let r = resolve_common(&args.common, args.l, args.mu, ScalarFlags { l: true, mu: true })?;
    Ok(Command::Dist {
        n_sectors: r.n_sectors,
        entrance: r.entrance.clone(),
        arrival: r.arrival,
        dump_arrival: args.arrival,
        out: out_path(&r, "dist.csv"),
    })
}

fn resolve_sequence(args: SequenceArgs) -> Result<Command> {
    let r = resolve_common(&args.common, args.l, args.mu, ScalarFlags { l: true, mu: true })?;
    Ok(Command::Sequence {
        n_sectors: r.n_sectors,
        entrance: r.entrance.clone(),
        arrival: r.arrival,
        strategy: require_strategy(&r)?,
        horizon: r.horizon,
        seed: r.seed,
        out: out_path(&r, "sequence.csv"),
    })
}

fn resolve_analytic(args: AnalyticArgs) -> Result<Command> {
    let r = resolve_common(&args.common, args.l, args.mu, ScalarFlags { l: true, mu: true })?;
    Ok(Command::Analytic {
        n_sectors: r.n_sectors,
        entrance: r.entrance.clone(),
        arrival: r.arrival,
        strategy: require_strategy(&r)?,
        horizon: r.horizon,
        tau_max: r.tau_max,
        out: out_path(&r, "analytic.csv"),
        pmf_out: args.pmf_out,
    })
}

fn resolve_simulate(args: SimulateArgs) -> Result<Command> {
    let r = resolve_common(&args.common, args.l, args.mu, ScalarFlags { l: true, mu: true })?;
    let config = SimConfig {
        n_sectors: r.n_sectors,
        entrance: r.entrance.clone(),
        arrival: r.arrival,
        strategy: require_strategy(&r)?,
        trials: r.trials,
        seed: r.seed,
        horizon: r.horizon,
    };
    Ok(Command::Simulate {
        config,
        out: out_path(&r, "histogram.csv"),
    })
}

fn base_sim_config(r: &ResolvedCommon) -> SimConfig {
    SimConfig {
        n_sectors: r.n_sectors,
        entrance: r.entrance.clone(),
        arrival: r.arrival,
        // Sweeps run all three strategies; the field is overridden per cell.
        strategy: r.strategy.unwrap_or(StrategyKind::Ea),
        trials: r.trials,
        seed: r.seed,
        horizon: r.horizon,
    }
}

fn resolve_sweep_l(args: SweepLArgs) -> Result<Command> {
    let r = resolve_common(&args.common, None, args.mu, ScalarFlags { l: false, mu: true })?;
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let raw = match args.l.or_else(|| cfg.get("L").cloned()) {
        Some(raw) => raw,
        None => return Err(Error::Usage("missing required flag --L".into())),
    };
    let l_values = parse_u64_values(&raw, "--L")?;
    for &l in &l_values {
        if !l.is_multiple_of(2) {
            return Err(Error::Usage(format!("--L values must be even, got {l}")));
        }
    }
    Ok(Command::SweepL {
        base: base_sim_config(&r),
        l_values,
        out: out_path(&r, "sweep_l.csv"),
    })
}

fn resolve_sweep_mu(args: SweepMuArgs) -> Result<Command> {
    let r = resolve_common(&args.common, args.l, None, ScalarFlags { l: true, mu: false })?;
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let raw = match args.mu.or_else(|| cfg.get("mu").cloned()) {
        Some(raw) => raw,
        None => return Err(Error::Usage("missing required flag --mu".into())),
    };
    let mu_values = parse_f64_values(&raw, "--mu")?;
    for &mu in &mu_values {
        if mu <= 0.0 || !mu.is_finite() {
            return Err(Error::Usage(format!("--mu values must be > 0, got {mu}")));
        }
    }
    Ok(Command::SweepMu {
        base: base_sim_config(&r),
        mu_values,
        out: out_path(&r, "sweep_mu.csv"),
    })
}

fn parse_f64_list(raw: &str, flag: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| Error::Usage(format!("{flag}: bad value {part:?}: {e}")))
        })
        .collect()
}

/// `start:stop:step` range (inclusive of `stop` when hit exactly) or a
/// comma-separated list.
fn parse_u64_values(raw: &str, flag: &str) -> Result<Vec<u64>> {
    if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Usage(format!(
                "{flag}: range must be start:stop:step, got {raw:?}"
            )));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<u64>()
                .map_err(|e| Error::Usage(format!("{flag}: bad range bound {s:?}: {e}")))
        };
        let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if step == 0 {
            return Err(Error::Usage(format!("{flag}: range step must be > 0")));
        }
        Ok((start..=stop).step_by(step as usize).collect())
    } else {
        raw.split(',')
            .map(|part| {
                part.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Usage(format!("{flag}: bad value {part:?}: {e}")))
            })
            .collect()
    }
}

fn parse_f64_values(raw: &str, flag: &str) -> Result<Vec<f64>> {
    if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Usage(format!(
                "{flag}: range must be start:stop:step, got {raw:?}"
            )));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Usage(format!("{flag}: bad range bound {s:?}: {e}")))
        };
        let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if step <= 0.0 || step.is_nan() {
            return Err(Error::Usage(format!("{flag}: range step must be > 0")));
        }
        let mut values = Vec::new();
        let mut k = 0u64;
        loop {
            let v = start + step * k as f64;
            if v > stop + step * 1e-9 {
                break;
            }
            values.push(v);
            k += 1;
        }
        Ok(values)
    } else {
        parse_f64_list(raw, flag)
    }
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// 12 significant digits, locale independent.
fn fmt_f64(x: f64) -> String {
    format!("{x:.11e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs a resolved spec: writes its CSV artifacts and prints a one-line
/// summary (plus any warnings) to `out`.
pub fn execute(spec: &ExperimentSpec, out: &mut dyn Write) -> Result<()> {
    match &spec.command {
        Command::Dist {
            n_sectors,
            entrance,
            arrival,
            dump_arrival,
            out: path,
        } => {
            let mut csv = String::from("index,probability\n");
            let rows = if *dump_arrival {
                let pmf = arrival.build()?;
                for (i, &w) in pmf.masses().iter().enumerate() {
                    csv.push_str(&format!("{},{}\n", i + 1, fmt_f64(w)));
                }
                pmf.truncation_horizon()
            } else {
                let pmf = entrance.build(*n_sectors)?;
                for (i, &p) in pmf.probs().iter().enumerate() {
                    csv.push_str(&format!("{},{}\n", i + 1, fmt_f64(p)));
                }
                pmf.n_sectors()
            };
            write_file(path, &csv)?;
            writeln!(out, "wrote {rows} rows to {}", path.display()).ok();
        }
        Command::Sequence {
            n_sectors,
            entrance,
            arrival,
            strategy,
            horizon,
            seed,
            out: path,
        } => {
            let entrance = entrance.build(*n_sectors)?;
            let arrival = arrival.build()?;
            let mut warning = None;
            let sequence: ScanSequence = match strategy {
                StrategyKind::Ea => {
                    let mut rng = trial_rng(*seed, 0);
                    let perm = random_permutation(*n_sectors, &mut rng);
                    ea_sequence(*n_sectors, &perm, *horizon)?
                }
                StrategyKind::Mlri => {
                    // One seeded realization of the i.i.d. illumination stream.
                    let q = mlri_optimal_q(&entrance);
                    let mut rng = trial_rng(*seed, 0);
                    let sectors = (0..*horizon).map(|_| mlri_sample(&q, &mut rng)).collect();
                    ScanSequence::new(sectors, *n_sectors, None)?
                }
                StrategyKind::Smbi => {
                    let (seq, exhausted) =
                        smbi_sequence_with_flags(&entrance, &arrival, *horizon)?;
                    if let Some(&first) = exhausted.first() {
                        warning = Some(format!(
                            "warning: posterior exhausted in {} slots (first at slot {first}); fell back to lowest sector index",
                            exhausted.len()
                        ));
                    }
                    seq
                }
            };
            let mut csv = String::from("slot,sector\n");
            for (i, &sector) in sequence.sectors().iter().enumerate() {
                csv.push_str(&format!("{},{sector}\n", i + 1));
            }
            write_file(path, &csv)?;
            if let Some(w) = warning {
                writeln!(out, "{w}").ok();
            }
            writeln!(
                out,
                "wrote {} slots ({strategy}) to {}",
                sequence.len(),
                path.display()
            )
            .ok();
        }
        Command::Analytic {
            n_sectors,
            entrance,
            arrival,
            strategy,
            horizon,
            tau_max,
            out: path,
            pmf_out,
        } => {
            let (mean, variance, pmf): (f64, f64, DiscoveryPmf) = match strategy {
                StrategyKind::Ea => (
                    ea_mean_discovery(*n_sectors),
                    ea_discovery_variance(*n_sectors),
                    ea_uniform_phase_pmf(*n_sectors),
                ),
                StrategyKind::Mlri => {
                    let p = entrance.build(*n_sectors)?;
                    (
                        mlri_mean_discovery(&p),
                        mlri_discovery_variance(&p),
                        mlri_discovery_pmf(&p, *tau_max),
                    )
                }
                StrategyKind::Smbi => {
                    let p = entrance.build(*n_sectors)?;
                    let w = arrival.build()?;
                    let seq = crate::strategies::smbi_sequence(&p, &w, *horizon)?;
                    let pmf = deterministic_discovery_pmf(&seq, &p, &w, *tau_max)?;
                    (deterministic_mean_discovery(&seq, &p, &w)?, pmf.variance(), pmf)
                }
            };
            let censored = pmf.censored_mass();
            let csv = format!(
                "quantity,value\nmean,{}\nvariance,{}\ncensored_mass,{}\n",
                fmt_f64(mean),
                fmt_f64(variance),
                fmt_f64(censored)
            );
            write_file(path, &csv)?;
            if let Some(pmf_path) = pmf_out {
                let mut csv = String::from("tau,probability\n");
                for (tau, &m) in pmf.masses().iter().enumerate() {
                    csv.push_str(&format!("{tau},{}\n", fmt_f64(m)));
                }
                write_file(pmf_path, &csv)?;
            }
            writeln!(
                out,
                "analytic strategy={strategy} mean={mean:.6} variance={variance:.6} censored_mass={censored:.3e}"
            )
            .ok();
        }
        Command::Simulate { config, out: path } => {
            let hist = run_experiment(config)?;
            let last = hist
                .counts()
                .iter()
                .rposition(|&c| c > 0)
                .unwrap_or(0);
            let mut csv = String::from("tau,count,frequency\n");
            for tau in 0..=last {
                csv.push_str(&format!(
                    "{tau},{},{}\n",
                    hist.counts()[tau],
                    fmt_f64(hist.frequency(tau))
                ));
            }
            write_file(path, &csv)?;
            if hist.censored() > 0 {
                writeln!(
                    out,
                    "warning: {} of {} trials undiscovered within horizon {}",
                    hist.censored(),
                    hist.trials(),
                    config.horizon
                )
                .ok();
            }
            writeln!(
                out,
                "simulate strategy={} trials={} mean={:.6} \u{00b1} {:.6} censored={}",
                config.strategy,
                hist.trials(),
                hist.mean(),
                hist.standard_error(),
                hist.censored()
            )
            .ok();
        }
        Command::SweepL {
            base,
            l_values,
            out: path,
        } => {
            let rows = sweep_l(base, l_values)?;
            write_sweep(path, &rows, out)?;
        }
        Command::SweepMu {
            base,
            mu_values,
            out: path,
        } => {
            let rows = sweep_mu(base, mu_values)?;
            write_sweep(path, &rows, out)?;
        }
    }
    Ok(())
}

fn write_sweep(path: &Path, rows: &[SweepRow], out: &mut dyn Write) -> Result<()> {
    let mut csv = String::from("param,strategy,mean,std_error,censored\n");
    for row in rows {
        match &row.outcome {
            Ok(stats) => {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_f64(row.param),
                    row.strategy,
                    fmt_f64(stats.mean),
                    fmt_f64(stats.std_error),
                    stats.censored
                ));
            }
            Err(message) => {
                // Keep the schema; the numbers are unavailable.
                csv.push_str(&format!(
                    "{},{},nan,nan,0\n",
                    fmt_f64(row.param),
                    row.strategy
                ));
                writeln!(
                    out,
                    "warning: {} at param {} failed: {message}",
                    row.strategy, row.param
                )
                .ok();
            }
        }
    }
    write_file(path, &csv)?;
    writeln!(out, "wrote {} rows to {}", rows.len(), path.display()).ok();
    Ok(())
}
