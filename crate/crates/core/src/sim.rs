//! Seeded Monte-Carlo engine.
//!
//! A trial samples one user (entry slot from the arrival PMF, entry sector
//! from the entrance PMF), runs the configured scanning policy against an
//! ongoing scan that started in slot 1, and reports the discovery time
//! `tau = k* - t`, where `k*` is the first slot at or after the entry slot
//! `t` in which the user's sector is illuminated. Detection is perfect:
//! no noise, no false alarms, and the user does not move before discovery.
//!
//! Every trial owns an independent RNG stream derived from
//! `(seed, trial index)`, and the histogram merge is a commutative integer
//! sum, so results are bit-identical regardless of how trials are
//! scheduled across threads.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dist::{custom_pmf, geometric_arrival, triangular_pmf, uniform_pmf};
use crate::dist::{ArrivalPmf, SectorPmf};
use crate::error::{Error, Result};
use crate::strategies::{mlri_optimal_q, random_permutation, smbi_sequence, ScanSequence};

/// Scanning policy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Ea,
    Mlri,
    Smbi,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::Ea, StrategyKind::Mlri, StrategyKind::Smbi];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Ea => "ea",
            StrategyKind::Mlri => "mlri",
            StrategyKind::Smbi => "smbi",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ea" => Ok(StrategyKind::Ea),
            "mlri" => Ok(StrategyKind::Mlri),
            "smbi" => Ok(StrategyKind::Smbi),
            other => Err(Error::InvalidConfig(format!(
                "unknown strategy {other:?}, expected ea, mlri or smbi"
            ))),
        }
    }
}

/// Entrance-distribution spec, materialized per experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum EntranceSpec {
    Triangular { width_l: u64 },
    Uniform,
    Custom { weights: Vec<f64> },
}

impl EntranceSpec {
    pub fn build(&self, n_sectors: usize) -> Result<SectorPmf> {
        match self {
            EntranceSpec::Triangular { width_l } => triangular_pmf(n_sectors, *width_l),
            EntranceSpec::Uniform => uniform_pmf(n_sectors),
            EntranceSpec::Custom { weights } => {
                if weights.len() != n_sectors {
                    return Err(Error::InvalidConfig(format!(
                        "{} custom weights for {n_sectors} sectors",
                        weights.len()
                    )));
                }
                custom_pmf(weights)
            }
        }
    }
}

/// Arrival-distribution spec (geometric entry slots).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalSpec {
    pub mu: f64,
    pub tail_tolerance: f64,
}

impl ArrivalSpec {
    pub fn build(&self) -> Result<ArrivalPmf> {
        geometric_arrival(self.mu, self.tail_tolerance)
    }
}

/// Full description of one Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_sectors: usize,
    pub entrance: EntranceSpec,
    pub arrival: ArrivalSpec,
    pub strategy: StrategyKind,
    pub trials: u64,
    pub seed: u64,
    /// Maximum slots scanned per trial; undiscovered users are censored.
    pub horizon: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_sectors == 0 {
            return Err(Error::InvalidConfig("need at least one sector".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be >= 1".into()));
        }
        self.entrance.build(self.n_sectors)?;
        self.arrival.build()?;
        Ok(())
    }
}

/// Immutable per-experiment state shared read-only by all trials.
#[derive(Debug)]
pub struct PreparedExperiment {
    n_sectors: usize,
    entrance: SectorPmf,
    arrival: ArrivalPmf,
    horizon: usize,
    policy: PreparedPolicy,
}

#[derive(Debug)]
enum PreparedPolicy {
    /// A fresh permutation is drawn per trial.
    Ea,
    Mlri(SectorPmf),
    Smbi(ScanSequence),
}

/// Builds the distributions and any shared deterministic schedule.
pub fn prepare(config: &SimConfig) -> Result<PreparedExperiment> {
    config.validate()?;
    let entrance = config.entrance.build(config.n_sectors)?;
    let arrival = config.arrival.build()?;
    let policy = match config.strategy {
        StrategyKind::Ea => PreparedPolicy::Ea,
        StrategyKind::Mlri => PreparedPolicy::Mlri(mlri_optimal_q(&entrance)),
        StrategyKind::Smbi => {
            PreparedPolicy::Smbi(smbi_sequence(&entrance, &arrival, config.horizon)?)
        }
    };
    Ok(PreparedExperiment {
        n_sectors: config.n_sectors,
        entrance,
        arrival,
        horizon: config.horizon,
        policy,
    })
}

/// Independent RNG stream for one trial: the seed keys the generator and
/// the trial index selects the stream, so any subset of trials can run in
/// any order with unchanged results.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Result of a single trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Discovered(usize),
    Censored,
}

/// Runs one trial: samples the entry slot, the entry sector, and (for EA)
/// a fresh permutation, then scans until discovery or the horizon.
///
/// Illuminations before the entry slot cannot discover the user, and for
/// MLRI they are independent of every later draw, so sampling starts at
/// the entry slot.
pub fn run_trial<R: Rng + ?Sized>(exp: &PreparedExperiment, rng: &mut R) -> TrialOutcome {
    let entry_slot = exp.arrival.sample(rng);
    if entry_slot > exp.horizon {
        return TrialOutcome::Censored;
    }
    let entry_sector = exp.entrance.sample(rng);
    match &exp.policy {
        PreparedPolicy::Ea => {
            let perm = random_permutation(exp.n_sectors, rng);
            let end = exp.horizon.min(entry_slot + exp.n_sectors - 1);
            for slot in entry_slot..=end {
                if perm[(slot - 1) % exp.n_sectors] == entry_sector {
                    return TrialOutcome::Discovered(slot - entry_slot);
                }
            }
            TrialOutcome::Censored
        }
        PreparedPolicy::Smbi(seq) => {
            let sectors = seq.sectors();
            for slot in entry_slot..=exp.horizon {
                if sectors[slot - 1] == entry_sector {
                    return TrialOutcome::Discovered(slot - entry_slot);
                }
            }
            TrialOutcome::Censored
        }
        PreparedPolicy::Mlri(q) => {
            for slot in entry_slot..=exp.horizon {
                if q.sample(rng) == entry_sector {
                    return TrialOutcome::Discovered(slot - entry_slot);
                }
            }
            TrialOutcome::Censored
        }
    }
}

/// Empirical discovery-time distribution and its moments.
///
/// Censored trials are counted but excluded from the mean and variance.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryHistogram {
    counts: Vec<u64>,
    trials: u64,
    censored: u64,
    mean: f64,
    variance: f64,
    standard_error: f64,
}

impl DiscoveryHistogram {
    fn from_counts(counts: Vec<u64>, trials: u64, censored: u64) -> Self {
        debug_assert_eq!(counts.iter().sum::<u64>() + censored, trials);
        let discovered = trials - censored;
        let (mean, variance) = if discovered == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let mean = counts
                .iter()
                .enumerate()
                .map(|(tau, &c)| tau as f64 * c as f64)
                .sum::<f64>()
                / discovered as f64;
            let variance = if discovered > 1 {
                counts
                    .iter()
                    .enumerate()
                    .map(|(tau, &c)| {
                        let d = tau as f64 - mean;
                        c as f64 * d * d
                    })
                    .sum::<f64>()
                    / (discovered - 1) as f64
            } else {
                0.0
            };
            (mean, variance)
        };
        let standard_error = if discovered == 0 {
            f64::NAN
        } else {
            (variance / discovered as f64).sqrt()
        };
        Self {
            counts,
            trials,
            censored,
            mean,
            variance,
            standard_error,
        }
    }

    /// Count per discovery time; `counts()[tau]` trials took `tau` slots.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn censored(&self) -> u64 {
        self.censored
    }

    pub fn discovered(&self) -> u64 {
        self.trials - self.censored
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased (n-1) sample variance of the discovered trials.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn standard_error(&self) -> f64 {
        self.standard_error
    }

    /// Empirical frequency of `tau` among all trials.
    pub fn frequency(&self, tau: usize) -> f64 {
        self.counts.get(tau).copied().unwrap_or(0) as f64 / self.trials as f64
    }
}

/// Runs `config.trials` independent trials and aggregates the histogram.
///
/// Identical configs produce bit-identical histograms regardless of the
/// number of worker threads.
pub fn run_experiment(config: &SimConfig) -> Result<DiscoveryHistogram> {
    let exp = prepare(config)?;
    let len = exp.horizon + 1;
    let (counts, censored) = (0..config.trials)
        .into_par_iter()
        .fold(
            || (vec![0u64; len], 0u64),
            |(mut counts, mut censored), trial| {
                let mut rng = trial_rng(config.seed, trial);
                match run_trial(&exp, &mut rng) {
                    TrialOutcome::Discovered(tau) => counts[tau] += 1,
                    TrialOutcome::Censored => censored += 1,
                }
                (counts, censored)
            },
        )
        .reduce(
            || (vec![0u64; len], 0u64),
            |(mut a, ca), (b, cb)| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                (a, ca + cb)
            },
        );
    Ok(DiscoveryHistogram::from_counts(
        counts,
        config.trials,
        censored,
    ))
}

/// Per-cell summary of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepStats {
    pub mean: f64,
    pub std_error: f64,
    pub censored: u64,
}

/// One sweep cell; failures are recorded in place so the sweep continues.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub param: f64,
    pub strategy: StrategyKind,
    pub outcome: std::result::Result<SweepStats, String>,
}

fn run_cell(config: &SimConfig, param: f64) -> SweepRow {
    let outcome = run_experiment(config)
        .map(|h| SweepStats {
            mean: h.mean(),
            std_error: h.standard_error(),
            censored: h.censored(),
        })
        .map_err(|e| e.to_string());
    SweepRow {
        param,
        strategy: config.strategy,
        outcome,
    }
}

/// Sweeps the triangular width `L` over all three strategies. Rows come
/// out in input order, strategies ordered `ea, mlri, smbi` within each
/// `L`. The base config's entrance and strategy fields are overridden.
pub fn sweep_l(base: &SimConfig, l_values: &[u64]) -> Result<Vec<SweepRow>> {
    if let Some(&odd) = l_values.iter().find(|&&l| !l.is_multiple_of(2)) {
        return Err(Error::InvalidConfig(format!(
            "triangular width L must be even, got {odd}"
        )));
    }
    let mut rows = Vec::with_capacity(l_values.len() * StrategyKind::ALL.len());
    for &l in l_values {
        for strategy in StrategyKind::ALL {
            let config = SimConfig {
                entrance: EntranceSpec::Triangular { width_l: l },
                strategy,
                ..base.clone()
            };
            rows.push(run_cell(&config, l as f64));
        }
    }
    Ok(rows)
}

/// Sweeps the arrival rate `mu` over all three strategies; the base
/// config's entrance distribution is kept. Analogous to [`sweep_l`].
pub fn sweep_mu(base: &SimConfig, mu_values: &[f64]) -> Result<Vec<SweepRow>> {
    if let Some(&bad) = mu_values.iter().find(|&&m| m <= 0.0 || !m.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "arrival rate mu must be > 0, got {bad}"
        )));
    }
    let mut rows = Vec::with_capacity(mu_values.len() * StrategyKind::ALL.len());
    for &mu in mu_values {
        for strategy in StrategyKind::ALL {
            let config = SimConfig {
                arrival: ArrivalSpec {
                    mu,
                    tail_tolerance: base.arrival.tail_tolerance,
                },
                strategy,
                ..base.clone()
            };
            rows.push(run_cell(&config, mu));
        }
    }
    Ok(rows)
}
