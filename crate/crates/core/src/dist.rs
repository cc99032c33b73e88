//! Sector-entrance and entry-slot probability distributions.
//!
//! [`SectorPmf`] is a probability mass function over the `N` sectors of a
//! cell, indexed `1..=N`. It models both the entrance distribution `p`
//! (where a new user appears) and an illumination distribution `q` (where
//! the base station points its beam). [`ArrivalPmf`] is the distribution of
//! the slot in which the user enters, indexed `t = 1, 2, ...`; the usual
//! construction is the geometric law of [`geometric_arrival`], truncated at
//! a configurable tail tolerance.
//!
//! All distribution values are immutable after construction, so both types
//! are freely shareable across threads.

use rand::Rng;

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a validated PMF.
pub const PMF_SUM_TOLERANCE: f64 = 1e-12;

/// Default tail tolerance for truncating the arrival distribution.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-9;

/// Probability mass over sectors `1..=N`.
#[derive(Debug, Clone)]
pub struct SectorPmf {
    probs: Vec<f64>,
    /// Sectors with strictly positive mass, ascending, 1-based.
    support: Vec<usize>,
    /// Cumulative mass over `support`, for inverse-CDF sampling.
    cumulative: Vec<f64>,
}

impl PartialEq for SectorPmf {
    fn eq(&self, other: &Self) -> bool {
        self.probs == other.probs
    }
}

impl SectorPmf {
    /// Validates and wraps an explicit probability vector.
    ///
    /// Entries must be non-negative and finite and sum to 1 within
    /// [`PMF_SUM_TOLERANCE`].
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution(
                "sector PMF needs at least one sector".into(),
            ));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probability for sector {} is {p}, expected a finite value >= 0",
                    i + 1
                )));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "sector probabilities sum to {total}, expected 1 within {PMF_SUM_TOLERANCE}"
            )));
        }
        let support: Vec<usize> = probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i + 1)
            .collect();
        let mut cumulative = Vec::with_capacity(support.len());
        let mut acc = 0.0;
        for &s in &support {
            acc += probs[s - 1];
            cumulative.push(acc);
        }
        Ok(Self {
            probs,
            support,
            cumulative,
        })
    }

    pub fn n_sectors(&self) -> usize {
        self.probs.len()
    }

    /// Probability of entering from `sector` (1-based).
    pub fn prob(&self, sector: usize) -> f64 {
        assert!(
            sector >= 1 && sector <= self.probs.len(),
            "sector {sector} out of range 1..={}",
            self.probs.len()
        );
        self.probs[sector - 1]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Sectors with strictly positive mass, ascending, 1-based.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Draws a sector (1-based) with probability equal to its mass.
    ///
    /// Consumes exactly one `f64` from the stream, so identically seeded
    /// streams yield identical draw sequences.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        let idx = idx.min(self.support.len() - 1);
        self.support[idx]
    }
}

/// Probability mass over entry slots `t = 1, 2, ...`, truncated.
///
/// `masses[t-1]` holds `w_t` for `t = 1..=truncation_horizon`; the exact
/// residual mass beyond the horizon is kept in `tail_mass`, so the full
/// distribution always accounts for total mass 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalPmf {
    masses: Vec<f64>,
    tail_mass: f64,
    mu: Option<f64>,
}

impl ArrivalPmf {
    /// Builds an arrival PMF from explicit (non-negative, not all zero)
    /// weights over slots `1..=weights.len()`, normalized to sum to 1.
    /// The tail beyond the last slot is exactly zero.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let masses = normalize_weights(weights, "entry slot")?;
        Ok(Self {
            masses,
            tail_mass: 0.0,
            mu: None,
        })
    }

    /// `w_t` for a 1-based entry slot.
    ///
    /// Slots beyond the truncation horizon evaluate the geometric closed
    /// form when one exists, and 0 for finite-support distributions.
    pub fn mass(&self, slot: usize) -> f64 {
        assert!(slot >= 1, "entry slots are 1-based");
        if slot <= self.masses.len() {
            return self.masses[slot - 1];
        }
        match self.mu {
            Some(mu) => -(-mu).exp_m1() * (-mu * (slot as f64 - 1.0)).exp(),
            None => 0.0,
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Number of explicitly materialized entry slots.
    pub fn truncation_horizon(&self) -> usize {
        self.masses.len()
    }

    /// Exact probability of entering after the truncation horizon.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Rate parameter when constructed by [`geometric_arrival`].
    pub fn mu(&self) -> Option<f64> {
        self.mu
    }

    /// Draws an entry slot (1-based).
    ///
    /// Geometric distributions invert the closed-form CDF, so draws past
    /// the truncation horizon are possible (with probability `tail_mass`).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        match self.mu {
            Some(mu) => {
                // Smallest t with 1 - exp(-mu t) > u.
                let x = -(1.0 - u).ln() / mu;
                x.floor() as usize + 1
            }
            None => {
                let mut acc = 0.0;
                for (i, &w) in self.masses.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        return i + 1;
                    }
                }
                self.masses.len()
            }
        }
    }
}

/// Symmetric triangular entrance PMF over `n_sectors` sectors with base
/// width `width_l` (even), centered at sector `ceil(N/2)`.
///
/// The unnormalized weight of the sector at integer offset `d` from the
/// center is `max(L/2 - |d|, 0)`; sectors at offset exactly `L/2` carry no
/// mass, so `width_l = 0` and `width_l = 2` both concentrate all mass on
/// the center sector. The triangle is clipped to `1..=N` and renormalized.
/// Weights are integers mirrored around the center, so symmetric sectors
/// get bitwise-identical probabilities.
pub fn triangular_pmf(n_sectors: usize, width_l: u64) -> Result<SectorPmf> {
    if n_sectors == 0 {
        return Err(Error::InvalidDistribution(
            "triangular PMF needs at least one sector".into(),
        ));
    }
    if !width_l.is_multiple_of(2) {
        return Err(Error::InvalidDistribution(format!(
            "triangular width L must be even, got {width_l}"
        )));
    }
    let center = n_sectors.div_ceil(2) as i64;
    let half = (width_l / 2) as i64;
    let mut weights = vec![0u64; n_sectors];
    if half == 0 {
        weights[center as usize - 1] = 1;
    } else {
        for (i, w) in weights.iter_mut().enumerate() {
            let d = (i as i64 + 1 - center).abs();
            if d < half {
                *w = (half - d) as u64;
            }
        }
    }
    let total: u64 = weights.iter().sum();
    if total == 0 {
        // The whole triangle was clipped away; fall back to the center.
        weights[center as usize - 1] = 1;
    }
    let total: u64 = weights.iter().sum();
    let probs = weights.iter().map(|&w| w as f64 / total as f64).collect();
    SectorPmf::from_probs(probs)
}

/// Uniform entrance PMF, `p_i = 1/N`.
pub fn uniform_pmf(n_sectors: usize) -> Result<SectorPmf> {
    if n_sectors == 0 {
        return Err(Error::InvalidDistribution(
            "uniform PMF needs at least one sector".into(),
        ));
    }
    SectorPmf::from_probs(vec![1.0 / n_sectors as f64; n_sectors])
}

/// Entrance PMF from arbitrary non-negative weights (e.g. measured
/// entrance statistics), normalized to sum to 1.
pub fn custom_pmf(weights: &[f64]) -> Result<SectorPmf> {
    let probs = normalize_weights(weights, "sector")?;
    SectorPmf::from_probs(probs)
}

/// Geometric entry-slot distribution with rate `mu`:
/// `w_t = (1 - e^-mu) e^(-mu (t-1))` for `t >= 1`.
///
/// The truncation horizon is the smallest `T` with tail mass
/// `e^(-mu T) < tail_tolerance`.
pub fn geometric_arrival(mu: f64, tail_tolerance: f64) -> Result<ArrivalPmf> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::InvalidDistribution(format!(
            "arrival rate mu must be a finite value > 0, got {mu}"
        )));
    }
    if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
        return Err(Error::InvalidDistribution(format!(
            "tail tolerance must lie in (0, 1), got {tail_tolerance}"
        )));
    }
    let horizon = (-tail_tolerance.ln() / mu).floor() as usize + 1;
    let first = -(-mu).exp_m1(); // 1 - e^-mu, computed without cancellation
    let masses = (0..horizon)
        .map(|k| first * (-mu * k as f64).exp())
        .collect();
    Ok(ArrivalPmf {
        masses,
        tail_mass: (-mu * horizon as f64).exp(),
        mu: Some(mu),
    })
}

fn normalize_weights(weights: &[f64], what: &str) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::InvalidDistribution(format!(
            "need at least one {what} weight"
        )));
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what} weight {} is {w}, expected a finite value >= 0",
                i + 1
            )));
        }
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidDistribution(format!(
            "{what} weights are all zero"
        )));
    }
    Ok(weights.iter().map(|&w| w / total).collect())
}
