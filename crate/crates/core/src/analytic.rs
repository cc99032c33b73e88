//! Exact discovery-time evaluation.
//!
//! Closed forms exist for MLRI (a mixture of geometric laws, with mean
//! `sum over the support of (1 - p_i)`) and for EA under a uniform entry
//! phase (discovery delay uniform on `0..=N-1`, mean `(N-1)/2`). Any
//! deterministic schedule is evaluated exactly by conditioning on the entry
//! slot and entry sector. These evaluators double as oracles for the
//! Monte-Carlo engine in [`crate::sim`].

use crate::dist::{ArrivalPmf, SectorPmf};
use crate::error::{Error, Result};
use crate::strategies::ScanSequence;

/// Distribution of the discovery time `tau` over `0..=tau_max`, plus the
/// residual probability beyond `tau_max`.
///
/// `tau` counts slots after entry: it is 0 when the entry sector is
/// illuminated in the entry slot itself.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryPmf {
    masses: Vec<f64>,
    censored_mass: f64,
}

impl DiscoveryPmf {
    fn new(masses: Vec<f64>, censored_mass: f64) -> Self {
        debug_assert!({
            let total: f64 = masses.iter().sum::<f64>() + censored_mass;
            (total - 1.0).abs() <= 1e-9
        });
        Self {
            masses,
            censored_mass: censored_mass.max(0.0),
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, tau: usize) -> f64 {
        self.masses.get(tau).copied().unwrap_or(0.0)
    }

    pub fn tau_max(&self) -> usize {
        self.masses.len() - 1
    }

    /// Probability mass beyond `tau_max`, never silently renormalized away.
    pub fn censored_mass(&self) -> f64 {
        self.censored_mass
    }

    /// Mean over the materialized range; low by at most
    /// `censored_mass * (true maximum tau)`.
    pub fn mean(&self) -> f64 {
        self.masses
            .iter()
            .enumerate()
            .map(|(tau, &m)| tau as f64 * m)
            .sum()
    }

    /// Variance over the materialized range.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let second: f64 = self
            .masses
            .iter()
            .enumerate()
            .map(|(tau, &m)| (tau as f64) * (tau as f64) * m)
            .sum();
        second - mean * mean
    }

    /// `P(tau <= bound)` over the materialized range.
    pub fn cumulative(&self, bound: usize) -> f64 {
        self.masses.iter().take(bound + 1).sum()
    }
}

/// MLRI average discovery time at the optimal illumination `q = p`:
/// the sum of `1 - p_i` over the support of `p`. Zero-probability sectors
/// contribute nothing (their discovery terms vanish identically).
pub fn mlri_mean_discovery(entrance: &SectorPmf) -> f64 {
    entrance
        .support()
        .iter()
        .map(|&s| 1.0 - entrance.prob(s))
        .sum()
}

/// MLRI average discovery time under an arbitrary illumination PMF `q`:
/// `sum over the support of p of p_i (1 - q_i) / q_i`.
///
/// Infinite when some entrance sector is never illuminated. Note that the
/// exact simplex minimizer of this objective is `q_i` proportional to
/// `sqrt(p_i)`, which coincides with the `q = p` convention of
/// [`crate::strategies::mlri_optimal_q`] only for uniform entrance
/// statistics.
pub fn mlri_mean_discovery_with_q(entrance: &SectorPmf, illumination: &SectorPmf) -> f64 {
    assert_eq!(entrance.n_sectors(), illumination.n_sectors());
    let mut mean = 0.0;
    for &s in entrance.support() {
        let p = entrance.prob(s);
        let q = illumination.prob(s);
        if q == 0.0 {
            return f64::INFINITY;
        }
        mean += p * (1.0 - q) / q;
    }
    mean
}

/// MLRI discovery-time variance at `q = p`, from the geometric mixture.
pub fn mlri_discovery_variance(entrance: &SectorPmf) -> f64 {
    let mean = mlri_mean_discovery(entrance);
    let second: f64 = entrance
        .support()
        .iter()
        .map(|&s| {
            let p = entrance.prob(s);
            2.0 * (1.0 - p) * (1.0 - p) / p + (1.0 - p)
        })
        .sum();
    second - mean * mean
}

/// MLRI discovery-time PMF at `q = p`: `masses[tau] = sum p_i^2 (1-p_i)^tau`
/// over the support, independent of the entry slot.
pub fn mlri_discovery_pmf(entrance: &SectorPmf, tau_max: usize) -> DiscoveryPmf {
    let mut masses = vec![0.0f64; tau_max + 1];
    for &s in entrance.support() {
        let p = entrance.prob(s);
        let mut term = p * p;
        for m in masses.iter_mut() {
            *m += term;
            term *= 1.0 - p;
        }
    }
    let total: f64 = masses.iter().sum();
    DiscoveryPmf::new(masses, 1.0 - total)
}

/// EA average discovery time under a uniform entry phase: `(N - 1) / 2`.
pub fn ea_mean_discovery(n_sectors: usize) -> f64 {
    assert!(n_sectors >= 1, "need at least one sector");
    (n_sectors as f64 - 1.0) / 2.0
}

/// EA discovery-time variance under a uniform entry phase: `(N^2 - 1)/12`.
pub fn ea_discovery_variance(n_sectors: usize) -> f64 {
    assert!(n_sectors >= 1, "need at least one sector");
    let n = n_sectors as f64;
    (n * n - 1.0) / 12.0
}

/// EA discovery-time PMF under a uniform entry phase: uniform on
/// `0..=N-1`, regardless of the entrance distribution.
pub fn ea_uniform_phase_pmf(n_sectors: usize) -> DiscoveryPmf {
    assert!(n_sectors >= 1, "need at least one sector");
    DiscoveryPmf::new(vec![1.0 / n_sectors as f64; n_sectors], 0.0)
}

/// First-hit lookup over a scan schedule.
struct HitIndex<'a> {
    seq: &'a ScanSequence,
    /// Ascending 1-based slots per sector; for periodic sequences only the
    /// first period is indexed.
    slots: Vec<Vec<usize>>,
}

impl<'a> HitIndex<'a> {
    fn new(seq: &'a ScanSequence) -> Self {
        let prefix = match seq.period() {
            Some(p) => p,
            None => seq.len(),
        };
        let mut slots = vec![Vec::new(); seq.n_sectors()];
        for (idx, &s) in seq.sectors()[..prefix].iter().enumerate() {
            slots[s - 1].push(idx + 1);
        }
        Self { seq, slots }
    }

    /// Discovery delay for a user entering in `entry_slot` from `sector`:
    /// the first slot `k >= entry_slot` with `b_k = sector`, minus
    /// `entry_slot`. `None` when the schedule never reaches the sector.
    fn delay(&self, entry_slot: usize, sector: usize) -> Option<usize> {
        let hits = &self.slots[sector - 1];
        if hits.is_empty() {
            return None;
        }
        match self.seq.period() {
            Some(p) => hits
                .iter()
                .map(|&slot| (slot as i64 - entry_slot as i64).rem_euclid(p as i64) as usize)
                .min(),
            None => {
                let idx = hits.partition_point(|&slot| slot < entry_slot);
                hits.get(idx).map(|&slot| slot - entry_slot)
            }
        }
    }
}

/// Exact average discovery time of a deterministic schedule:
/// `sum_t w_t sum_i p_i tau(t, i)` over the arrival truncation horizon,
/// where `tau(t, i)` is the delay until the first scan of sector `i` at or
/// after slot `t`. The truncation error is bounded by the arrival tail
/// mass times the largest delay.
pub fn deterministic_mean_discovery(
    sequence: &ScanSequence,
    entrance: &SectorPmf,
    arrival: &ArrivalPmf,
) -> Result<f64> {
    check_dimensions(sequence, entrance)?;
    let hits = HitIndex::new(sequence);
    let mut mean = 0.0;
    for t in 1..=arrival.truncation_horizon() {
        let w = arrival.mass(t);
        if w == 0.0 {
            continue;
        }
        for &sector in entrance.support() {
            let tau = hits.delay(t, sector).ok_or(Error::Coverage {
                entry_slot: t,
                sector,
            })?;
            mean += w * entrance.prob(sector) * tau as f64;
        }
    }
    Ok(mean)
}

/// Exact discovery-time PMF of a deterministic schedule. Mass with
/// `tau > tau_max` and the arrival tail both land in `censored_mass`.
pub fn deterministic_discovery_pmf(
    sequence: &ScanSequence,
    entrance: &SectorPmf,
    arrival: &ArrivalPmf,
    tau_max: usize,
) -> Result<DiscoveryPmf> {
    check_dimensions(sequence, entrance)?;
    let hits = HitIndex::new(sequence);
    let mut masses = vec![0.0f64; tau_max + 1];
    for t in 1..=arrival.truncation_horizon() {
        let w = arrival.mass(t);
        if w == 0.0 {
            continue;
        }
        for &sector in entrance.support() {
            let tau = hits.delay(t, sector).ok_or(Error::Coverage {
                entry_slot: t,
                sector,
            })?;
            if tau <= tau_max {
                masses[tau] += w * entrance.prob(sector);
            }
        }
    }
    let total: f64 = masses.iter().sum();
    Ok(DiscoveryPmf::new(masses, 1.0 - total))
}

fn check_dimensions(sequence: &ScanSequence, entrance: &SectorPmf) -> Result<()> {
    if sequence.n_sectors() != entrance.n_sectors() {
        return Err(Error::InvalidConfig(format!(
            "sequence covers {} sectors but the entrance PMF has {}",
            sequence.n_sectors(),
            entrance.n_sectors()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::dist::{custom_pmf, geometric_arrival, triangular_pmf, uniform_pmf, ArrivalPmf};
    use crate::strategies::{ea_sequence, mlri_optimal_q, random_permutation, smbi_sequence};

    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn mlri_mean_closed_form() {
        let single = custom_pmf(&[0.0, 1.0]).unwrap();
        assert_eq!(mlri_mean_discovery(&single), 0.0);
        assert_close(mlri_mean_discovery(&uniform_pmf(17).unwrap()), 16.0, 1e-12);
        assert_eq!(mlri_mean_discovery(&custom_pmf(&[0.5, 0.5]).unwrap()), 1.0);
    }

    #[test]
    fn mlri_mean_ignores_zero_probability_sectors() {
        let p = custom_pmf(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(mlri_mean_discovery(&p), 1.0);
    }

    #[test]
    fn mlri_objective_values() {
        let p = custom_pmf(&[0.7, 0.3]).unwrap();
        // At q = p the objective collapses to sum(1 - p_i).
        assert_close(mlri_mean_discovery_with_q(&p, &p), 1.0, 1e-12);
        // Hand-evaluated at q = [0.65, 0.35]:
        // 0.7*0.35/0.65 + 0.3*0.65/0.35.
        let q = custom_pmf(&[0.65, 0.35]).unwrap();
        assert_close(
            mlri_mean_discovery_with_q(&p, &q),
            0.7 * 0.35 / 0.65 + 0.3 * 0.65 / 0.35,
            1e-12,
        );
    }

    #[test]
    fn mlri_objective_minimized_at_sqrt_weights() {
        // The exact simplex minimizer of sum p_i (1-q_i)/q_i puts
        // q_i proportional to sqrt(p_i); q = p is optimal only for
        // uniform entrance statistics.
        let p = custom_pmf(&[0.7, 0.3]).unwrap();
        let root: Vec<f64> = p.probs().iter().map(|&x| x.sqrt()).collect();
        let q_root = custom_pmf(&root).unwrap();
        let at_root = mlri_mean_discovery_with_q(&p, &q_root);
        let at_p = mlri_mean_discovery_with_q(&p, &p);
        assert!(at_root < at_p, "{at_root} vs {at_p}");
        for delta in [-0.05, -0.01, 0.01, 0.05] {
            let q1 = root[0] / (root[0] + root[1]) + delta;
            let q = custom_pmf(&[q1, 1.0 - q1]).unwrap();
            assert!(
                mlri_mean_discovery_with_q(&p, &q) > at_root,
                "delta {delta}"
            );
        }

        let uniform = uniform_pmf(5).unwrap();
        assert_close(
            mlri_mean_discovery_with_q(&uniform, &mlri_optimal_q(&uniform)),
            4.0,
            1e-12,
        );
    }

    #[test]
    fn mlri_objective_infinite_off_support() {
        let p = custom_pmf(&[0.5, 0.5]).unwrap();
        let q = custom_pmf(&[1.0, 0.0]).unwrap();
        assert!(mlri_mean_discovery_with_q(&p, &q).is_infinite());
    }

    #[test]
    fn mlri_pmf_examples() {
        let single = custom_pmf(&[1.0]).unwrap();
        let pmf = mlri_discovery_pmf(&single, 5);
        assert_eq!(pmf.mass(0), 1.0);
        assert_eq!(pmf.censored_mass(), 0.0);

        let half = custom_pmf(&[0.5, 0.5]).unwrap();
        let pmf = mlri_discovery_pmf(&half, 40);
        assert_close(pmf.mass(0), 0.5, 1e-15);
        assert_close(pmf.mass(1), 0.25, 1e-15);
        assert_close(pmf.mean(), 1.0, 1e-9);
    }

    #[test]
    fn mlri_pmf_mean_matches_closed_form() {
        let p = uniform_pmf(17).unwrap();
        let pmf = mlri_discovery_pmf(&p, 200);
        assert!((pmf.mean() - 16.0).abs() < 0.2);
        let pmf = mlri_discovery_pmf(&p, 600);
        assert!(pmf.censored_mass() < 1e-6);
        assert_close(pmf.mean(), mlri_mean_discovery(&p), 1e-3);
    }

    #[test]
    fn mlri_variance_matches_pmf() {
        let p = triangular_pmf(17, 10).unwrap();
        let pmf = mlri_discovery_pmf(&p, 4000);
        assert_close(mlri_discovery_variance(&p), pmf.variance(), 1e-6);
    }

    #[test]
    fn ea_mean_values() {
        assert_eq!(ea_mean_discovery(17), 8.0);
        assert_eq!(ea_mean_discovery(1), 0.0);
        assert_eq!(ea_mean_discovery(2), 0.5);
        assert_eq!(ea_discovery_variance(17), (17.0 * 17.0 - 1.0) / 12.0);
    }

    #[test]
    fn ea_uniform_phase_pmf_is_flat() {
        let pmf = ea_uniform_phase_pmf(17);
        assert_eq!(pmf.masses().len(), 17);
        for tau in 0..17 {
            assert_eq!(pmf.mass(tau), 1.0 / 17.0);
        }
        assert_eq!(pmf.censored_mass(), 0.0);
        assert_close(pmf.mean(), 8.0, 1e-12);
    }

    #[test]
    fn deterministic_mean_hand_cases() {
        let point = ArrivalPmf::from_weights(&[1.0]).unwrap();
        let seq = ea_sequence(3, &[1, 2, 3], 9).unwrap();

        let uniform = uniform_pmf(3).unwrap();
        assert_close(
            deterministic_mean_discovery(&seq, &uniform, &point).unwrap(),
            1.0,
            1e-15,
        );

        let skewed = custom_pmf(&[0.7, 0.2, 0.1]).unwrap();
        assert_close(
            deterministic_mean_discovery(&seq, &skewed, &point).unwrap(),
            0.4,
            1e-15,
        );
    }

    #[test]
    fn deterministic_pmf_hand_case() {
        let point = ArrivalPmf::from_weights(&[1.0]).unwrap();
        let seq = ea_sequence(3, &[1, 2, 3], 9).unwrap();
        let skewed = custom_pmf(&[0.7, 0.2, 0.1]).unwrap();
        let pmf = deterministic_discovery_pmf(&seq, &skewed, &point, 5).unwrap();
        assert_close(pmf.mass(0), 0.7, 1e-15);
        assert_close(pmf.mass(1), 0.2, 1e-15);
        assert_close(pmf.mass(2), 0.1, 1e-15);
        assert_close(pmf.censored_mass(), 0.0, 1e-15);
    }

    #[test]
    fn ea_phase_average_equals_closed_form() {
        // Averaging the exact per-phase means over one period reproduces
        // (N-1)/2 for any permutation and any entrance PMF.
        let n = 7;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let perm = random_permutation(n, &mut rng);
        let seq = ea_sequence(n, &perm, 3 * n).unwrap();
        let p = custom_pmf(&[0.05, 0.1, 0.3, 0.05, 0.2, 0.25, 0.05]).unwrap();
        let mut total = 0.0;
        for phase in 0..n {
            let mut weights = vec![0.0; phase + 1];
            weights[phase] = 1.0;
            let arrival = ArrivalPmf::from_weights(&weights).unwrap();
            total += deterministic_mean_discovery(&seq, &p, &arrival).unwrap();
        }
        assert_close(total / n as f64, ea_mean_discovery(n), 1e-12);
    }

    #[test]
    fn ea_uniform_phase_arrival_gives_flat_pmf() {
        let n = 17;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let perm = random_permutation(n, &mut rng);
        let seq = ea_sequence(n, &perm, 2 * n).unwrap();
        let p = triangular_pmf(n, 10).unwrap();
        let arrival = ArrivalPmf::from_weights(&vec![1.0; n]).unwrap();
        let pmf = deterministic_discovery_pmf(&seq, &p, &arrival, n - 1).unwrap();
        for tau in 0..n {
            assert_close(pmf.mass(tau), 1.0 / n as f64, 1e-12);
        }
        assert_close(pmf.censored_mass(), 0.0, 1e-12);
    }

    #[test]
    fn deterministic_mean_matches_pmf_first_moment() {
        let p = triangular_pmf(17, 10).unwrap();
        let w = geometric_arrival(0.1, 1e-9).unwrap();
        let seq = smbi_sequence(&p, &w, 400).unwrap();
        let mean = deterministic_mean_discovery(&seq, &p, &w).unwrap();
        let pmf = deterministic_discovery_pmf(&seq, &p, &w, 399).unwrap();
        assert_close(mean, pmf.mean(), 1e-9);
    }

    #[test]
    fn coverage_error_identifies_entry_and_sector() {
        let seq = ScanSequence::new(vec![1, 2, 1, 2], 3, None).unwrap();
        let p = custom_pmf(&[0.5, 0.2, 0.3]).unwrap();
        let w = ArrivalPmf::from_weights(&[1.0]).unwrap();
        match deterministic_mean_discovery(&seq, &p, &w) {
            Err(Error::Coverage {
                entry_slot: 1,
                sector: 3,
            }) => {}
            other => panic!("expected coverage error, got {other:?}"),
        }
    }

    #[test]
    fn mlri_monotone_in_triangle_width() {
        let mut prev = -1.0;
        for l in (2..=32).step_by(2) {
            let mean = mlri_mean_discovery(&triangular_pmf(17, l as u64).unwrap());
            assert!(mean >= prev - 1e-9, "L={l}: {mean} < {prev}");
            prev = mean;
        }
    }
}
