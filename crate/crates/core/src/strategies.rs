//! The three sector-scanning policies.
//!
//! - **EA** (exhaustive): cycles a fixed permutation of all sectors.
//! - **MLRI** (memory-less random illumination): draws an independent sector
//!   each slot from an illumination PMF `q`; the discovery-time-optimal
//!   choice is `q = p` (see [`mlri_optimal_q`]).
//! - **SMBI** (statistic and memory-based illumination): a deterministic
//!   sequence that each slot illuminates the sector with the highest
//!   posterior probability of holding the still-undiscovered user, given
//!   the entrance statistics, the entry-slot statistics, and every sector
//!   already explored.
//!
//! SMBI's posterior for slot `k` after scanning `b_1..b_{k-1}` is
//!
//! ```text
//! v_k(l) = sum over entry slots t <= k of  w_t * p~_l(t) / sum_i p~_i(t)
//! ```
//!
//! where `p~(t)` zeroes every sector explored in slots `t..k-1`. Entry
//! slots whose masked mass is zero are inconsistent with an undiscovered
//! user and contribute nothing. The sum over `t` is truncated at the
//! arrival PMF's horizon, which bounds the neglected weight by the
//! configured tail tolerance.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dist::{ArrivalPmf, SectorPmf};
use crate::error::{Error, Result};

/// A precomputed illumination schedule: sector `sectors[k-1]` is scanned in
/// slot `k`. Periodic sequences extend past their materialized length by
/// cycling; aperiodic ones end at their horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSequence {
    sectors: Vec<usize>,
    n_sectors: usize,
    period: Option<usize>,
}

impl ScanSequence {
    pub fn new(sectors: Vec<usize>, n_sectors: usize, period: Option<usize>) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::InvalidSequence("sequence must not be empty".into()));
        }
        if let Some(&bad) = sectors.iter().find(|&&s| s < 1 || s > n_sectors) {
            return Err(Error::InvalidSequence(format!(
                "sector {bad} outside 1..={n_sectors}"
            )));
        }
        if let Some(p) = period {
            if p == 0 || p > sectors.len() {
                return Err(Error::InvalidSequence(format!(
                    "period {p} outside 1..={}",
                    sectors.len()
                )));
            }
        }
        Ok(Self {
            sectors,
            n_sectors,
            period,
        })
    }

    /// Sector scanned in 1-based `slot`.
    ///
    /// Slots past the horizon of an aperiodic sequence are an error.
    pub fn sector_at(&self, slot: usize) -> Result<usize> {
        assert!(slot >= 1, "slots are 1-based");
        if slot <= self.sectors.len() {
            return Ok(self.sectors[slot - 1]);
        }
        match self.period {
            Some(p) => Ok(self.sectors[(slot - 1) % p]),
            None => Err(Error::HorizonExceeded {
                slot,
                horizon: self.sectors.len(),
            }),
        }
    }

    pub fn sectors(&self) -> &[usize] {
        &self.sectors
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn n_sectors(&self) -> usize {
        self.n_sectors
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }
}

/// Sectors illuminated between two slots (inclusive) of a scan history.
#[derive(Debug, Clone, PartialEq)]
pub struct ExploredSet {
    explored: Vec<bool>,
}

impl ExploredSet {
    /// Set of sectors scanned in slots `from_slot..=to_slot` of `history`
    /// (`history[k-1]` is the sector scanned in slot `k`). An inverted or
    /// out-of-range window yields the empty set.
    pub fn from_history(
        history: &[usize],
        n_sectors: usize,
        from_slot: usize,
        to_slot: usize,
    ) -> Self {
        let mut explored = vec![false; n_sectors];
        let lo = from_slot.max(1);
        let hi = to_slot.min(history.len());
        if lo <= hi {
            for slot in lo..=hi {
                explored[history[slot - 1] - 1] = true;
            }
        }
        Self { explored }
    }

    pub fn contains(&self, sector: usize) -> bool {
        sector >= 1 && sector <= self.explored.len() && self.explored[sector - 1]
    }

    /// Members, ascending, 1-based.
    pub fn sectors(&self) -> Vec<usize> {
        self.explored
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.explored.iter().filter(|&&e| e).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.explored.iter().any(|&e| e)
    }
}

/// Per-sector probability of finding the user in the current slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorVector {
    values: Vec<f64>,
}

impl PosteriorVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, sector: usize) -> f64 {
        self.values[sector - 1]
    }

    /// Sector (1-based) with the largest posterior; ties break to the
    /// lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best + 1
    }

    /// True when every sector has zero posterior mass (the arrival window
    /// is exhausted within the truncation horizon).
    pub fn is_exhausted(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// EA schedule: repeats `permutation` cyclically for `horizon` slots.
pub fn ea_sequence(
    n_sectors: usize,
    permutation: &[usize],
    horizon: usize,
) -> Result<ScanSequence> {
    validate_permutation(n_sectors, permutation)?;
    if horizon == 0 {
        return Err(Error::InvalidSequence("horizon must be >= 1".into()));
    }
    let sectors = (0..horizon).map(|k| permutation[k % n_sectors]).collect();
    ScanSequence::new(sectors, n_sectors, Some(n_sectors))
}

fn validate_permutation(n_sectors: usize, permutation: &[usize]) -> Result<()> {
    if permutation.len() != n_sectors {
        return Err(Error::InvalidSequence(format!(
            "permutation has {} entries, expected {n_sectors}",
            permutation.len()
        )));
    }
    let mut seen = vec![false; n_sectors];
    for &s in permutation {
        if s < 1 || s > n_sectors {
            return Err(Error::InvalidSequence(format!(
                "permutation entry {s} outside 1..={n_sectors}"
            )));
        }
        if seen[s - 1] {
            return Err(Error::InvalidSequence(format!(
                "permutation repeats sector {s}"
            )));
        }
        seen[s - 1] = true;
    }
    Ok(())
}

/// Uniformly random permutation of sectors `1..=n`, e.g. one EA period.
pub fn random_permutation<R: Rng + ?Sized>(n_sectors: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (1..=n_sectors).collect();
    perm.shuffle(rng);
    perm
}

/// MLRI's reference illumination PMF, `q = p`: illuminate each sector with
/// the probability that a user enters from it.
///
/// Kept as an explicit operation so the choice has a single code location;
/// the discovery-time objective as a function of an arbitrary `q` lives in
/// [`crate::analytic::mlri_mean_discovery_with_q`].
pub fn mlri_optimal_q(entrance: &SectorPmf) -> SectorPmf {
    entrance.clone()
}

/// One MLRI slot: an independent draw from the illumination PMF.
pub fn mlri_sample<R: Rng + ?Sized>(illumination: &SectorPmf, rng: &mut R) -> usize {
    illumination.sample(rng)
}

/// Posterior kernel shared by [`smbi_posterior`] and [`smbi_sequence`].
///
/// `last[i]` is the most recent slot `<= current_slot - 1` in which sector
/// `i+1` was illuminated (0 if never). Sector `i` is masked for entry slot
/// `t` exactly when `last[i] >= t`, so the masked mass for entry `t` is the
/// total entrance mass of sectors with `last[i] < t`, and
/// `v(l) = p_l * sum over t > last[l] of w_t / masked_mass(t)`.
fn posterior_given_last(
    last: &[usize],
    current_slot: usize,
    entrance: &SectorPmf,
    arrival: &ArrivalPmf,
) -> Vec<f64> {
    let probs = entrance.probs();
    debug_assert_eq!(last.len(), probs.len());
    let t_max = current_slot.min(arrival.truncation_horizon());

    // mass_freed[l]: entrance mass of sectors whose latest illumination is
    // slot l; cumulating over l gives the masked mass per entry slot.
    let mut mass_freed = vec![0.0f64; t_max];
    for (i, &l) in last.iter().enumerate() {
        if l < t_max {
            mass_freed[l] += probs[i];
        }
    }
    let mut masked_mass = vec![0.0f64; t_max + 1]; // index = entry slot t
    let mut acc = 0.0;
    for t in 1..=t_max {
        acc += mass_freed[t - 1];
        masked_mass[t] = acc;
    }

    // suffix[t] = sum over s in t..=t_max of w_s / masked_mass(s), with
    // zero-mass entry slots dropped (they are inconsistent with an
    // undiscovered user).
    let mut suffix = vec![0.0f64; t_max + 2];
    for t in (1..=t_max).rev() {
        let term = if masked_mass[t] > 0.0 {
            arrival.masses()[t - 1] / masked_mass[t]
        } else {
            0.0
        };
        suffix[t] = suffix[t + 1] + term;
    }

    last.iter()
        .zip(probs)
        .map(|(&l, &p)| if l + 1 > t_max { 0.0 } else { p * suffix[l + 1] })
        .collect()
}

fn last_illumination(history: &[usize], n_sectors: usize) -> Vec<usize> {
    let mut last = vec![0usize; n_sectors];
    for (idx, &s) in history.iter().enumerate() {
        last[s - 1] = idx + 1;
    }
    last
}

/// Probability of finding the user in `current_slot` per candidate sector,
/// given the scan prefix `history` (`history.len() == current_slot - 1`).
pub fn smbi_posterior(
    current_slot: usize,
    history: &[usize],
    entrance: &SectorPmf,
    arrival: &ArrivalPmf,
) -> Result<PosteriorVector> {
    if current_slot == 0 {
        return Err(Error::InvalidSequence("slots are 1-based".into()));
    }
    if history.len() != current_slot - 1 {
        return Err(Error::InvalidSequence(format!(
            "history has {} entries, expected {} for slot {current_slot}",
            history.len(),
            current_slot - 1
        )));
    }
    let n = entrance.n_sectors();
    if let Some(&bad) = history.iter().find(|&&s| s < 1 || s > n) {
        return Err(Error::InvalidSequence(format!(
            "history sector {bad} outside 1..={n}"
        )));
    }
    let last = last_illumination(history, n);
    Ok(PosteriorVector {
        values: posterior_given_last(&last, current_slot, entrance, arrival),
    })
}

/// SMBI schedule of length `horizon` plus the slots (if any) where the
/// posterior was exhausted and the scheduler fell back to the tie-break
/// order (lowest sector index).
pub fn smbi_sequence_with_flags(
    entrance: &SectorPmf,
    arrival: &ArrivalPmf,
    horizon: usize,
) -> Result<(ScanSequence, Vec<usize>)> {
    if horizon == 0 {
        return Err(Error::InvalidSequence("horizon must be >= 1".into()));
    }
    let n = entrance.n_sectors();
    let mut last = vec![0usize; n];
    let mut sectors = Vec::with_capacity(horizon);
    let mut exhausted = Vec::new();
    for k in 1..=horizon {
        let values = posterior_given_last(&last, k, entrance, arrival);
        let mut best = 0;
        for (i, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = i;
            }
        }
        if values[best] == 0.0 {
            exhausted.push(k);
        }
        sectors.push(best + 1);
        last[best] = k;
    }
    Ok((ScanSequence::new(sectors, n, None)?, exhausted))
}

/// Deterministic SMBI schedule: slot `k` illuminates the argmax of
/// [`smbi_posterior`] given the already-chosen prefix, ties broken by the
/// lowest sector index.
pub fn smbi_sequence(
    entrance: &SectorPmf,
    arrival: &ArrivalPmf,
    horizon: usize,
) -> Result<ScanSequence> {
    smbi_sequence_with_flags(entrance, arrival, horizon).map(|(seq, _)| seq)
}

/// Uniform per-slot interface over the three policies, as consumed by the
/// simulation engine. EA and SMBI read their precomputed sequences; MLRI
/// draws fresh from its illumination PMF.
#[derive(Debug)]
pub enum ScanPolicy<'a> {
    Ea(&'a ScanSequence),
    Mlri(&'a SectorPmf),
    Smbi(&'a ScanSequence),
}

impl ScanPolicy<'_> {
    pub fn next_sector<R: Rng + ?Sized>(&self, slot: usize, rng: &mut R) -> Result<usize> {
        match self {
            ScanPolicy::Ea(seq) | ScanPolicy::Smbi(seq) => seq.sector_at(slot),
            ScanPolicy::Mlri(q) => Ok(mlri_sample(q, rng)),
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::dist::{custom_pmf, geometric_arrival, triangular_pmf, uniform_pmf, ArrivalPmf};

    use super::*;

    #[test]
    fn ea_sequence_cycles_permutation() {
        let seq = ea_sequence(3, &[2, 1, 3], 7).unwrap();
        assert_eq!(seq.sectors(), &[2, 1, 3, 2, 1, 3, 2]);
        assert_eq!(seq.period(), Some(3));
        // Past the materialized horizon the cycle continues.
        assert_eq!(seq.sector_at(8).unwrap(), 1);

        let seq = ea_sequence(1, &[1], 4).unwrap();
        assert_eq!(seq.sectors(), &[1, 1, 1, 1]);
    }

    #[test]
    fn ea_sequence_windows_cover_all_sectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let perm = random_permutation(9, &mut rng);
        let seq = ea_sequence(9, &perm, 40).unwrap();
        for start in 1..=(40 - 9) {
            let mut seen = [false; 9];
            for slot in start..start + 9 {
                seen[seq.sector_at(slot).unwrap() - 1] = true;
            }
            assert!(seen.iter().all(|&s| s), "window at {start}");
        }
    }

    #[test]
    fn ea_sequence_rejects_invalid_permutations() {
        assert!(ea_sequence(3, &[1, 2], 5).is_err());
        assert!(ea_sequence(3, &[1, 2, 2], 5).is_err());
        assert!(ea_sequence(3, &[1, 2, 4], 5).is_err());
        assert!(ea_sequence(3, &[0, 1, 2], 5).is_err());
        assert!(ea_sequence(3, &[1, 2, 3], 0).is_err());
    }

    #[test]
    fn aperiodic_sequence_errors_past_horizon() {
        let seq = ScanSequence::new(vec![1, 2], 3, None).unwrap();
        assert_eq!(seq.sector_at(2).unwrap(), 2);
        match seq.sector_at(3) {
            Err(Error::HorizonExceeded { slot: 3, horizon: 2 }) => {}
            other => panic!("expected horizon error, got {other:?}"),
        }
    }

    #[test]
    fn explored_set_matches_definition() {
        let history = [2, 1, 2, 3];
        let set = ExploredSet::from_history(&history, 4, 2, 3);
        assert_eq!(set.sectors(), vec![1, 2]);
        assert!(set.contains(2));
        assert!(!set.contains(3));
        assert!(ExploredSet::from_history(&history, 4, 4, 3).is_empty());
        assert_eq!(ExploredSet::from_history(&history, 4, 1, 10).len(), 3);
    }

    #[test]
    fn mlri_optimal_q_is_identity() {
        let p = uniform_pmf(17).unwrap();
        assert_eq!(mlri_optimal_q(&p), p);
        let p = custom_pmf(&[0.7, 0.3]).unwrap();
        assert_eq!(mlri_optimal_q(&p).probs(), &[0.7, 0.3]);
    }

    #[test]
    fn mlri_sample_respects_support_and_seed() {
        let q = custom_pmf(&[0.0, 1.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert_eq!(mlri_sample(&q, &mut rng), 2);
        }
        let q = triangular_pmf(17, 10).unwrap();
        let draws = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..100).map(|_| mlri_sample(&q, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draws(5), draws(5));
    }

    #[test]
    fn posterior_slot_one_is_weighted_entrance() {
        let p = custom_pmf(&[0.5, 0.3, 0.2]).unwrap();
        let w = geometric_arrival(0.1, 1e-9).unwrap();
        let v = smbi_posterior(1, &[], &p, &w).unwrap();
        let w1 = w.mass(1);
        for s in 1..=3 {
            assert!((v.value(s) - w1 * p.prob(s)).abs() < 1e-15);
        }
        assert_eq!(v.argmax(), 1);
    }

    #[test]
    fn posterior_hand_case_three_sectors() {
        // Entry pinned to t=1, sector 1 already scanned: the masked PMF is
        // [0, .3, .2] with mass .5, so v = [0, .6, .4].
        let p = custom_pmf(&[0.5, 0.3, 0.2]).unwrap();
        let w = ArrivalPmf::from_weights(&[1.0]).unwrap();
        let v = smbi_posterior(2, &[1], &p, &w).unwrap();
        assert!((v.value(1) - 0.0).abs() < 1e-15);
        assert!((v.value(2) - 0.6).abs() < 1e-15);
        assert!((v.value(3) - 0.4).abs() < 1e-15);
        assert_eq!(v.argmax(), 2);
    }

    #[test]
    fn posterior_degenerate_entrance_tracks_support() {
        let p = custom_pmf(&[0.0, 1.0, 0.0]).unwrap();
        let w = geometric_arrival(0.2, 1e-9).unwrap();
        let v = smbi_posterior(3, &[1, 3], &p, &w).unwrap();
        assert_eq!(v.argmax(), 2);
        assert!(v.value(2) > 0.0);
    }

    #[test]
    fn posterior_rejects_inconsistent_history() {
        let p = uniform_pmf(3).unwrap();
        let w = geometric_arrival(0.1, 1e-9).unwrap();
        assert!(smbi_posterior(2, &[], &p, &w).is_err());
        assert!(smbi_posterior(2, &[9], &p, &w).is_err());
    }

    #[test]
    fn posterior_values_bounded_and_finite() {
        let p = triangular_pmf(17, 10).unwrap();
        let w = geometric_arrival(0.1, 1e-9).unwrap();
        let (seq, _) = smbi_sequence_with_flags(&p, &w, 60).unwrap();
        for k in 1..=60usize {
            let v = smbi_posterior(k, &seq.sectors()[..k - 1], &p, &w).unwrap();
            let total: f64 = v.values().iter().sum();
            assert!(total <= 1.0 + 1e-9, "slot {k}: total {total}");
            assert!(v.values().iter().all(|x| x.is_finite() && *x >= 0.0));
        }
    }

    #[test]
    fn smbi_uniform_entrance_scans_in_index_order() {
        let p = uniform_pmf(5).unwrap();
        let w = geometric_arrival(0.1, 1e-9).unwrap();
        let seq = smbi_sequence(&p, &w, 12).unwrap();
        assert_eq!(seq.sectors(), &[1, 2, 3, 4, 5, 1, 2, 3, 4, 5, 1, 2]);
    }

    #[test]
    fn smbi_point_arrival_scans_in_decreasing_probability() {
        let p = custom_pmf(&[0.1, 0.4, 0.2, 0.3]).unwrap();
        let w = ArrivalPmf::from_weights(&[1.0]).unwrap();
        let (seq, exhausted) = smbi_sequence_with_flags(&p, &w, 6).unwrap();
        assert_eq!(&seq.sectors()[..4], &[2, 4, 3, 1]);
        // After the support is spent under a point-mass arrival, the
        // posterior is exhausted and the fallback emits sector 1.
        assert_eq!(&seq.sectors()[4..], &[1, 1]);
        assert_eq!(exhausted, vec![5, 6]);
    }

    #[test]
    fn smbi_first_slot_is_entrance_argmax() {
        let p = triangular_pmf(17, 10).unwrap();
        let w = geometric_arrival(0.5, 1e-9).unwrap();
        let seq = smbi_sequence(&p, &w, 5).unwrap();
        assert_eq!(seq.sector_at(1).unwrap(), 9);
    }

    #[test]
    fn smbi_point_arrival_visits_support_before_repeating() {
        // Under a point-mass arrival the greedy rule spends the support,
        // largest entrance mass first, before any revisit.
        let p = triangular_pmf(17, 10).unwrap(); // support 5..=13
        let w = ArrivalPmf::from_weights(&[1.0]).unwrap();
        let seq = smbi_sequence(&p, &w, 9).unwrap();
        assert_eq!(seq.sectors(), &[9, 8, 10, 7, 11, 6, 12, 5, 13]);
    }

    #[test]
    fn smbi_never_picks_zero_posterior_over_positive() {
        let p = triangular_pmf(9, 6).unwrap();
        let w = geometric_arrival(0.3, 1e-9).unwrap();
        let (seq, _) = smbi_sequence_with_flags(&p, &w, 40).unwrap();
        for k in 1..=40usize {
            let v = smbi_posterior(k, &seq.sectors()[..k - 1], &p, &w).unwrap();
            let picked = v.value(seq.sector_at(k).unwrap());
            let max = v.values().iter().cloned().fold(0.0f64, f64::max);
            assert!(
                picked == max,
                "slot {k}: picked {picked}, max {max}"
            );
        }
    }

    #[test]
    fn smbi_is_deterministic() {
        let p = triangular_pmf(17, 14).unwrap();
        let w = geometric_arrival(0.05, 1e-9).unwrap();
        assert_eq!(
            smbi_sequence(&p, &w, 200).unwrap(),
            smbi_sequence(&p, &w, 200).unwrap()
        );
    }

    #[test]
    fn smbi_sequence_matches_posterior_argmax() {
        let p = triangular_pmf(17, 8).unwrap();
        let w = geometric_arrival(0.1, 1e-9).unwrap();
        let seq = smbi_sequence(&p, &w, 50).unwrap();
        for k in 1..=50usize {
            let v = smbi_posterior(k, &seq.sectors()[..k - 1], &p, &w).unwrap();
            assert_eq!(seq.sector_at(k).unwrap(), v.argmax(), "slot {k}");
        }
    }

    #[test]
    fn arrival_weight_scaling_leaves_sequence_unchanged() {
        let p = custom_pmf(&[0.2, 0.5, 0.3]).unwrap();
        let w1 = ArrivalPmf::from_weights(&[1.0, 2.0, 3.0]).unwrap();
        let w2 = ArrivalPmf::from_weights(&[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(
            smbi_sequence(&p, &w1, 20).unwrap(),
            smbi_sequence(&p, &w2, 20).unwrap()
        );
    }

    #[test]
    fn next_sector_dispatches_per_policy() {
        let seq = ea_sequence(3, &[3, 1, 2], 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(ScanPolicy::Ea(&seq).next_sector(5, &mut rng).unwrap(), 1);

        let q = custom_pmf(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(ScanPolicy::Mlri(&q).next_sector(1, &mut rng).unwrap(), 3);

        let p = triangular_pmf(17, 10).unwrap();
        let w = geometric_arrival(0.1, 1e-9).unwrap();
        let smbi = smbi_sequence(&p, &w, 10).unwrap();
        assert_eq!(ScanPolicy::Smbi(&smbi).next_sector(1, &mut rng).unwrap(), 9);
        assert!(ScanPolicy::Smbi(&smbi).next_sector(11, &mut rng).is_err());
    }
}
