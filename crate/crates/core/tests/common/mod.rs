//! Shared test helpers: a brute-force SMBI oracle that re-derives every
//! masked posterior from scratch, plus seeded random-instance generators.

#![allow(dead_code)]

use iascan::dist::{custom_pmf, ArrivalPmf, SectorPmf};
use iascan::strategies::ExploredSet;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Literal evaluation of the slot-`current_slot` posterior: for every
/// candidate entry slot the explored set is rebuilt by scanning the whole
/// history window, the entrance PMF is masked and renormalized, and terms
/// are accumulated in entry-slot order. Independent of the incremental
/// production path.
pub fn brute_posterior(
    current_slot: usize,
    history: &[usize],
    probs: &[f64],
    arrival: &ArrivalPmf,
) -> Vec<f64> {
    let n = probs.len();
    let t_max = current_slot.min(arrival.truncation_horizon());
    let mut values = vec![0.0f64; n];
    for sector in 1..=n {
        let mut acc = 0.0;
        for t in 1..=t_max {
            let explored = ExploredSet::from_history(history, n, t, current_slot - 1);
            let masked: Vec<f64> = (1..=n)
                .map(|i| {
                    if explored.contains(i) {
                        0.0
                    } else {
                        probs[i - 1]
                    }
                })
                .collect();
            let denom: f64 = masked.iter().sum();
            if denom > 0.0 {
                acc += arrival.mass(t) * masked[sector - 1] / denom;
            }
        }
        values[sector - 1] = acc;
    }
    values
}

/// Greedy argmax schedule built on [`brute_posterior`], ties to the lowest
/// sector index.
pub fn brute_smbi_sequence(
    entrance: &SectorPmf,
    arrival: &ArrivalPmf,
    horizon: usize,
) -> Vec<usize> {
    let mut history = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        let values = brute_posterior(k, &history, entrance.probs(), arrival);
        let mut best = 0;
        for (i, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = i;
            }
        }
        history.push(best + 1);
    }
    history
}

/// Random entrance PMF over `n_sectors` with exactly `support_size`
/// positive sectors, weights bounded away from zero.
pub fn random_pmf<R: Rng>(rng: &mut R, n_sectors: usize, support_size: usize) -> SectorPmf {
    assert!(support_size >= 1 && support_size <= n_sectors);
    let mut sectors: Vec<usize> = (0..n_sectors).collect();
    for i in 0..support_size {
        let j = rng.random_range(i..n_sectors);
        sectors.swap(i, j);
    }
    let mut weights = vec![0.0f64; n_sectors];
    for &s in &sectors[..support_size] {
        weights[s] = rng.random_range(0.2..1.0);
    }
    custom_pmf(&weights).expect("generated weights are valid")
}

/// Random finite arrival PMF over `1..=len` entry slots.
pub fn random_arrival<R: Rng>(rng: &mut R, len: usize) -> ArrivalPmf {
    let weights: Vec<f64> = (0..len).map(|_| rng.random_range(0.1..1.0)).collect();
    ArrivalPmf::from_weights(&weights).expect("generated weights are valid")
}

pub fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
