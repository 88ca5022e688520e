//! Monte-Carlo estimation of the random generation probability P(G, k)
//! and of nu(G), the least k with P(G, k) >= 1/e.
//!
//! Sampling is exactly uniform (products of uniformly chosen coset
//! representatives down the stabilizer chain). Each trial draws from its
//! own counter-derived ChaCha stream, so estimates are identical for any
//! worker count and reproducible from the seed.

use super::group::PermGroup;
use super::perm::Perm;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Threshold 1/e used by the nu estimator.
pub fn nu_threshold() -> f64 {
    (-1.0f64).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenEstimate {
    pub k: usize,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    /// Binomial standard error sqrt(p(1-p)/trials).
    pub std_error: f64,
}

/// Unbiased Monte-Carlo estimate of P(G, k) from `trials` seeded trials.
pub fn estimate_generation_probability(
    g: &PermGroup,
    k: usize,
    trials: u64,
    seed: u64,
) -> GenEstimate {
    let successes: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let tuple: Vec<Perm> = (0..k).map(|_| g.random_element(&mut rng)).collect();
            u64::from(g.is_generated_by(&tuple))
        })
        .sum();
    let p = successes as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    GenEstimate {
        k,
        trials,
        successes,
        estimate: p,
        std_error: se,
    }
}

#[derive(Debug, Error)]
pub enum NuError {
    #[error("no k <= {k_cap} reached the 1/e generation threshold")]
    CapExceeded {
        k_cap: usize,
        table: Vec<GenEstimate>,
    },
}

/// Estimate of nu(G) together with the per-k evidence table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NuEstimate {
    pub group_order: String,
    pub nu_hat: usize,
    pub threshold: f64,
    pub table: Vec<GenEstimate>,
}

/// Smallest k <= k_cap whose estimated P(G, k) reaches 1/e.
pub fn estimate_nu(
    g: &PermGroup,
    trials: u64,
    seed: u64,
    k_cap: usize,
) -> Result<NuEstimate, NuError> {
    let threshold = nu_threshold();
    let mut table = Vec::new();
    for k in 1..=k_cap {
        // decorrelate the per-k streams
        let seed_k = seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let est = estimate_generation_probability(g, k, trials, seed_k);
        let crossed = est.estimate >= threshold;
        table.push(est);
        if crossed {
            return Ok(NuEstimate {
                group_order: g.order().to_string(),
                nu_hat: k,
                threshold,
                table,
            });
        }
    }
    Err(NuError::CapExceeded { k_cap, table })
}
