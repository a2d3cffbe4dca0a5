//! Finite-shot Z-basis measurement simulation with a counter-based seeded
//! generator, so per-time-index sampling parallelizes without sequence
//! coupling.

use std::collections::BTreeMap;

use crate::encoding::StateVector;
use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// 64-bit finalizer with full avalanche; the core of the generator.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based generator: draw k is mix64(key + k*gamma), so any draw is
/// addressable without generating its predecessors.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: seed,
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(
            self.key
                .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Derives an independent generator key for a numbered stream, so each time
/// index can own a decoupled sequence under one experiment seed.
pub fn split_seed(seed: u64, stream: u64) -> u64 {
    mix64(mix64(seed) ^ mix64(stream ^ GOLDEN_GAMMA))
}

/// Outcome counts of one finite-shot measurement run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotRecord {
    pub counts: BTreeMap<usize, u64>,
    pub shots: u64,
    pub seed: u64,
    /// Basis index the experiment cares about; estimates default to it.
    pub target_index: usize,
}

impl ShotRecord {
    pub fn with_target(mut self, target: usize) -> Self {
        self.target_index = target;
        self
    }
}

/// A binomial point estimate for one basis outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub shots: u64,
}

/// Draws `shots` basis-index samples from |amplitude_k|^2 by inverse CDF.
/// Identical (state, shots, seed) triples produce identical records.
pub fn sample(y: &StateVector, shots: u64, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::DimensionMismatch {
            detail: "sampling needs at least one shot".into(),
        });
    }
    let probs: Vec<f64> = y.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::UnnormalizedState {
            deviation: (total - 1.0).abs(),
        });
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cdf.push(acc);
    }
    // Roundoff can leave the final CDF entry a hair under a draw; such draws
    // clamp to the last outcome that has any probability at all, so
    // zero-probability bins stay unreachable.
    let last_nonzero = probs
        .iter()
        .rposition(|&p| p > 0.0)
        .expect("norm-checked state has a nonzero amplitude");

    let mut rng = CounterRng::new(seed);
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.next_f64();
        let k = cdf
            .iter()
            .position(|&edge| u < edge)
            .unwrap_or(last_nonzero);
        *counts.entry(k).or_insert(0) += 1;
    }
    Ok(ShotRecord {
        counts,
        shots,
        seed,
        target_index: 0,
    })
}

/// Frequency estimate for one basis index; an index never observed (or never
/// possible) estimates to zero.
pub fn estimate(rec: &ShotRecord, target: usize) -> ProbabilityEstimate {
    let hits = rec.counts.get(&target).copied().unwrap_or(0);
    let n = rec.shots as f64;
    let p_hat = hits as f64 / n;
    ProbabilityEstimate {
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / n).sqrt(),
        shots: rec.shots,
    }
}
