//! Monte Carlo estimates of `μ_p` events and conditional probabilities.
//!
//! Samples are drawn in fixed-size chunks; chunk `c` uses a ChaCha8 stream
//! keyed by the seed with stream id `c`, so chunks can be drawn in parallel
//! and merged in index order with identical results on every run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::family::SubsetMask;
use crate::measure::Prob;

pub const DEFAULT_CONFIDENCE: f64 = 0.99;

/// Below this many successes (or failures) the Wilson interval is used.
pub const WILSON_THRESHOLD: u64 = 30;

pub const MIN_SAMPLES: u64 = 100;

const CHUNK: u64 = 4096;

/// A frequency estimate with a two-sided confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub successes: u64,
    pub n_samples: u64,
    pub confidence: f64,
    pub seed: u64,
    /// Draws made in total; exceeds `n_samples` for rejection sampling.
    pub draws: u64,
}

impl McEstimate {
    pub fn covers(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.n_samples as f64 / self.draws as f64
    }
}

/// Includes each of `n` elements independently with probability `p`.
pub fn sample_subset<R: Rng + ?Sized>(p: Prob, n: usize, rng: &mut R) -> SubsetMask {
    let p = p.get();
    SubsetMask::from_indices((0..n).filter(|_| rng.random_bool(p)))
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Seeded sampler configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub seed: u64,
    pub confidence: f64,
}

impl MonteCarlo {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    fn z(&self) -> Result<f64> {
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        Ok(normal.inverse_cdf(1.0 - (1.0 - self.confidence) / 2.0))
    }

    /// Estimates `P(X_p ∈ F)` for a family given by its membership predicate.
    pub fn estimate_family<F>(&self, n: usize, member: F, p: Prob, samples: u64) -> Result<McEstimate>
    where
        F: Fn(SubsetMask) -> bool + Sync,
    {
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!("need at least {MIN_SAMPLES} samples")));
        }
        let z = self.z()?;
        let chunks = samples.div_ceil(CHUNK);
        let successes: u64 = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(self.seed, c);
                let len = CHUNK.min(samples - c * CHUNK);
                (0..len).filter(|_| member(sample_subset(p, n, &mut rng))).count() as u64
            })
            .sum();
        Ok(self.finish(successes, samples, samples, z))
    }

    /// Estimates `P(X_p ∈ A | X_p ∈ B)` by rejection sampling until
    /// `accepted` draws land in `B`, giving up after `max_draws`.
    pub fn estimate_conditional<A, B>(
        &self,
        n: usize,
        in_a: A,
        in_b: B,
        p: Prob,
        accepted: u64,
        max_draws: u64,
    ) -> Result<McEstimate>
    where
        A: Fn(SubsetMask) -> bool + Sync,
        B: Fn(SubsetMask) -> bool + Sync,
    {
        if accepted < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!("need at least {MIN_SAMPLES} samples")));
        }
        let z = self.z()?;
        let total_chunks = max_draws.div_ceil(CHUNK);
        let batch = rayon::current_num_threads().max(1) as u64 * 4;
        let (mut kept, mut hits, mut draws) = (0u64, 0u64, 0u64);
        let mut next = 0u64;
        while kept < accepted && next < total_chunks {
            let end = (next + batch).min(total_chunks);
            // per chunk: outcomes of the accepted draws, in draw order, and
            // the draw index just after each acceptance
            let results: Vec<Vec<(bool, u64)>> = (next..end)
                .into_par_iter()
                .map(|c| {
                    let mut rng = chunk_rng(self.seed, c);
                    let len = CHUNK.min(max_draws - c * CHUNK);
                    (0..len)
                        .filter_map(|i| {
                            let s = sample_subset(p, n, &mut rng);
                            in_b(s).then(|| (in_a(s), i + 1))
                        })
                        .collect()
                })
                .collect();
            for (offset, chunk) in results.into_iter().enumerate() {
                let c = next + offset as u64;
                let len = CHUNK.min(max_draws - c * CHUNK);
                let mut used = len;
                for (hit, after) in chunk {
                    if kept == accepted {
                        break;
                    }
                    kept += 1;
                    hits += u64::from(hit);
                    used = after;
                }
                draws += used;
                if kept == accepted {
                    break;
                }
            }
            next = end;
        }
        if kept < accepted {
            return Err(Error::AcceptanceStarvation {
                accepted: kept,
                draws,
                rate: kept as f64 / draws.max(1) as f64,
            });
        }
        Ok(self.finish(hits, kept, draws, z))
    }

    fn finish(&self, successes: u64, n: u64, draws: u64, z: f64) -> McEstimate {
        let nf = n as f64;
        let phat = successes as f64 / nf;
        let (lower, upper) = if successes.min(n - successes) < WILSON_THRESHOLD {
            wilson(phat, nf, z)
        } else {
            let h = z * (phat * (1.0 - phat) / nf).sqrt();
            ((phat - h).max(0.0), (phat + h).min(1.0))
        };
        McEstimate {
            estimate: phat,
            half_width: (phat - lower).max(upper - phat),
            lower,
            upper,
            successes,
            n_samples: n,
            confidence: self.confidence,
            seed: self.seed,
            draws,
        }
    }
}

fn wilson(phat: f64, n: f64, z: f64) -> (f64, f64) {
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let h = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    // the exact endpoints at phat = 0 or 1 are 0 or 1; pin them against rounding
    let lower = if phat == 0.0 { 0.0 } else { (center - h).max(0.0) };
    let upper = if phat == 1.0 { 1.0 } else { (center + h).min(1.0) };
    (lower, upper)
}
