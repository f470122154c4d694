use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, PebbleError, Result};
use crate::graph::Graph;
use crate::sampling::{Sampler, SeedPolicy};
use crate::solvers::{all_roots_solvable, Scratch, MAX_TREE_PEBBLES};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

/// Point estimate of `Pr[solvable]` with its Wilson 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub n: usize,
    pub t: u64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Seed of the trial stream (trial `i` uses `SeedPolicy::new(seed, i)`).
    pub seed: u64,
}

impl Estimate {
    pub fn from_counts(n: usize, t: u64, successes: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z_95);
        Self {
            n,
            t,
            trials,
            successes,
            p_hat: if trials == 0 {
                0.0
            } else {
                successes as f64 / trials as f64
            },
            ci_low,
            ci_high,
            seed,
        }
    }

    pub fn interval_at(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.successes, self.trials, z)
    }

    pub fn width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

fn check_tree_target(g: &Graph, t: u64) -> Result<()> {
    if !g.is_tree() {
        return Err(PebbleError::Unsupported(
            "Monte Carlo estimation needs a tree (linear-time all-roots solver)".into(),
        ));
    }
    if t > MAX_TREE_PEBBLES {
        return Err(invalid(format!("t={t} exceeds 2^62")));
    }
    Ok(())
}

/// Number of solvable samples among trials `range` of the stream `seed`.
fn count_solvable(
    g: &Graph,
    t: u64,
    seed: u64,
    sampler: &dyn Sampler,
    range: std::ops::Range<u64>,
) -> u64 {
    range
        .into_par_iter()
        .map_init(Scratch::default, |scratch, i| {
            let mut rng = SeedPolicy::new(seed, i).rng();
            let c = sampler.draw(g.n(), t, &mut rng);
            u64::from(all_roots_solvable(g, c.counts(), scratch))
        })
        .sum()
}

/// Fraction of `trials` random configurations of `t` pebbles on the tree
/// `g` that are solvable. Trial `i` draws from `SeedPolicy::new(seed, i)`, so
/// the result does not depend on how trials are spread over threads.
pub fn estimate_solvable_probability(
    g: &Graph,
    t: u64,
    trials: u64,
    seed: u64,
    sampler: &dyn Sampler,
) -> Result<Estimate> {
    check_tree_target(g, t)?;
    if trials < 1 {
        return Err(invalid("need at least one trial"));
    }
    let successes = count_solvable(g, t, seed, sampler, 0..trials);
    Ok(Estimate::from_counts(g.n(), t, successes, trials, seed))
}

/// Sequential trial allocation around a target probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialPolicy {
    pub min_trials: u64,
    pub batch: u64,
    pub max_trials: u64,
}

impl Default for TrialPolicy {
    fn default() -> Self {
        Self {
            min_trials: 400,
            batch: 100,
            max_trials: 10_000,
        }
    }
}

impl TrialPolicy {
    pub fn fixed(trials: u64) -> Self {
        Self {
            min_trials: trials,
            batch: 1,
            max_trials: trials,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_trials < 1 || self.batch < 1 || self.max_trials < self.min_trials {
            return Err(invalid(format!("inconsistent trial policy {self:?}")));
        }
        Ok(())
    }
}

/// Runs `min_trials`, then adds batches until the 95% interval excludes
/// `p_star` or `max_trials` is reached.
pub fn estimate_adaptive(
    g: &Graph,
    t: u64,
    seed: u64,
    sampler: &dyn Sampler,
    policy: &TrialPolicy,
    p_star: f64,
) -> Result<Estimate> {
    check_tree_target(g, t)?;
    policy.validate()?;
    let mut trials = policy.min_trials;
    let mut successes = count_solvable(g, t, seed, sampler, 0..trials);
    loop {
        let est = Estimate::from_counts(g.n(), t, successes, trials, seed);
        let straddles = est.ci_low <= p_star && p_star <= est.ci_high;
        if !straddles || trials >= policy.max_trials {
            return Ok(est);
        }
        let next = (trials + policy.batch).min(policy.max_trials);
        successes += count_solvable(g, t, seed, sampler, trials..next);
        trials = next;
    }
}
