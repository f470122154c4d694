//! Locating the pebble count where `Pr[solvable]` crosses a target level.

use serde::Serialize;

use crate::error::{invalid, PebbleError, Result};
use crate::family::GraphFamily;
use crate::sampling::{derive_seed, Sampler};

use super::estimate::{estimate_adaptive, Estimate, TrialPolicy};

/// Quantile used when checking that estimates are monotone in `t`.
const MONOTONE_Z: f64 = 3.290_526_731_491_926;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSearch {
    pub p_star: f64,
    /// Stop once `(hi - lo) / hi` is at most this.
    pub precision: f64,
    pub policy: TrialPolicy,
    pub max_doublings: usize,
    pub max_bisections: usize,
}

impl Default for ThresholdSearch {
    fn default() -> Self {
        Self {
            p_star: 0.5,
            precision: 0.02,
            policy: TrialPolicy::default(),
            max_doublings: 64,
            max_bisections: 200,
        }
    }
}

impl ThresholdSearch {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_star > 0.0 && self.p_star < 1.0) {
            return Err(invalid(format!("p*={} must lie in (0, 1)", self.p_star)));
        }
        if !(self.precision > 0.0 && self.precision < 1.0) {
            return Err(invalid(format!(
                "precision={} must lie in (0, 1)",
                self.precision
            )));
        }
        self.policy.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub family: String,
    pub n: usize,
    pub m: usize,
    /// Smallest evaluated `t` whose estimate exceeded `p_star`.
    pub t_half: u64,
    pub p_star: f64,
    /// Every evaluated point, in evaluation order.
    pub points: Vec<Estimate>,
}

impl Threshold {
    pub fn total_trials(&self) -> u64 {
        self.points.iter().map(|e| e.trials).sum()
    }
}

struct Probe<'a> {
    graph: crate::graph::Graph,
    sampler: &'a dyn Sampler,
    search: &'a ThresholdSearch,
    seed: u64,
    points: Vec<Estimate>,
}

impl Probe<'_> {
    /// Whether the estimate at `t` lies above `p_star`.
    fn above(&mut self, t: u64) -> Result<bool> {
        if let Some(e) = self.points.iter().find(|e| e.t == t) {
            return Ok(e.p_hat > self.search.p_star);
        }
        let n = self.graph.n() as u64;
        let est = estimate_adaptive(
            &self.graph,
            t,
            derive_seed(self.seed, &[n, t]),
            self.sampler,
            &self.search.policy,
            self.search.p_star,
        )?;
        self.check_monotone(&est)?;
        let above = est.p_hat > self.search.p_star;
        self.points.push(est);
        Ok(above)
    }

    fn check_monotone(&self, new: &Estimate) -> Result<()> {
        let (new_lo, new_hi) = new.interval_at(MONOTONE_Z);
        for old in &self.points {
            let (old_lo, old_hi) = old.interval_at(MONOTONE_Z);
            let (low, high, low_ci, high_ci) = if old.t < new.t {
                (old, new, old_lo, new_hi)
            } else {
                (new, old, new_lo, old_hi)
            };
            if high_ci < low_ci {
                return Err(PebbleError::MonotonicityViolation {
                    t_low: low.t,
                    p_low: low.p_hat,
                    t_high: high.t,
                    p_high: high.p_hat,
                });
            }
        }
        Ok(())
    }
}

/// Brackets the crossing by doubling from the family's hint, then bisects
/// on integers until the bracket's relative width is at most `precision`.
///
/// Points are seeded by `(seed, n, t)`, so the result for one `n` does not
/// depend on which other sizes are in a sweep.
pub fn find_threshold(
    family: &dyn GraphFamily,
    n: usize,
    search: &ThresholdSearch,
    seed: u64,
    sampler: &dyn Sampler,
) -> Result<Threshold> {
    search.validate()?;
    let graph = family.build(n)?;
    if !graph.is_tree() {
        return Err(PebbleError::Unsupported(format!(
            "family {} does not produce trees",
            family.name()
        )));
    }
    let mut probe = Probe {
        graph,
        sampler,
        search,
        seed,
        points: Vec::new(),
    };

    let start = family.threshold_hint(n).max(1);
    let (mut lo, mut hi);
    if probe.above(start)? {
        // Walk down until the estimate drops to p* or below. t = 0 is never
        // solvable, so it serves as the floor.
        hi = start;
        lo = 0;
        let mut steps = 0;
        while hi > 1 {
            steps += 1;
            if steps > search.max_doublings {
                return Err(PebbleError::NonConvergence { iterations: steps });
            }
            let cand = hi / 2;
            if probe.above(cand)? {
                hi = cand;
            } else {
                lo = cand;
                break;
            }
        }
    } else {
        lo = start;
        let mut steps = 0;
        loop {
            steps += 1;
            if steps > search.max_doublings {
                return Err(PebbleError::NonConvergence { iterations: steps });
            }
            let cand = lo.checked_mul(2).ok_or(PebbleError::NonConvergence {
                iterations: steps,
            })?;
            if probe.above(cand)? {
                hi = cand;
                break;
            }
            lo = cand;
        }
    }

    let mut steps = 0;
    while hi - lo > 1 && (hi - lo) as f64 / hi as f64 > search.precision {
        steps += 1;
        if steps > search.max_bisections {
            return Err(PebbleError::NonConvergence { iterations: steps });
        }
        let mid = lo + (hi - lo) / 2;
        if probe.above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    Ok(Threshold {
        family: family.name(),
        n,
        m: family.wick_length(n)?,
        t_half: hi,
        p_star: search.p_star,
        points: probe.points,
    })
}
