//! Monte Carlo estimation of solvability, threshold location and scaling fits.
//!
//! Everything here is a pure function of its inputs and a master seed. Trials
//! run on the current rayon pool, and counts are aggregated without regard to
//! order, so thread count never changes a result.

mod estimate;
mod threshold;

pub use estimate::{
    estimate_adaptive, estimate_solvable_probability, wilson_interval, Estimate, TrialPolicy,
    Z_95,
};
pub use threshold::{find_threshold, Threshold, ThresholdSearch};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::family::{GraphFamily, PathFamily};
use crate::sampling::{derive_seed, sampler_by_name, Sampler};

/// Least-squares line through `(x, y)` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn least_squares(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(invalid("a line fit needs at least two points"));
    }
    let k = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / k;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(invalid("a line fit needs distinct x values"));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit {
        slope,
        intercept: mean_y - slope * mean_x,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentPoint {
    pub n: usize,
    pub m: usize,
    pub t_half: u64,
    pub trials: u64,
}

/// Fit of `lg t_half` against `lg n`; for `fuse-eps:E` the slope estimates `1 - E`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub epsilon: Option<f64>,
    pub family: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<ExponentPoint>,
}

fn check_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n grid must be strictly increasing"));
    }
    if n_grid.first() == Some(&0) {
        return Err(invalid("n grid entries must be positive"));
    }
    Ok(())
}

pub fn fit_exponent(
    family: &dyn GraphFamily,
    n_grid: &[usize],
    search: &ThresholdSearch,
    seed: u64,
    sampler: &dyn Sampler,
) -> Result<ExponentFit> {
    if n_grid.len() < 4 {
        return Err(invalid(format!(
            "exponent fit needs at least 4 sizes, got {}",
            n_grid.len()
        )));
    }
    check_grid(n_grid)?;
    let mut points = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let th = find_threshold(family, n, search, seed, sampler)?;
        points.push(ExponentPoint {
            n,
            m: th.m,
            t_half: th.t_half,
            trials: th.total_trials(),
        });
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| ((p.n as f64).log2(), (p.t_half as f64).log2()))
        .collect();
    let fit = least_squares(&xy)?;
    Ok(ExponentFit {
        epsilon: family.epsilon(),
        family: family.name(),
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        points,
    })
}

/// How the pebble count is chosen for each `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PebbleCount {
    Fixed(u64),
    /// `round(c * n * lg n)`.
    NLogN(f64),
}

impl PebbleCount {
    pub fn at(&self, n: usize) -> u64 {
        match *self {
            PebbleCount::Fixed(t) => t,
            PebbleCount::NLogN(c) => (c * n as f64 * (n as f64).log2()).round() as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContrastRow {
    pub dependent: Estimate,
    pub independent: Estimate,
}

/// Paths under both placement models at identical `(n, t)`.
pub fn model_contrast(
    n_grid: &[usize],
    count: PebbleCount,
    trials: u64,
    seed: u64,
) -> Result<Vec<ContrastRow>> {
    check_grid(n_grid)?;
    let dependent = sampler_by_name("dependent")?;
    let independent = sampler_by_name("independent")?;
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let g = PathFamily.build(n)?;
        let t = count.at(n);
        let stream = |label: u64| derive_seed(seed, &[n as u64, t, label]);
        rows.push(ContrastRow {
            dependent: estimate_solvable_probability(&g, t, trials, stream(0), dependent)?,
            independent: estimate_solvable_probability(&g, t, trials, stream(1), independent)?,
        });
    }
    Ok(rows)
}

/// How pebble counts are chosen across an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PebblePolicy {
    Grid(Vec<u64>),
    Bisection { p_star: f64, precision: f64 },
}

/// A complete, reproducible experiment description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub family: String,
    pub n_grid: Vec<usize>,
    pub pebbles: PebblePolicy,
    pub trials_per_point: u64,
    pub master_seed: u64,
    pub model: String,
}

/// One output row: the family member plus its estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRow {
    pub family: String,
    pub m: usize,
    pub estimate: Estimate,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        check_grid(&self.n_grid)?;
        if self.n_grid.is_empty() {
            return Err(invalid("n grid is empty"));
        }
        if self.trials_per_point < 30 {
            return Err(invalid(format!(
                "trials_per_point={} is below the minimum of 30",
                self.trials_per_point
            )));
        }
        crate::family::family_from_spec(&self.family)?;
        sampler_by_name(&self.model)?;
        Ok(())
    }

    /// Runs every point. For a grid policy, rows come in `(n, t)` order; for
    /// bisection, each size contributes the points its search evaluated, with
    /// `trials_per_point` as the minimum per point.
    pub fn run(&self) -> Result<Vec<PointRow>> {
        self.validate()?;
        let family = crate::family::family_from_spec(&self.family)?;
        let sampler = sampler_by_name(&self.model)?;
        let mut rows = Vec::new();
        for &n in &self.n_grid {
            let m = family.wick_length(n)?;
            match &self.pebbles {
                PebblePolicy::Grid(ts) => {
                    let g = family.build(n)?;
                    for &t in ts {
                        let est = estimate_solvable_probability(
                            &g,
                            t,
                            self.trials_per_point,
                            derive_seed(self.master_seed, &[n as u64, t]),
                            sampler,
                        )?;
                        rows.push(PointRow {
                            family: family.name(),
                            m,
                            estimate: est,
                        });
                    }
                }
                PebblePolicy::Bisection { p_star, precision } => {
                    let search = ThresholdSearch {
                        p_star: *p_star,
                        precision: *precision,
                        policy: TrialPolicy {
                            min_trials: self.trials_per_point,
                            ..TrialPolicy::default()
                        }
                        .normalized(),
                        ..ThresholdSearch::default()
                    };
                    let th = find_threshold(family.as_ref(), n, &search, self.master_seed, sampler)?;
                    rows.extend(th.points.into_iter().map(|estimate| PointRow {
                        family: family.name(),
                        m,
                        estimate,
                    }));
                }
            }
        }
        Ok(rows)
    }
}

impl TrialPolicy {
    /// Raises `max_trials` to at least `min_trials`.
    pub fn normalized(self) -> Self {
        Self {
            max_trials: self.max_trials.max(self.min_trials),
            ..self
        }
    }
}

pub const CSV_HEADER: &str = "family,n,m,t,trials,p_hat,ci_low,ci_high,seed";

/// One CSV line (no trailing newline) in [`CSV_HEADER`] column order.
pub fn csv_row(family: &str, m: usize, est: &Estimate, master_seed: u64) -> String {
    format!(
        "{family},{},{m},{},{},{},{},{},{master_seed}",
        est.n, est.t, est.trials, est.p_hat, est.ci_low, est.ci_high
    )
}
