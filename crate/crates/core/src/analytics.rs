//! Closed-form quantities for the dependent model on fuses.
//!
//! All functions take `n`, `t` (and for fuses `m`) as concrete numbers. The
//! asymptotic parameters `epsilon` and `omega` are plain numbers too: a
//! sweep over `n` re-evaluates everything pointwise.
//!
//! Two evaluation modes exist for the occupancy law. The `*_exact` functions
//! return big rationals. The floating versions use the exact path when
//! `n + t <= 200` and a log-space product otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, PebbleError, Result};
use crate::graph::wick_length_for_epsilon;
use crate::sampling::binomial;

/// Inputs `n + t` at or below this are evaluated in exact rational arithmetic.
pub const EXACT_MODE_LIMIT: u64 = 200;

/// Past this many factors the log-space product gives way to `ln_gamma`.
const PRODUCT_LIMIT: u64 = 1 << 22;

fn ratio(p: u64, q: u64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `E[C(v)] = t / n` for every vertex `v`.
pub fn expected_occupancy(n: u64, t: u64) -> Result<BigRational> {
    if n < 1 {
        return Err(invalid("n must be positive"));
    }
    Ok(ratio(t, n))
}

/// `Pr[C(v) = i] = C(n+t-i-2, t-i) / C(n+t-1, t)` in exact arithmetic.
///
/// For `n = 1` the single vertex holds all `t` pebbles. `i > t` has
/// probability zero.
pub fn occupancy_pmf_exact(n: u64, t: u64, i: u64) -> Result<BigRational> {
    if n < 1 {
        return Err(invalid("n must be positive"));
    }
    if i > t {
        return Ok(BigRational::zero());
    }
    if n == 1 {
        return Ok(if i == t {
            BigRational::one()
        } else {
            BigRational::zero()
        });
    }
    Ok(BigRational::new(
        binomial(n + t - i - 2, t - i).into(),
        binomial(n + t - 1, t).into(),
    ))
}

/// Floating-point `Pr[C(v) = i]`; exact below [`EXACT_MODE_LIMIT`].
pub fn occupancy_pmf(n: u64, t: u64, i: u64) -> Result<f64> {
    if n + t <= EXACT_MODE_LIMIT {
        return occupancy_pmf_exact(n, t, i).map(|r| to_f64(&r));
    }
    occupancy_pmf_float(n, t, i)
}

/// The floating path regardless of size.
///
/// `Pr[C = i] = (n-1)/(n+t-1) * prod_{j<i} (t-j)/(n+t-2-j)`. Each factor is
/// `1 - (n-2)/(n+t-2-j)`, summed in log space through `ln_1p`.
pub fn occupancy_pmf_float(n: u64, t: u64, i: u64) -> Result<f64> {
    if n < 1 {
        return Err(invalid("n must be positive"));
    }
    if i > t {
        return Ok(0.0);
    }
    if n == 1 {
        return Ok(if i == t { 1.0 } else { 0.0 });
    }
    let (nf, tf) = (n as f64, t as f64);
    let head = ((nf - 1.0) / (nf + tf - 1.0)).ln();
    let log_prod = if i <= PRODUCT_LIMIT {
        (0..i)
            .map(|j| (-(nf - 2.0) / (nf + tf - 2.0 - j as f64)).ln_1p())
            .sum::<f64>()
    } else {
        let i = i as f64;
        (ln_gamma(nf + tf - i - 1.0) - ln_gamma(nf + tf - 1.0))
            - (ln_gamma(tf - i + 1.0) - ln_gamma(tf + 1.0))
    };
    Ok((head + log_prod).exp())
}

/// The sandwich
/// `((n-1)/(n+t-1)) ((t-i)/(n+t-i))^i <= Pr[C(v)=i] <= (t/n)^i`,
/// exact. Valid for `0 <= i <= t`.
pub fn occupancy_bounds_exact(n: u64, t: u64, i: u64) -> Result<(BigRational, BigRational)> {
    check_bounds_args(n, t, i)?;
    let e = i as i32;
    let lower = ratio(n - 1, n + t - 1) * num_traits::pow(ratio(t - i, n + t - i), e as usize);
    let upper = num_traits::pow(ratio(t, n), e as usize);
    Ok((lower, upper))
}

pub fn occupancy_bounds(n: u64, t: u64, i: u64) -> Result<(f64, f64)> {
    check_bounds_args(n, t, i)?;
    let (nf, tf, fi) = (n as f64, t as f64, i as f64);
    let lower = (nf - 1.0) / (nf + tf - 1.0) * ((tf - fi) / (nf + tf - fi)).powf(fi);
    let upper = (tf / nf).powf(fi);
    Ok((lower, upper))
}

fn check_bounds_args(n: u64, t: u64, i: u64) -> Result<()> {
    if n < 1 {
        return Err(invalid("n must be positive"));
    }
    if i > t {
        return Err(invalid(format!("occupancy bounds need i <= t, got i={i}, t={t}")));
    }
    Ok(())
}

/// One parameter point: `n`, `t`, and the asymptotic knobs instantiated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n: u64,
    pub t: u64,
    pub epsilon: f64,
    pub omega: f64,
    pub m: u64,
}

impl ModelParams {
    pub fn new(n: u64, t: u64, epsilon: f64, omega: f64, m: u64) -> Result<Self> {
        if !(0.0..0.5).contains(&epsilon) {
            return Err(invalid(format!("epsilon={epsilon} must lie in [0, 1/2)")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid(format!("omega={omega} must be positive")));
        }
        if m < 1 || m > n {
            return Err(invalid(format!("wick length m={m} must lie in 1..={n}")));
        }
        Ok(Self {
            n,
            t,
            epsilon,
            omega,
            m,
        })
    }

    /// `t = round(omega n^(1-eps))`, the regime where fuses become solvable.
    pub fn above_threshold(n: u64, epsilon: f64, omega: f64) -> Result<Self> {
        let t = (omega * (n as f64).powf(1.0 - epsilon)).round() as u64;
        let m = wick_length_for_epsilon(epsilon, n as usize)? as u64;
        Self::new(n, t, epsilon, omega, m)
    }

    /// `t = floor(n^(1-eps) / omega)`, the regime where they do not.
    pub fn below_threshold(n: u64, epsilon: f64, omega: f64) -> Result<Self> {
        let t = ((n as f64).powf(1.0 - epsilon) / omega).floor() as u64;
        let m = wick_length_for_epsilon(epsilon, n as usize)? as u64;
        Self::new(n, t, epsilon, omega, m)
    }

    /// `|S| = n - m`.
    pub fn spark_count(&self) -> u64 {
        self.n - self.m
    }

    /// `omega n^eps`, the reciprocal of `t / n` in the sub-threshold regime.
    pub fn scale(&self) -> f64 {
        self.omega * (self.n as f64).powf(self.epsilon)
    }
}

/// Expected number `X` of sparks holding exactly two pebbles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparkPairs {
    /// `|S|` times the lower occupancy bound at `i = 2`.
    pub lower: f64,
    /// `|S| (t/n)^2`.
    pub upper: f64,
    /// `|S| Pr[C(v) = 2]`.
    pub exact: f64,
    /// `omega^2 n^(1-2 eps)`.
    pub asymptotic: f64,
}

pub fn expected_spark_pairs(p: &ModelParams) -> Result<SparkPairs> {
    let sparks = p.spark_count() as f64;
    let (lower, upper) = if p.t >= 2 {
        let (l, u) = occupancy_bounds(p.n, p.t, 2)?;
        (sparks * l, sparks * u)
    } else {
        (0.0, 0.0)
    };
    Ok(SparkPairs {
        lower,
        upper,
        exact: sparks * occupancy_pmf(p.n, p.t, 2)?,
        asymptotic: p.omega * p.omega * (p.n as f64).powf(1.0 - 2.0 * p.epsilon),
    })
}

/// Chebyshev with `Var X <= E[X]`: `Pr[|X - E X| > E X / 2] <= 4 / E[X]`.
pub fn chebyshev_bound(expected_pairs: f64) -> Result<f64> {
    if expected_pairs <= 0.0 || expected_pairs.is_nan() {
        return Err(PebbleError::UndefinedBound);
    }
    Ok(4.0 / expected_pairs)
}

/// [`chebyshev_bound`] at the exact `E[X] = |S| Pr[C(v) = 2]`.
pub fn chebyshev_failure_bound(p: &ModelParams) -> Result<f64> {
    chebyshev_bound(expected_spark_pairs(p)?.exact)
}

/// Upper bounds on the expected spark accumulation `E[A]`, loosest last.
///
/// With `q = omega n^eps`:
/// `series = |S| / q^2 * sum_k (k+1) / q^k = |S| / (q-1)^2`,
/// `leading = 2 |S| / q^2`, `simplified = 2 n^(1-2eps) / omega^2`.
/// `leading` dominates `series` only once `q >= 2 + sqrt 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccumulationBounds {
    pub exact: f64,
    pub series: f64,
    pub leading: f64,
    pub simplified: f64,
}

pub fn expected_accumulation_bound(p: &ModelParams) -> Result<AccumulationBounds> {
    let q = p.scale();
    if q <= 2.0 {
        return Err(PebbleError::DivergentSeries { ratio: q });
    }
    let sparks = p.spark_count() as f64;
    Ok(AccumulationBounds {
        exact: expected_accumulation(p.n, p.m, p.t)?,
        series: sparks / ((q - 1.0) * (q - 1.0)),
        leading: 2.0 * sparks / (q * q),
        simplified: 2.0 * (p.n as f64).powf(1.0 - 2.0 * p.epsilon) / (p.omega * p.omega),
    })
}

fn check_fuse(n: u64, m: u64) -> Result<()> {
    if m < 1 || m > n {
        return Err(invalid(format!("wick length m={m} must lie in 1..={n}")));
    }
    Ok(())
}

/// `E[A] = |S| sum_{i>=2} floor(i/2) Pr[C(v) = i]`, exact.
pub fn exact_expected_accumulation(n: u64, m: u64, t: u64) -> Result<BigRational> {
    check_fuse(n, m)?;
    let mut sum = BigRational::zero();
    for i in 2..=t {
        sum += occupancy_pmf_exact(n, t, i)? * BigRational::from_integer((i / 2).into());
    }
    Ok(sum * BigRational::from_integer((n - m).into()))
}

/// Floating `E[A]`, walking the pmf by its term ratio `(t-i)/(n+t-2-i)`.
pub fn expected_accumulation(n: u64, m: u64, t: u64) -> Result<f64> {
    check_fuse(n, m)?;
    if n + t <= EXACT_MODE_LIMIT {
        return exact_expected_accumulation(n, m, t).map(|r| to_f64(&r));
    }
    if n == m {
        return Ok(0.0);
    }
    let (nf, tf) = (n as f64, t as f64);
    let mut pmf = (nf - 1.0) / (nf + tf - 1.0);
    let mut sum = 0.0;
    for i in 0..t {
        pmf *= (tf - i as f64) / (nf + tf - 2.0 - i as f64);
        let k = i + 1;
        let term = (k / 2) as f64 * pmf;
        sum += term;
        if pmf == 0.0 || (i > 2 && term < sum * 1e-18) {
            break;
        }
    }
    Ok((n - m) as f64 * sum)
}

/// `E[Y] = (t/n) sum_{k<m} 2^-k + E[A] / 2^(m-1)`, exact.
pub fn exact_expected_certificate(n: u64, m: u64, t: u64) -> Result<BigRational> {
    check_fuse(n, m)?;
    let occupancy = expected_occupancy(n, t)?;
    let pow = BigRational::from_integer(BigInt::one() << (m - 1));
    let geometric = (BigRational::from_integer(BigInt::from(2)) * &pow - BigRational::one()) / &pow;
    Ok(occupancy * geometric + exact_expected_accumulation(n, m, t)? / pow)
}

pub fn expected_certificate(n: u64, m: u64, t: u64) -> Result<f64> {
    check_fuse(n, m)?;
    let geometric = 2.0 - 2f64.powi(1 - m.min(1100) as i32);
    Ok(t as f64 / n as f64 * geometric
        + expected_accumulation(n, m, t)? / 2f64.powi((m - 1).min(1100) as i32))
}

/// Bounds on `E[Y]` and, through Markov, on `Pr[Y >= 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateBound {
    /// `2 / (n^eps omega) + 4 / omega^2`.
    pub asymptotic: f64,
    /// Exact `E[Y]` at this point.
    pub exact: f64,
    /// `min(1, E[Y])`, bounding the probability that `v1` is reachable.
    pub markov: f64,
}

pub fn expected_certificate_bound(p: &ModelParams) -> Result<CertificateBound> {
    let nf = p.n as f64;
    let asymptotic = 2.0 / (nf.powf(p.epsilon) * p.omega) + 4.0 / (p.omega * p.omega);
    let exact = expected_certificate(p.n, p.m, p.t)?;
    Ok(CertificateBound {
        asymptotic,
        exact,
        markov: exact.min(1.0),
    })
}
