//! Pebble configurations and the two random placement models.
//!
//! The dependent model draws a configuration uniformly from all
//! `C(n + t - 1, t)` multisets of size `t` over `n` vertices. Under stars and
//! bars this is a uniform choice of which `n - 1` of `n + t - 1` slots hold
//! bars; the gaps between bars are the vertex counts. The independent model
//! drops each pebble on a uniformly random vertex.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{invalid, PebbleError, Result};

/// A multiset of pebbles as per-vertex counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    counts: Vec<u64>,
    total: u64,
}

impl Configuration {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        let total = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| invalid("pebble total overflows u64"))?;
        Ok(Self { counts, total })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            counts: vec![0; n],
            total: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, v: usize) -> u64 {
        self.counts[v]
    }

    /// Returns a copy with one more pebble on `v`.
    pub fn with_added(&self, v: usize) -> Self {
        let mut counts = self.counts.clone();
        counts[v] += 1;
        Self {
            counts,
            total: self.total + 1,
        }
    }

    /// Applies one pebbling step `from -> to`: two pebbles leave `from`, one
    /// arrives at `to`. Adjacency is the caller's concern.
    pub fn step(&self, from: usize, to: usize) -> Option<Self> {
        if self.counts[from] < 2 {
            return None;
        }
        let mut counts = self.counts.clone();
        counts[from] -= 2;
        counts[to] += 1;
        Some(Self {
            counts,
            total: self.total - 1,
        })
    }

    /// Parses `"v:count"` pairs (1-indexed, whitespace separated) for a graph on `n` vertices.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut counts = vec![0u64; n];
        let mut seen = vec![false; n];
        for tok in text.split_whitespace() {
            let (v, c) = tok
                .split_once(':')
                .ok_or_else(|| PebbleError::Parse(format!("expected v:count, got {tok:?}")))?;
            let v: usize = v
                .parse()
                .map_err(|e| PebbleError::Parse(format!("{tok:?}: {e}")))?;
            let c: u64 = c
                .parse()
                .map_err(|e| PebbleError::Parse(format!("{tok:?}: {e}")))?;
            if v == 0 || v > n {
                return Err(PebbleError::Parse(format!(
                    "vertex v{v} outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(PebbleError::Parse(format!("vertex v{v} listed twice")));
            }
            counts[v - 1] = c;
        }
        Self::new(counts)
    }
}

impl fmt::Display for Configuration {
    /// `"v:count"` pairs, 1-indexed, zeros omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{}:{}", v + 1, c)?;
            first = false;
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of labels into a seed, so that sub-experiments (one per
/// `(n, t)` point, say) get streams that do not overlap.
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(mix64(master), |acc, &l| mix64(acc ^ mix64(l)))
}

/// Per-trial generator state as a pure function of `(master_seed, trial_index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedPolicy {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedPolicy {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix64(self.master_seed ^ mix64(self.trial_index)))
    }
}

/// A random placement model, selectable by name.
pub trait Sampler: Send + Sync {
    fn name(&self) -> &'static str;

    fn draw(&self, n: usize, t: u64, rng: &mut ChaCha8Rng) -> Configuration;

    fn sample(&self, n: usize, t: u64, seed: SeedPolicy) -> Configuration {
        self.draw(n, t, &mut seed.rng())
    }
}

/// Uniform over all `C(n + t - 1, t)` multisets.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dependent;

/// Each pebble lands on a uniform vertex independently (multinomial counts).
#[derive(Debug, Clone, Copy, Default)]
pub struct Independent;

/// Largest slot count for which the bitmap path is used.
const BITMAP_LIMIT: u64 = 1 << 30;

impl Sampler for Dependent {
    fn name(&self) -> &'static str {
        "dependent"
    }

    fn draw(&self, n: usize, t: u64, rng: &mut ChaCha8Rng) -> Configuration {
        assert!(n >= 1, "need at least one vertex");
        let mut counts = vec![0u64; n];
        if n == 1 {
            counts[0] = t;
            return Configuration { counts, total: t };
        }
        let bars = (n - 1) as u64;
        let slots = bars + t;
        // Pick whichever of {bars, stars} is smaller; its complement is
        // uniform too.
        let pick_stars = t < bars;
        let k = bars.min(t);
        let chosen = sorted_subset(slots, k, rng);
        if pick_stars {
            // The j-th star (0-based) sits after chosen[j] - j bars.
            for (j, &p) in chosen.iter().enumerate() {
                counts[(p - j as u64) as usize] += 1;
            }
        } else {
            let mut prev = None::<u64>;
            for (i, &b) in chosen.iter().enumerate() {
                counts[i] = match prev {
                    None => b,
                    Some(p) => b - p - 1,
                };
                prev = Some(b);
            }
            counts[n - 1] = slots - 1 - prev.expect("n >= 2 means at least one bar");
        }
        Configuration { counts, total: t }
    }
}

impl Sampler for Independent {
    fn name(&self) -> &'static str {
        "independent"
    }

    fn draw(&self, n: usize, t: u64, rng: &mut ChaCha8Rng) -> Configuration {
        assert!(n >= 1, "need at least one vertex");
        let mut counts = vec![0u64; n];
        if t <= n as u64 {
            for _ in 0..t {
                counts[rng.random_range(0..n)] += 1;
            }
        } else {
            // Conditional binomials: vertex i takes Bin(remaining, 1/(n - i)).
            let mut remaining = t;
            for (i, slot) in counts.iter_mut().enumerate().take(n - 1) {
                if remaining == 0 {
                    break;
                }
                let p = 1.0 / (n - i) as f64;
                let draw = Binomial::new(remaining, p)
                    .expect("p lies in (0, 1]")
                    .sample(rng);
                *slot = draw;
                remaining -= draw;
            }
            counts[n - 1] += remaining;
        }
        Configuration { counts, total: t }
    }
}

/// Uniform `k`-subset of `0..slots`, returned sorted.
///
/// Floyd's algorithm; membership lives in a bitmap when `slots` is small
/// enough to scan, otherwise in a hash set followed by a sort. Either way the
/// cost is `O(k + slots / 64)` or `O(k log k)`.
fn sorted_subset<R: Rng + ?Sized>(slots: u64, k: u64, rng: &mut R) -> Vec<u64> {
    debug_assert!(k <= slots);
    if slots <= BITMAP_LIMIT {
        let mut bits = vec![0u64; slots.div_ceil(64) as usize];
        for j in (slots - k)..slots {
            let r = rng.random_range(0..=j);
            let pick = if bits[(r / 64) as usize] >> (r % 64) & 1 == 1 {
                j
            } else {
                r
            };
            bits[(pick / 64) as usize] |= 1 << (pick % 64);
        }
        let mut out = Vec::with_capacity(k as usize);
        for (w, &word) in bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                out.push(w as u64 * 64 + word.trailing_zeros() as u64);
                word &= word - 1;
            }
        }
        out
    } else {
        let mut set = HashSet::with_capacity(k as usize);
        for j in (slots - k)..slots {
            let r = rng.random_range(0..=j);
            if !set.insert(r) {
                set.insert(j);
            }
        }
        let mut out: Vec<u64> = set.into_iter().collect();
        out.sort_unstable();
        out
    }
}

pub fn sample_dependent(n: usize, t: u64, seed: SeedPolicy) -> Configuration {
    Dependent.sample(n, t, seed)
}

pub fn sample_independent(n: usize, t: u64, seed: SeedPolicy) -> Configuration {
    Independent.sample(n, t, seed)
}

static DEPENDENT: Dependent = Dependent;
static INDEPENDENT: Independent = Independent;

pub const SAMPLER_NAMES: [&str; 2] = ["dependent", "independent"];

pub fn sampler_by_name(name: &str) -> Result<&'static dyn Sampler> {
    match name {
        "dependent" => Ok(&DEPENDENT),
        "independent" => Ok(&INDEPENDENT),
        other => Err(invalid(format!(
            "unknown placement model {other:?}; expected one of {SAMPLER_NAMES:?}"
        ))),
    }
}

/// Number of configurations of `t` pebbles on `n` vertices, `C(n + t - 1, t)`.
pub fn count_configurations(n: u64, t: u64) -> BigUint {
    assert!(n >= 1, "need at least one vertex");
    binomial(n + t - 1, t)
}

pub(crate) fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::ZERO;
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Every configuration of `t` pebbles on `n` vertices, in reverse
/// lexicographic order of the count vector.
pub fn all_configurations(n: usize, t: u64) -> impl Iterator<Item = Configuration> {
    let mut state: Option<Vec<u64>> = if n == 0 {
        None
    } else {
        let mut first = vec![0; n];
        first[0] = t;
        Some(first)
    };
    std::iter::from_fn(move || {
        let current = state.take()?;
        state = next_composition(&current);
        Some(Configuration {
            counts: current,
            total: t,
        })
    })
}

fn next_composition(c: &[u64]) -> Option<Vec<u64>> {
    let n = c.len();
    // Find the rightmost nonzero position before the last slot.
    let i = (0..n.saturating_sub(1)).rev().find(|&i| c[i] > 0)?;
    let mut next = c.to_vec();
    let tail = next[n - 1];
    next[n - 1] = 0;
    next[i] -= 1;
    next[i + 1] = tail + 1;
    Some(next)
}
