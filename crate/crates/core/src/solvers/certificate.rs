//! Weight certificate for rooting a fuse at the far wick end `v1`.
//!
//! Sparks can deliver `A = sum over sparks s of floor(C(s) / 2)` pebbles to
//! the center `vm`. The weight
//!
//! ```text
//! Y = sum_{k=0}^{m-1} C(v_{k+1}) / 2^k  +  A / 2^{m-1}
//! ```
//!
//! halves at every wick edge. `Y >= 1` exactly when `v1` can be reached.
//! `Y` is a dyadic rational and is kept exact so the boundary `Y = 1` is
//! never blurred by rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{invalid, Result};
use crate::graph::FuseSpec;
use crate::sampling::Configuration;

/// Exact `numer / 2^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    numer: BigUint,
    exponent: u64,
}

impl Dyadic {
    pub fn new(numer: BigUint, exponent: u64) -> Self {
        Self { numer, exponent }
    }

    pub fn numer(&self) -> &BigUint {
        &self.numer
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// `self >= 1`.
    pub fn at_least_one(&self) -> bool {
        self.numer.bits() > self.exponent
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numer.clone()),
            BigInt::from(BigUint::from(1u32) << self.exponent),
        )
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.numer.bits().saturating_sub(60);
        let top = (&self.numer >> shift).to_f64().unwrap_or(f64::INFINITY);
        top * 2f64.powi(shift as i32 - self.exponent as i32)
    }

    /// Lowest-terms `(numerator, denominator)`.
    pub fn reduced(&self) -> (BigUint, BigUint) {
        if self.numer.is_zero() {
            return (BigUint::zero(), BigUint::from(1u32));
        }
        let shift = self.numer.trailing_zeros().unwrap_or(0).min(self.exponent);
        (
            &self.numer >> shift,
            BigUint::from(1u32) << (self.exponent - shift),
        )
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.reduced();
        write!(f, "{p}/{q}")
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = &self.numer << (e - self.exponent);
        let b = &other.numer << (e - other.exponent);
        a.cmp(&b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuseCertificate {
    /// Pebbles the sparks can push onto the center, `A`.
    pub accumulation: u64,
    /// The weight `Y`.
    pub weight: Dyadic,
    /// `Y >= 1`.
    pub v1_solvable: bool,
}

pub fn fuse_certificate(fuse: &FuseSpec, c: &Configuration) -> Result<FuseCertificate> {
    if c.n() != fuse.n() {
        return Err(invalid(format!(
            "configuration has {} vertices, fuse has {}",
            c.n(),
            fuse.n()
        )));
    }
    let m = fuse.m();
    let accumulation: u64 = fuse.sparks().map(|s| c.get(s) / 2).sum();

    // numer = sum_k C(v_{k+1}) * 2^(m-1-k) + A, accumulated limb by limb.
    let mut limbs = vec![0u64; m / 64 + 3];
    for k in fuse.wick() {
        add_shifted(&mut limbs, c.get(k), m - 1 - k);
    }
    add_shifted(&mut limbs, accumulation, 0);
    let digits: Vec<u32> = limbs
        .iter()
        .flat_map(|&l| [l as u32, (l >> 32) as u32])
        .collect();
    let weight = Dyadic::new(BigUint::new(digits), (m - 1) as u64);
    Ok(FuseCertificate {
        accumulation,
        v1_solvable: weight.at_least_one(),
        weight,
    })
}

fn add_shifted(limbs: &mut [u64], value: u64, shift: usize) {
    if value == 0 {
        return;
    }
    let (word, bit) = (shift / 64, shift % 64);
    let wide = (value as u128) << bit;
    let mut carry = 0u128;
    let parts = [wide as u64, (wide >> 64) as u64];
    for (i, limb) in limbs.iter_mut().enumerate().skip(word) {
        let add = parts.get(i - word).copied().unwrap_or(0) as u128;
        if add == 0 && carry == 0 && i >= word + 2 {
            break;
        }
        let sum = *limb as u128 + add + carry;
        *limb = sum as u64;
        carry = sum >> 64;
    }
    debug_assert_eq!(carry, 0, "limb buffer too short");
}
