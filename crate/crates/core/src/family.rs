//! Graph families for threshold experiments, parsed from short spec strings.
//!
//! | spec           | graph on `n` vertices                         |
//! |----------------|-----------------------------------------------|
//! | `fuse-eps:E`   | `F(max(1, round((1 - 2E) lg n)), n)`          |
//! | `fuse-m:M`     | `F(M, n)`                                     |
//! | `path`         | `P_n`                                         |
//! | `star`         | `K_{1, n-1}`                                  |

use crate::error::{invalid, Result};
use crate::graph::{build_fuse, build_path, build_star, wick_length_for_epsilon, Graph};

pub trait GraphFamily: Send + Sync {
    /// Canonical spec string; parsing it returns an equal family.
    fn name(&self) -> String;

    /// Wick length of the member on `n` vertices (`n` for paths, 1 for stars).
    fn wick_length(&self, n: usize) -> Result<usize>;

    fn build(&self, n: usize) -> Result<Graph>;

    /// `epsilon` when the family is indexed by it.
    fn epsilon(&self) -> Option<f64> {
        None
    }

    /// A pebble count from which to start bracketing the threshold. Every
    /// graph needs on the order of `sqrt n` random pebbles before any vertex
    /// holds two.
    fn threshold_hint(&self, n: usize) -> u64 {
        ((n as f64).sqrt() / 2.0).floor().max(1.0) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuseByEpsilon {
    pub epsilon: f64,
}

impl FuseByEpsilon {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&epsilon) {
            return Err(invalid(format!("epsilon={epsilon} must lie in [0, 1/2)")));
        }
        Ok(Self { epsilon })
    }
}

impl GraphFamily for FuseByEpsilon {
    fn name(&self) -> String {
        format!("fuse-eps:{}", self.epsilon)
    }

    fn wick_length(&self, n: usize) -> Result<usize> {
        wick_length_for_epsilon(self.epsilon, n)
    }

    fn build(&self, n: usize) -> Result<Graph> {
        build_fuse(self.wick_length(n)?, n)
    }

    fn epsilon(&self) -> Option<f64> {
        Some(self.epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuseFixedWick {
    pub m: usize,
}

impl GraphFamily for FuseFixedWick {
    fn name(&self) -> String {
        format!("fuse-m:{}", self.m)
    }

    fn wick_length(&self, n: usize) -> Result<usize> {
        if self.m > n {
            return Err(invalid(format!("wick length {} exceeds n={n}", self.m)));
        }
        Ok(self.m)
    }

    fn build(&self, n: usize) -> Result<Graph> {
        build_fuse(self.m, n)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PathFamily;

impl GraphFamily for PathFamily {
    fn name(&self) -> String {
        "path".into()
    }

    fn wick_length(&self, n: usize) -> Result<usize> {
        Ok(n)
    }

    fn build(&self, n: usize) -> Result<Graph> {
        build_path(n)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StarFamily;

impl GraphFamily for StarFamily {
    fn name(&self) -> String {
        "star".into()
    }

    fn wick_length(&self, _n: usize) -> Result<usize> {
        Ok(1)
    }

    fn build(&self, n: usize) -> Result<Graph> {
        build_star(n)
    }
}

pub fn family_from_spec(spec: &str) -> Result<Box<dyn GraphFamily>> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    match (kind, arg) {
        ("fuse-eps", Some(a)) => {
            let eps = a
                .parse::<f64>()
                .map_err(|e| invalid(format!("bad epsilon {a:?}: {e}")))?;
            Ok(Box::new(FuseByEpsilon::new(eps)?))
        }
        ("fuse-m", Some(a)) => {
            let m = a
                .parse::<usize>()
                .map_err(|e| invalid(format!("bad wick length {a:?}: {e}")))?;
            if m < 1 {
                return Err(invalid("wick length must be positive"));
            }
            Ok(Box::new(FuseFixedWick { m }))
        }
        ("path", None) => Ok(Box::new(PathFamily)),
        ("star", None) => Ok(Box::new(StarFamily)),
        _ => Err(invalid(format!(
            "unknown family {spec:?}; expected fuse-eps:E, fuse-m:M, path or star"
        ))),
    }
}
