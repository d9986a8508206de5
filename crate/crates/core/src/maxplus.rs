//! Extended integers and the smooth maximum used by the limit probe.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::check_guard;

/// An element of ℤ ∪ {−∞, +∞}, ordered in the obvious way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtInt {
    NegInf,
    Finite(i64),
    PosInf,
}

impl ExtInt {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtInt::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Finite(x) => Some(x),
            _ => None,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> ExtInt {
        match self {
            ExtInt::NegInf => ExtInt::PosInf,
            ExtInt::Finite(x) => ExtInt::Finite(-x),
            ExtInt::PosInf => ExtInt::NegInf,
        }
    }

    /// `self + x` for a finite `x`; infinities absorb.
    pub fn add_finite(self, x: i64) -> ExtInt {
        match self {
            ExtInt::Finite(y) => ExtInt::Finite(y + x),
            other => other,
        }
    }
}

impl From<i64> for ExtInt {
    fn from(x: i64) -> Self {
        ExtInt::Finite(x)
    }
}

impl PartialOrd for ExtInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtInt {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtInt::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
        }
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => write!(f, "-inf"),
            ExtInt::Finite(x) => write!(f, "{x}"),
            ExtInt::PosInf => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(ExtInt::PosInf),
            "-inf" | "-infinity" => Ok(ExtInt::NegInf),
            t => {
                let x: i64 = t
                    .parse()
                    .map_err(|_| Error::validation(format!("not an extended integer: {s:?}")))?;
                Ok(ExtInt::Finite(check_guard(x)?))
            }
        }
    }
}

/// Maximum of finite integers and one extended integer term. The finite
/// list must be non-empty, so the result is finite unless `extra` is +∞.
pub(crate) fn max_with(finite: &[i64], extra: ExtInt) -> ExtInt {
    let m = finite.iter().copied().max().expect("at least one finite term");
    ExtInt::Finite(m).max(extra)
}

/// `λ·ln Σ exp(x_i/λ)`, evaluated around the largest term.
pub fn log_sum_exp(xs: &[f64], lambda: f64) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let mut tail = 0.0;
    let mut seen_max = false;
    for &x in xs {
        if x == m && !seen_max {
            seen_max = true;
            continue;
        }
        tail += ((x - m) / lambda).exp();
    }
    m + lambda * tail.ln_1p()
}
