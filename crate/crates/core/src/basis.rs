//! The Faber-Schauder tent functions.
//!
//! `σ(t)` is the unit tent supported on `[0,1]` with peak 1 at `t = 1/2`, and
//! `σ_{n,i}(x) = σ(2^n x - i)` for `0 <= i < 2^n`. On every level exactly one
//! tent is non-zero at an interior point, which is what makes pointwise
//! evaluation of a series cost O(depth).

use crate::error::{Error, Result};

/// Deepest level supported. Dyadic points `j / 2^M` stay exact in binary64
/// well past this, so every grid and every tent breakpoint below it is exact.
pub const MAX_DEPTH: u32 = 50;

/// Address `(n, i)` of the tent `σ_{n,i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub n: u32,
    pub i: u64,
}

impl BasisIndex {
    pub fn new(n: u32, i: u64) -> Result<Self> {
        if n > MAX_DEPTH {
            return Err(Error::DepthLimit { level: n, max: MAX_DEPTH });
        }
        if i >= level_width(n) {
            return Err(Error::InvalidIndex { n, i });
        }
        Ok(BasisIndex { n, i })
    }

    /// Support `[i/2^n, (i+1)/2^n]` of the tent.
    pub fn support(&self) -> (f64, f64) {
        let w = dyadic(self.n);
        (self.i as f64 * w, (self.i + 1) as f64 * w)
    }

    pub fn midpoint(&self) -> f64 {
        (2 * self.i + 1) as f64 * dyadic(self.n + 1)
    }

    pub fn children(&self) -> [BasisIndex; 2] {
        [
            BasisIndex { n: self.n + 1, i: 2 * self.i },
            BasisIndex { n: self.n + 1, i: 2 * self.i + 1 },
        ]
    }
}

/// Number of tents on level `n`.
#[inline]
pub fn level_width(n: u32) -> u64 {
    1u64 << n
}

/// `2^-n`, exact.
#[inline]
pub fn dyadic(n: u32) -> f64 {
    if n == 0 {
        1.0
    } else {
        f64::from_bits((1023 - n as u64) << 52)
    }
}

/// `2^n`, exact.
#[inline]
pub fn pow2(n: u32) -> f64 {
    f64::from_bits((1023 + n as u64) << 52)
}

/// The unit tent.
#[inline]
pub fn tent(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else if t <= 0.5 {
        2.0 * t
    } else {
        2.0 - 2.0 * t
    }
}

/// The unique position on level `n` whose tent can be non-zero at `x`;
/// `x = 1` clamps to the last cell.
#[inline]
pub fn position(n: u32, x: f64) -> u64 {
    let scaled = (x * pow2(n)).floor();
    let last = level_width(n) - 1;
    if scaled <= 0.0 {
        0
    } else {
        (scaled as u64).min(last)
    }
}

/// Local coordinate `2^n x - i` of `x` inside cell `i` of level `n`.
#[inline]
pub fn local(n: u32, i: u64, x: f64) -> f64 {
    x * pow2(n) - i as f64
}

pub fn basis_eval(idx: BasisIndex, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(x));
    }
    BasisIndex::new(idx.n, idx.i)?;
    Ok(tent(local(idx.n, idx.i, x)))
}
