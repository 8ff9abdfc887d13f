//! The sets `A_n` of functions with a one-sided `1/n`-Hölder-type point, and
//! the oscillating perturbation that pushes any function out of them.

use crate::error::{Error, Result};
use crate::func::Func;

/// `g(x) = f(x) + ε sin(100 (ε/3)^{-n} x)`.
pub fn escape_perturbation(f: &Func, eps: f64, n: u32) -> Result<Func> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let omega = escape_frequency(eps, n);
    Ok(f.map_with_x(move |x, v| v + eps * (omega * x).sin()))
}

pub fn escape_frequency(eps: f64, n: u32) -> f64 {
    100.0 * (eps / 3.0).powi(-(n as i32))
}

impl Func {
    fn map_with_x(&self, g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Func {
        let f = self.clone();
        Func::new(move |x| g(x, f.eval(x)))
    }
}

/// Outcome of the `A_n` membership test at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// A violating probe on each side that had probes, when not a member.
    pub witness_left: Option<f64>,
    pub witness_right: Option<f64>,
}

/// Probes per side: half on a geometric ladder towards `x0`, half uniform.
pub const AN_PROBES: usize = 1 << 10;

/// Offsets `d ∈ (0, 1/n)` probed on each side of `x0`.
pub fn an_offsets(n: u32, probes: usize) -> Vec<f64> {
    let reach = 1.0 / n as f64;
    let half = probes / 2;
    let geometric = (1..=half).map(|k| reach * (-(k as f64) / 16.0).exp2());
    let uniform = (1..=probes - half).map(|j| reach * j as f64 / (probes - half + 1) as f64);
    geometric.chain(uniform).collect()
}

/// Whether `x0` witnesses `f ∈ A_n`: on one side, every probed `y` with
/// `0 < |y - x0| < 1/n` satisfies `|f(x0) - f(y)| < |y - x0|^{1/n}`.
/// A side without any probe inside `[0,1]` cannot serve as witness.
pub fn an_membership_test(f: &Func, n: u32, x0: f64) -> Result<Membership> {
    an_membership_test_with(f, n, x0, AN_PROBES)
}

pub fn an_membership_test_with(f: &Func, n: u32, x0: f64, probes: usize) -> Result<Membership> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::Domain(x0));
    }
    let offsets = an_offsets(n, probes);
    let f0 = f.eval(x0);
    let inv = 1.0 / n as f64;
    let side = |sign: f64| -> Option<Option<f64>> {
        let mut any = false;
        for &d in &offsets {
            let y = x0 + sign * d;
            if !(0.0..=1.0).contains(&y) || y == x0 {
                continue;
            }
            any = true;
            let dist = (y - x0).abs();
            if (f0 - f.eval(y)).abs() >= dist.powf(inv) {
                return Some(Some(y));
            }
        }
        // None: side had no probes; Some(None): all probes satisfied the bound.
        any.then_some(None)
    };
    let left = side(-1.0);
    let right = side(1.0);
    let member = matches!(left, Some(None)) || matches!(right, Some(None));
    Ok(Membership {
        member,
        witness_left: left.flatten(),
        witness_right: right.flatten(),
    })
}
