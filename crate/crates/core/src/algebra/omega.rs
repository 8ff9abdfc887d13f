//! The modulus construction: from `g` with `g(x0) = 0` and
//! `ω(t) = max{|g(x)| : |x - x0| <= t} + t`, the function `(ω^{-1} ∘ g)²`
//! is differentiable at `x0` with derivative 0.

use crate::basis::{dyadic, level_width};
use crate::error::{Error, Result};
use crate::func::Func;

/// Finest supported `t`-grid.
pub const MAX_OMEGA_LEVEL: u32 = 24;

/// `ω` sampled on `t_j = j 2^{-M}`, `j = 0..=2^M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusTable {
    pub x0: f64,
    pub level: u32,
    pub ts: Vec<f64>,
    pub omega: Vec<f64>,
}

impl ModulusTable {
    /// Grid spacing of `t`, also the slack of the `|F∘g| <= |x - x0|` contract.
    pub fn slack(&self) -> f64 {
        dyadic(self.level)
    }

    pub fn max_query(&self) -> f64 {
        *self.omega.last().expect("nonempty")
    }

    /// `ω^{-1}(y)` for `y >= 0` by binary search and linear interpolation.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) || y > self.max_query() {
            return Err(Error::OutOfTable { query: y, max: self.max_query() });
        }
        let j = self.omega.partition_point(|&w| w < y);
        if j == 0 {
            return Ok(0.0);
        }
        let (w0, w1) = (self.omega[j - 1], self.omega[j]);
        let (t0, t1) = (self.ts[j - 1], self.ts[j]);
        Ok(t0 + (y - w0) / (w1 - w0) * (t1 - t0))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,omega\n");
        for (t, w) in self.ts.iter().zip(&self.omega) {
            s += &format!("{},{}\n", crate::io::fmt_f64(*t), crate::io::fmt_f64(*w));
        }
        s
    }
}

/// Running maximum of `|g(x0 ± t_j)|` (window clamped to `[0,1]`) plus `t_j`.
pub fn omega_modulus(g: &Func, x0: f64, level: u32) -> Result<ModulusTable> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::Domain(x0));
    }
    if level > MAX_OMEGA_LEVEL {
        return Err(Error::Capacity { level, budget: MAX_OMEGA_LEVEL });
    }
    let g0 = g.eval(x0);
    if !(g0.abs() <= 1e-9) {
        return Err(Error::Precondition(format!("g(x0) = {g0}, expected |g(x0)| <= 1e-9")));
    }
    let h = dyadic(level);
    let n = level_width(level) as usize;
    let ts: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
    let mut omega = Vec::with_capacity(n + 1);
    omega.push(0.0);
    let mut peak = g0.abs();
    for &t in &ts[1..] {
        let l = g.eval((x0 - t).max(0.0)).abs();
        let r = g.eval((x0 + t).min(1.0)).abs();
        peak = peak.max(l).max(r);
        omega.push(peak + t);
    }
    Ok(ModulusTable { x0, level, ts, omega })
}

/// `h = (F ∘ g)²` with `F(y) = sign(y) ω^{-1}(|y|)`.
#[derive(Debug, Clone)]
pub struct DifferentiableElement {
    pub g: Func,
    pub table: ModulusTable,
}

pub fn differentiable_element(g: &Func, x0: f64, table: ModulusTable) -> Result<DifferentiableElement> {
    if table.x0 != x0 {
        return Err(Error::Precondition(format!("table built at x0={}, not {x0}", table.x0)));
    }
    let g0 = g.eval(x0);
    if !(g0.abs() <= 1e-9) {
        return Err(Error::Precondition(format!("g(x0) = {g0}, expected |g(x0)| <= 1e-9")));
    }
    Ok(DifferentiableElement { g: g.clone(), table })
}

impl DifferentiableElement {
    /// `F(g(x))`.
    pub fn inner(&self, x: f64) -> Result<f64> {
        let y = self.g.eval(x);
        Ok(self.table.inverse(y.abs())?.copysign(y))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.inner(x).map(|v| v * v)
    }

    /// The element as an evaluator; queries outside the table give NaN.
    pub fn func(&self) -> Func {
        let me = self.clone();
        Func::new(move |x| me.eval(x).unwrap_or(f64::NAN))
    }

    /// `max_x (|F(g(x))| - |x - x0|)` over the level-`level` grid; at most the
    /// table slack when the contract holds.
    pub fn contract_excess(&self, level: u32) -> Result<f64> {
        let h = dyadic(level);
        (0..=level_width(level))
            .map(|j| {
                let x = j as f64 * h;
                self.inner(x).map(|v| v.abs() - (x - self.table.x0).abs())
            })
            .try_fold(f64::NEG_INFINITY, |m, v| v.map(|v| m.max(v)))
    }

    /// A polynomial `p` with `p ∘ g` uniformly within `tol` of `h`: Chebyshev
    /// interpolation of `y ↦ F(y)²` on `[-ω_max, ω_max]`, doubling the degree
    /// up to `max_degree`.
    pub fn polynomial_approx(&self, tol: f64, max_degree: usize) -> ChebyshevApprox {
        let r = self.table.max_query();
        let table = self.table.clone();
        let target = move |y: f64| {
            let v = table.inverse(y.abs().min(r)).expect("inside table");
            v * v
        };
        ChebyshevApprox::fit(target, -r, r, tol, max_degree)
    }
}

/// A polynomial on `[lo, hi]` in the Chebyshev basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevApprox {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
    /// Max deviation from the target on a uniform check grid.
    pub error: f64,
}

impl ChebyshevApprox {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Interpolates at Chebyshev nodes of degrees 8, 16, ... until the check
    /// error is at most `tol`; returns the last attempt otherwise.
    pub fn fit(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_degree: usize) -> ChebyshevApprox {
        let check: Vec<(f64, f64)> = (0..=4096)
            .map(|j| {
                let y = lo + (hi - lo) * j as f64 / 4096.0;
                (y, f(y))
            })
            .collect();
        let mut d = 8usize.min(max_degree.max(1));
        loop {
            let mut a = ChebyshevApprox::interpolate(&f, lo, hi, d);
            a.error = check.iter().map(|&(y, v)| (a.eval(y) - v).abs()).fold(0.0, f64::max);
            if a.error <= tol || d >= max_degree {
                return a;
            }
            d = (2 * d).min(max_degree);
        }
    }

    fn interpolate(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, d: usize) -> ChebyshevApprox {
        let n = d + 1;
        let theta: Vec<f64> = (0..n).map(|j| std::f64::consts::PI * (j as f64 + 0.5) / n as f64).collect();
        let vals: Vec<f64> = theta.iter().map(|t| f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t.cos())).collect();
        let mut coeffs: Vec<f64> = (0..n)
            .map(|k| 2.0 / n as f64 * theta.iter().zip(&vals).map(|(t, v)| v * (k as f64 * t).cos()).sum::<f64>())
            .collect();
        coeffs[0] *= 0.5;
        ChebyshevApprox { lo, hi, coeffs, error: f64::NAN }
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, y: f64) -> f64 {
        let u = (2.0 * y - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + self.coeffs[0]
    }
}
