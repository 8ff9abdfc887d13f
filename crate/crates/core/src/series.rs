//! Truncated Faber-Schauder series: synthesis on points and grids, and
//! coefficient extraction from grid samples.

use rayon::prelude::*;

use crate::basis::{dyadic, level_width, local, position, tent, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::schedule::{CoefficientSchedule, ExplicitTable};

/// Largest grid level materialized by default (2^26 + 1 samples).
pub const DEFAULT_GRID_BUDGET: u32 = 26;

/// `a + b x + Σ_{n <= depth} Σ_i γ_{n,i} σ_{n,i}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchauderSeries {
    pub a: f64,
    pub b: f64,
    pub schedule: CoefficientSchedule,
    pub depth: u32,
}

impl SchauderSeries {
    pub fn new(a: f64, b: f64, schedule: CoefficientSchedule, depth: u32) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::DepthLimit { level: depth, max: MAX_DEPTH });
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter("affine part must be finite".into()));
        }
        Ok(SchauderSeries { a, b, schedule, depth })
    }

    /// Pure series without affine part.
    pub fn from_schedule(schedule: CoefficientSchedule, depth: u32) -> Result<Self> {
        Self::new(0.0, 0.0, schedule, depth)
    }

    /// Series whose coefficients are exactly the given table.
    pub fn from_table(a: f64, b: f64, table: ExplicitTable) -> Result<Self> {
        let depth = table
            .depth()
            .ok_or_else(|| Error::Malformed("empty coefficient table".into()))?;
        Self::new(a, b, CoefficientSchedule::Explicit(table), depth)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(x));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the domain check; `x` must lie in `[0,1]`.
    #[inline]
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        self.affine(x) + self.partial_sum(x, 0, self.depth)
    }

    #[inline]
    fn affine(&self, x: f64) -> f64 {
        self.a + self.b * x
    }

    /// `Σ_{from <= n <= to} γ_{n,i_n(x)} σ_{n,i_n(x)}(x)`.
    #[inline]
    pub fn partial_sum(&self, x: f64, from: u32, to: u32) -> f64 {
        let mut sum = 0.0;
        for n in from..=to {
            let i = position(n, x);
            let s = tent(local(n, i, x));
            debug_assert!(i + 1 >= level_width(n) || tent(local(n, i + 1, x)) == 0.0);
            if s != 0.0 {
                sum += self.schedule.coefficient(n, i) * s;
            }
        }
        sum
    }

    /// Samples at `j / 2^level`, bit-identical to pointwise [`eval`](Self::eval).
    pub fn eval_grid(&self, level: u32) -> Result<SampleGrid> {
        self.eval_grid_with_budget(level, DEFAULT_GRID_BUDGET)
    }

    pub fn eval_grid_with_budget(&self, level: u32, budget: u32) -> Result<SampleGrid> {
        if level > budget {
            return Err(Error::Capacity { level, budget });
        }
        let h = dyadic(level);
        let values = (0..=level_width(level))
            .into_par_iter()
            .map(|j| self.eval_unchecked(j as f64 * h))
            .collect();
        Ok(SampleGrid { level, values })
    }

    /// Upper bound on `sup_x |f_∞(x) - f_depth(x)|`, i.e. `Σ_{n > depth} Δ_n`.
    pub fn tail_bound(&self) -> Result<f64> {
        let t = self.schedule.tail_sum(self.depth + 1);
        if t.is_finite() {
            Ok(t)
        } else {
            Err(Error::NotSummable(format!("tail beyond level {} diverges", self.depth)))
        }
    }

    /// Lipschitz constant of the truncation: `|b| + 2 Σ_{n <= depth} 2^n Δ_n`.
    pub fn lipschitz_bound(&self) -> f64 {
        let levels: f64 = (0..=self.depth)
            .map(|n| {
                let (lo, hi) = self.schedule.level_range(n);
                crate::basis::pow2(n) * lo.abs().max(hi.abs())
            })
            .sum();
        self.b.abs() + 2.0 * levels
    }
}

/// Samples `value[j] = f(j / 2^level)`, `j = 0..=2^level`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    level: u32,
    values: Vec<f64>,
}

impl SampleGrid {
    pub fn new(level: u32, values: Vec<f64>) -> Result<Self> {
        if level > MAX_DEPTH {
            return Err(Error::DepthLimit { level, max: MAX_DEPTH });
        }
        if values.len() as u64 != level_width(level) + 1 {
            return Err(Error::Malformed(format!(
                "grid of level {level} needs {} samples, got {}",
                level_width(level) + 1,
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Malformed(format!("sample {j} is not finite")));
        }
        Ok(SampleGrid { level, values })
    }

    /// Samples an arbitrary function on the grid.
    pub fn sample(level: u32, f: impl Fn(f64) -> f64 + Sync) -> Result<Self> {
        if level > DEFAULT_GRID_BUDGET {
            return Err(Error::Capacity { level, budget: DEFAULT_GRID_BUDGET });
        }
        let h = dyadic(level);
        let values = (0..=level_width(level)).into_par_iter().map(|j| f(j as f64 * h)).collect();
        Self::new(level, values)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * dyadic(self.level)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(j, &v)| (self.x(j), v))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

/// Affine part and coefficient table recovered from grid samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub a: f64,
    pub b: f64,
    pub table: ExplicitTable,
}

impl Analysis {
    pub fn into_series(self) -> Result<SchauderSeries> {
        SchauderSeries::from_table(self.a, self.b, self.table)
    }
}

/// Coefficients from samples: `γ_{n,i} = f(mid) - (f(left) + f(right)) / 2`
/// on the level-`n` cell `i`, for `n < level`.
pub fn analyze(grid: &SampleGrid) -> Result<Analysis> {
    let m = grid.level();
    if m == 0 {
        return Err(Error::Precondition("analysis needs a grid of level >= 1".into()));
    }
    let v = grid.values();
    let a = v[0];
    let b = v[v.len() - 1] - v[0];
    let levels = (0..m)
        .map(|n| {
            let step = 1usize << (m - n);
            let half = step / 2;
            (0..level_width(n) as usize)
                .map(|i| {
                    let l = i * step;
                    v[l + half] - 0.5 * (v[l] + v[l + step])
                })
                .collect()
        })
        .collect();
    Ok(Analysis { a, b, table: ExplicitTable::new(levels)? })
}
