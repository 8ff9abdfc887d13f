//! Dyadic covering counts of level sets `{x : f(x) = λ}` by interval
//! branch-and-bound, box-counting slopes, and lacunary series.
//!
//! Cells are the half-open intervals `[a/2^n, (a+1)/2^n)`, the last one closed,
//! so every point of `[0,1]` lies in exactly one cell.

use rayon::prelude::*;

use crate::basis::{level_width, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::regularity::ls_slope;
use crate::schedule::{CoefficientSchedule, LevelLaw};
use crate::series::{SchauderSeries, DEFAULT_GRID_BUDGET};

/// Counts at one level: `n_upper` cells could not be excluded from meeting
/// the level set of the limit function, `n_lower` cells have a certified
/// crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverCount {
    pub level: u32,
    pub n_lower: u64,
    pub n_upper: u64,
}

/// Enclosure data for one series and level value.
struct Enclosure<'a> {
    schedule: &'a CoefficientSchedule,
    depth: u32,
    lambda: f64,
    tail: f64,
    slack: f64,
    /// `low[m]`, `high[m]`: what levels `m..=depth` and the tail can add on a
    /// level-`m` cell on top of its linear part.
    low: Vec<f64>,
    high: Vec<f64>,
}

impl<'a> Enclosure<'a> {
    fn new(s: &'a SchauderSeries, lambda: f64) -> Result<Self> {
        let tail = s.tail_bound()?;
        let d = s.depth as usize;
        let mut low = vec![-tail; d + 2];
        let mut high = vec![tail; d + 2];
        let mut total = s.a.abs() + s.b.abs() + tail;
        for m in (0..=d).rev() {
            let (lo, hi) = s.schedule.level_range(m as u32);
            low[m] = low[m + 1] + lo.min(0.0);
            high[m] = high[m + 1] + hi.max(0.0);
            total += lo.abs().max(hi.abs());
        }
        Ok(Enclosure {
            schedule: &s.schedule,
            depth: s.depth,
            lambda,
            tail,
            slack: 1e-12 * (1.0 + total),
            low,
            high,
        })
    }

    /// Whether the level-`m` cell `i` with truncation values `fu`, `fv` at its
    /// ends may contain a solution. `right_open` drops solutions that sit only
    /// on the right end of the counted cell.
    fn reaches(&self, m: u32, i: u64, fu: f64, fv: f64, right_open: bool) -> bool {
        let k = (m.min(self.depth + 1)) as usize;
        let lo = fu.min(fv) + self.low[k] - self.slack;
        let hi = fu.max(fv) + self.high[k] + self.slack;
        if self.lambda < lo || self.lambda > hi {
            return false;
        }
        if m > self.depth {
            let at_right_only =
                (self.lambda - fv).abs() <= self.slack + self.tail && (self.lambda - fu).abs() > self.slack + self.tail;
            return !(right_open && at_right_only);
        }
        let mid = 0.5 * (fu + fv) + self.schedule.coefficient(m, i);
        self.reaches(m + 1, 2 * i, fu, mid, false) || self.reaches(m + 1, 2 * i + 1, mid, fv, right_open)
    }

    /// `f(u) - λ` and `f(v) - λ` of opposite signs beyond `2·tail` (plus
    /// rounding), or an exact hit at `u` with no tail.
    fn crossing(&self, fu: f64, fv: f64) -> bool {
        let margin = 2.0 * self.tail + self.slack;
        let (du, dv) = (fu - self.lambda, fv - self.lambda);
        (du.abs() > margin && dv.abs() > margin && (du < 0.0) != (dv < 0.0)) || (self.tail == 0.0 && du == 0.0)
    }
}

/// Cover counts at level `n` for the limit of `s`, certified through the
/// truncation and its tail bound.
pub fn cover_count(s: &SchauderSeries, lambda: f64, n: u32) -> Result<CoverCount> {
    if !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("level must be finite, got {lambda}")));
    }
    if n > DEFAULT_GRID_BUDGET {
        return Err(Error::Capacity { level: n, budget: DEFAULT_GRID_BUDGET });
    }
    let enc = Enclosure::new(s, lambda)?;
    let v = refined_values(s, n);
    let cells = level_width(n);
    let (n_lower, n_upper) = (0..cells)
        .into_par_iter()
        .map(|a| {
            let (fu, fv) = (v[a as usize], v[a as usize + 1]);
            let upper = enc.reaches(n, a, fu, fv, a + 1 < cells);
            let lower = upper && enc.crossing(fu, fv);
            (lower as u64, upper as u64)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(CoverCount { level: n, n_lower, n_upper })
}

/// Values of the truncation at `j/2^n` by midpoint refinement: each new
/// value is the mean of its neighbours plus the coefficient of its tent.
fn refined_values(s: &SchauderSeries, n: u32) -> Vec<f64> {
    let mut v = vec![s.a, s.a + s.b];
    for m in 0..n {
        let next: Vec<f64> = (0..level_width(m + 1) + 1)
            .into_par_iter()
            .map(|j| {
                let i = j / 2;
                if j % 2 == 0 {
                    v[i as usize]
                } else {
                    let g = if m <= s.depth { s.schedule.coefficient(m, i) } else { 0.0 };
                    0.5 * (v[i as usize] + v[i as usize + 1]) + g
                }
            })
            .collect();
        v = next;
    }
    v
}

pub fn cover_counts(s: &SchauderSeries, lambda: f64, levels: impl IntoIterator<Item = u32>) -> Result<Vec<CoverCount>> {
    levels.into_iter().map(|n| cover_count(s, lambda, n)).collect()
}

pub fn counts_csv(counts: &[CoverCount]) -> String {
    let mut s = String::from("n,N_lower,N_upper\n");
    for c in counts {
        s += &format!("{},{},{}\n", c.level, c.n_lower, c.n_upper);
    }
    s
}

/// Least-squares slopes of `log₂ N` against `n`, clamped to `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionFit {
    pub levels: Vec<u32>,
    pub counts: Vec<CoverCount>,
    pub slope_upper: f64,
    pub slope_lower: f64,
    /// Every upper count vanished: the level set is empty at these scales.
    pub empty: bool,
    /// Fewer than two levels had a positive lower count.
    pub lower_undefined: bool,
}

impl DimensionFit {
    pub fn to_kv(&self) -> String {
        let levels: Vec<String> = self.levels.iter().map(u32::to_string).collect();
        format!(
            "levels={}\nslope_upper={}\nslope_lower={}\nempty={}\nlower_undefined={}\n",
            levels.join(","),
            self.slope_upper,
            self.slope_lower,
            self.empty,
            self.lower_undefined
        )
    }
}

fn count_slope(counts: &[CoverCount], pick: impl Fn(&CoverCount) -> u64) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = counts
        .iter()
        .filter(|c| pick(c) > 0)
        .map(|c| (c.level as f64, (pick(c) as f64).log2()))
        .unzip();
    (xs.len() >= 2).then(|| ls_slope(&xs, &ys).clamp(0.0, 1.0))
}

pub fn dimension_fit(counts: &[CoverCount]) -> Result<DimensionFit> {
    if counts.len() < 4 {
        return Err(Error::Precondition(format!("dimension fit needs at least 4 levels, got {}", counts.len())));
    }
    let empty = counts.iter().all(|c| c.n_upper == 0);
    let upper = count_slope(counts, |c| c.n_upper);
    let lower = count_slope(counts, |c| c.n_lower);
    Ok(DimensionFit {
        levels: counts.iter().map(|c| c.level).collect(),
        counts: counts.to_vec(),
        slope_upper: upper.unwrap_or(0.0),
        slope_lower: lower.unwrap_or(0.0),
        empty,
        lower_undefined: lower.is_none(),
    })
}

/// `Σ_k Σ_i 2^{-n_k} σ_{n_k,i}`, truncated at `min(n_last, depth_cap)`.
/// Returns warnings when the ratios `n_{k+1}/n_k` do not increase.
pub fn lacunary_series(levels: &[u32], depth_cap: u32) -> Result<(SchauderSeries, Vec<String>)> {
    if levels.is_empty() {
        return Err(Error::InvalidParameter("lacunary series needs at least one level".into()));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("levels must increase strictly: {levels:?}")));
    }
    let mut warnings = Vec::new();
    let ratios: Vec<f64> = levels.windows(2).map(|w| w[1] as f64 / w[0].max(1) as f64).collect();
    if ratios.windows(2).any(|r| r[1] <= r[0]) {
        warnings.push(format!("ratios n_(k+1)/n_k {ratios:?} do not increase; the dimension-0 hypothesis fails"));
    }
    let depth = levels[levels.len() - 1].min(depth_cap).min(MAX_DEPTH);
    let schedule = CoefficientSchedule::lacunary(levels.to_vec(), LevelLaw::Power { beta: 1.0 })?;
    Ok((SchauderSeries::from_schedule(schedule, depth)?, warnings))
}

/// One instance of `N_{K+1} <= 3 N_K + 2^{n_K - n_{K+1}} N_{K-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionRow {
    pub k: usize,
    pub lhs: u64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks the covering recursion with multiplicative `slack` on the right,
/// `counts[k]` being the count at level `levels[k]`.
pub fn recursion_check(levels: &[u32], counts: &[u64], slack: f64) -> Vec<RecursionRow> {
    (1..levels.len().saturating_sub(1))
        .map(|k| {
            let gap = levels[k] as f64 - levels[k + 1] as f64;
            let rhs = slack * (3.0 * counts[k] as f64 + gap.exp2() * counts[k - 1] as f64);
            RecursionRow { k, lhs: counts[k + 1], rhs, holds: counts[k + 1] as f64 <= rhs }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{named_schedule, ExplicitTable};

    /// Exact count for a truncation with no tail: cells of level `n` meeting
    /// a level-`(depth+1)` segment of `f_D` that reaches `λ`.
    fn exhaustive(s: &SchauderSeries, lambda: f64, n: u32) -> u64 {
        let fine = (s.depth + 1).max(n);
        let g = s.eval_grid(fine).unwrap();
        let v = g.values();
        let per = 1usize << (fine - n);
        let cells = 1usize << n;
        (0..cells)
            .filter(|&a| {
                (a * per..(a + 1) * per).any(|j| {
                    let (u, w) = (v[j], v[j + 1]);
                    let hit = u.min(w) <= lambda && lambda <= u.max(w);
                    let only_right = lambda == w && lambda != u;
                    hit && !(only_right && j + 1 == (a + 1) * per && a + 1 < cells)
                })
            })
            .count() as u64
    }

    #[test]
    fn linear_function() {
        let id = SchauderSeries::new(0.0, 1.0, CoefficientSchedule::zero(), 0).unwrap();
        assert_eq!(cover_count(&id, 0.5, 4).unwrap(), CoverCount { level: 4, n_lower: 1, n_upper: 1 });
        for n in 1..12 {
            let c = cover_count(&id, 0.3, n).unwrap();
            assert_eq!((c.n_lower, c.n_upper), (1, 1));
        }
        let counts = cover_counts(&id, 0.3, 4..10).unwrap();
        assert_eq!(dimension_fit(&counts).unwrap().slope_upper, 0.0);
    }

    #[test]
    fn empty_level() {
        let s = SchauderSeries::from_schedule(named_schedule("takagi", &[]).unwrap(), 20).unwrap();
        let counts = cover_counts(&s, 1.5, 4..9).unwrap();
        assert!(counts.iter().all(|c| c.n_upper == 0));
        assert!(dimension_fit(&counts).unwrap().empty);
        assert!(dimension_fit(&counts[..3]).is_err());
    }

    #[test]
    fn synthetic_fits() {
        let c = |n: u32, k: u64| CoverCount { level: n, n_lower: k, n_upper: k };
        let half: Vec<_> = (2..12).step_by(2).map(|n| c(n, 1 << (n / 2))).collect();
        assert!((dimension_fit(&half).unwrap().slope_upper - 0.5).abs() < 1e-12);
        let ones: Vec<_> = (2..8).map(|n| c(n, 1)).collect();
        assert_eq!(dimension_fit(&ones).unwrap().slope_upper, 0.0);
    }

    #[test]
    fn matches_exhaustive_count() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..20 {
            let depth = 7;
            let levels: Vec<Vec<f64>> = (0..=depth).map(|n| (0..1u64 << n).map(|_| next() * 0.5).collect()).collect();
            let s = SchauderSeries::from_table(0.1, 0.2, ExplicitTable::new(levels).unwrap()).unwrap();
            let lambda = next() * 0.3;
            for n in 2..=10 {
                let c = cover_count(&s, lambda, n).unwrap();
                assert_eq!(c.n_upper, exhaustive(&s, lambda, n), "n={n} lambda={lambda}");
                assert!(c.n_lower <= c.n_upper);
            }
        }
    }

    #[test]
    fn deeper_truncation_refines() {
        let sched = named_schedule("takagi", &[]).unwrap();
        for n in [6, 8, 10] {
            let a = cover_count(&SchauderSeries::from_schedule(sched.clone(), 14).unwrap(), 0.9, n).unwrap();
            let b = cover_count(&SchauderSeries::from_schedule(sched.clone(), 19).unwrap(), 0.9, n).unwrap();
            assert!(b.n_lower >= a.n_lower && b.n_upper <= a.n_upper, "{a:?} {b:?}");
        }
    }

    #[test]
    fn lacunary_construction() {
        let (s, w) = lacunary_series(&[1], 30).unwrap();
        assert!(w.is_empty());
        assert_eq!(s.eval(0.25).unwrap(), 0.5);
        assert_eq!(s.eval(0.75).unwrap(), 0.5);
        assert_eq!(s.eval(0.5).unwrap(), 0.0);
        let (_, w) = lacunary_series(&[2, 8, 16], 30).unwrap();
        assert_eq!(w.len(), 1);
        assert!(lacunary_series(&[3, 3], 30).is_err());
    }

    #[test]
    fn recursion_rows() {
        let rows = recursion_check(&[1, 2, 6], &[2, 3, 9], 1.0);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].rhs, 9.0 + 2.0 / 16.0);
        assert!(rows[0].holds);
    }
}
