//! Coefficient-based regularity criteria: per-level extremes `δ_n`, `Δ_n`,
//! the exponents `α_0`, `α_1`, verdicts, and the branch-wise criterion on the
//! binary tree of basis indices.

use nalgebra::{Matrix3, Vector3};

use crate::basis::{level_width, pow2};
use crate::error::{Error, Result};
use crate::schedule::{CoefficientSchedule, ExplicitTable};

/// `α` values at which growth of `2^{αn} δ_n` is probed.
pub const PROBE_ALPHAS: [f64; 20] = [
    0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95,
    1.00,
];

/// Fitted decay rates below this count as zero (half the smallest probe).
pub const TREND_ZERO: f64 = 0.025;

/// Share of the deepest levels standing in for a liminf by default.
pub const DEFAULT_WINDOW: f64 = 0.5;

/// Per-level `δ_n = min_i |γ_{n,i}|` and `Δ_n = max_i |γ_{n,i}|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelExtremes {
    pub delta: Vec<f64>,
    pub big_delta: Vec<f64>,
}

impl LevelExtremes {
    pub fn depth(&self) -> u32 {
        self.delta.len() as u32 - 1
    }

    pub fn rows(&self) -> impl Iterator<Item = (u32, f64, f64)> + '_ {
        self.delta
            .iter()
            .zip(&self.big_delta)
            .enumerate()
            .map(|(n, (&d, &dd))| (n as u32, d, dd))
    }

    /// Extremes through `depth`, in closed form when the schedule allows it
    /// and by enumeration otherwise (enumeration caps at level 26).
    pub fn of_schedule(schedule: &CoefficientSchedule, depth: u32) -> Result<Self> {
        match schedule {
            CoefficientSchedule::PerLevel(_) | CoefficientSchedule::Lacunary { .. } => {
                let c: Vec<f64> = (0..=depth).map(|n| schedule.coefficient(n, 0).abs()).collect();
                Ok(LevelExtremes { delta: c.clone(), big_delta: c })
            }
            CoefficientSchedule::Explicit(t) => {
                if t.depth().is_none_or(|d| d < depth) {
                    return Err(Error::Precondition(format!("table does not reach level {depth}")));
                }
                let mut e = level_extremes(t)?;
                e.delta.truncate(depth as usize + 1);
                e.big_delta.truncate(depth as usize + 1);
                Ok(e)
            }
            CoefficientSchedule::Random { .. } => level_extremes(&schedule.materialize(depth)?),
        }
    }
}

pub fn level_extremes(table: &ExplicitTable) -> Result<LevelExtremes> {
    if table.is_empty() {
        return Err(Error::Precondition("empty coefficient table".into()));
    }
    let mut delta = Vec::with_capacity(table.len());
    let mut big_delta = Vec::with_capacity(table.len());
    for row in table.levels() {
        if row.is_empty() {
            return Err(Error::Precondition("empty level".into()));
        }
        let (lo, hi) = row
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), g| (lo.min(g.abs()), hi.max(g.abs())));
        delta.push(lo);
        big_delta.push(hi);
    }
    Ok(LevelExtremes { delta, big_delta })
}

/// Finite-depth estimates of `α_0` (from `Δ_n`) and `α_1` (from `δ_n`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentBounds {
    pub alpha0: f64,
    pub alpha1: f64,
    /// Some `δ_n` in the window vanished; `alpha1` is `+∞` and the
    /// nowhere-Hölder criterion does not apply.
    pub alpha1_inapplicable: bool,
    pub first_level: u32,
    pub last_level: u32,
}

fn window_start(depth: u32, window: f64) -> u32 {
    let k = (window * depth as f64).ceil() as u32;
    (depth + 1 - k.clamp(1, depth)).max(1)
}

fn rate(v: f64, n: u32) -> f64 {
    if v == 0.0 {
        f64::INFINITY
    } else {
        -v.log2() / n as f64
    }
}

/// The liminf of `-log₂(·)/n`, replaced by the minimum over the deepest
/// `⌈window · depth⌉` levels.
pub fn exponent_bounds(e: &LevelExtremes, window: f64) -> Result<ExponentBounds> {
    let depth = e.depth();
    if depth < 8 {
        return Err(Error::Precondition(format!("exponent bounds need depth >= 8, got {depth}")));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidParameter(format!("window must lie in (0,1], got {window}")));
    }
    let first = window_start(depth, window);
    let levels = first..=depth;
    let alpha0 = levels.clone().map(|n| rate(e.big_delta[n as usize], n)).fold(f64::INFINITY, f64::min);
    let alpha1 = levels.clone().map(|n| rate(e.delta[n as usize], n)).fold(f64::INFINITY, f64::min);
    let inapplicable = levels.clone().any(|n| e.delta[n as usize] == 0.0);
    Ok(ExponentBounds {
        alpha0,
        alpha1: if inapplicable { f64::INFINITY } else { alpha1 },
        alpha1_inapplicable: inapplicable,
        first_level: first,
        last_level: depth,
    })
}

/// Fits `log₂ v_n ≈ -A n - B log₂(n+1) - C` over the given levels and returns
/// the exponential rate `A`. `None` when fewer than four usable levels exist.
pub fn decay_trend(values: &[f64], levels: std::ops::RangeInclusive<u32>) -> Option<f64> {
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    let mut used = 0;
    for n in levels {
        let v = values[n as usize];
        if v <= 0.0 {
            return None;
        }
        let row = Vector3::new(n as f64, (n as f64 + 1.0).log2(), 1.0);
        ata += row * row.transpose();
        atb += row * (-v.log2());
        used += 1;
    }
    if used < 4 {
        return None;
    }
    ata.lu().solve(&atb).map(|sol| sol[0])
}

/// Verdicts drawn from the coefficient criteria at a finite depth.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub depth: u32,
    pub window: f64,
    pub extremes: LevelExtremes,
    pub alpha0: f64,
    pub alpha1: f64,
    /// Extrapolated exponential decay rates of `Δ_n` and `δ_n`; snapped to
    /// 0 below [`TREND_ZERO`].
    pub alpha0_trend: Option<f64>,
    pub alpha1_trend: Option<f64>,
    /// For each probe `α`: `max 2^{αn}δ_n` over the window divided by the
    /// same maximum over the window at half the depth.
    pub probe_growth: Vec<(f64, f64)>,
    pub everywhere_hoelder_below: f64,
    pub nowhere_one_sided_hoelder_above: f64,
    pub completely_non_hoelder: bool,
    pub girgensohn_no_one_sided_derivative: bool,
    pub notes: Vec<String>,
}

impl RegularityReport {
    /// Flat `key=value` rendering.
    pub fn to_kv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |v| format!("{v}"));
        let mut s = String::new();
        s += &format!("depth={}\n", self.depth);
        s += &format!("window={}\n", self.window);
        s += &format!("alpha0={}\n", self.alpha0);
        s += &format!("alpha1={}\n", self.alpha1);
        s += &format!("alpha0_trend={}\n", opt(self.alpha0_trend));
        s += &format!("alpha1_trend={}\n", opt(self.alpha1_trend));
        s += &format!("everywhere_hoelder_below={}\n", self.everywhere_hoelder_below);
        s += &format!("nowhere_one_sided_hoelder_above={}\n", self.nowhere_one_sided_hoelder_above);
        s += &format!("completely_non_hoelder={}\n", self.completely_non_hoelder);
        s += &format!("girgensohn_no_one_sided_derivative={}\n", self.girgensohn_no_one_sided_derivative);
        for (a, g) in &self.probe_growth {
            s += &format!("probe_growth_{a:.2}={g}\n");
        }
        for (k, note) in self.notes.iter().enumerate() {
            s += &format!("note_{k}={note}\n");
        }
        s
    }

    /// `n,delta,Delta` rows.
    pub fn extremes_csv(&self) -> String {
        let mut s = String::from("n,delta,Delta\n");
        for (n, d, dd) in self.extremes.rows() {
            s += &format!("{n},{},{}\n", crate::io::fmt_f64(d), crate::io::fmt_f64(dd));
        }
        s
    }
}

/// Windowed growth of `2^{αn}δ_n` from depth `depth/2` to `depth`.
pub fn windowed_growth(delta: &[f64], alpha: f64, window: f64) -> f64 {
    let depth = delta.len() as u32 - 1;
    let peak = |d: u32| {
        (window_start(d, window)..=d)
            .map(|n| (alpha * n as f64).exp2() * delta[n as usize])
            .fold(0.0f64, f64::max)
    };
    let half = (depth / 2).max(1);
    peak(depth) / peak(half)
}

pub fn classify(e: &LevelExtremes, window: f64) -> Result<RegularityReport> {
    let b = exponent_bounds(e, window)?;
    let depth = e.depth();
    let window_levels = b.first_level..=depth;
    let mut notes = vec![format!(
        "finite-depth verdicts from levels {}..={}; not a proof",
        b.first_level, depth
    )];

    let snap = |a: f64| if a.abs() <= TREND_ZERO { 0.0 } else { a };
    let alpha0_trend = decay_trend(&e.big_delta, window_levels.clone()).map(snap);
    let alpha1_trend = decay_trend(&e.delta, window_levels.clone()).map(snap);

    let positive = window_levels.clone().all(|n| e.delta[n as usize] > 0.0);
    if !positive {
        notes.push("some delta_n vanish in the window: nowhere-Hoelder criterion not applicable".into());
    }
    let completely_non_hoelder = positive && alpha1_trend == Some(0.0);

    // limsup 2^n δ_n > 0: the normalized minima do not decay across the window.
    let normalized: Vec<f64> = e.delta.iter().enumerate().map(|(n, d)| pow2(n as u32) * d).collect();
    let late = window_levels.clone().map(|n| normalized[n as usize]).fold(0.0f64, f64::max);
    let early = (1..b.first_level).map(|n| normalized[n as usize]).fold(0.0f64, f64::max);
    let girgensohn = late > 0.0 && late >= 0.5 * early;

    let probe_growth = PROBE_ALPHAS
        .iter()
        .map(|&a| (a, windowed_growth(&e.delta, a, window)))
        .collect();

    Ok(RegularityReport {
        depth,
        window,
        extremes: e.clone(),
        alpha0: b.alpha0,
        alpha1: b.alpha1,
        alpha0_trend,
        alpha1_trend,
        probe_growth,
        everywhere_hoelder_below: b.alpha0,
        nowhere_one_sided_hoelder_above: b.alpha1,
        completely_non_hoelder,
        girgensohn_no_one_sided_derivative: girgensohn,
        notes,
    })
}

/// Minimum over branches of the maximum of `2^{αn}|γ_{n,i_n}|` along the
/// branch, over levels `0..=depth` of the table.
pub fn branch_criterion(table: &ExplicitTable, alpha: f64) -> Result<f64> {
    let depth = table
        .depth()
        .ok_or_else(|| Error::Precondition("empty coefficient table".into()))?;
    let mut below: Vec<f64> = vec![0.0; level_width(depth + 1) as usize];
    for n in (0..=depth).rev() {
        let row = table.level(n).expect("level present");
        let w = (alpha * n as f64).exp2();
        below = row
            .iter()
            .enumerate()
            .map(|(i, g)| (w * g.abs()).max(below[2 * i].min(below[2 * i + 1])))
            .collect();
    }
    Ok(below[0])
}

/// The three points of the Hölder-criterion lower bound at level `n`.
///
/// `x1 = a/2^{n+1}` is the first level-`(n+1)` dyadic right of `x0` and
/// `x2 = x1 + 2^{-n-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePoint {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
}

impl ThreePoint {
    pub fn new(f: impl Fn(f64) -> f64, x0: f64, n: u32) -> Option<Self> {
        let a = (x0 * pow2(n + 1)).floor() + 1.0;
        let h = 1.0 / pow2(n + 1);
        let (x1, x2) = (a * h, (a + 1.0) * h);
        if !(0.0..1.0).contains(&x0) || x2 > 1.0 {
            return None;
        }
        Some(ThreePoint { x0, x1, x2, f0: f(x0), f1: f(x1), f2: f(x2) })
    }

    /// `x0` lies in the left half of its level-`n` cell, so `x1` is the cell
    /// midpoint and all three points share one level-`n` cell.
    pub fn same_cell(&self, n: u32) -> bool {
        ((self.x1 * pow2(n + 1)) as u64) % 2 == 1
    }

    /// `|s2 - s1|` for the secant slopes `s_k = (f(x_k)-f(x0))/(x_k-x0)`.
    pub fn slope_gap(&self) -> f64 {
        ((self.f2 - self.f0) / (self.x2 - self.x0) - (self.f1 - self.f0) / (self.x1 - self.x0)).abs()
    }

    pub fn max_increment(&self) -> f64 {
        (self.f1 - self.f0).abs().max((self.f2 - self.f0).abs())
    }

    pub fn min_distance(&self) -> f64 {
        (self.x1 - self.x0).min(self.x2 - self.x0)
    }
}

/// The level-`n` cell to the right of `x0` (the cell containing `x0` when it
/// is itself a cell boundary): `max |f(y) - f(x0)|` over its endpoints and
/// midpoint, which always dominates `|γ_{n,i}|/2` for that cell.
pub fn right_cell_increment(f: impl Fn(f64) -> f64, x0: f64, n: u32) -> Option<(u64, f64)> {
    let w = 1.0 / pow2(n);
    let i = (x0 * pow2(n)).ceil();
    let (l, r) = (i * w, (i + 1.0) * w);
    if r > 1.0 {
        return None;
    }
    let f0 = f(x0);
    let m = [l, 0.5 * (l + r), r].iter().map(|&y| (f(y) - f0).abs()).fold(0.0, f64::max);
    Some((i as u64, m))
}
