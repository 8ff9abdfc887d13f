//! Compositions with polynomials and analytic patches, power families and
//! finite independence checks.

use nalgebra::DMatrix;

use super::poly::{Polynomial, PowerSeriesPatch};
use crate::error::{Error, Result};
use crate::func::Func;
use crate::regularity::{derivative_scan, exponent_bounds, DerivativeScan, LevelExtremes, Side, DEFAULT_WINDOW};
use crate::series::{SampleGrid, SchauderSeries};

/// Grid level used to certify ranges.
pub const RANGE_GRID: u32 = 14;

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-8;

/// `x ↦ P(f(x))`.
pub fn compose_poly(f: &Func, p: &Polynomial) -> Func {
    let p = p.clone();
    f.map(move |y| p.eval(y))
}

/// An enclosure of the range of the evaluated truncation `f_D` (and of its
/// limit): grid extremes widened by every level the grid cannot resolve plus
/// the tail beyond the depth.
pub fn certified_range(s: &SchauderSeries) -> Result<(f64, f64)> {
    let level = RANGE_GRID.min(s.depth + 1);
    let (lo, hi) = s.eval_grid(level)?.min_max();
    let unresolved: f64 = (level..=s.depth)
        .map(|n| {
            let (a, b) = s.schedule.level_range(n);
            a.abs().max(b.abs())
        })
        .sum();
    let margin = unresolved + s.tail_bound()?;
    Ok((lo - margin, hi + margin))
}

/// First point of `[lo, hi]` not covered by any patch disc.
fn coverage_gap(lo: f64, hi: f64, patches: &[PowerSeriesPatch]) -> Option<f64> {
    let mut discs: Vec<(f64, f64)> = patches.iter().map(|p| (p.center - p.radius, p.center + p.radius)).collect();
    discs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reach = lo;
    for (a, b) in discs {
        if a > reach {
            break;
        }
        reach = reach.max(b);
        if reach >= hi {
            return None;
        }
    }
    if reach >= hi {
        None
    } else {
        Some(reach)
    }
}

/// `x ↦ F(f(x))` where `F` is given by patches covering the certified range
/// of `f`; each value uses the patch in which it is most central.
pub fn compose_analytic(f: &SchauderSeries, patches: &[PowerSeriesPatch]) -> Result<Func> {
    let (lo, hi) = certified_range(f)?;
    let patches = patches.to_vec();
    if let Some(gap) = coverage_gap(lo, hi, &patches) {
        return Err(Error::Coverage { lo, hi, gap });
    }
    let inner: Func = f.clone().into();
    Ok(inner.map(move |y| eval_patches(&patches, y)))
}

fn eval_patches(patches: &[PowerSeriesPatch], y: f64) -> f64 {
    let best = patches
        .iter()
        .min_by(|a, b| {
            let ra = (y - a.center).abs() / a.radius;
            let rb = (y - b.center).abs() / b.radius;
            ra.total_cmp(&rb)
        })
        .expect("at least one patch");
    best.eval(y)
}

/// `x ↦ f(x)^λ` after certifying `inf f > 0`.
pub fn power_family(f: &SchauderSeries, lambda: f64) -> Result<Func> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let (lo, _) = certified_range(f)?;
    if lo <= 0.0 {
        return Err(Error::NotPositive(lo));
    }
    let inner: Func = f.clone().into();
    Ok(if lambda == 1.0 { inner } else { inner.map(move |y| y.powf(lambda)) })
}

/// Numerical rank of a finite family from the Gram matrix of its samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GramRank {
    pub rank: usize,
    pub smallest_singular: f64,
    pub singular_values: Vec<f64>,
}

/// Rank of `G_{jk} = 2^{-M} Σ_x f_j(x) f_k(x)` over the level-`M` grid at
/// threshold [`RANK_TOL`] relative to the largest singular value.
pub fn gram_independence(fs: &[Func], level: u32) -> Result<GramRank> {
    if fs.is_empty() {
        return Err(Error::InvalidParameter("gram_independence needs at least one function".into()));
    }
    let grids: Vec<SampleGrid> = fs
        .iter()
        .map(|f| SampleGrid::sample(level, |x| f.eval(x)))
        .collect::<Result<_>>()?;
    let k = fs.len();
    let w = 1.0 / (grids[0].values().len() as f64);
    let gram = DMatrix::from_fn(k, k, |a, b| {
        grids[a].values().iter().zip(grids[b].values()).map(|(u, v)| u * v).sum::<f64>() * w
    });
    let mut sv: Vec<f64> = gram.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv[0];
    let rank = if top > 0.0 { sv.iter().filter(|&&s| s > RANK_TOL * top).count() } else { 0 };
    Ok(GramRank { rank, smallest_singular: sv[k - 1], singular_values: sv })
}

/// `g = f² - f(x0) f`, non-constant whenever `f` is.
#[derive(Debug, Clone)]
pub struct VanishShift {
    pub func: Func,
    /// `false` when `g` vanishes on the level-12 grid.
    pub non_constant: bool,
}

pub fn vanish_shift(f: &Func, x0: f64) -> Result<VanishShift> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::Domain(x0));
    }
    let f0 = f.eval(x0);
    let func = f.map(move |y| y * (y - f0));
    let non_constant = SampleGrid::sample(12, |x| func.eval(x))?.values().iter().any(|&v| v != 0.0);
    Ok(VanishShift { func, non_constant })
}

/// Outcome of the `F ∘ f` differentiability check at `x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalVerdict {
    pub x0: f64,
    pub alpha0: f64,
    pub f_at_x0: f64,
    pub f_prime: f64,
    pub left: Option<DerivativeScan>,
    pub right: Option<DerivativeScan>,
    /// `F'(f(x0)) = 0` (within 1e-9) agrees with both available scans converging.
    pub agrees: bool,
}

impl CriticalVerdict {
    pub fn critical(&self) -> bool {
        self.f_prime.abs() <= 1e-9
    }

    pub fn both_converge(&self) -> bool {
        [&self.left, &self.right].iter().all(|s| s.as_ref().is_none_or(|s| s.verdict.converges()))
    }
}

/// Requires `α_0 > 1/2` from the schedule of `f` and a patch cover of its range.
pub fn critical_composition_test(
    f: &SchauderSeries,
    patch: &PowerSeriesPatch,
    x0: f64,
    m_min: u32,
    m_max: u32,
) -> Result<CriticalVerdict> {
    let bounds = exponent_bounds(&LevelExtremes::of_schedule(&f.schedule, f.depth)?, DEFAULT_WINDOW)?;
    if bounds.alpha0 <= 0.5 {
        return Err(Error::Precondition(format!(
            "F∘f criterion needs alpha0 > 1/2, schedule gives {}",
            bounds.alpha0
        )));
    }
    let g = compose_analytic(f, std::slice::from_ref(patch))?;
    let f_at_x0 = f.eval(x0)?;
    let f_prime = patch.derivative().eval(f_at_x0);
    let scan = |side| derivative_scan(&g, x0, side, m_min, m_max).ok();
    let left = scan(Side::Left);
    let right = scan(Side::Right);
    if left.is_none() && right.is_none() {
        return Err(Error::Precondition(format!("no scan side fits at x0={x0}")));
    }
    let mut v = CriticalVerdict { x0, alpha0: bounds.alpha0, f_at_x0, f_prime, left, right, agrees: false };
    v.agrees = v.critical() == v.both_converge();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{named_schedule, CoefficientSchedule};

    fn series(name: &str, depth: u32) -> SchauderSeries {
        SchauderSeries::from_schedule(named_schedule(name, &[]).unwrap(), depth).unwrap()
    }

    #[test]
    fn poly_examples() {
        let sq: Polynomial = "poly: 0 0 1".parse().unwrap();
        assert_eq!(compose_poly(&Func::constant(3.0), &sq).eval(0.4), 9.0);
        let t: Func = series("takagi", 20).into();
        let id = compose_poly(&t, &Polynomial::identity());
        for x in [0.0, 0.1, 0.37, 1.0] {
            assert_eq!(id.eval(x).to_bits(), t.eval(x).to_bits());
        }
    }

    #[test]
    fn analytic_examples() {
        let f = series("nonhoelder", 40);
        let (lo, hi) = certified_range(&f).unwrap();
        assert!(lo <= 0.0 && (1.0..1.8).contains(&hi), "{lo} {hi}");
        let one = compose_analytic(&f, &["patch: 0 4 1".parse().unwrap()]).unwrap();
        assert_eq!(one.eval(0.3), 1.0);
        let id = compose_analytic(&f, &[PowerSeriesPatch::new(0.5, 3.0, vec![0.5, 1.0]).unwrap()]).unwrap();
        let ff: Func = f.clone().into();
        assert!((id.eval(0.3) - ff.eval(0.3)).abs() < 1e-14);
        let small = PowerSeriesPatch::exp(0.0, 1.0).unwrap();
        match compose_analytic(&f, &[small]) {
            Err(Error::Coverage { gap, .. }) => assert_eq!(gap, 1.0),
            other => panic!("expected coverage error, got {other:?}"),
        }
        let two = [PowerSeriesPatch::exp(0.0, 1.0).unwrap(), PowerSeriesPatch::exp(2.0, 1.0).unwrap()];
        let e = compose_analytic(&f, &two).unwrap();
        assert!((e.eval(0.3) - ff.eval(0.3).exp()).abs() < 1e-13);
    }

    #[test]
    fn power_examples() {
        let four = SchauderSeries::new(4.0, 0.0, CoefficientSchedule::zero(), 0).unwrap();
        assert_eq!(power_family(&four, 0.5).unwrap().eval(0.2), 2.0);
        let t = series("takagi", 20);
        assert!(matches!(power_family(&t, 2.0), Err(Error::NotPositive(_))));
        let shifted = SchauderSeries { a: 1.0, ..series("nonhoelder", 20) };
        let p1 = power_family(&shifted, 1.0).unwrap();
        assert_eq!(p1.eval(0.3), shifted.eval(0.3).unwrap());
    }

    #[test]
    fn gram_examples() {
        let t: Func = series("takagi", 20).into();
        assert_eq!(gram_independence(&[t.clone(), t.clone()], 10).unwrap().rank, 1);
        let mono = [Func::constant(1.0), Func::identity(), Func::new(|x| x * x)];
        assert_eq!(gram_independence(&mono, 6).unwrap().rank, 3);
        assert!(gram_independence(&[], 6).is_err());
    }

    #[test]
    fn vanish_examples() {
        let c = vanish_shift(&Func::constant(2.0), 0.5).unwrap();
        assert!(!c.non_constant);
        assert_eq!(c.func.eval(0.1), 0.0);
        let lin = vanish_shift(&Func::identity(), 0.5).unwrap();
        assert_eq!(lin.func.eval(0.5), 0.0);
        assert!((lin.func.eval(0.2) - (0.04 - 0.1)).abs() < 1e-15);
        let t: Func = series("takagi", 30).into();
        let g = vanish_shift(&t, 1.0 / 3.0).unwrap();
        assert!(g.non_constant && g.func.eval(1.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn criticality_refuses_rough_schedules() {
        let t = series("sqrt_bridge", 20);
        let p = PowerSeriesPatch::new(0.0, 10.0, vec![0.0, 1.0]).unwrap();
        assert!(matches!(critical_composition_test(&t, &p, 0.3, 4, 20), Err(Error::Precondition(_))));
    }
}
