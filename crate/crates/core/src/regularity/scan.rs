//! Empirical pointwise scans: one-sided Hölder exponents from dyadic bands
//! of increments, and one-sided difference quotients.

use crate::basis::{dyadic, pow2};
use crate::error::{Error, Result};
use crate::func::Func;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::InvalidParameter(format!("side must be left or right, got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSample {
    pub m: u32,
    pub h: f64,
    pub sup_diff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExponentEstimate {
    Finite(f64),
    /// All increments vanished (locally constant).
    Infinite,
    /// Increments do not decay with the scale.
    Zero,
}

impl ExponentEstimate {
    pub fn value(self) -> f64 {
        match self {
            ExponentEstimate::Finite(v) => v,
            ExponentEstimate::Infinite => f64::INFINITY,
            ExponentEstimate::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderScanResult {
    pub x0: f64,
    pub side: Side,
    pub scales: Vec<ScaleSample>,
    pub exponent: ExponentEstimate,
}

impl HolderScanResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,h,sup_diff\n");
        for sc in &self.scales {
            s += &format!("{},{},{}\n", sc.m, crate::io::fmt_f64(sc.h), crate::io::fmt_f64(sc.sup_diff));
        }
        s
    }
}

/// Probe points per dyadic band.
pub const DEFAULT_PROBES: usize = 33;

fn check_range(x0: f64, side: Side, m_min: u32, m_max: u32) -> Result<()> {
    if m_min > m_max {
        return Err(Error::InvalidParameter(format!("empty scale range {m_min}..={m_max}")));
    }
    if m_max > 60 {
        return Err(Error::InvalidParameter("scales finer than 2^-60 are meaningless in binary64".into()));
    }
    let reach = x0 + side.sign() * dyadic(m_min);
    if !(0.0..=1.0).contains(&x0) || !(0.0..=1.0).contains(&reach) {
        return Err(Error::Precondition(format!(
            "x0={x0} with h=2^-{m_min} on the {} leaves [0,1]",
            side.name()
        )));
    }
    Ok(())
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn holder_scan(f: &Func, x0: f64, side: Side, m_min: u32, m_max: u32) -> Result<HolderScanResult> {
    holder_scan_with(f, x0, side, m_min, m_max, DEFAULT_PROBES)
}

/// For each `m`, the sup of `|f(y) - f(x0)|` over `probes` points `y` with
/// `|y - x0| ∈ [2^{-m-1}, 2^{-m}]` on `side`; the exponent is the fitted decay
/// rate of `log₂ sup` in `m` over the deepest half of the scales.
pub fn holder_scan_with(
    f: &Func,
    x0: f64,
    side: Side,
    m_min: u32,
    m_max: u32,
    probes: usize,
) -> Result<HolderScanResult> {
    check_range(x0, side, m_min, m_max)?;
    if probes < 2 {
        return Err(Error::InvalidParameter("need at least two probes per band".into()));
    }
    let f0 = f.eval(x0);
    let scales: Vec<ScaleSample> = (m_min..=m_max)
        .map(|m| {
            let lo = dyadic(m + 1);
            let sup = (0..probes)
                .map(|j| {
                    let d = lo * (1.0 + j as f64 / (probes - 1) as f64);
                    let y = (x0 + side.sign() * d).clamp(0.0, 1.0);
                    (f.eval(y) - f0).abs()
                })
                .fold(0.0f64, f64::max);
            ScaleSample { m, h: dyadic(m), sup_diff: sup }
        })
        .collect();

    let deep = &scales[scales.len() / 2..];
    let (xs, ys): (Vec<f64>, Vec<f64>) = deep
        .iter()
        .filter(|s| s.sup_diff > 0.0)
        .map(|s| (s.m as f64, s.sup_diff.log2()))
        .unzip();
    let exponent = if xs.len() < 2 {
        ExponentEstimate::Infinite
    } else {
        let alpha = -ls_slope(&xs, &ys);
        if alpha <= 0.0 {
            ExponentEstimate::Zero
        } else {
            ExponentEstimate::Finite(alpha)
        }
    };
    Ok(HolderScanResult { x0, side, scales, exponent })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeVerdict {
    Converges { limit: f64 },
    Diverges,
    Oscillates,
}

impl DerivativeVerdict {
    pub fn converges(&self) -> bool {
        matches!(self, DerivativeVerdict::Converges { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            DerivativeVerdict::Converges { .. } => "converges",
            DerivativeVerdict::Diverges => "diverges",
            DerivativeVerdict::Oscillates => "oscillates",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeScanConfig {
    /// Relative spread of the last five quotients below which they converge.
    pub spread_tol: f64,
    /// The suffix supremum of successive differences shrinking at least this
    /// fast (log₂ per level, negative) also counts as convergence.
    pub contraction: f64,
    /// `max |q_m|` above this, with growth, counts as divergence.
    pub divergence_threshold: f64,
}

impl Default for DerivativeScanConfig {
    fn default() -> Self {
        DerivativeScanConfig { spread_tol: 1e-6, contraction: -0.3, divergence_threshold: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeScan {
    pub x0: f64,
    pub side: Side,
    pub quotients: Vec<(u32, f64)>,
    pub verdict: DerivativeVerdict,
}

impl DerivativeScan {
    pub fn max_abs(&self) -> f64 {
        self.quotients.iter().map(|q| q.1.abs()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,h,quotient\n");
        for &(m, q) in &self.quotients {
            s += &format!("{m},{},{}\n", crate::io::fmt_f64(dyadic(m)), crate::io::fmt_f64(q));
        }
        s
    }
}

pub fn derivative_scan(f: &Func, x0: f64, side: Side, m_min: u32, m_max: u32) -> Result<DerivativeScan> {
    derivative_scan_with(f, x0, side, m_min, m_max, DerivativeScanConfig::default())
}

/// `q_m = (f(x0 ± 2^{-m}) - f(x0)) / (±2^{-m})` and a convergence verdict.
pub fn derivative_scan_with(
    f: &Func,
    x0: f64,
    side: Side,
    m_min: u32,
    m_max: u32,
    cfg: DerivativeScanConfig,
) -> Result<DerivativeScan> {
    check_range(x0, side, m_min, m_max)?;
    if m_max - m_min + 1 < 6 {
        return Err(Error::InvalidParameter("derivative scan needs at least six scales".into()));
    }
    let f0 = f.eval(x0);
    let quotients: Vec<(u32, f64)> = (m_min..=m_max)
        .map(|m| {
            let y = x0 + side.sign() * dyadic(m);
            (m, (f.eval(y) - f0) * side.sign() * pow2(m))
        })
        .collect();
    let verdict = judge(&quotients, cfg);
    Ok(DerivativeScan { x0, side, quotients, verdict })
}

fn judge(q: &[(u32, f64)], cfg: DerivativeScanConfig) -> DerivativeVerdict {
    let last = q[q.len() - 1].1;
    let tail5 = &q[q.len() - 5..];
    let (lo, hi) = tail5.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    let mean = tail5.iter().map(|p| p.1).sum::<f64>() / 5.0;
    if hi - lo <= cfg.spread_tol * mean.abs().max(1.0) {
        return DerivativeVerdict::Converges { limit: last };
    }

    // Envelope sup_{j>=m} |q_{j+1} - q_j|: Cauchy tails shrinking geometrically.
    let mut env: Vec<(f64, f64)> = Vec::with_capacity(q.len());
    let mut sup = 0.0f64;
    for w in q.windows(2).rev() {
        sup = sup.max((w[1].1 - w[0].1).abs());
        if sup > 0.0 {
            env.push((w[1].0 as f64, sup.log2()));
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = env.into_iter().unzip();
    if xs.len() >= 3 && ls_slope(&xs, &ys) < cfg.contraction {
        return DerivativeVerdict::Converges { limit: last };
    }

    let half = q.len() / 2;

    let peak = |s: &[(u32, f64)]| s.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let (early, late) = (peak(&q[..half]), peak(&q[half..]));
    if late > cfg.divergence_threshold && late > early {
        DerivativeVerdict::Diverges
    } else {
        DerivativeVerdict::Oscillates
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::named_schedule;
    use crate::series::SchauderSeries;

    fn series(name: &str, p: &[f64], depth: u32) -> Func {
        SchauderSeries::from_schedule(named_schedule(name, p).unwrap(), depth).unwrap().into()
    }

    #[test]
    fn linear_exponent_is_one() {
        let f = Func::identity();
        for x0 in [0.2, 0.5, 0.77] {
            let r = holder_scan(&f, x0, Side::Right, 4, 30).unwrap();
            assert!((r.exponent.value() - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn constant_is_flagged() {
        let r = holder_scan(&Func::constant(3.0), 0.5, Side::Left, 2, 20).unwrap();
        assert_eq!(r.exponent, ExponentEstimate::Infinite);
    }

    #[test]
    fn scan_preconditions() {
        assert!(holder_scan(&Func::identity(), 0.9, Side::Right, 1, 10).is_err());
        assert!(holder_scan(&Func::identity(), 0.1, Side::Left, 10, 5).is_err());
        assert!(derivative_scan(&Func::identity(), 0.5, Side::Right, 1, 3).is_err());
    }

    #[test]
    fn sqrt_bridge_scan() {
        let f = series("sqrt_bridge", &[], 40);
        let mut ex: Vec<f64> = (0..15)
            .map(|k| {
                let x0 = 0.1 + 0.8 * ((k as f64 * 0.618_033_988_75) % 1.0);
                holder_scan(&f, x0, Side::Right, 8, 28).unwrap().exponent.value()
            })
            .collect();
        ex.sort_by(f64::total_cmp);
        let median = ex[ex.len() / 2];
        assert!((0.4..=0.6).contains(&median), "median {median}");
    }

    #[test]
    fn takagi_modulus_at_dyadics() {
        // (T(x0+h) - T(x0)) / (h log2(1/h)) stays within a factor 2 of a
        // constant at dyadic x0; with this normalization the constant is 2.
        let f = series("takagi", &[], 40);
        for x0 in [0.25, 0.375, 0.5, 0.8125] {
            let ratios: Vec<f64> = (10..=25)
                .map(|m| {
                    let h = dyadic(m);
                    (f.eval(x0 + h) - f.eval(x0)) / (h * m as f64)
                })
                .collect();
            let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
            assert!(lo > 0.0 && hi / lo <= 2.0, "x0={x0}: {ratios:?}");
        }
    }

    #[test]
    fn square_converges() {
        let f = Func::new(|x| x * x);
        let d = derivative_scan(&f, 0.5, Side::Right, 1, 30).unwrap();
        match d.verdict {
            DerivativeVerdict::Converges { limit } => assert!((limit - 1.0).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn takagi_has_no_derivative() {
        let f = series("takagi", &[], 40);
        for k in 0..10 {
            let x0 = 0.1 + 0.08 * k as f64 + 0.0137;
            for side in [Side::Left, Side::Right] {
                let d = derivative_scan(&f, x0, side, 4, 30).unwrap();
                assert!(!d.verdict.converges(), "x0={x0} {side:?}: {:?}", d.quotients);
            }
        }
    }
}
