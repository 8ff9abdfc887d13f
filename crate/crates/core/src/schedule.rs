//! Coefficient schedules: rules assigning `γ_{n,i}` to every basis index.

use crate::basis::{level_width, BasisIndex, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::rng::{NormalField, NORMAL_BOUND};

/// A closed-form per-level magnitude `c(n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelLaw {
    Zero,
    /// `2^{-βn}`, `β > 0`. Takagi is `β = 1`.
    Power { beta: f64 },
    /// `n 2^{-n}`.
    TakagiLog,
    /// `(n+1)^{-2}`.
    InverseSquare,
    /// Finitely many explicit level constants, zero beyond.
    Table(Vec<f64>),
}

impl LevelLaw {
    pub fn power(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("power exponent must be positive, got {beta}")));
        }
        Ok(LevelLaw::Power { beta })
    }

    pub fn at(&self, n: u32) -> f64 {
        match self {
            LevelLaw::Zero => 0.0,
            LevelLaw::Power { beta } => exp2_neg(*beta * n as f64),
            LevelLaw::TakagiLog => n as f64 * exp2_neg(n as f64),
            LevelLaw::InverseSquare => 1.0 / ((n as f64 + 1.0) * (n as f64 + 1.0)),
            LevelLaw::Table(c) => c.get(n as usize).copied().unwrap_or(0.0),
        }
    }

    /// Upper bound on `Σ_{n >= from} |c(n)|`.
    pub fn tail_sum(&self, from: u32) -> f64 {
        let m = from as f64;
        match self {
            LevelLaw::Zero => 0.0,
            LevelLaw::Power { beta } => exp2_neg(beta * m) / (1.0 - exp2_neg(*beta)),
            LevelLaw::TakagiLog => 2.0 * exp2_neg(m) * (m + 1.0),
            LevelLaw::InverseSquare => {
                // exact head, then Σ_{k >= N} k^-2 <= 1/N + 1/(2N^2) + 1/(6N^3)
                let start = from as u64 + 1;
                let cut = start.max(64);
                let head: f64 = (start..cut).map(|k| 1.0 / (k as f64 * k as f64)).sum();
                let n = cut as f64;
                head + 1.0 / n + 0.5 / (n * n) + 1.0 / (6.0 * n * n * n)
            }
            LevelLaw::Table(c) => c.iter().skip(from as usize).map(|v| v.abs()).sum(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            LevelLaw::Power { beta } if !(*beta > 0.0 && beta.is_finite()) => {
                Err(Error::InvalidParameter(format!("power exponent must be positive, got {beta}")))
            }
            LevelLaw::Table(c) if c.iter().any(|v| !v.is_finite()) => {
                Err(Error::InvalidParameter("level table contains non-finite values".into()))
            }
            _ => Ok(()),
        }
    }
}

/// `2^{-e}` with exact results whenever `e` is an integer.
fn exp2_neg(e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() < 1000.0 {
        2f64.powi(-(e as i32))
    } else {
        (-e).exp2()
    }
}

/// Finite table of coefficients for levels `0..=depth`, level `n` holding `2^n` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitTable {
    levels: Vec<Vec<f64>>,
}

impl ExplicitTable {
    pub fn new(levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.len() > MAX_DEPTH as usize + 1 {
            return Err(Error::DepthLimit { level: levels.len() as u32 - 1, max: MAX_DEPTH });
        }
        for (n, row) in levels.iter().enumerate() {
            if row.len() as u64 != level_width(n as u32) {
                return Err(Error::Malformed(format!(
                    "level {n} has {} coefficients, expected {}",
                    row.len(),
                    level_width(n as u32)
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Malformed(format!("level {n} contains a non-finite coefficient")));
            }
        }
        Ok(ExplicitTable { levels })
    }

    pub fn zeros(depth: u32) -> Self {
        ExplicitTable {
            levels: (0..=depth).map(|n| vec![0.0; level_width(n) as usize]).collect(),
        }
    }

    /// Builds a table from `(n, i, γ)` triples; missing entries are zero.
    pub fn from_triples(triples: &[(u32, u64, f64)]) -> Result<Self> {
        let Some(depth) = triples.iter().map(|t| t.0).max() else {
            return Err(Error::Malformed("empty coefficient table".into()));
        };
        if depth > MAX_DEPTH {
            return Err(Error::DepthLimit { level: depth, max: MAX_DEPTH });
        }
        let mut table = ExplicitTable::zeros(depth);
        for &(n, i, g) in triples {
            BasisIndex::new(n, i)?;
            if !g.is_finite() {
                return Err(Error::Malformed(format!("non-finite coefficient at ({n}, {i})")));
            }
            table.levels[n as usize][i as usize] = g;
        }
        Ok(table)
    }

    /// Number of levels held; the table covers levels `0..len()`.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Deepest stored level, `None` for an empty table.
    pub fn depth(&self) -> Option<u32> {
        self.levels.len().checked_sub(1).map(|d| d as u32)
    }

    pub fn level(&self, n: u32) -> Option<&[f64]> {
        self.levels.get(n as usize).map(|v| v.as_slice())
    }

    pub fn get(&self, n: u32, i: u64) -> f64 {
        self.levels
            .get(n as usize)
            .and_then(|row| row.get(i as usize))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn set(&mut self, n: u32, i: u64, value: f64) {
        self.levels[n as usize][i as usize] = value;
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// All entries as `(n, i, γ)` in level-major order.
    pub fn triples(&self) -> impl Iterator<Item = (u32, u64, f64)> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(n, row)| row.iter().enumerate().map(move |(i, &g)| (n as u32, i as u64, g)))
    }
}

/// Rule assigning `γ_{n,i}` to every basis index.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSchedule {
    /// `γ_{n,i} = c(n)` for all `i`.
    PerLevel(LevelLaw),
    Explicit(ExplicitTable),
    /// `γ_{n,i} = scale(n)` on the listed levels, zero elsewhere.
    Lacunary { levels: Vec<u32>, scale: LevelLaw },
    /// `γ_{n,i} = scale(n) ξ_{n,i}`, `ξ` i.i.d. standard normal keyed by `(seed, n, i)`.
    Random { scale: LevelLaw, seed: u64, field: NormalField },
}

impl CoefficientSchedule {
    pub fn zero() -> Self {
        CoefficientSchedule::PerLevel(LevelLaw::Zero)
    }

    pub fn per_level(law: LevelLaw) -> Result<Self> {
        law.validate()?;
        Ok(CoefficientSchedule::PerLevel(law))
    }

    pub fn lacunary(levels: Vec<u32>, scale: LevelLaw) -> Result<Self> {
        scale.validate()?;
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("lacunary levels must be strictly increasing".into()));
        }
        if let Some(&last) = levels.last() {
            if last > MAX_DEPTH {
                return Err(Error::DepthLimit { level: last, max: MAX_DEPTH });
            }
        }
        Ok(CoefficientSchedule::Lacunary { levels, scale })
    }

    pub fn random(scale: LevelLaw, seed: u64) -> Result<Self> {
        scale.validate()?;
        Ok(CoefficientSchedule::Random { scale, seed, field: NormalField::new(seed) })
    }

    #[inline]
    pub fn coefficient(&self, n: u32, i: u64) -> f64 {
        match self {
            CoefficientSchedule::PerLevel(law) => law.at(n),
            CoefficientSchedule::Explicit(t) => t.get(n, i),
            CoefficientSchedule::Lacunary { levels, scale } => {
                if levels.binary_search(&n).is_ok() {
                    scale.at(n)
                } else {
                    0.0
                }
            }
            CoefficientSchedule::Random { scale, field, .. } => {
                let s = scale.at(n);
                if s == 0.0 {
                    0.0
                } else {
                    s * field.at(n, i)
                }
            }
        }
    }

    /// Sound bounds `[lo, hi]` on `γ_{n,i}` over all `i` of level `n`.
    pub fn level_range(&self, n: u32) -> (f64, f64) {
        match self {
            CoefficientSchedule::PerLevel(law) => {
                let c = law.at(n);
                (c, c)
            }
            CoefficientSchedule::Explicit(t) => match t.level(n) {
                Some(row) => row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| (lo.min(g), hi.max(g))),
                None => (0.0, 0.0),
            },
            CoefficientSchedule::Lacunary { .. } => {
                let c = self.coefficient(n, 0);
                (c, c)
            }
            CoefficientSchedule::Random { scale, .. } => {
                let s = scale.at(n).abs() * NORMAL_BOUND;
                (-s, s)
            }
        }
    }

    /// Upper bound on `Σ_{n >= from} max_i |γ_{n,i}|`.
    pub fn tail_sum(&self, from: u32) -> f64 {
        match self {
            CoefficientSchedule::PerLevel(law) => law.tail_sum(from),
            CoefficientSchedule::Explicit(t) => t
                .levels()
                .iter()
                .skip(from as usize)
                .map(|row| row.iter().fold(0.0f64, |m, g| m.max(g.abs())))
                .sum(),
            CoefficientSchedule::Lacunary { levels, scale } => {
                levels.iter().filter(|&&n| n >= from).map(|&n| scale.at(n).abs()).sum()
            }
            CoefficientSchedule::Random { scale, .. } => NORMAL_BOUND * scale.tail_sum(from),
        }
    }

    /// Deepest level carrying non-zero coefficients, if finite.
    pub fn natural_depth(&self) -> Option<u32> {
        match self {
            CoefficientSchedule::Explicit(t) => t.depth(),
            CoefficientSchedule::Lacunary { levels, .. } => levels.last().copied(),
            CoefficientSchedule::PerLevel(LevelLaw::Zero) => Some(0),
            CoefficientSchedule::PerLevel(LevelLaw::Table(c)) => Some(c.len().saturating_sub(1) as u32),
            _ => None,
        }
    }

    /// Materializes levels `0..=depth` into an explicit table.
    pub fn materialize(&self, depth: u32) -> Result<ExplicitTable> {
        if depth > MAX_DEPTH {
            return Err(Error::DepthLimit { level: depth, max: MAX_DEPTH });
        }
        if depth > 26 {
            return Err(Error::Capacity { level: depth, budget: 26 });
        }
        let levels = (0..=depth)
            .map(|n| (0..level_width(n)).map(|i| self.coefficient(n, i)).collect())
            .collect();
        ExplicitTable::new(levels)
    }

    /// Parses a schedule name as used on the command line:
    /// `zero`, `takagi`, `takagi_log`, `sqrt_bridge`, `nonhoelder`,
    /// `power:<beta>`, `lacunary:<n1>,<n2>,...`, `random:<beta>`.
    pub fn parse(spec: &str, seed: u64) -> Result<Self> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (spec.trim(), None),
        };
        let float = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| Error::InvalidParameter(format!("schedule '{name}' needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| Error::InvalidParameter(format!("bad parameter for '{name}': {e}")))
        };
        match name {
            "random" => CoefficientSchedule::random(LevelLaw::power(float(arg)?)?, seed),
            "power" => named_schedule(name, &[float(arg)?]),
            "lacunary" => {
                let list = arg.ok_or_else(|| Error::InvalidParameter("lacunary needs a level list".into()))?;
                let levels = list
                    .split(',')
                    .map(|s| s.trim().parse::<u32>().map(f64::from))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::InvalidParameter(format!("bad lacunary level list: {e}")))?;
                named_schedule(name, &levels)
            }
            _ => named_schedule(name, &[]),
        }
    }
}

/// The closed-form schedules used throughout: the four figure schedules, the
/// power-law family and lacunary sums with scale `2^{-n_k}`.
pub fn named_schedule(name: &str, params: &[f64]) -> Result<CoefficientSchedule> {
    match name {
        "zero" => Ok(CoefficientSchedule::zero()),
        "takagi" => Ok(CoefficientSchedule::PerLevel(LevelLaw::Power { beta: 1.0 })),
        "takagi_log" => Ok(CoefficientSchedule::PerLevel(LevelLaw::TakagiLog)),
        "sqrt_bridge" => Ok(CoefficientSchedule::PerLevel(LevelLaw::Power { beta: 0.5 })),
        "nonhoelder" => Ok(CoefficientSchedule::PerLevel(LevelLaw::InverseSquare)),
        "power" => {
            let beta = *params
                .first()
                .ok_or_else(|| Error::InvalidParameter("power needs an exponent".into()))?;
            CoefficientSchedule::per_level(LevelLaw::power(beta)?)
        }
        "lacunary" => {
            let levels = params
                .iter()
                .map(|&v| {
                    if v >= 0.0 && v.fract() == 0.0 {
                        Ok(v as u32)
                    } else {
                        Err(Error::InvalidParameter(format!("lacunary level {v} is not a non-negative integer")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            CoefficientSchedule::lacunary(levels, LevelLaw::Power { beta: 1.0 })
        }
        other => Err(Error::UnknownSchedule(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_schedules() {
        assert_eq!(named_schedule("takagi", &[]).unwrap().coefficient(3, 5), 0.125);
        assert_eq!(named_schedule("nonhoelder", &[]).unwrap().coefficient(0, 0), 1.0);
        assert_eq!(named_schedule("power", &[0.75]).unwrap().coefficient(4, 0), 0.125);
        assert_eq!(named_schedule("takagi_log", &[]).unwrap().coefficient(3, 1), 3.0 / 8.0);
        assert_eq!(named_schedule("sqrt_bridge", &[]).unwrap().coefficient(2, 0), 0.5);
    }

    #[test]
    fn rejects_bad_names() {
        assert_eq!(named_schedule("weierstrass", &[]), Err(Error::UnknownSchedule("weierstrass".into())));
        assert!(matches!(named_schedule("power", &[0.0]), Err(Error::InvalidParameter(_))));
        assert!(matches!(named_schedule("power", &[-1.0]), Err(Error::InvalidParameter(_))));
        assert!(matches!(named_schedule("lacunary", &[3.0, 2.0]), Err(Error::InvalidParameter(_))));
        assert!(CoefficientSchedule::parse("power", 0).is_err());
    }

    #[test]
    fn parse_round() {
        let l = CoefficientSchedule::parse("lacunary:1,2,6,24", 0).unwrap();
        assert_eq!(l.coefficient(6, 3), 1.0 / 64.0);
        assert_eq!(l.coefficient(5, 3), 0.0);
        let p = CoefficientSchedule::parse("power:0.5", 0).unwrap();
        assert_eq!(p, named_schedule("sqrt_bridge", &[]).unwrap());
    }

    #[test]
    fn tails_match_brute_force() {
        let laws = [
            LevelLaw::Power { beta: 1.0 },
            LevelLaw::Power { beta: 0.3 },
            LevelLaw::TakagiLog,
            LevelLaw::InverseSquare,
        ];
        for law in &laws {
            for from in [0u32, 1, 5, 11, 21] {
                let brute: f64 = (from..200_000).map(|n| law.at(n)).sum();
                let t = law.tail_sum(from);
                assert!(t >= brute * (1.0 - 1e-12), "{law:?} from {from}: {t} < {brute}");
                // The inverse-square tail is truncated at 2e5 in the brute sum.
                let slack = if matches!(law, LevelLaw::InverseSquare) { 1e-5 } else { 1e-12 };
                assert!(t - brute <= slack, "{law:?} from {from}: {t} vs {brute}");
            }
        }
    }

    #[test]
    fn random_is_reproducible() {
        let a = CoefficientSchedule::random(LevelLaw::Power { beta: 0.5 }, 9).unwrap();
        let b = CoefficientSchedule::random(LevelLaw::Power { beta: 0.5 }, 9).unwrap();
        assert_eq!(a.materialize(8).unwrap(), b.materialize(8).unwrap());
        let c = CoefficientSchedule::random(LevelLaw::Power { beta: 0.5 }, 10).unwrap();
        assert_ne!(a.materialize(4).unwrap(), c.materialize(4).unwrap());
    }

    #[test]
    fn explicit_validation() {
        assert!(ExplicitTable::new(vec![vec![1.0], vec![1.0]]).is_err());
        assert!(ExplicitTable::new(vec![vec![f64::NAN]]).is_err());
        let t = ExplicitTable::from_triples(&[(0, 0, 1.0), (2, 3, -2.0)]).unwrap();
        assert_eq!(t.depth(), Some(2));
        assert_eq!(t.get(1, 1), 0.0);
        assert_eq!(t.get(2, 3), -2.0);
        assert!(ExplicitTable::from_triples(&[(2, 4, 1.0)]).is_err());
    }
}
