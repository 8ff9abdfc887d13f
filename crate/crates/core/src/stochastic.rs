//! Brownian bridges through their Faber-Schauder expansion and the
//! exceptional-vertex percolation on the binary tree.

use rayon::prelude::*;

use crate::basis::MAX_DEPTH;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, NormalField};
use crate::schedule::{CoefficientSchedule, LevelLaw};
use crate::series::SchauderSeries;

/// `B = Σ_n Σ_i 2^{-n/2} ξ_{n,i} σ_{n,i}` truncated at `depth`.
///
/// With this normalization `B(1/2) = ξ_{0,0}`, so `Var B(1/2) = 1`, four times
/// the variance of the standard bridge.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeSample {
    pub seed: u64,
    pub depth: u32,
    pub series: SchauderSeries,
}

pub fn bridge_sample(depth: u32, seed: u64) -> Result<BridgeSample> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthLimit { level: depth, max: MAX_DEPTH });
    }
    let schedule = CoefficientSchedule::random(LevelLaw::Power { beta: 0.5 }, seed)?;
    let series = SchauderSeries::from_schedule(schedule, depth)?;
    Ok(BridgeSample { seed, depth, series })
}

/// Sample mean and unbiased variance of `B(x)` over `count` derived seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStats {
    pub x: f64,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
}

pub fn ensemble_stats(depth: u32, x: f64, base_seed: u64, count: usize) -> Result<EnsembleStats> {
    if count < 2 {
        return Err(Error::InvalidParameter("ensemble needs at least two samples".into()));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(x));
    }
    let values: Vec<f64> = (0..count as u64)
        .into_par_iter()
        .map(|t| bridge_sample(depth, derive_seed(base_seed, t)).map(|b| b.series.eval_unchecked(x)))
        .collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / count as f64;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    Ok(EnsembleStats { x, count, mean, variance })
}

/// Largest `n + k` explored by the percolation trial.
pub const PERCOLATION_BUDGET: u32 = 24;

/// Which layer index enters the exceptional threshold `2^{-ε·layer}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// The vertex's own layer `m`.
    Layer,
    /// The band's top layer `n`, as in the probability estimate of the bound.
    BandTop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PercolationTrial {
    pub n: u32,
    pub k: u32,
    pub epsilon: f64,
    pub seed: u64,
    pub exists_exceptional_path: bool,
}

fn check_band(n: u32, k: u32, epsilon: f64) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidParameter("band depth k must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in [0,1], got {epsilon}")));
    }
    if n + k > PERCOLATION_BUDGET {
        return Err(Error::Capacity { level: n + k, budget: PERCOLATION_BUDGET });
    }
    Ok(())
}

struct Band {
    field: NormalField,
    n: u32,
    last: u32,
    epsilon: f64,
    rule: Threshold,
}

impl Band {
    fn exceptional(&self, m: u32, i: u64) -> bool {
        let layer = match self.rule {
            Threshold::Layer => m,
            Threshold::BandTop => self.n,
        };
        self.field.at(m, i).abs() < (-self.epsilon * layer as f64).exp2()
    }

    /// Exceptional, and either on the last layer or above a live child.
    fn live(&self, m: u32, i: u64) -> bool {
        self.exceptional(m, i) && (m == self.last || self.live(m + 1, 2 * i) || self.live(m + 1, 2 * i + 1))
    }
}

/// Whether some downward path from layer `n` to layer `n + k` passes only
/// through exceptional vertices (`|ξ_{m,i}| < 2^{-εm}`).
pub fn percolation_trial(n: u32, k: u32, epsilon: f64, seed: u64) -> Result<PercolationTrial> {
    percolation_trial_with(n, k, epsilon, seed, Threshold::Layer)
}

pub fn percolation_trial_with(n: u32, k: u32, epsilon: f64, seed: u64, rule: Threshold) -> Result<PercolationTrial> {
    check_band(n, k, epsilon)?;
    let band = Band { field: NormalField::new(seed), n, last: n + k, epsilon, rule };
    let exists = (0..1u64 << n).any(|i| band.live(n, i));
    Ok(PercolationTrial { n, k, epsilon, seed, exists_exceptional_path: exists })
}

/// `log₂` of the displayed bound `2^{n+2k-(k+1)εn}`.
pub fn log2_exceptional_bound(n: u32, k: u32, epsilon: f64) -> f64 {
    n as f64 + 2.0 * k as f64 - (k + 1) as f64 * epsilon * n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercolationEstimate {
    pub n: u32,
    pub k: u32,
    pub epsilon: f64,
    pub base_seed: u64,
    /// `(trial, seed, success)` in trial order.
    pub trials: Vec<(u64, u64, bool)>,
    pub successes: u64,
    pub p_hat: f64,
    /// Success rate under [`Threshold::BandTop`] on the same samples.
    pub p_hat_band_top: f64,
    pub log2_bound: f64,
    pub paper_bound: f64,
    /// The bound is at least 1 and says nothing.
    pub vacuous: bool,
    pub consistent: bool,
}

impl PercolationEstimate {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("trial,seed,success\n");
        for &(t, seed, ok) in &self.trials {
            s += &format!("{t},{seed},{}\n", ok as u8);
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "n={}\nk={}\nepsilon={}\nbase_seed={}\ntrials={}\nsuccesses={}\np_hat={}\np_hat_band_top={}\nlog2_bound={}\nbound={:e}\nvacuous={}\nconsistent={}\n",
            self.n,
            self.k,
            self.epsilon,
            self.base_seed,
            self.trials.len(),
            self.successes,
            self.p_hat,
            self.p_hat_band_top,
            self.log2_bound,
            self.paper_bound,
            self.vacuous,
            self.consistent
        );
        if self.vacuous {
            s += "note=bound >= 1 is vacuous; consistency carries no information\n";
        }
        s
    }
}

/// Monte Carlo over `trials` seeds derived from `base_seed`. Independent of
/// thread count: each trial is a pure function of its index.
pub fn percolation_estimate(n: u32, k: u32, epsilon: f64, trials: u64, base_seed: u64) -> Result<PercolationEstimate> {
    check_band(n, k, epsilon)?;
    if trials < 1 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let results: Vec<(u64, u64, bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(base_seed, t);
            let a = percolation_trial_with(n, k, epsilon, seed, Threshold::Layer)?;
            let b = percolation_trial_with(n, k, epsilon, seed, Threshold::BandTop)?;
            Ok((t, seed, a.exists_exceptional_path, b.exists_exceptional_path))
        })
        .collect::<Result<_>>()?;
    let successes = results.iter().filter(|r| r.2).count() as u64;
    let top = results.iter().filter(|r| r.3).count() as u64;
    let p_hat = successes as f64 / trials as f64;
    let log2_bound = log2_exceptional_bound(n, k, epsilon);
    let paper_bound = log2_bound.exp2();
    let consistent = p_hat <= paper_bound.min(1.0) + 3.0 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
    Ok(PercolationEstimate {
        n,
        k,
        epsilon,
        base_seed,
        trials: results.iter().map(|r| (r.0, r.1, r.2)).collect(),
        successes,
        p_hat,
        p_hat_band_top: top as f64 / trials as f64,
        log2_bound,
        paper_bound,
        vacuous: paper_bound >= 1.0,
        consistent,
    })
}

/// Enumerates all `2^{n+k}` root-to-leaf paths of the band; for testing the
/// lazy search.
pub fn percolation_brute_force(n: u32, k: u32, epsilon: f64, seed: u64) -> Result<bool> {
    check_band(n, k, epsilon)?;
    let field = NormalField::new(seed);
    let exc = |m: u32, i: u64| field.at(m, i).abs() < (-epsilon * m as f64).exp2();
    Ok((0..1u64 << (n + k)).any(|leaf| (0..=k).all(|d| exc(n + d, leaf >> (k - d)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::analyze;

    #[test]
    fn bridge_endpoints_and_midpoint() {
        for seed in 0..20 {
            let b = bridge_sample(20, seed).unwrap();
            assert_eq!(b.series.eval(0.0).unwrap(), 0.0);
            assert_eq!(b.series.eval(1.0).unwrap(), 0.0);
            assert_eq!(b.series.eval(0.5).unwrap(), NormalField::new(seed).at(0, 0));
        }
        assert!(bridge_sample(51, 0).is_err());
    }

    #[test]
    fn bridge_expansion_recovered() {
        let b = bridge_sample(12, 99).unwrap();
        let a = analyze(&b.series.eval_grid(10).unwrap()).unwrap();
        for (n, i, g) in a.table.triples() {
            assert!((g - b.series.schedule.coefficient(n, i)).abs() < 1e-12, "({n},{i})");
        }
    }

    #[test]
    fn bridge_coefficients_uncorrelated() {
        let pairs = [((0, 0), (1, 0)), ((1, 0), (1, 1)), ((3, 5), (7, 100)), ((2, 1), (2, 2)), ((0, 0), (10, 3))];
        let seeds = 10_000u64;
        for ((n1, i1), (n2, i2)) in pairs {
            let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
            for s in 0..seeds {
                let f = NormalField::new(derive_seed(5, s));
                let (x, y) = (f.at(n1, i1), f.at(n2, i2));
                sxy += x * y;
                sxx += x * x;
                syy += y * y;
            }
            let r = sxy / (sxx * syy).sqrt();
            assert!(r.abs() < 0.05, "{r}");
        }
    }

    #[test]
    fn lazy_search_matches_enumeration() {
        for seed in 0..30 {
            for (n, k) in [(1, 1), (2, 3), (4, 4), (3, 7), (6, 2)] {
                for eps in [0.0, 0.1, 0.3] {
                    let lazy = percolation_trial(n, k, eps, seed).unwrap().exists_exceptional_path;
                    assert_eq!(lazy, percolation_brute_force(n, k, eps, seed).unwrap(), "n={n} k={k} eps={eps}");
                }
            }
        }
    }

    #[test]
    fn degenerate_epsilon_percolates() {
        let hits = (0..100).filter(|&s| percolation_trial(4, 2, 0.0, s).unwrap().exists_exceptional_path).count();
        assert!(hits > 90, "{hits}");
    }

    #[test]
    fn monotone_in_epsilon() {
        for seed in 0..200 {
            let mut prev = true;
            for j in 0..=10 {
                let now = percolation_trial(5, 3, j as f64 / 10.0, seed).unwrap().exists_exceptional_path;
                assert!(prev || !now, "seed {seed}");
                prev = now;
            }
        }
    }

    #[test]
    fn estimate_flags() {
        assert!((log2_exceptional_bound(12, 5, 0.9) + 42.8).abs() < 1e-12);
        let e = percolation_estimate(6, 3, 0.5, 200, 1).unwrap();
        assert_eq!(e.log2_bound, 0.0);
        assert!(e.vacuous && e.consistent && e.summary().contains("vacuous"));
        assert!(percolation_estimate(20, 5, 0.5, 1, 1).is_err());
        assert!(percolation_estimate(5, 0, 0.5, 1, 1).is_err());
        assert!(e.to_csv().starts_with("trial,seed,success\n0,"));
    }
}
