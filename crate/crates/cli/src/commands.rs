//! Subcommand implementations.

use std::fs::File;
use std::path::PathBuf;

use clap::{ArgGroup, Args};

use schauder::algebra::{
    compose_analytic, compose_poly, differentiable_element, omega_modulus, power_family, vanish_shift, Polynomial,
    PowerSeriesPatch,
};
use schauder::io::{fmt_f64, read_grid, read_table, write_grid, write_table};
use schauder::levelset::{counts_csv, cover_counts, dimension_fit, lacunary_series, recursion_check};
use schauder::regularity::{
    classify, derivative_scan, holder_scan_with, level_extremes, LevelExtremes, Side, DEFAULT_PROBES, DEFAULT_WINDOW,
};
use schauder::stochastic::{bridge_sample, ensemble_stats, percolation_estimate};
use schauder::{analyze as analyze_grid, named_schedule, CoefficientSchedule, Error, Func, Result, SampleGrid, SchauderSeries};

use crate::output::OutDir;
use crate::{ScanKind, SeriesArgs, SideArg};

impl SeriesArgs {
    pub fn build(&self) -> Result<SchauderSeries> {
        match &self.table {
            Some(path) => SchauderSeries::from_table(self.a, self.b, read_table(File::open(path)?)?),
            None => SchauderSeries::new(self.a, self.b, CoefficientSchedule::parse(&self.schedule, self.seed)?, self.depth),
        }
    }
}

fn sides(s: SideArg) -> Vec<Side> {
    match s {
        SideArg::Left => vec![Side::Left],
        SideArg::Right => vec![Side::Right],
        SideArg::Both => vec![Side::Left, Side::Right],
    }
}

fn grid_csv(g: &SampleGrid) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_grid(g, &mut buf)?;
    Ok(buf)
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    series: SeriesArgs,
    /// Grid level M (2^M + 1 samples)
    #[arg(long, default_value_t = 12)]
    grid: u32,
}

pub fn synth(out: &OutDir, a: &SynthArgs) -> Result<()> {
    let s = a.series.build()?;
    out.write("grid.csv", &grid_csv(&s.eval_grid(a.grid)?)?)?;
    out.write_meta("synth", a)
}

fn write_analysis(out: &OutDir, g: &SampleGrid) -> Result<schauder::Analysis> {
    let a = analyze_grid(g)?;
    let mut buf = Vec::new();
    write_table(&a.table, &mut buf)?;
    out.write("coefficients.csv", &buf)?;
    out.write_str("affine.txt", &format!("a={}\nb={}\nlevel={}\n", fmt_f64(a.a), fmt_f64(a.b), g.level()))?;
    Ok(a)
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Grid CSV (x,value) with 2^M + 1 rows
    #[arg(long)]
    input: PathBuf,
}

pub fn analyze(out: &OutDir, a: &AnalyzeArgs) -> Result<()> {
    let g = read_grid(File::open(&a.input)?)?;
    write_analysis(out, &g)?;
    out.write_meta("analyze", a)
}

#[derive(Debug, Args)]
pub struct RegularityArgs {
    #[command(flatten)]
    series: SeriesArgs,
    /// Grid CSV to analyze instead of a schedule
    #[arg(long)]
    input: Option<PathBuf>,
    /// Share of the deepest levels standing in for liminf/limsup
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: f64,
}

fn write_report(out: &OutDir, e: &LevelExtremes, window: f64) -> Result<()> {
    let r = classify(e, window)?;
    out.write_str("report.txt", &r.to_kv())?;
    out.write_str("extremes.csv", &r.extremes_csv())
}

pub fn regularity(out: &OutDir, a: &RegularityArgs) -> Result<()> {
    let e = match &a.input {
        Some(p) => level_extremes(&analyze_grid(&read_grid(File::open(p)?)?)?.table)?,
        None => {
            let s = a.series.build()?;
            LevelExtremes::of_schedule(&s.schedule, s.depth)?
        }
    };
    write_report(out, &e, a.window)?;
    out.write_meta("regularity", a)
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    series: SeriesArgs,
    #[arg(long)]
    x0: f64,
    #[arg(long, value_enum, default_value_t = SideArg::Both)]
    side: SideArg,
    #[arg(long, value_enum, default_value_t = ScanKind::Holder)]
    kind: ScanKind,
    #[arg(long, default_value_t = 8)]
    m_min: u32,
    #[arg(long, default_value_t = 28)]
    m_max: u32,
    /// Probes per dyadic band (Hölder scans)
    #[arg(long, default_value_t = DEFAULT_PROBES)]
    probes: usize,
}

/// Runs the requested scans of `f` and returns the summary lines.
fn run_scans(out: &OutDir, f: &Func, x0: f64, side: SideArg, kind: ScanKind, m: (u32, u32), probes: usize) -> Result<String> {
    let mut summary = format!("x0={x0}\n");
    for side in sides(side) {
        match kind {
            ScanKind::Holder => {
                let r = holder_scan_with(f, x0, side, m.0, m.1, probes)?;
                out.write_str(&format!("holder_{}.csv", side.name()), &r.to_csv())?;
                summary += &format!("holder_{}={}\n", side.name(), r.exponent.value());
            }
            ScanKind::Derivative => {
                let r = derivative_scan(f, x0, side, m.0, m.1)?;
                out.write_str(&format!("derivative_{}.csv", side.name()), &r.to_csv())?;
                summary += &format!(
                    "derivative_{}={}\nmax_abs_quotient_{}={}\n",
                    side.name(),
                    r.verdict.name(),
                    side.name(),
                    r.max_abs()
                );
            }
        }
    }
    Ok(summary)
}

pub fn scan(out: &OutDir, a: &ScanArgs) -> Result<()> {
    let f: Func = a.series.build()?.into();
    let summary = run_scans(out, &f, a.x0, a.side, a.kind, (a.m_min, a.m_max), a.probes)?;
    out.write_str("summary.txt", &summary)?;
    out.write_meta("scan", a)
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("outer").required(true).args(["poly", "patch", "exp_patch", "power"])))]
pub struct ComposeArgs {
    #[command(flatten)]
    series: SeriesArgs,
    /// Outer polynomial, `poly: c0 c1 ...`
    #[arg(long)]
    poly: Option<String>,
    /// Outer analytic patch, `patch: y0 radius c0 c1 ...` (repeatable)
    #[arg(long)]
    patch: Vec<String>,
    /// exp patch `center:radius` (repeatable)
    #[arg(long)]
    exp_patch: Vec<String>,
    /// Power λ > 0 of a positive series
    #[arg(long)]
    power: Option<f64>,
    /// Grid level of the re-analysis
    #[arg(long, default_value_t = 14)]
    grid: u32,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: f64,
    /// Also run derivative and Hölder scans of the composition at x0
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long, default_value_t = 4)]
    m_min: u32,
    #[arg(long, default_value_t = 24)]
    m_max: u32,
}

fn exp_patch(spec: &str) -> Result<PowerSeriesPatch> {
    let (c, r) = spec
        .split_once(':')
        .ok_or_else(|| Error::Malformed(format!("expected center:radius, got '{spec}'")))?;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Malformed(format!("bad number '{s}': {e}")));
    PowerSeriesPatch::exp(num(c)?, num(r)?)
}

pub fn compose(out: &OutDir, a: &ComposeArgs) -> Result<()> {
    let s = a.series.build()?;
    let f: Func = if let Some(p) = &a.poly {
        compose_poly(&s.clone().into(), &p.parse::<Polynomial>()?)
    } else if let Some(lambda) = a.power {
        power_family(&s, lambda)?
    } else {
        let mut patches = a.patch.iter().map(|p| p.parse()).collect::<Result<Vec<PowerSeriesPatch>>>()?;
        patches.extend(a.exp_patch.iter().map(|p| exp_patch(p)).collect::<Result<Vec<_>>>()?);
        compose_analytic(&s, &patches)?
    };
    let g = SampleGrid::sample(a.grid, |x| f.eval(x))?;
    out.write("grid.csv", &grid_csv(&g)?)?;
    let analysis = write_analysis(out, &g)?;
    write_report(out, &level_extremes(&analysis.table)?, a.window)?;
    if let Some(x0) = a.x0 {
        let mut summary = run_scans(out, &f, x0, SideArg::Both, ScanKind::Derivative, (a.m_min, a.m_max), 0)?;
        summary += &run_scans(out, &f, x0, SideArg::Both, ScanKind::Holder, (a.m_min, a.m_max), DEFAULT_PROBES)?;
        out.write_str("summary.txt", &summary)?;
    }
    out.write_meta("compose", a)
}

#[derive(Debug, Args)]
pub struct OmegaArgs {
    #[command(flatten)]
    series: SeriesArgs,
    #[arg(long, default_value_t = 0.5)]
    x0: f64,
    /// Level of the t-grid of the modulus table
    #[arg(long, default_value_t = 18)]
    level: u32,
    #[arg(long, default_value_t = 3)]
    m_min: u32,
    #[arg(long, default_value_t = 18)]
    m_max: u32,
    /// Uniform tolerance of the polynomial approximation of F²
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 1024)]
    max_degree: usize,
}

pub fn omega(out: &OutDir, a: &OmegaArgs) -> Result<()> {
    let f: Func = a.series.build()?.into();
    let shift = vanish_shift(&f, a.x0)?;
    let table = omega_modulus(&shift.func, a.x0, a.level)?;
    out.write_str("omega.csv", &table.to_csv())?;
    let h = differentiable_element(&shift.func, a.x0, table)?;
    let hf = h.func();
    let mut csv = String::from("side,m,h,quotient,bound\n");
    let mut summary = format!("x0={}\nnon_constant={}\n", a.x0, shift.non_constant);
    let mut worst = 0.0f64;
    for side in [Side::Left, Side::Right] {
        let Ok(scan) = derivative_scan(&hf, a.x0, side, a.m_min, a.m_max) else {
            summary += &format!("derivative_{}=skipped\n", side.name());
            continue;
        };
        for &(m, q) in &scan.quotients {
            let step = (-(m as f64)).exp2();
            worst = worst.max(q.abs() / step);
            csv += &format!("{},{m},{},{},{}\n", side.name(), fmt_f64(step), fmt_f64(q), fmt_f64(step));
        }
        summary += &format!("derivative_{}={}\nmax_abs_quotient_{}={}\n", side.name(), scan.verdict.name(), side.name(), scan.max_abs());
    }
    out.write_str("quotients.csv", &csv)?;
    let approx = h.polynomial_approx(a.tol, a.max_degree);
    summary += &format!(
        "max_quotient_over_step={worst}\ncontract_excess={}\ngrid_slack={}\npolynomial_degree={}\npolynomial_error={}\n",
        h.contract_excess(a.level.min(14))?,
        h.table.slack(),
        approx.degree(),
        approx.error
    );
    out.write_str("summary.txt", &summary)?;
    out.write_meta("omega", a)
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("level").required(true).args(["lambda", "kahane"])))]
pub struct LevelsetArgs {
    #[command(flatten)]
    series: SeriesArgs,
    /// Level value λ
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Use the distinguished level: 2/3 in the classical Takagi scale,
    /// rescaled by f(1/2) / (1/2)
    #[arg(long)]
    kahane: bool,
    /// Use the lacunary series with these levels instead of --schedule
    #[arg(long, value_delimiter = ',')]
    lacunary: Option<Vec<u32>>,
    #[arg(long, default_value_t = 12)]
    n_min: u32,
    #[arg(long, default_value_t = 22)]
    n_max: u32,
}

pub fn levelset(out: &OutDir, a: &LevelsetArgs) -> Result<()> {
    let mut notes = String::new();
    let s = match &a.lacunary {
        Some(levels) => {
            let (s, warnings) = lacunary_series(levels, schauder::MAX_DEPTH)?;
            for w in warnings {
                notes += &format!("warning={w}\n");
            }
            s
        }
        None => a.series.build()?,
    };
    let lambda = match a.lambda {
        Some(l) => l,
        None => 2.0 / 3.0 * s.eval(0.5)? / 0.5,
    };
    let counts = cover_counts(&s, lambda, a.n_min..=a.n_max)?;
    out.write_str("counts.csv", &counts_csv(&counts))?;
    let fit = dimension_fit(&counts)?;
    let text = format!("lambda={lambda}\n") + &fit.to_kv() + &notes;
    if let Some(levels) = &a.lacunary {
        let at: Vec<u64> = levels
            .iter()
            .map(|&n| schauder::levelset::cover_count(&s, lambda, n).map(|c| c.n_upper))
            .collect::<Result<_>>()?;
        let mut csv = String::from("k,n_k,lhs,rhs,holds\n");
        for r in recursion_check(levels, &at, 1.0) {
            csv += &format!("{},{},{},{},{}\n", r.k, levels[r.k], r.lhs, fmt_f64(r.rhs), r.holds);
        }
        out.write_str("recursion.csv", &csv)?;
    }
    out.write_str("fit.txt", &text)?;
    out.write_meta("levelset", a)
}

#[derive(Debug, Args)]
pub struct BridgeArgs {
    #[arg(long, default_value_t = 20)]
    depth: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 12)]
    grid: u32,
    /// Ensemble size for the statistics at --x
    #[arg(long, default_value_t = 10_000)]
    ensemble: usize,
    #[arg(long, default_value_t = 0.5)]
    x: f64,
}

pub fn bridge(out: &OutDir, a: &BridgeArgs) -> Result<()> {
    let b = bridge_sample(a.depth, a.seed)?;
    out.write("grid.csv", &grid_csv(&b.series.eval_grid(a.grid)?)?)?;
    let st = ensemble_stats(a.depth, a.x, a.seed, a.ensemble)?;
    out.write_str(
        "stats.txt",
        &format!(
            "b0={}\nb1={}\nx={}\nensemble={}\nmean={}\nvariance={}\n",
            b.series.eval(0.0)?,
            b.series.eval(1.0)?,
            st.x,
            st.count,
            st.mean,
            st.variance
        ),
    )?;
    out.write_meta("bridge", a)
}

#[derive(Debug, Args)]
pub struct PercolateArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn percolate(out: &OutDir, a: &PercolateArgs) -> Result<()> {
    let e = percolation_estimate(a.n, a.k, a.eps, a.trials, a.seed)?;
    out.write_str("trials.csv", &e.to_csv())?;
    out.write_str("summary.txt", &e.summary())?;
    out.write_meta("percolate", a)
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    #[arg(long, default_value_t = 14)]
    grid: u32,
    #[arg(long, default_value_t = 40)]
    depth: u32,
}

pub const FIGURES: [(&str, &str, &str); 4] = [
    (
        "fig1",
        "takagi",
        "Takagi's function $T(x)=\\sum_{n\\geq 0}\\sum_{i=0}^{2^n-1} 2^{-n}\\sigma_{n,i}(x)$ is nowhere differentiable.",
    ),
    (
        "fig2",
        "takagi_log",
        "Slightly increasing the coefficients in Takagi's function yields a function  $T_2(x)=\\sum_{n\\geq 0}\\sum_{i=0}^{2^n-1} n2^{-n}\\sigma_{n,i}(x)$ that is nowhere locally Lipschitz continuous.",
    ),
    (
        "fig3",
        "sqrt_bridge",
        "The function $T(x)=\\sum_{n\\geq 0}\\sum_{i=0}^{2^n-1} 2^{-n/2}\\sigma_{n,i}(x)$ is $\\alpha$-Hölder continuous for any $\\alpha>\\frac{1}{2}$ and shows similar regularity as a typical path of a Brownian motion..",
    ),
    (
        "fig4",
        "nonhoelder",
        "The function $T(x)=\\sum_{n\\geq 0}\\sum_{i=0}^{2^n-1} (1+n)^{-2}\\sigma_{n,i}(x)$ is completely non-Hölder.",
    ),
];

pub fn figures(out: &OutDir, a: &FiguresArgs) -> Result<()> {
    let mut captions = String::new();
    for (name, schedule, caption) in FIGURES {
        let s = SchauderSeries::from_schedule(named_schedule(schedule, &[])?, a.depth)?;
        out.write(&format!("{name}.csv"), &grid_csv(&s.eval_grid(a.grid)?)?)?;
        captions += &format!("{name} schedule={schedule}\n{caption}\n\n");
    }
    out.write_str("captions.txt", &captions)?;
    out.write_meta("figures", a)
}
