//! Reproducible experiment suites and their CSV reports.
//!
//! A report is a header row, one row per case in case order, then a block
//! of `#` lines with the parameters, summary statistics and every declared
//! tolerance together with its outcome.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::boundary_space::{
    alpha_energy, block_inequality_sides, block_oscillation, double_integral_energy, dyadic_energy,
    dyadic_energy_with, level_oscillation, lp_norm, random_sign_function, AlphaSequence,
    BoundaryFn,
};
use crate::error::{Error, Result};
use crate::extension_ops::{alpha_extend, gagliardo_extend, nonlinearity_gap, whitney_extend};
use crate::families::sample_case;
use crate::measures::{ahlfors_bounds, ahlfors_check, doubling_scan, MEASURE_CSV_HEADER};
use crate::params::SpaceParams;
use crate::tree_functions::{log_example, newtonian_norm, trace, trace_majorant, TreeFn};

/// Largest admissible comparability constant for the ratio suites.
pub const RATIO_BOUND: f64 = 50.0;
/// Largest relative drift of a ratio interval between depths `N − 2` and `N`.
pub const STABILITY: f64 = 0.25;
/// Slack for identities that hold exactly in exact arithmetic.
pub const EXACT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    TraceExt,
    Borderline,
    Alpha,
    Optimal,
    ExamStrict,
    LogExample,
    Doubling,
    Ahlfors,
    NormEquiv,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::TraceExt,
        Suite::Borderline,
        Suite::Alpha,
        Suite::Optimal,
        Suite::ExamStrict,
        Suite::LogExample,
        Suite::Doubling,
        Suite::Ahlfors,
        Suite::NormEquiv,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::TraceExt => "trace-ext-th2",
            Suite::Borderline => "borderline-th3",
            Suite::Alpha => "alpha-th5",
            Suite::Optimal => "optimal-th4",
            Suite::ExamStrict => "exam-strict",
            Suite::LogExample => "log-example",
            Suite::Doubling => "doubling",
            Suite::Ahlfors => "ahlfors",
            Suite::NormEquiv => "norm-equiv",
        }
    }

    /// Sample count used when the config does not set one.
    pub fn default_samples(&self) -> usize {
        match self {
            Suite::TraceExt | Suite::Optimal | Suite::ExamStrict => 200,
            Suite::Doubling | Suite::Ahlfors => 500,
            _ => 100,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub params: SpaceParams,
    pub seed: u64,
    /// Number of cases. The log-example suite has one row per level instead.
    pub samples: usize,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(suite: Suite, params: SpaceParams) -> Self {
        ExperimentConfig {
            suite,
            params,
            seed: 0,
            samples: suite.default_samples(),
            out: None,
        }
    }

    /// Parses a parameter config that may also carry `seed=` and
    /// `samples=` lines.
    pub fn parse(suite: Suite, text: &str) -> Result<Self> {
        let mut seed = None;
        let mut samples = None;
        let mut rest = String::with_capacity(text.len());
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let err = |msg: String| Error::Config { line: i + 1, msg };
            match line.split_once('=').map(|(k, v)| (k.trim(), v.trim())) {
                Some(("seed", v)) => {
                    if seed.is_some() {
                        return Err(err("duplicate key `seed`".into()));
                    }
                    seed = Some(v.parse().map_err(|_| err(format!("`{v}` is not a seed")))?);
                }
                Some(("samples", v)) => {
                    if samples.is_some() {
                        return Err(err("duplicate key `samples`".into()));
                    }
                    samples = Some(v.parse().map_err(|_| err(format!("`{v}` is not a count")))?);
                }
                // keep line numbers intact for the parameter parser
                _ => rest.push_str(raw),
            }
            rest.push('\n');
        }
        let mut cfg = ExperimentConfig::new(suite, SpaceParams::parse_config(&rest)?);
        cfg.seed = seed.unwrap_or(0);
        if let Some(s) = samples {
            cfg.samples = s;
        }
        Ok(cfg)
    }

    pub fn load(suite: Suite, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(suite, &text)
    }
}

/// A declared tolerance and its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
    Below,
    Above,
    Equal,
}

impl Relation {
    fn symbol(&self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Below => "<",
            Relation::Above => ">",
            Relation::Equal => "==",
        }
    }

    fn holds(&self, v: f64, t: f64) -> bool {
        match self {
            Relation::AtMost => v <= t,
            Relation::AtLeast => v >= t,
            Relation::Below => v < t,
            Relation::Above => v > t,
            Relation::Equal => v == t,
        }
    }
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation,
            threshold,
            pass: relation.holds(value, threshold),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub suite: Suite,
    pub header: String,
    pub rows: Vec<String>,
    /// Named summary values (ratio extrema, means, witnesses, ...).
    pub summary: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    pub echo: String,
}

impl SuiteResult {
    /// True when there is at least one case and every check holds.
    pub fn passed(&self) -> bool {
        !self.rows.is_empty() && !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary_value(&self, name: &str) -> Option<f64> {
        self.summary.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header);
        for row in &self.rows {
            let _ = writeln!(out, "{row}");
        }
        let _ = writeln!(out, "# suite={} {}", self.suite, self.echo);
        let _ = writeln!(out, "# cases={}", self.rows.len());
        for (name, v) in &self.summary {
            let _ = writeln!(out, "# {name}={v}");
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "# check {}: {} {} {} {}",
                c.name,
                c.value,
                c.relation.symbol(),
                c.threshold,
                if c.pass { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(out, "# result={}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

pub fn emit_report(r: &SuiteResult, path: &Path) -> Result<()> {
    std::fs::write(path, r.to_csv()).map_err(|e| Error::io(path, e))
}

pub fn run_suite(cfg: &ExperimentConfig) -> Result<SuiteResult> {
    let echo = format!("seed={} samples={} {}", cfg.seed, cfg.samples, cfg.params);
    let mut r = match cfg.suite {
        Suite::TraceExt => {
            let fp = cfg.params.forced_theta();
            if fp < -1e-12 {
                return regime(cfg, format!("p is below the borderline exponent (forced theta {fp})"));
            }
            whitney_suite(cfg)?
        }
        Suite::Optimal => {
            if !at_borderline(&cfg.params) {
                return regime(cfg, "needs p = (beta - log K)/eps so that theta = 0".into());
            }
            whitney_suite(cfg)?
        }
        Suite::Borderline => borderline_suite(cfg)?,
        Suite::Alpha => alpha_suite(cfg)?,
        Suite::ExamStrict => exam_suite(cfg)?,
        Suite::LogExample => log_suite(cfg)?,
        Suite::Doubling => doubling_suite(cfg)?,
        Suite::Ahlfors => ahlfors_suite(cfg)?,
        Suite::NormEquiv => norm_equiv_suite(cfg)?,
    };
    r.echo = echo;
    Ok(r)
}

fn regime<T>(cfg: &ExperimentConfig, msg: String) -> Result<T> {
    Err(Error::Regime {
        suite: cfg.suite.name().to_string(),
        msg,
    })
}

fn at_borderline(p: &SpaceParams) -> bool {
    (p.p() - p.borderline_p()).abs() <= 1e-9 * p.p().max(1.0)
}

fn previous_depth(cfg: &ExperimentConfig) -> Result<SpaceParams> {
    let n = cfg.params.depth();
    if n < 3 {
        return regime(cfg, format!("depth {n} leaves no room for the depth N-2 comparison"));
    }
    cfg.params.with_depth(n - 2)
}

fn result(cfg: &ExperimentConfig, header: &str) -> SuiteResult {
    SuiteResult {
        suite: cfg.suite,
        header: header.to_string(),
        rows: Vec::new(),
        summary: Vec::new(),
        checks: Vec::new(),
        echo: String::new(),
    }
}

/// `(min, max, mean)` of the finite entries; NaNs when there are none.
fn stats(values: &[f64]) -> (f64, f64, f64) {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max, finite.iter().sum::<f64>() / finite.len() as f64)
}

fn rel_change(new: f64, old: f64) -> f64 {
    (new - old).abs() / old.abs()
}

/// Records the ratio interval at both depths plus the bound and stability
/// checks on it.
fn ratio_checks(r: &mut SuiteResult, label: &str, at_n: &[f64], at_prev: &[f64]) {
    let (lo, hi, mean) = stats(at_n);
    let (plo, phi, pmean) = stats(at_prev);
    r.summary.extend([
        (format!("{label}_min"), lo),
        (format!("{label}_max"), hi),
        (format!("{label}_mean"), mean),
        (format!("{label}_prev_min"), plo),
        (format!("{label}_prev_max"), phi),
        (format!("{label}_prev_mean"), pmean),
    ]);
    let c_star = hi.max(1.0 / lo).max(phi).max(1.0 / plo);
    r.checks.push(Check::new(format!("{label}_constant"), c_star, Relation::AtMost, RATIO_BOUND));
    let drift = rel_change(lo, plo).max(rel_change(hi, phi));
    r.checks.push(Check::new(format!("{label}_stability"), drift, Relation::Below, STABILITY));
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::NAN
    }
}

fn cases(cfg: &ExperimentConfig, params: &SpaceParams, max_level: usize) -> Result<Vec<(String, BoundaryFn)>> {
    (0..cfg.samples)
        .map(|i| {
            sample_case(cfg.seed, i, params.k(), params.depth(), max_level)
                .map(|(fam, f)| (fam.label(), f))
        })
        .collect()
}

fn gradient_power(u: &TreeFn, params: &SpaceParams) -> Result<f64> {
    Ok(newtonian_norm(u, params)?.gradient_levels.iter().sum())
}

fn max_abs_error(a: &BoundaryFn, b: &BoundaryFn) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn whitney_ratios(cfg: &ExperimentConfig, params: &SpaceParams) -> Result<Vec<(String, f64, f64)>> {
    cases(cfg, params, params.depth())?
        .into_iter()
        .map(|(label, f)| {
            let u = whitney_extend(&f, params);
            let err = max_abs_error(&trace(&u), &f);
            let energy = dyadic_energy(&f, params).total;
            Ok((label, err, ratio(gradient_power(&u, params)?, energy)))
        })
        .collect()
}

fn whitney_suite(cfg: &ExperimentConfig) -> Result<SuiteResult> {
    let prev = previous_depth(cfg)?;
    let here = whitney_ratios(cfg, &cfg.params)?;
    let before = whitney_ratios(cfg, &prev)?;
    let mut r = result(cfg, "case,family,roundtrip_error,ratio,ratio_prev");
    for (i, ((label, err, q), (_, _, pq))) in here.iter().zip(&before).enumerate() {
        r.rows.push(format!("{i},{label},{err},{q},{pq}"));
    }
    let worst = here.iter().chain(&before).map(|c| c.1).fold(0.0, f64::max);
    r.summary.push(("theta".into(), cfg.params.theta()));
    r.checks.push(Check::new("roundtrip_error", worst, Relation::AtMost, EXACT_SLACK));
    let ratios = |v: &[(String, f64, f64)]| v.iter().map(|c| c.2).collect::<Vec<_>>();
    ratio_checks(&mut r, "energy_ratio", &ratios(&here), &ratios(&before));
    Ok(r)
}

fn borderline_suite(cfg: &ExperimentConfig) -> Result<SuiteResult> {
    let params = &cfg.params;
    if !at_borderline(params) {
        return regime(cfg, "needs p = (beta - log K)/eps".into());
    }
    let plain = params.with_lambda(0.0)?;
    let p = params.p();
    let fs = cases(cfg, params, (params.depth() / 2).max(1))?;
    let mut r = result(cfg, "case,family,stages,extension_ratio,trace_ratio,final_stage_error");
    let mut ext = Vec::new();
    let mut tr = Vec::new();
    let mut stage_err: f64 = 0.0;
    let mut scheduled = 0usize;
    for (i, (label, f)) in fs.iter().enumerate() {
        let (u, schedule) = match gagliardo_extend(f, &plain) {
            Ok(v) => v,
            Err(Error::DepthTooSmall(_)) => {
                r.rows.push(format!("{i},{label},0,NaN,NaN,NaN"));
                continue;
            }
            Err(e) => return Err(e),
        };
        scheduled += 1;
        let err = max_abs_error(&trace(&u), &schedule.final_stage(f, &plain)?);
        stage_err = stage_err.max(err);
        let q = ratio(newtonian_norm(&u, &plain)?.total, lp_norm(f, p));
        let w = whitney_extend(f, params);
        let t = ratio(lp_norm(&trace_majorant(&w), p), newtonian_norm(&w, params)?.total);
        ext.push(q);
        tr.push(t);
        r.rows.push(format!("{i},{label},{},{q},{t},{err}", schedule.len()));
    }
    let (lo, hi, mean) = stats(&ext);
    let (_, thi, tmean) = stats(&tr);
    r.summary.extend([
        ("extension_ratio_min".into(), lo),
        ("extension_ratio_max".into(), hi),
        ("extension_ratio_mean".into(), mean),
        ("trace_ratio_max".into(), thi),
        ("trace_ratio_mean".into(), tmean),
    ]);
    r.checks.push(Check::new("scheduled_cases", scheduled as f64, Relation::Equal, fs.len() as f64));
    r.checks.push(Check::new("final_stage_error", stage_err, Relation::Equal, 0.0));
    r.checks.push(Check::new("extension_ratio_max", hi, Relation::AtMost, RATIO_BOUND));
    r.checks.push(Check::new("trace_ratio_max", thi, Relation::AtMost, RATIO_BOUND));

    // additivity fails somewhere on neighbouring sample pairs
    let mut gap = 0.0;
    for pair in fs.windows(2).take(10) {
        match nonlinearity_gap(&pair[0].1, &pair[1].1, &plain) {
            Ok(g) if g > gap => gap = g,
            Ok(_) | Err(Error::DepthTooSmall(_)) => {}
            Err(e) => return Err(e),
        }
        if gap > 1e-9 {
            break;
        }
    }
    r.checks.push(Check::new("nonlinearity_gap", gap, Relation::Above, 1e-9));
    Ok(r)
}

fn alpha_ratios(cfg: &ExperimentConfig, params: &SpaceParams) -> Result<Vec<(String, f64, f64)>> {
    let depth = params.depth();
    let a2 = AlphaSequence::powers(2, depth)?;
    let a3 = AlphaSequence::powers(3, depth)?;
    let lambda = params.lambda();
    cases(cfg, params, depth)?
        .into_iter()
        .map(|(label, f)| {
            let u = alpha_extend(&f, &a2, params);
            let l1 = lp_norm(&f, 1.0);
            let e2 = l1 + alpha_energy(&f, &a2, lambda)?.total;
            let e3 = l1 + alpha_energy(&f, &a3, lambda)?.total;
            Ok((label, ratio(gradient_power(&u, params)?, e2), ratio(e2, e3)))
        })
        .collect()
}

fn alpha_suite(cfg: &ExperimentConfig) -> Result<SuiteResult> {
    let params = &cfg.params;
    if params.p() != 1.0 || !at_borderline(params) || !(params.lambda() > 0.0) {
        return regime(cfg, "needs p = 1 = (beta - log K)/eps and lambda > 0".into());
    }
    let prev = previous_depth(cfg)?;
    let here = alpha_ratios(cfg, params)?;
    let before = alpha_ratios(cfg, &prev)?;
    let mut r = result(cfg, "case,family,extension_ratio,extension_ratio_prev,alpha_energy_ratio");
    for (i, ((label, q, e), (_, pq, _))) in here.iter().zip(&before).enumerate() {
        r.rows.push(format!("{i},{label},{q},{pq},{e}"));
    }
    let col = |v: &[(String, f64, f64)], j: usize| {
        v.iter().map(|c| if j == 1 { c.1 } else { c.2 }).collect::<Vec<_>>()
    };
    ratio_checks(&mut r, "extension_ratio", &col(&here, 1), &col(&before, 1));
    let (lo, hi, mean) = stats(&col(&here, 2));
    r.summary.extend([
        ("alpha_energy_ratio_min".into(), lo),
        ("alpha_energy_ratio_max".into(), hi),
        ("alpha_energy_ratio_mean".into(), mean),
    ]);
    r.checks.push(Check::new("alpha_energy_constant", hi.max(1.0 / lo), Relation::AtMost, RATIO_BOUND));
    Ok(r)
}

fn exam_suite(cfg: &ExperimentConfig) -> Result<SuiteResult> {
    let params = &cfg.params;
    let (k, depth, lambda) = (params.k(), params.depth(), params.lambda());
    if k != 2 {
        return regime(cfg, format!("needs K = 2, got K = {k}"));
    }
    if !(lambda > 0.0) {
        return regime(cfg, format!("needs lambda > 0, got {lambda}"));
    }
    let f = random_sign_function(lambda, depth, 2)?;
    let mut r = result(cfg, "case,family,block_violation_alpha2,block_violation_alpha3");

    let level_err = (1..=depth)
        .map(|n| (level_oscillation(&f, n, 1.0) - (n as f64).powf(-(lambda + 1.0))).abs())
        .fold(0.0, f64::max);
    r.checks.push(Check::new("level_identity_error", level_err, Relation::AtMost, EXACT_SLACK));

    let b1 = dyadic_energy_with(&f, params.eps(), 0.0, lambda, 1.0);
    let harmonic: f64 = (1..=depth).map(|n| 1.0 / n as f64).sum();
    r.summary.push(("b1_energy".into(), b1.total));
    r.summary.push(("harmonic_number".into(), harmonic));
    r.checks.push(Check::new("b1_energy_error", (b1.total - harmonic).abs(), Relation::AtMost, 1e-9));
    let growth = (1..=depth)
        .map(|n| b1.contribution(n).unwrap_or(0.0) - 1.0 / n as f64)
        .fold(f64::INFINITY, f64::min);
    r.checks.push(Check::new("b1_growth_margin", growth, Relation::AtLeast, -EXACT_SLACK));

    let a2 = AlphaSequence::powers(2, depth)?;
    let levels = a2.values();
    let mut cs_excess = f64::NEG_INFINITY;
    let mut term_excess = f64::NEG_INFINITY;
    for (n, w) in levels.windows(2).enumerate().take_while(|(_, w)| w[1] <= depth) {
        let (lo, hi) = (w[0], w[1]);
        let block = block_oscillation(&f, lo, hi);
        let cs: f64 = (lo + 1..=hi).map(|i| (i as f64).powf(-(2.0 * lambda + 2.0))).sum::<f64>().sqrt();
        cs_excess = cs_excess.max(block - cs);
        let n = (n + 1) as f64;
        let term = (hi as f64).powf(lambda) * block;
        term_excess = term_excess.max(term - 2f64.powf(lambda) * 2f64.powf(-(n - 1.0) / 2.0));
    }
    r.checks.push(Check::new("block_cauchy_schwarz_excess", cs_excess, Relation::AtMost, EXACT_SLACK));
    r.checks.push(Check::new("alpha_term_excess", term_excess, Relation::AtMost, EXACT_SLACK));
    let ba = alpha_energy(&f, &a2, lambda)?.total;
    let ba_bound = 2f64.powf(lambda) / (1.0 - 0.5f64.sqrt());
    r.summary.push(("alpha_energy".into(), ba));
    r.checks.push(Check::new("alpha_energy", ba, Relation::AtMost, ba_bound));

    let a3 = AlphaSequence::powers(3, depth)?;
    let mut worst: f64 = f64::NEG_INFINITY;
    for (i, (label, g)) in cases(cfg, params, depth)?.into_iter().enumerate() {
        let violation = |a: &AlphaSequence| {
            a.values()
                .windows(2)
                .take_while(|w| w[1] <= depth)
                .map(|w| {
                    let (left, right) = block_inequality_sides(&g, w[0], w[1]);
                    left - right
                })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let (v2, v3) = (violation(&a2), violation(&a3));
        worst = worst.max(v2).max(v3);
        r.rows.push(format!("{i},{label},{v2},{v3}"));
    }
    r.checks.push(Check::new("block_inequality_violation", worst, Relation::AtMost, EXACT_SLACK));
    Ok(r)
}

/// `Σ_{n≥from} n^{-s}` for `s > 1`: direct sum to a cutoff plus an
/// Euler–Maclaurin remainder.
fn zeta_tail(from: usize, s: f64) -> f64 {
    let cut = 100_000usize.max(from);
    let head: f64 = (from.max(1)..cut).map(|n| (n as f64).powf(-s)).sum();
    let m = cut as f64;
    head + m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s) + s * m.powf(-s - 1.0) / 12.0
}

fn log_suite(cfg: &ExperimentConfig) -> Result<SuiteResult> {
    let params = &cfg.params;
    let delta = params.p() - 1.0 - params.lambda();
    if !at_borderline(params) || !(params.p() > 1.0) || !(delta > 0.0) {
        return regime(cfg, "needs p = (beta - log K)/eps > 1 and lambda < p - 1".into());
    }
    let depth = params.depth();
    let ex = log_example(params)?;
    let mut r = result(cfg, "level,affine_gradient,reference_gradient,ratio,gradient_power,partial_sum");
    let mut partial = 0.0;
    for (row, g) in ex.rows.iter().zip(&ex.norm.gradient_levels) {
        partial += g;
        r.rows.push(format!(
            "{},{},{},{},{g},{partial}",
            row.level, row.affine_gradient, row.reference_gradient, row.ratio
        ));
    }
    let half = depth / 2;
    let tail: f64 = ex.norm.gradient_levels[half..].iter().sum();
    let reference = zeta_tail(half, 1.0 + delta);
    r.summary.push(("gradient_tail".into(), tail));
    r.summary.push(("zeta_tail".into(), reference));
    r.checks.push(Check::new("gradient_tail", tail, Relation::AtMost, 1.2 * reference));

    let tr = trace(&ex.u);
    let want = (depth as f64 + 1.0).ln();
    let err = tr.values().iter().map(|v| (v - want).abs()).fold(0.0, f64::max);
    r.summary.push(("trace_value".into(), tr.values()[0]));
    r.checks.push(Check::new("trace_identity_error", err, Relation::AtMost, EXACT_SLACK));
    let prev = trace(&log_example(&previous_depth(cfg)?)?.u).values()[0];
    r.checks.push(Check::new("trace_growth", tr.values()[0] - prev, Relation::Above, 0.0));
    let at12 = trace(&log_example(&params.with_depth(12)?)?.u).values()[0];
    r.summary.push(("trace_value_depth12".into(), at12));
    r.checks.push(Check::new("trace_value_depth12", at12, Relation::Above, 2.5));
    Ok(r)
}

fn doubling_suite(cfg: &ExperimentConfig) -> Result<SuiteResult> {
    let mut r = result(cfg, MEASURE_CSV_HEADER);
    if cfg.samples == 0 {
        return Ok(r);
    }
    let prev = previous_depth(cfg)?;
    let here = doubling_scan(cfg.samples, &cfg.params)?;
    let before = doubling_scan(cfg.samples, &prev)?;
    r.rows = here.rows.iter().map(|row| row.to_csv()).collect();
    r.summary.extend([
        ("doubling_max".into(), here.max_ratio),
        ("doubling_prev_max".into(), before.max_ratio),
    ]);
    let min = here.min_ratio.min(before.min_ratio);
    r.checks.push(Check::new("doubling_min", min, Relation::AtLeast, 1.0));
    r.checks.push(Check::new("doubling_finite", here.max_ratio.is_finite() as u8 as f64, Relation::Equal, 1.0));
    r.checks.push(Check::new(
        "doubling_stability",
        rel_change(here.max_ratio, before.max_ratio),
        Relation::Below,
        STABILITY,
    ));
    Ok(r)
}

fn ahlfors_suite(cfg: &ExperimentConfig) -> Result<SuiteResult> {
    let mut r = result(cfg, MEASURE_CSV_HEADER);
    if cfg.samples == 0 {
        return Ok(r);
    }
    let prev = previous_depth(cfg)?;
    let here = ahlfors_check(cfg.samples, &cfg.params)?;
    let before = ahlfors_check(cfg.samples, &prev)?;
    let (lo, hi) = ahlfors_bounds(&cfg.params);
    r.rows = here.rows.iter().map(|row| row.to_csv()).collect();
    r.summary.extend([
        ("q".into(), here.q),
        ("ahlfors_min".into(), here.min_ratio.min(before.min_ratio)),
        ("ahlfors_max".into(), here.max_ratio.max(before.max_ratio)),
    ]);
    r.checks.push(Check::new("ahlfors_min", here.min_ratio.min(before.min_ratio), Relation::AtLeast, lo));
    r.checks.push(Check::new("ahlfors_max", here.max_ratio.max(before.max_ratio), Relation::AtMost, hi));
    if cfg.params.k() == 2 && cfg.params.eps() == std::f64::consts::LN_2 {
        r.checks.push(Check::new("q", here.q, Relation::Equal, 1.0));
    }
    Ok(r)
}

fn norm_equiv_suite(cfg: &ExperimentConfig) -> Result<SuiteResult> {
    let params = &cfg.params;
    if params.lambda() != 0.0 || !(params.theta() > 0.0) {
        return regime(cfg, "needs lambda = 0 and theta in (0, 1)".into());
    }
    let prev = previous_depth(cfg)?;
    let ratios = |pr: &SpaceParams| -> Result<Vec<(String, f64)>> {
        Ok(cases(cfg, pr, pr.depth())?
            .into_iter()
            .map(|(label, f)| {
                let q = ratio(double_integral_energy(&f, pr).total, dyadic_energy(&f, pr).total);
                (label, q)
            })
            .collect())
    };
    let here = ratios(params)?;
    let before = ratios(&prev)?;
    let mut r = result(cfg, "case,family,ratio,ratio_prev");
    for (i, ((label, q), (_, pq))) in here.iter().zip(&before).enumerate() {
        r.rows.push(format!("{i},{label},{q},{pq}"));
    }
    let col = |v: &[(String, f64)]| v.iter().map(|c| c.1).collect::<Vec<_>>();
    ratio_checks(&mut r, "energy_ratio", &col(&here), &col(&before));
    Ok(r)
}
