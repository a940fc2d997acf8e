//! Piecewise-constant boundary functions, their mean pyramids, and the
//! dyadic, sparse-level and double-integral energies.
//!
//! Cells of level `n` are the cylinders through level-`n` vertices, indexed
//! lexicographically; `ν` gives each one mass `K^{-n}`, so every mean in
//! the pyramid is a plain arithmetic mean of its `K` children.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::params::SpaceParams;
use crate::tree_model::{visual_distance_at_split, VertexPath};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFn {
    k: usize,
    /// `levels[n]` holds the `K^n` cell means of level `n`; the last entry
    /// holds the cell values themselves.
    levels: Vec<Vec<f64>>,
}

impl BoundaryFn {
    /// Builds the mean pyramid from the `K^N` depth-`N` cell values.
    pub fn new(k: usize, depth: usize, values: Vec<f64>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!("K must be at least 2, got {k}")));
        }
        let expected = k
            .checked_pow(depth as u32)
            .ok_or_else(|| Error::InvalidParams(format!("K^N overflows for K = {k}, N = {depth}")))?;
        if values.len() != expected {
            return Err(Error::WrongLength {
                expected,
                got: values.len(),
            });
        }
        let mut levels = vec![values];
        for _ in 0..depth {
            let below = levels.last().expect("pyramid is never empty");
            let up: Vec<f64> = below
                .chunks_exact(k)
                .map(|c| c.iter().sum::<f64>() / k as f64)
                .collect();
            levels.push(up);
        }
        levels.reverse();
        Ok(BoundaryFn { k, levels })
    }

    pub fn constant(k: usize, depth: usize, c: f64) -> Result<Self> {
        let n = k.pow(depth as u32);
        Self::new(k, depth, vec![c; n])
    }

    /// Indicator of the cylinder through `v`, sampled at depth `N`.
    pub fn indicator(k: usize, depth: usize, v: &VertexPath) -> Result<Self> {
        if v.depth() > depth {
            return Err(Error::DepthMismatch {
                expected: depth,
                got: v.depth(),
            });
        }
        let n = k.pow(depth as u32);
        let span = k.pow((depth - v.depth()) as u32);
        let start = v.index(k) * span;
        let mut values = vec![0.0; n];
        values[start..start + span].fill(1.0);
        Self::new(k, depth, values)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Depth-`N` cell values.
    pub fn values(&self) -> &[f64] {
        &self.levels[self.depth()]
    }

    /// Cell means of level `n`.
    pub fn level(&self, n: usize) -> &[f64] {
        &self.levels[n]
    }

    /// `f_{∂X}`.
    pub fn mean(&self) -> f64 {
        self.levels[0][0]
    }

    /// `f_{I_v}`.
    pub fn cell_mean(&self, v: &VertexPath) -> f64 {
        self.levels[v.depth()][v.index(self.k)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let values = self.values().iter().map(|&v| f(v)).collect();
        Self::new(self.k, self.depth(), values).expect("shape is preserved")
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same_shape(other)?;
        let values = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self::new(self.k, self.depth(), values)
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.k != other.k {
            return Err(Error::BranchingMismatch {
                expected: self.k,
                got: other.k,
            });
        }
        if self.depth() != other.depth() {
            return Err(Error::DepthMismatch {
                expected: self.depth(),
                got: other.depth(),
            });
        }
        Ok(())
    }

    /// Level-`m` means re-expanded to depth `N`.
    pub fn project(&self, m: usize) -> Self {
        let m = m.min(self.depth());
        let span = self.k.pow((self.depth() - m) as u32);
        let values = self.levels[m]
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, span))
            .collect();
        Self::new(self.k, self.depth(), values).expect("shape is preserved")
    }

    /// True when the values are constant on level-`m` cells.
    pub fn is_constant_on_level(&self, m: usize) -> bool {
        let span = self.k.pow((self.depth() - m.min(self.depth())) as u32);
        self.values()
            .chunks_exact(span)
            .all(|c| c.iter().all(|&v| v == c[0]))
    }
}

/// Builds the mean pyramid for `K^N` cell values, with `K` and `N` taken
/// from the parameters.
pub fn build_pyramid(values: Vec<f64>, params: &SpaceParams) -> Result<BoundaryFn> {
    BoundaryFn::new(params.k(), params.depth(), values)
}

/// `(Σ_cells K^{-N}|f|^p)^{1/p}`.
pub fn lp_norm(f: &BoundaryFn, p: f64) -> f64 {
    let w = 1.0 / f.values().len() as f64;
    if p == 1.0 {
        return f.values().iter().map(|v| w * v.abs()).sum();
    }
    let s: f64 = f.values().iter().map(|v| w * v.abs().powf(p)).sum();
    s.powf(1.0 / p)
}

/// Per-level contributions of an energy together with their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub per_level: Vec<(usize, f64)>,
    pub total: f64,
    /// Parameters the energy was evaluated with, as `key=value` pairs.
    pub echo: String,
}

impl EnergyReport {
    fn from_levels(per_level: Vec<(usize, f64)>, echo: String) -> Self {
        let total = per_level.iter().map(|(_, c)| c).sum();
        EnergyReport {
            per_level,
            total,
            echo,
        }
    }

    pub fn contribution(&self, level: usize) -> Option<f64> {
        self.per_level
            .iter()
            .find(|(l, _)| *l == level)
            .map(|(_, c)| *c)
    }

    /// `level,contribution` rows and a final `total` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.echo.is_empty() {
            let _ = writeln!(out, "# {}", self.echo);
        }
        out.push_str("level,contribution\n");
        for (level, c) in &self.per_level {
            let _ = writeln!(out, "{level},{c}");
        }
        let _ = writeln!(out, "total,{}", self.total);
        out
    }
}

/// `Σ_{I∈𝒬_n} ν(I)|f_I − f_Î|^p`.
pub fn level_oscillation(f: &BoundaryFn, n: usize, p: f64) -> f64 {
    assert!(n >= 1 && n <= f.depth(), "level {n} outside 1..={}", f.depth());
    let k = f.k();
    let here = f.level(n);
    let up = f.level(n - 1);
    let w = 1.0 / here.len() as f64;
    here.iter()
        .enumerate()
        .map(|(i, &v)| w * pow_abs(v - up[i / k], p))
        .sum()
}

/// `Σ_{I∈𝒬_hi} ν(I)|f_I − f_Ĩ|` with `Ĩ` the level-`lo` ancestor.
pub fn block_oscillation(f: &BoundaryFn, lo: usize, hi: usize) -> f64 {
    assert!(lo < hi && hi <= f.depth());
    let span = f.k().pow((hi - lo) as u32);
    let here = f.level(hi);
    let up = f.level(lo);
    let w = 1.0 / here.len() as f64;
    here.iter()
        .enumerate()
        .map(|(i, &v)| w * (v - up[i / span]).abs())
        .sum()
}

fn pow_abs(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x.abs()
    } else if p == 2.0 {
        x * x
    } else {
        x.abs().powf(p)
    }
}

/// The dyadic energy `Σ_{n=1}^N e^{εnθp} n^λ Σ_{I∈𝒬_n} ν(I)|f_I − f_Î|^p`.
pub fn dyadic_energy(f: &BoundaryFn, params: &SpaceParams) -> EnergyReport {
    dyadic_energy_with(f, params.eps(), params.theta(), params.lambda(), params.p())
}

pub fn dyadic_energy_with(f: &BoundaryFn, eps: f64, theta: f64, lambda: f64, p: f64) -> EnergyReport {
    let per_level = (1..=f.depth())
        .map(|n| {
            let nf = n as f64;
            let weight = (eps * nf * theta * p).exp() * nf.powf(lambda);
            (n, weight * level_oscillation(f, n, p))
        })
        .collect();
    EnergyReport::from_levels(
        per_level,
        format!("energy=dyadic eps={eps} theta={theta} lambda={lambda} p={p}"),
    )
}

/// Strictly increasing levels `α(0) < α(1) < …` with bounded ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSequence {
    alpha: Vec<usize>,
    c0: f64,
    c1: f64,
}

impl AlphaSequence {
    /// Needs `α(0) ≥ 1`, at least two terms, and every ratio
    /// `α(n+1)/α(n)` inside `[c0, c1]` with `c0 > 1`.
    pub fn new(alpha: Vec<usize>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::InvalidAlpha("need at least two levels".into()));
        }
        if alpha[0] < 1 {
            return Err(Error::InvalidAlpha("alpha(0) must be at least 1".into()));
        }
        let ratios: Vec<f64> = alpha
            .windows(2)
            .map(|w| w[1] as f64 / w[0] as f64)
            .collect();
        let c0 = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let c1 = ratios.iter().copied().fold(0.0, f64::max);
        if c0 <= 1.0 {
            return Err(Error::InvalidAlpha(format!(
                "levels must grow geometrically, smallest ratio is {c0}"
            )));
        }
        Ok(AlphaSequence { alpha, c0, c1 })
    }

    /// `α(n) = base^n` for all terms up to `max_level`.
    pub fn powers(base: usize, max_level: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidAlpha(format!("base must be at least 2, got {base}")));
        }
        let mut alpha = vec![1usize];
        // One term past the cap keeps the ratio bounds meaningful.
        while *alpha.last().unwrap() <= max_level.max(base) {
            alpha.push(alpha.last().unwrap() * base);
        }
        Self::new(alpha)
    }

    pub fn values(&self) -> &[usize] {
        &self.alpha
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// Levels `α(−1) = 0, α(0), α(1), …` that do not exceed `depth`.
    pub fn usable_with_zero(&self, depth: usize) -> Vec<usize> {
        std::iter::once(0)
            .chain(self.alpha.iter().copied().take_while(|&a| a <= depth))
            .collect()
    }
}

/// The sparse-level energy `Σ_{n≥1, α(n)≤N} α(n)^λ Σ_{I∈𝒬_{α(n)}} ν(I)|f_I − f_Ĩ|`.
pub fn alpha_energy(f: &BoundaryFn, a: &AlphaSequence, lambda: f64) -> Result<EnergyReport> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let per_level = a
        .values()
        .windows(2)
        .take_while(|w| w[1] <= f.depth())
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            (hi, (hi as f64).powf(lambda) * block_oscillation(f, lo, hi))
        })
        .collect();
    Ok(EnergyReport::from_levels(
        per_level,
        format!("energy=alpha lambda={lambda} c0={} c1={}", a.c0(), a.c1()),
    ))
}

/// Both sides of the block inequality between levels `α(n−1)` and `α(n)`:
/// the left side is the sparse jump, the right the sum of single-level
/// jumps in between.
pub fn block_inequality_sides(f: &BoundaryFn, lo: usize, hi: usize) -> (f64, f64) {
    let left = block_oscillation(f, lo, hi);
    let right = (lo + 1..=hi).map(|m| level_oscillation(f, m, 1.0)).sum();
    (left, right)
}

/// The pairwise Besov seminorm to the power `p`, discretized on depth-`N`
/// cells. Pairs are grouped by split level `k`; each pair contributes
/// `ν(I)ν(J)|f_I − f_J|^p / (d_k^{θp} K^{-k})`.
pub fn double_integral_energy(f: &BoundaryFn, params: &SpaceParams) -> EnergyReport {
    double_integral_energy_with(f, params.eps(), params.theta(), params.p())
}

pub fn double_integral_energy_with(f: &BoundaryFn, eps: f64, theta: f64, p: f64) -> EnergyReport {
    let k = f.k();
    let depth = f.depth();
    let cells = f.values().len() as f64;
    let per_level = (0..depth)
        .map(|split| {
            let pairs = cross_pair_sum(f.values(), k, depth - split, p);
            let d = visual_distance_at_split(split, eps);
            let nu_ball = (k as f64).powi(-(split as i32));
            (split, pairs / (cells * cells) / (d.powf(theta * p) * nu_ball))
        })
        .collect();
    EnergyReport::from_levels(
        per_level,
        format!("energy=double-integral eps={eps} theta={theta} p={p}"),
    )
}

/// `Σ |a_i − a_j|^p` over ordered pairs lying in the same block of
/// `K^height` consecutive values but in different sub-blocks of
/// `K^{height−1}`.
fn cross_pair_sum(values: &[f64], k: usize, height: usize, p: f64) -> f64 {
    let block = k.pow(height as u32);
    let sub = block / k;
    let within = |chunk: &[f64]| -> f64 {
        if p == 2.0 {
            // Σ_{i,j}(a_i − a_j)² = 2n Σ(a_i − ā)²
            let n = chunk.len() as f64;
            let mean = chunk.iter().sum::<f64>() / n;
            2.0 * n * chunk.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>()
        } else if p == 1.0 {
            let mut sorted = chunk.to_vec();
            sorted.sort_by(|a, b| a.total_cmp(b));
            let n = sorted.len() as f64;
            2.0 * sorted
                .iter()
                .enumerate()
                .map(|(i, a)| a * (2.0 * i as f64 - (n - 1.0)))
                .sum::<f64>()
        } else {
            let mut s = 0.0;
            for (i, a) in chunk.iter().enumerate() {
                for b in &chunk[i + 1..] {
                    s += 2.0 * (a - b).abs().powf(p);
                }
            }
            s
        }
    };
    if p == 1.0 || p == 2.0 {
        values
            .chunks_exact(block)
            .map(|c| within(c) - c.chunks_exact(sub).map(within).sum::<f64>())
            .sum::<f64>()
            .max(0.0)
    } else {
        let mut s = 0.0;
        for c in values.chunks_exact(block) {
            for (i, a) in c.iter().enumerate() {
                for b in &c[(i / sub + 1) * sub..] {
                    s += 2.0 * (a - b).abs().powf(p);
                }
            }
        }
        s
    }
}

/// The sign series `Σ_{i=1}^N (−1)^{τ_i} / i^{λ+1}` on the binary boundary,
/// with `τ_i` the digits of the cell.
pub fn random_sign_function(lambda: f64, depth: usize, k: usize) -> Result<BoundaryFn> {
    if k != 2 {
        return Err(Error::RequiresBinary(k));
    }
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let terms: Vec<f64> = (1..=depth).map(|i| (i as f64).powf(-(lambda + 1.0))).collect();
    let n = 1usize << depth;
    let values = (0..n)
        .map(|cell| {
            (0..depth)
                .map(|i| {
                    let digit = (cell >> (depth - 1 - i)) & 1;
                    if digit == 0 {
                        terms[i]
                    } else {
                        -terms[i]
                    }
                })
                .sum()
        })
        .collect();
    BoundaryFn::new(2, depth, values)
}

/// Exact Lipschitz constant with respect to the visual metric of the
/// cell-constant function `f`, taken over cell representatives.
pub fn lipschitz_constant(f: &BoundaryFn, eps: f64) -> f64 {
    let k = f.k();
    let depth = f.depth();
    let mut hi: Vec<f64> = f.values().to_vec();
    let mut lo: Vec<f64> = hi.clone();
    let mut best: f64 = 0.0;
    for level in (0..depth).rev() {
        let d = visual_distance_at_split(level, eps);
        let mut next_hi = Vec::with_capacity(hi.len() / k);
        let mut next_lo = Vec::with_capacity(hi.len() / k);
        for (h, l) in hi.chunks_exact(k).zip(lo.chunks_exact(k)) {
            for a in 0..k {
                for b in 0..k {
                    if a != b {
                        best = best.max((h[a] - l[b]) / d);
                    }
                }
            }
            next_hi.push(h.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            next_lo.push(l.iter().copied().fold(f64::INFINITY, f64::min));
        }
        hi = next_hi;
        lo = next_lo;
    }
    best
}

/// Level-`m` dyadic average of `f` clamped to `[−T, T]`, re-expanded to
/// depth `N`, with its exact Lipschitz constant.
pub fn lipschitz_approximation(
    f: &BoundaryFn,
    m: usize,
    t: f64,
    params: &SpaceParams,
) -> Result<(BoundaryFn, f64)> {
    if m > f.depth() {
        return Err(Error::DepthMismatch {
            expected: f.depth(),
            got: m,
        });
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParams(format!("truncation height must be positive, got {t}")));
    }
    let g = f.map(|v| v.clamp(-t, t)).project(m);
    let lip = lipschitz_constant(&g, params.eps());
    Ok((g, lip))
}
