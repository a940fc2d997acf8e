//! Extensions of boundary data into the tree: the mean-value (Whitney)
//! extension, the sparse-level extension driven by an `AlphaSequence`, and
//! the layered extension that glues Whitney extensions of Lipschitz
//! approximations across depth bands.

use std::fmt::Write as _;

use crate::boundary_space::{lipschitz_approximation, lipschitz_constant, lp_norm, AlphaSequence, BoundaryFn};
use crate::error::{Error, Result};
use crate::params::SpaceParams;
use crate::tree_functions::{newtonian_norm, TreeFn};

/// Vertex values are the cell means; edges are affine in `d_X`.
pub fn whitney_extend(f: &BoundaryFn, _params: &SpaceParams) -> TreeFn {
    let levels = (0..=f.depth()).map(|n| f.level(n).to_vec()).collect();
    TreeFn::new(f.k(), levels).expect("pyramid levels have K^n entries")
}

/// Means at the levels `0, α(0), α(1), …` (those `≤ N`); each vertex in
/// between copies the mean of its last sparse-level ancestor, so the only
/// non-zero gradients sit on the final edge into each sparse level. Below
/// the largest usable level the function stays constant along rays.
pub fn alpha_extend(f: &BoundaryFn, a: &AlphaSequence, _params: &SpaceParams) -> TreeFn {
    let k = f.k();
    let depth = f.depth();
    let sparse = a.usable_with_zero(depth);
    let mut levels = Vec::with_capacity(depth + 1);
    let mut anchor = 0usize;
    for t in 0..=depth {
        if sparse.contains(&t) {
            anchor = t;
            levels.push(f.level(t).to_vec());
        } else {
            let span = k.pow((t - anchor) as u32);
            let src = f.level(anchor);
            levels.push((0..k.pow(t as u32)).map(|i| src[i / span]).collect());
        }
    }
    TreeFn::new(k, levels).expect("levels have K^n entries")
}

/// Constant in the budget condition `ρ_k LIP(f_{k+1} − f_k) ≤ C‖f‖ 2^{-k}`.
pub const LAYER_BUDGET: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerSchedule {
    /// `ρ_k = e^{-εL_k}/ε`.
    pub rho: Vec<f64>,
    /// `L_k = [ρ_k]`.
    pub levels: Vec<usize>,
    /// `LIP(f_k, ∂X)`.
    pub lip_bounds: Vec<f64>,
    /// `LIP(f_{k+1} − f_k, ∂X)`; zero for the last stage.
    pub step_lips: Vec<f64>,
    /// `‖f_{k+1} − f_k‖_{L^p}`; zero for the last stage.
    pub stage_lp_gaps: Vec<f64>,
    /// Resolution level and clamp height `(m_k, T_k)` of each stage.
    pub stages: Vec<(usize, f64)>,
    /// `Σ_k ρ_k LIP(f_k)`.
    pub budget: f64,
    pub budget_constant: f64,
    pub boundary_norm: f64,
}

impl LayerSchedule {
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,rho_k,level,lip_bound,stage_lp_gap\n");
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                i + 1,
                self.rho[i],
                self.levels[i],
                self.lip_bounds[i],
                self.stage_lp_gaps[i]
            );
        }
        let _ = writeln!(
            out,
            "# budget={} budget_constant={} boundary_norm={}",
            self.budget, self.budget_constant, self.boundary_norm
        );
        out
    }

    /// The stage whose Whitney extension survives at depth `N`.
    pub fn final_stage(&self, f: &BoundaryFn, params: &SpaceParams) -> Result<BoundaryFn> {
        let (m, t) = *self.stages.last().expect("schedule has a stage");
        stage_function(f, m, t, params)
    }
}

fn stage_function(f: &BoundaryFn, m: usize, t: f64, params: &SpaceParams) -> Result<BoundaryFn> {
    if t == 0.0 {
        return Ok(f.project(0));
    }
    Ok(lipschitz_approximation(f, m, t, params)?.0)
}

type Stage = (usize, f64, BoundaryFn);

/// Search for the Lipschitz stages `f_1, f_2, …`: `f_1` is the mean, each
/// later stage is the smallest `(m, T)` past the previous one (in
/// lexicographic order, `T` on a grid of eighths of `max|f|`) with
/// `‖f − f_{k+1}‖ ≤ 2^{-k}‖f‖` and `‖f_{k+1} − f_k‖ ≤ 2^{2-k}‖f‖`. The
/// exact stage `(N, max|f|)` always qualifies, so the sequence ends there.
struct StageSearch<'a> {
    f: &'a BoundaryFn,
    p: f64,
    norm: f64,
    heights: Vec<f64>,
    /// Mean pyramids of each clamped copy of f, shared by every stage.
    clamped: Vec<BoundaryFn>,
    /// `‖f − f_{(m, T_j)}‖^p` (unnormalised) indexed by `[m][j]`.
    errors: Vec<Vec<f64>>,
}

impl<'a> StageSearch<'a> {
    fn new(f: &'a BoundaryFn, p: f64) -> Self {
        let top = f.max_abs();
        let heights: Vec<f64> = (1..=8).map(|j| top * j as f64 / 8.0).collect();
        let clamped = heights
            .iter()
            .map(|&t| f.map(|v| v.clamp(-t, t)))
            .collect::<Vec<_>>();
        let (k, depth) = (f.k(), f.depth());
        let errors = (0..=depth)
            .map(|m| {
                let span = k.pow((depth - m) as u32);
                clamped
                    .iter()
                    .map(|c: &BoundaryFn| {
                        let means = c.level(m);
                        f.values()
                            .iter()
                            .enumerate()
                            .map(|(i, &v)| pow_abs(means[i / span] - v, p))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        StageSearch {
            f,
            p,
            norm: lp_norm(f, p),
            heights,
            clamped,
            errors,
        }
    }

    fn first(&self) -> Stage {
        (0, 0.0, self.f.project(0))
    }

    /// The stage after `stages`, or `None` once the last one is exact.
    fn next(&self, stages: &[Stage]) -> Result<Option<Stage>> {
        let f = self.f;
        let (m_prev, t_prev, prev) = stages.last().expect("non-empty");
        if self.norm == 0.0 || prev.values() == f.values() {
            return Ok(None);
        }
        let (k, depth, p) = (f.k(), f.depth(), self.p);
        let cells = f.values().len() as f64;
        let lp = |sum: f64| (sum / cells).powf(1.0 / p);
        let stage = stages.len() as i32;
        for m in *m_prev..=depth {
            let span = k.pow((depth - m) as u32);
            for (j, &t) in self.heights.iter().enumerate() {
                if m == *m_prev && t <= *t_prev {
                    continue;
                }
                if lp(self.errors[m][j]) > 2f64.powi(-stage) * self.norm {
                    continue;
                }
                let means = self.clamped[j].level(m);
                let step = prev
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| pow_abs(means[i / span] - w, p))
                    .sum();
                if lp(step) <= 2f64.powi(2 - stage) * self.norm {
                    return Ok(Some((m, t, self.clamped[j].project(m))));
                }
            }
        }
        Err(Error::DepthTooSmall("no admissible Lipschitz stage found".into()))
    }
}

fn pow_abs(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x.abs()
    } else {
        x.abs().powf(p)
    }
}

/// The layered extension and its radii.
///
/// Radii are picked greedily: `L_1` is the smallest level with
/// `ρ_1 LIP(f_2 − f_1) ≤ 8‖f‖·2^{-1}`, each later `L_k` the smallest level
/// at least `L_{k-1} + g` (so that `ρ_k ≤ ρ_{k-1}/2`) meeting the same
/// condition with `2^{-k}`, and the last radius sits `g` levels below its
/// predecessor. The extension is
/// `ũ = Σ_k (ψ_{k-1} − ψ_k) f̃_k` with `ψ_0 ≡ 1`, `ψ_M ≡ 0`, sampled at
/// vertices and affine along edges; at depth `N` it equals `f_M`.
///
/// Stages are kept only while the layer closing them fits within depth
/// `N`, so `f_M` is the last stage the truncated tree can resolve.
pub fn gagliardo_extend(f: &BoundaryFn, params: &SpaceParams) -> Result<(TreeFn, LayerSchedule)> {
    let p = params.p();
    let eps = params.eps();
    let borderline = params.borderline_p();
    if (p - borderline).abs() > 1e-9 * borderline.max(1.0) {
        return Err(Error::InvalidParams(format!(
            "layered extension needs p = (beta - log K)/eps = {borderline}, got p = {p}"
        )));
    }
    let depth = f.depth();
    let norm = lp_norm(f, p);
    let search = StageSearch::new(f, p);
    let mut stages = vec![search.first()];

    // Layer levels for the transitions f_k -> f_{k+1}; the sequence is cut
    // at the last stage whose closing level still fits within depth N.
    let gap = ((2f64.ln() / eps) - 1e-12).ceil().max(1.0) as usize;
    let mut levels: Vec<usize> = Vec::new();
    let mut step_lips = Vec::new();
    let mut gaps = Vec::new();
    while let Some(next) = search.next(&stages)? {
        let i = stages.len() - 1;
        let floor = levels.last().map_or(0, |&l| l + gap);
        let diff = next.2.combine(1.0, &stages[i].2, -1.0)?;
        let lip = lipschitz_constant(&diff, eps);
        let allowance = LAYER_BUDGET * norm * 2f64.powi(-(i as i32 + 1));
        let needed = if lip == 0.0 {
            0
        } else {
            // e^{-εL} lip / ε ≤ allowance
            let l = ((lip / (eps * allowance)).ln() / eps - 1e-12).ceil();
            l.max(0.0) as usize
        };
        let level = needed.max(floor);
        if level + gap > depth {
            if i == 0 {
                return Err(Error::DepthTooSmall(format!(
                    "the first layer needs level {level}, closing at {} beyond depth {depth}",
                    level + gap
                )));
            }
            break;
        }
        levels.push(level);
        step_lips.push(lip);
        gaps.push(lp_norm(&diff, p));
        stages.push(next);
    }
    let count = stages.len();
    levels.push(levels.last().map_or(0, |&l| l + gap));
    step_lips.push(0.0);
    gaps.push(0.0);
    let lips: Vec<f64> = stages
        .iter()
        .map(|(_, _, g)| lipschitz_constant(g, eps))
        .collect();
    let rho: Vec<f64> = levels
        .iter()
        .map(|&l| (-eps * l as f64).exp() / eps)
        .collect();
    let budget = rho.iter().zip(&lips).map(|(r, l)| r * l).sum();

    // ψ_k at level t for k = 1..count-1; ψ_0 = 1 and ψ_count = 0.
    let psi = |k: usize, t: usize| -> f64 {
        if k == 0 {
            return 1.0;
        }
        if k >= count {
            return 0.0;
        }
        let d = (-eps * t as f64).exp() / eps;
        ((rho[k - 1] - d) / (rho[k - 1] - rho[k])).clamp(0.0, 1.0)
    };
    let k_ary = f.k();
    let mut out = Vec::with_capacity(depth + 1);
    for t in 0..=depth {
        let mut level = vec![0.0; k_ary.pow(t as u32)];
        for (i, (_, _, g)) in stages.iter().enumerate() {
            let w = psi(i, t) - psi(i + 1, t);
            if w != 0.0 {
                for (slot, v) in level.iter_mut().zip(g.level(t)) {
                    *slot += w * v;
                }
            }
        }
        out.push(level);
    }
    let u = TreeFn::new(k_ary, out)?;
    let schedule = LayerSchedule {
        rho,
        levels,
        lip_bounds: lips,
        step_lips,
        stage_lp_gaps: gaps,
        stages: stages.iter().map(|(m, t, _)| (*m, *t)).collect(),
        budget,
        budget_constant: LAYER_BUDGET,
        boundary_norm: norm,
    };
    Ok((u, schedule))
}

/// Largest vertex-value deviation of the layered extension from additivity
/// on the pair `(f, g)`.
pub fn nonlinearity_gap(f: &BoundaryFn, g: &BoundaryFn, params: &SpaceParams) -> Result<f64> {
    let (uf, _) = gagliardo_extend(f, params)?;
    let (ug, _) = gagliardo_extend(g, params)?;
    let (us, _) = gagliardo_extend(&f.combine(1.0, g, 1.0)?, params)?;
    Ok(us.max_abs_diff(&uf.combine(1.0, &ug, 1.0)?))
}

/// Tail integrals of the Whitney extension beyond level `n` for the
/// unweighted measure, against their predicted sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerCheck {
    pub level: usize,
    pub lp_tail: f64,
    pub lp_reference: f64,
    pub lp_ratio: f64,
    pub gradient_tail: f64,
    pub gradient_reference: f64,
    pub gradient_ratio: f64,
}

/// `∫_{|x|≥n}|ũ|^p dμ` against `r_n^{(β−log K)/ε}‖u‖_p^p` and
/// `∫_{|x|≥n}|g_ũ|^p dμ` against `r_n^{(β−log K)/ε}LIP(u)^p`, with
/// `r_n = 2e^{-εn}/ε` and `μ` the measure with `λ = 0`.
pub fn lemma_layer_checks(f: &BoundaryFn, n: usize, params: &SpaceParams) -> Result<LayerCheck> {
    if n > f.depth() {
        return Err(Error::DepthMismatch {
            expected: f.depth(),
            got: n,
        });
    }
    let plain = params.with_lambda(0.0)?;
    let p = plain.p();
    let eps = plain.eps();
    let u = whitney_extend(f, &plain);
    let norm = newtonian_norm(&u, &plain)?;
    let lp_tail: f64 = norm.lp_levels[n.min(norm.lp_levels.len())..].iter().sum();
    let gradient_tail: f64 = norm.gradient_levels[n.min(norm.gradient_levels.len())..]
        .iter()
        .sum();
    let r_n = 2.0 * (-eps * n as f64).exp() / eps;
    let scale = r_n.powf(plain.borderline_p());
    let lp_reference = scale * lp_norm(f, p).powf(p);
    let gradient_reference = scale * lipschitz_constant(f, eps).powf(p);
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    Ok(LayerCheck {
        level: n,
        lp_tail,
        lp_reference,
        lp_ratio: ratio(lp_tail, lp_reference),
        gradient_tail,
        gradient_reference,
        gradient_ratio: ratio(gradient_tail, gradient_reference),
    })
}
