//! Edgewise-affine functions on the truncated tree, their upper gradients,
//! Newtonian norms, and the trace.
//!
//! A `TreeFn` stores one value per vertex. On the edge from a level-`n`
//! vertex to its child it is affine in `d_X`, so its minimal upper gradient
//! is the constant `|u(child) − u(parent)| / d_X(parent, child)`.

use crate::boundary_space::BoundaryFn;
use crate::error::{Error, Result};
use crate::measures::{weight, weight_integral};
use crate::params::SpaceParams;
use crate::quadrature::{integrate, rule, REL_TOL};
use crate::tree_model::{edge_length, VertexPath};

#[derive(Debug, Clone, PartialEq)]
pub struct TreeFn {
    k: usize,
    levels: Vec<Vec<f64>>,
}

impl TreeFn {
    /// `levels[n]` must hold `K^n` values for `n = 0..=N`.
    pub fn new(k: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!("K must be at least 2, got {k}")));
        }
        if levels.is_empty() {
            return Err(Error::InvalidParams("a tree function needs the root level".into()));
        }
        for (n, level) in levels.iter().enumerate() {
            let expected = k.pow(n as u32);
            if level.len() != expected {
                return Err(Error::WrongLength {
                    expected,
                    got: level.len(),
                });
            }
        }
        Ok(TreeFn { k, levels })
    }

    pub fn constant(k: usize, depth: usize, c: f64) -> Self {
        let levels = (0..=depth).map(|n| vec![c; k.pow(n as u32)]).collect();
        TreeFn { k, levels }
    }

    /// Values given as a function of the vertex level only.
    pub fn radial(k: usize, depth: usize, f: impl Fn(usize) -> f64) -> Self {
        let levels = (0..=depth).map(|n| vec![f(n); k.pow(n as u32)]).collect();
        TreeFn { k, levels }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &[f64] {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn value(&self, v: &VertexPath) -> f64 {
        self.levels[v.depth()][v.index(self.k)]
    }

    /// Gradient on the edge into vertex `index` of level `n ≥ 1`.
    pub fn gradient(&self, n: usize, index: usize, eps: f64) -> f64 {
        let up = self.levels[n - 1][index / self.k];
        (self.levels[n][index] - up) / edge_length(n - 1, eps)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let levels = self
            .levels
            .iter()
            .map(|l| l.iter().map(|v| c * v).collect())
            .collect();
        TreeFn { k: self.k, levels }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
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
        let levels = self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect())
            .collect();
        Ok(TreeFn { k: self.k, levels })
    }

    /// Largest absolute difference of vertex values.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.levels
            .iter()
            .zip(&other.levels)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }
}

/// Value at graph level `t ∈ [n, n+1]` of the profile that is affine in
/// `d_X` from `a` (at level `n`) to `b` (at level `n + 1`).
pub fn edge_profile(a: f64, b: f64, n: usize, t: f64, eps: f64) -> f64 {
    a + (b - a) * (-eps * (t - n as f64)).exp_m1() / (-eps).exp_m1()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonianNorm {
    pub lp_part: f64,
    pub gradient_part: f64,
    pub total: f64,
    /// `∫|u|^p dμ` over the edges between levels `n` and `n + 1`.
    pub lp_levels: Vec<f64>,
    /// `Σ |g|^p μ(edge)` over the edges between levels `n` and `n + 1`.
    pub gradient_levels: Vec<f64>,
}

/// Quadrature data shared by every edge of one level.
struct LevelRule {
    n: usize,
    nodes: Vec<(f64, f64, f64)>, // (t, weight·density, profile fraction)
    mass: f64,
}

impl LevelRule {
    fn new(n: usize, params: &SpaceParams) -> Result<Self> {
        let eps = params.eps();
        let lo = n as f64;
        let nodes = rule()
            .on(lo, lo + 1.0)
            .map(|(t, w)| {
                let frac = (-eps * (t - lo)).exp_m1() / (-eps).exp_m1();
                (t, w * weight(t, params), frac)
            })
            .collect();
        let mass = weight_integral(lo, lo + 1.0, params)?;
        Ok(LevelRule { n, nodes, mass })
    }

    fn lp_power(&self, a: f64, b: f64, params: &SpaceParams) -> Result<f64> {
        let p = params.p();
        let eps = params.eps();
        let n = self.n;
        let lo = n as f64;
        let integer_p = p.fract() == 0.0;
        let d = b - a;
        let integrand = |t: f64| pow_abs(edge_profile(a, b, n, t, eps), p) * weight(t, params);
        if a * b < 0.0 {
            // Split at the zero of the profile where |u|^p has a kink.
            let frac = -a / d;
            let t0 = lo - (frac * (-eps).exp_m1()).ln_1p() / eps;
            if integer_p {
                let g = rule();
                return Ok(g.apply(lo, t0, integrand) + g.apply(t0, lo + 1.0, integrand));
            }
            return Ok(integrate(integrand, lo, t0, REL_TOL)?
                + integrate(integrand, t0, lo + 1.0, REL_TOL)?);
        }
        if !integer_p && (a == 0.0 || b == 0.0) && d != 0.0 {
            return integrate(integrand, lo, lo + 1.0, REL_TOL);
        }
        if d == 0.0 {
            return Ok(pow_abs(a, p) * self.mass);
        }
        Ok(self
            .nodes
            .iter()
            .map(|&(_, w, frac)| w * pow_abs(a + d * frac, p))
            .sum())
    }
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

/// `‖u‖_{L^p(μ_λ)} + ‖g_u‖_{L^p(μ_λ)}` over the truncated tree.
pub fn newtonian_norm(u: &TreeFn, params: &SpaceParams) -> Result<NewtonianNorm> {
    let p = params.p();
    let eps = params.eps();
    let k = u.k();
    let mut lp_levels = Vec::with_capacity(u.depth());
    let mut gradient_levels = Vec::with_capacity(u.depth());
    for n in 0..u.depth() {
        let level_rule = LevelRule::new(n, params)?;
        let len = edge_length(n, eps);
        let parents = u.level(n);
        let mut lp = 0.0;
        let mut grad = 0.0;
        for (i, &b) in u.level(n + 1).iter().enumerate() {
            let a = parents[i / k];
            lp += level_rule.lp_power(a, b, params)?;
            grad += pow_abs((b - a) / len, p);
        }
        lp_levels.push(lp);
        gradient_levels.push(grad * level_rule.mass);
    }
    let lp_part = lp_levels.iter().sum::<f64>().powf(1.0 / p);
    let gradient_part = gradient_levels.iter().sum::<f64>().powf(1.0 / p);
    Ok(NewtonianNorm {
        lp_part,
        gradient_part,
        total: lp_part + gradient_part,
        lp_levels,
        gradient_levels,
    })
}

/// Depth-`N` vertex values read as boundary cell values.
pub fn trace(u: &TreeFn) -> BoundaryFn {
    BoundaryFn::new(u.k(), u.depth(), u.level(u.depth()).to_vec())
        .expect("deepest level has K^N values")
}

/// `|u(0)| + Σ_j |u(x_{j+1}) − u(x_j)|` along the ray to each cell.
pub fn trace_majorant(u: &TreeFn) -> BoundaryFn {
    let k = u.k();
    let mut acc = vec![u.level(0)[0].abs()];
    for n in 1..=u.depth() {
        let up = u.level(n - 1);
        acc = u
            .level(n)
            .iter()
            .enumerate()
            .map(|(i, &v)| acc[i / k] + (v - up[i / k]).abs())
            .collect();
    }
    BoundaryFn::new(k, u.depth(), acc).expect("deepest level has K^N values")
}

/// `(|u(x) − u(y)|, Σ_{edges on [x, y]} |g_e| · d_X(edge))`.
pub fn upper_gradient_sides(u: &TreeFn, x: &VertexPath, y: &VertexPath, eps: f64) -> (f64, f64) {
    let k = u.k();
    let split = x.common_prefix_len(y);
    let mut path = 0.0;
    for end in [x, y] {
        for level in split + 1..=end.depth() {
            let v = end.ancestor(level).expect("level within depth");
            let g = u.gradient(level, v.index(k), eps);
            path += g.abs() * edge_length(level - 1, eps);
        }
    }
    ((u.value(x) - u.value(y)).abs(), path)
}

/// One level of the logarithmic example: affine-profile gradient on the
/// edges below level `n` against `e^{εn}/(n + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGradientRow {
    pub level: usize,
    pub affine_gradient: f64,
    pub reference_gradient: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogExample {
    pub u: TreeFn,
    pub rows: Vec<LogGradientRow>,
    pub norm: NewtonianNorm,
}

/// `u(x) = log(|x| + 1)` with its per-edge gradients and norm parts.
pub fn log_example(params: &SpaceParams) -> Result<LogExample> {
    let eps = params.eps();
    let u = TreeFn::radial(params.k(), params.depth(), |n| (n as f64 + 1.0).ln());
    let rows = (0..params.depth())
        .map(|n| {
            let nf = n as f64;
            let affine = ((nf + 2.0) / (nf + 1.0)).ln() / edge_length(n, eps);
            let reference = (eps * nf).exp() / (nf + 1.0);
            LogGradientRow {
                level: n,
                affine_gradient: affine,
                reference_gradient: reference,
                ratio: affine / reference,
            }
        })
        .collect();
    let norm = newtonian_norm(&u, params)?;
    Ok(LogExample { u, rows, norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::MeasureModel;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn params(p: f64, lambda: f64, depth: usize) -> SpaceParams {
        SpaceParams::new(2, LN_2, 2.0 * LN_2, lambda, p, depth).unwrap()
    }

    fn tree_from(vals: &[f64], depth: usize) -> TreeFn {
        let mut it = vals.iter().copied().cycle();
        let levels = (0..=depth)
            .map(|n| (0..1usize << n).map(|_| it.next().unwrap()).collect())
            .collect();
        TreeFn::new(2, levels).unwrap()
    }

    #[test]
    fn constant_function_norm() {
        for p in [1.0, 2.0, 1.5] {
            let pr = params(p, 0.5, 6);
            let u = TreeFn::constant(2, 6, -2.0);
            let norm = newtonian_norm(&u, &pr).unwrap();
            assert_eq!(norm.gradient_part, 0.0);
            let mass = MeasureModel::new(&pr).unwrap().truncated_mass();
            assert!((norm.lp_part - 2.0 * mass.powf(1.0 / p)).abs() < 1e-12);
        }
    }

    #[test]
    fn edge_integrals_match_adaptive_oracle() {
        for p in [1.0, 2.0, 1.5, 3.2] {
            let pr = params(p, 1.0, 4);
            for (a, b) in [(1.0, 2.0), (-1.0, 0.5), (0.3, -0.9), (0.0, 1.0), (2.0, 0.0), (0.4, 0.4)] {
                for n in [0usize, 3] {
                    let rule = LevelRule::new(n, &pr).unwrap();
                    let got = rule.lp_power(a, b, &pr).unwrap();
                    let lo = n as f64;
                    let kink = if a * b < 0.0 {
                        lo - ((-a / (b - a)) * (-LN_2).exp_m1()).ln_1p() / LN_2
                    } else {
                        lo + 0.5
                    };
                    let f = |t: f64| {
                        edge_profile(a, b, n, t, LN_2).abs().powf(p) * weight(t, &pr)
                    };
                    let want = integrate(f, lo, kink, 1e-13).unwrap()
                        + integrate(f, kink, lo + 1.0, 1e-13).unwrap();
                    assert!(
                        ((got - want) / want).abs() < 1e-10,
                        "p={p} a={a} b={b} n={n}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn profile_is_affine_in_arc_length() {
        let eps = 0.7;
        let (a, b, n) = (1.5, -0.5, 3);
        for i in 0..=10 {
            let t = n as f64 + i as f64 / 10.0;
            let s = crate::tree_model::arc_length(n as f64, t, eps) / edge_length(n, eps);
            assert!((edge_profile(a, b, n, t, eps) - (a + (b - a) * s)).abs() < 1e-14);
        }
    }

    #[test]
    fn trace_and_majorant() {
        let u = TreeFn::constant(3, 4, 1.5);
        assert!(trace(&u).values().iter().all(|&v| v == 1.5));
        assert!(trace_majorant(&u).values().iter().all(|&v| v == 1.5));
        let u = TreeFn::radial(2, 6, |n| (n as f64).sqrt() - 1.0);
        let maj = trace_majorant(&u);
        let want = 1.0 + ((6f64).sqrt() - 1.0 + 1.0);
        assert!(maj.values().iter().all(|&v| (v - want).abs() < 1e-14));
    }

    #[test]
    fn log_example_values() {
        let p = 2.0;
        let pr = SpaceParams::new(2, LN_2, LN_2 + 2.0 * LN_2, 0.75, p, 12).unwrap();
        let ex = log_example(&pr).unwrap();
        assert_eq!(ex.u.level(0)[0], 0.0);
        assert!((trace(&ex.u).values()[17] - 13f64.ln()).abs() < 1e-15);
        for row in &ex.rows {
            assert!(row.ratio > 0.5 && row.ratio < 2.0, "{row:?}");
        }
    }

    fn arb_tree() -> impl Strategy<Value = TreeFn> {
        proptest::collection::vec(-2.0f64..2.0, 63).prop_map(|v| tree_from(&v, 5))
    }

    proptest! {
        #[test]
        fn trace_is_linear(u in arb_tree(), v in arb_tree(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let lhs = trace(&u.combine(a, &v, b).unwrap());
            let rhs = trace(&u).combine(a, &trace(&v), b).unwrap();
            for (x, y) in lhs.values().iter().zip(rhs.values()) {
                prop_assert!((x - y).abs() <= 1e-15 * (1.0 + x.abs()) * 4.0);
            }
        }

        #[test]
        fn majorant_dominates_trace(u in arb_tree()) {
            let t = trace(&u);
            let m = trace_majorant(&u);
            for (x, y) in t.values().iter().zip(m.values()) {
                prop_assert!(x.abs() <= y + 1e-14);
            }
        }

        #[test]
        fn upper_gradient_inequality(u in arb_tree(), i in 0usize..32, j in 0usize..16, lx in 0usize..=5, ly in 0usize..=4) {
            let x = VertexPath::from_index(lx, i % (1 << lx), 2).unwrap();
            let y = VertexPath::from_index(ly, j % (1 << ly), 2).unwrap();
            let (lhs, rhs) = upper_gradient_sides(&u, &x, &y, LN_2);
            prop_assert!(lhs <= rhs + 1e-12);
            let line = TreeFn::radial(2, 5, |n| 1.0 - (n as f64) * 0.3);
            let anc = x.ancestor(lx / 2).unwrap();
            let (l, r) = upper_gradient_sides(&line, &anc, &x, LN_2);
            prop_assert!((l - r).abs() <= 1e-12);
        }

        #[test]
        fn norm_is_homogeneous(u in arb_tree(), c in -3.0f64..3.0) {
            let pr = params(1.5, 0.5, 5);
            let a = newtonian_norm(&u, &pr).unwrap();
            let b = newtonian_norm(&u.scaled(c), &pr).unwrap();
            prop_assert!((b.lp_part - c.abs() * a.lp_part).abs() <= 1e-9 * (1.0 + a.lp_part));
            prop_assert!((b.gradient_part - c.abs() * a.gradient_part).abs() <= 1e-9 * (1.0 + a.gradient_part));
        }
    }
}
