//! The weighted tree measure `dμ_λ = e^{-βt}(t + C)^λ dt`, ball and half-ball
//! masses, and the uniform boundary measure `ν`.
//!
//! Ball masses are exact on the infinite tree: the measure is radial, so a
//! ball decomposes into the half ball below its center, a segment of the
//! path to the root, and half balls hanging off each ancestor. Complete
//! subtrees are summed level by level with a cached per-level edge mass
//! until the geometric tail (`K e^{-β} < 1`) drops below double precision.

use crate::error::{Error, Result};
use crate::params::SpaceParams;
use crate::quadrature::{integrate, REL_TOL};
use crate::tree_model::{arc_length, diameter, EdgeRef, VertexPath};

/// Density of `μ_λ` at graph parameter `t`.
pub fn weight(t: f64, params: &SpaceParams) -> f64 {
    let lambda = params.lambda();
    let base = (-params.beta() * t).exp();
    if lambda == 0.0 {
        base
    } else {
        base * (t + params.c()).powf(lambda)
    }
}

/// `∫_a^b e^{-βt}(t + C)^λ dt`; `b` may be `+∞`.
pub fn weight_integral(a: f64, b: f64, params: &SpaceParams) -> Result<f64> {
    if !(a >= 0.0) || a.is_infinite() || !(a <= b) {
        return Err(Error::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    if b.is_finite() {
        return integrate(|t| weight(t, params), a, b, REL_TOL);
    }
    // Unit chunks until the analytic remainder is negligible. Once
    // λ/(T + C) ≤ β/2 the integrand decays at least like e^{-βt/2} relative
    // to its value at T, so the remainder is below 2 w(T)/β.
    let beta = params.beta();
    let lambda = params.lambda();
    let mut total = 0.0;
    let mut lo = a;
    for _ in 0..100_000 {
        let hi = lo + 1.0;
        total += integrate(|t| weight(t, params), lo, hi, REL_TOL)?;
        lo = hi;
        let w = weight(lo, params);
        let settled = lambda <= 0.0 || lambda / (lo + params.c()) <= 0.5 * beta;
        if w == 0.0 || (settled && 2.0 * w / beta <= 1e-17 * total) {
            return Ok(total);
        }
    }
    Err(Error::QuadratureFailed { a, b })
}

/// `μ_λ` of one edge; every edge between levels `n` and `n + 1` has the same mass.
pub fn edge_measure(e: &EdgeRef, params: &SpaceParams) -> Result<f64> {
    let n = e.upper_level() as f64;
    weight_integral(n, n + 1.0, params)
}

/// Uniform boundary measure of the cylinder through `v`.
pub fn nu_cylinder(v: &VertexPath, k: usize) -> f64 {
    (k as f64).powi(-(v.depth() as i32))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureEstimate {
    pub exact: f64,
    pub modeled: f64,
    pub ratio: f64,
}

impl MeasureEstimate {
    fn new(exact: f64, modeled: f64) -> Self {
        let ratio = if modeled > 0.0 { exact / modeled } else { f64::NAN };
        MeasureEstimate {
            exact,
            modeled,
            ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BallCenter {
    Vertex(VertexPath),
    /// A depth-`N` path standing for the boundary point on its ray.
    Boundary(VertexPath),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallSpec {
    pub center: BallCenter,
    pub radius: f64,
}

/// One row of a measure scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureRow {
    pub center_depth: usize,
    pub radius: f64,
    pub exact: f64,
    pub modeled: f64,
    pub ratio: f64,
}

pub const MEASURE_CSV_HEADER: &str = "center_depth,radius,exact,modeled,ratio";

impl MeasureRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.center_depth, self.radius, self.exact, self.modeled, self.ratio
        )
    }
}

/// Per-level edge masses and complete-subtree masses for one parameter set.
#[derive(Debug, Clone)]
pub struct MeasureModel {
    params: SpaceParams,
    /// `W(j) = μ_λ([j, j + 1])` for one edge.
    edge: Vec<f64>,
    /// Mass of everything strictly below a level-`j` vertex.
    subtree: Vec<f64>,
}

impl MeasureModel {
    pub fn new(params: &SpaceParams) -> Result<Self> {
        let k = params.k() as f64;
        let ratio_cap = 1e-18;
        let mut edge = Vec::new();
        let mut j = 0usize;
        // Extend past the truncation depth until K^{j-N} W(j) / W(N) is
        // negligible, so subtree masses at every level ≤ N are complete.
        let depth = params.depth();
        loop {
            let w = weight_integral(j as f64, j as f64 + 1.0, params)?;
            edge.push(w);
            if j > depth + 2 {
                let rel = ((j - depth) as f64 * k.ln() + w.ln() - edge[depth].ln()).exp();
                if w == 0.0 || rel < ratio_cap {
                    break;
                }
            }
            j += 1;
            if j > 200_000 {
                return Err(Error::QuadratureFailed {
                    a: 0.0,
                    b: f64::INFINITY,
                });
            }
        }
        let len = edge.len();
        let mut subtree = vec![0.0; len + 1];
        for j in (0..len).rev() {
            subtree[j] = k * (edge[j] + subtree[j + 1]);
        }
        Ok(MeasureModel {
            params: params.clone(),
            edge,
            subtree,
        })
    }

    pub fn params(&self) -> &SpaceParams {
        &self.params
    }

    /// Mass of one edge between levels `j` and `j + 1`.
    pub fn edge_mass(&self, j: usize) -> f64 {
        self.edge.get(j).copied().unwrap_or(0.0)
    }

    /// Mass of the full subtree strictly below a level-`j` vertex.
    pub fn subtree_mass(&self, j: usize) -> f64 {
        self.subtree.get(j).copied().unwrap_or(0.0)
    }

    /// `μ_λ(X)`.
    pub fn total_mass(&self) -> f64 {
        self.subtree[0]
    }

    /// `μ_λ` of the tree truncated at the configured depth.
    pub fn truncated_mass(&self) -> f64 {
        let k = self.params.k() as f64;
        let mut factor = 1.0;
        let mut total = 0.0;
        for j in 0..self.params.depth() {
            factor *= k;
            total += factor * self.edge_mass(j);
        }
        total
    }

    /// `μ_λ(F(z, r))` for a vertex at level `m`: points below it within `r`.
    pub fn half_ball_exact(&self, m: usize, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        let eps = self.params.eps();
        let top = (-eps * m as f64).exp();
        let reach = if eps * r >= top {
            f64::INFINITY
        } else {
            -(top - eps * r).ln() / eps
        };
        self.sweep_down(m, reach)
    }

    /// Mass below a level-`m` vertex down to graph level `reach`.
    fn sweep_down(&self, m: usize, reach: f64) -> Result<f64> {
        let ln_k = (self.params.k() as f64).ln();
        let last = self.edge.len();
        if reach >= last as f64 {
            return Ok(self.subtree_mass(m));
        }
        let full = reach.floor() as usize;
        let mut total = 0.0;
        for j in m..full {
            let w = self.edge[j];
            if w > 0.0 {
                total += ((j + 1 - m) as f64 * ln_k + w.ln()).exp();
            }
        }
        if reach > full as f64 {
            let part = weight_integral(full as f64, reach, &self.params)?;
            if part > 0.0 {
                total += ((full + 1 - m) as f64 * ln_k + part.ln()).exp();
            }
        }
        Ok(total)
    }

    /// Exact `μ_λ(B(x, r))` for a vertex center.
    pub fn ball_exact_vertex(&self, x: &VertexPath, r: f64) -> Result<f64> {
        self.ball_exact_at_level(x.depth(), r)
    }

    /// Exact ball mass around any vertex at level `m` (the measure is radial).
    pub fn ball_exact_at_level(&self, m: usize, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        let eps = self.params.eps();
        let k = self.params.k() as f64;
        let mf = m as f64;
        let mut total = self.half_ball_exact(m, r)?;
        let lowest = (-((-eps * mf).exp() + eps * r).ln() / eps).max(0.0);
        if lowest < mf {
            total += weight_integral(lowest, mf, &self.params)?;
        }
        for j in 0..m {
            let residual = r - arc_length(j as f64, mf, eps);
            if residual > 0.0 {
                total += (k - 1.0) / k * self.half_ball_exact(j, residual)?;
            }
        }
        Ok(total)
    }

    /// Exact ball mass around the boundary point on the ray of `xi`.
    pub fn ball_exact_boundary(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        let eps = self.params.eps();
        let k = self.params.k() as f64;
        let lowest = if eps * r >= 1.0 {
            0.0
        } else {
            -(eps * r).ln() / eps
        };
        let mut total = weight_integral(lowest, f64::INFINITY, &self.params)?;
        for j in 0..self.edge.len() {
            let residual = r - arc_length(j as f64, f64::INFINITY, eps);
            if residual > 0.0 {
                total += (k - 1.0) / k * self.half_ball_exact(j, residual)?;
            }
        }
        Ok(total)
    }

    /// Comparison value for a ball around a level-`m` vertex in the three
    /// regimes (shallow center, small radius, large radius).
    pub fn ball_modeled(&self, m: usize, r: f64) -> f64 {
        let eps = self.params.eps();
        let beta = self.params.beta();
        let c = self.params.c();
        let lambda = self.params.lambda();
        let mf = m as f64;
        if mf <= 2f64.ln() / eps {
            return r;
        }
        let r0 = (-eps * mf).exp() / eps;
        if r <= r0 {
            ((eps - beta) * mf).exp() * r * (mf + c).powf(lambda)
        } else {
            let z = pivot_level(mf, r, eps);
            r.powf(beta / eps) * (z + c).powf(lambda)
        }
    }
}

/// Level of the pivot ancestor, `max{|x| − log(1 + εr e^{ε|x|})/ε, 0}`.
pub fn pivot_level(level: f64, r: f64, eps: f64) -> f64 {
    (level - (eps * r * (eps * level).exp()).ln_1p() / eps).max(0.0)
}

pub fn half_ball_measure(z: &VertexPath, r: f64, params: &SpaceParams) -> Result<MeasureEstimate> {
    let model = MeasureModel::new(params)?;
    half_ball_with(&model, z.depth(), r)
}

pub fn half_ball_with(model: &MeasureModel, m: usize, r: f64) -> Result<MeasureEstimate> {
    let p = model.params();
    let mf = m as f64;
    let exact = model.half_ball_exact(m, r)?;
    let modeled = ((p.eps() - p.beta()) * mf).exp() * r * (mf + p.c()).powf(p.lambda());
    Ok(MeasureEstimate::new(exact, modeled))
}

pub fn ball_measure(b: &BallSpec, params: &SpaceParams) -> Result<MeasureEstimate> {
    let model = MeasureModel::new(params)?;
    ball_with(&model, b)
}

pub fn ball_with(model: &MeasureModel, b: &BallSpec) -> Result<MeasureEstimate> {
    let limit = 2.0 * diameter(model.params());
    if !(b.radius > 0.0 && b.radius <= limit) {
        return Err(Error::InvalidParams(format!(
            "ball radius must lie in (0, {limit}], got {}",
            b.radius
        )));
    }
    match &b.center {
        BallCenter::Vertex(x) => {
            let exact = model.ball_exact_vertex(x, b.radius)?;
            Ok(MeasureEstimate::new(exact, model.ball_modeled(x.depth(), b.radius)))
        }
        BallCenter::Boundary(_) => {
            let exact = model.ball_exact_boundary(b.radius)?;
            let p = model.params();
            let modeled = b.radius.powf(p.beta() / p.eps());
            Ok(MeasureEstimate::new(exact, modeled))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingReport {
    pub rows: Vec<MeasureRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Doubling ratios `μ(B(x, 2r))/μ(B(x, r))` on a grid of center levels
/// `0..=N` and log-spaced radii with `2r ≤ 2 diam X`. Row `exact` holds
/// `μ(B(x, 2r))`, `modeled` holds `μ(B(x, r))`.
pub fn doubling_scan(samples: usize, params: &SpaceParams) -> Result<DoublingReport> {
    if samples == 0 {
        return Err(Error::InvalidParams("doubling_scan needs at least one sample".into()));
    }
    let model = MeasureModel::new(params)?;
    let eps = params.eps();
    let depth = params.depth();
    let levels = depth + 1;
    let per_level = samples.div_ceil(levels).max(1);
    let r_max = diameter(params);
    let r_min = 0.1 * (-eps * (depth as f64 + 1.0)).exp() / eps;
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let m = i % levels;
        let step = i / levels;
        let s = if per_level == 1 {
            0.5
        } else {
            step as f64 / (per_level - 1) as f64
        };
        let r = r_min * (r_max / r_min).powf(s);
        let small = model.ball_exact_at_level(m, r)?;
        let big = model.ball_exact_at_level(m, 2.0 * r)?;
        rows.push(MeasureRow {
            center_depth: m,
            radius: r,
            exact: big,
            modeled: small,
            ratio: big / small,
        });
    }
    let (min_ratio, max_ratio) = extent(rows.iter().map(|r| r.ratio));
    Ok(DoublingReport {
        rows,
        min_ratio,
        max_ratio,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AhlforsReport {
    pub q: f64,
    pub rows: Vec<MeasureRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// `ν(B(ξ, r))` for a depth-`N` proxy by counting the depth-`N` cells
/// within visual distance `< r` of `ξ`.
pub fn nu_ball(r: f64, params: &SpaceParams) -> f64 {
    let eps = params.eps();
    let k = params.k();
    let depth = params.depth();
    // Cells at split level s lie at distance (2/ε)e^{-εs}; they are inside
    // the ball from the first level where that drops below r.
    let mut count: usize = 1;
    for s in (0..depth).rev() {
        if 2.0 / eps * (-eps * s as f64).exp() < r {
            count += (k - 1) * k.pow((depth - s - 1) as u32);
        } else {
            break;
        }
    }
    count as f64 / k.pow(depth as u32) as f64
}

/// Ratios `ν(B(ξ, r))/r^Q` over log-spaced radii in `[2e^{-εN}/ε, 2/ε]`.
/// By the symmetry of the uniform measure the mass is independent of `ξ`,
/// so samples differ only in the radius.
pub fn ahlfors_check(samples: usize, params: &SpaceParams) -> Result<AhlforsReport> {
    if samples == 0 {
        return Err(Error::InvalidParams("ahlfors_check needs at least one sample".into()));
    }
    let eps = params.eps();
    let q = params.q();
    let depth = params.depth();
    let r_min = 2.0 * (-eps * depth as f64).exp() / eps;
    let r_max = diameter(params);
    let rows: Vec<MeasureRow> = (0..samples)
        .map(|i| {
            let s = if samples == 1 {
                0.5
            } else {
                i as f64 / (samples - 1) as f64
            };
            let r = r_min * (r_max / r_min).powf(s);
            let exact = nu_ball(r, params);
            let modeled = r.powf(q);
            MeasureRow {
                center_depth: depth,
                radius: r,
                exact,
                modeled,
                ratio: exact / modeled,
            }
        })
        .collect();
    let (min_ratio, max_ratio) = extent(rows.iter().map(|r| r.ratio));
    Ok(AhlforsReport {
        q,
        rows,
        min_ratio,
        max_ratio,
    })
}

/// Interval `[(ε/2)^Q / K, (ε/2)^Q]` that every Ahlfors ratio must fall in.
pub fn ahlfors_bounds(params: &SpaceParams) -> (f64, f64) {
    let hi = (params.eps() / 2.0).powf(params.q());
    (hi / params.k() as f64, hi)
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_model::{dist_to_boundary, metric_distance};
    use std::f64::consts::LN_2;

    fn binary(beta: f64, lambda: f64, depth: usize) -> SpaceParams {
        SpaceParams::new(2, LN_2, beta, lambda, 1.0, depth).unwrap()
    }

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut s = f(a) + f(b);
        for i in 1..panels {
            let x = a + h * i as f64;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn closed_form_without_weight() {
        let p = binary(2.0 * LN_2, 0.0, 8);
        for (a, b) in [(0.0, 1.0), (0.3, 2.7), (5.0, 9.0), (2.0, f64::INFINITY)] {
            let want = ((-p.beta() * a).exp() - (-p.beta() * b).exp()) / p.beta();
            let got = weight_integral(a, b, &p).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "[{a},{b}]: {got} vs {want}");
        }
        assert_eq!(weight_integral(1.5, 1.5, &p).unwrap(), 0.0);
        assert!(weight_integral(2.0, 1.0, &p).is_err());
    }

    #[test]
    fn weighted_integral_matches_simpson() {
        let p = binary(2.0 * LN_2, 1.0, 8).with_c(4.0).unwrap();
        let oracle = simpson(|t| (-2.0 * LN_2 * t).exp() * (t + 4.0), 0.0, 1.0, 1_000_000);
        let got = weight_integral(0.0, 1.0, &p).unwrap();
        assert!(((got - oracle) / oracle).abs() < 1e-9);
    }

    #[test]
    fn edge_masses_sum_to_total() {
        let p = binary(2.0 * LN_2, 1.0, 10);
        let model = MeasureModel::new(&p).unwrap();
        let total = weight_integral(0.0, f64::INFINITY, &p).unwrap();
        let mut level_sum = 0.0;
        let mut count = 1.0;
        for j in 0..model.edge.len() {
            count *= 2.0;
            level_sum += count * weight_integral(j as f64, j as f64 + 1.0, &p).unwrap();
        }
        assert!(((model.total_mass() - level_sum) / level_sum).abs() < 1e-12);
        // A radial integral counts only one branch per level.
        assert!(total < level_sum);
        let e = EdgeRef::new(VertexPath::from_index(3, 5, 2).unwrap()).unwrap();
        let want = ((-p.beta() * 2.0).exp(), (-p.beta() * 3.0).exp());
        let lam0 = p.with_lambda(0.0).unwrap();
        let got = edge_measure(&e, &lam0).unwrap();
        assert!((got - (want.0 - want.1) / p.beta()).abs() < 1e-15);
    }

    /// Enumerates all edges down to `depth` and integrates the part of each
    /// edge inside the ball directly.
    fn brute_ball(x: &VertexPath, r: f64, p: &SpaceParams, depth: usize) -> f64 {
        let eps = p.eps();
        let xd = x.depth() as f64;
        let mut total = 0.0;
        for level in 1..=depth {
            for idx in 0..2usize.pow(level as u32) {
                let child = VertexPath::from_index(level, idx, 2).unwrap();
                let n = (level - 1) as f64;
                let (lo, hi) = if child.is_ancestor_of(x) {
                    // distance arc(t, |x|) shrinks as t grows
                    let lowest = (-((-eps * xd).exp() + eps * r).ln() / eps).max(n);
                    (lowest, n + 1.0)
                } else {
                    let s = child.common_prefix_len(x) as f64;
                    let base = arc_length(s, xd, eps);
                    if base >= r {
                        continue;
                    }
                    let left = r - base;
                    let top = (-eps * s).exp();
                    let reach = if eps * left >= top {
                        f64::INFINITY
                    } else {
                        -(top - eps * left).ln() / eps
                    };
                    (n, reach.min(n + 1.0))
                };
                if hi > lo {
                    total += simpson(|t| weight(t, p), lo, hi, 200);
                }
            }
        }
        total
    }

    #[test]
    fn ball_mass_matches_enumeration() {
        let p = binary(3.0 * LN_2, 0.5, 6);
        let model = MeasureModel::new(&p).unwrap();
        let x = VertexPath::from_digits(vec![1, 0, 1], 2).unwrap();
        for r in [0.05, 0.2, 0.5, 0.9, 1.4, 2.0, 2.8] {
            let exact = model.ball_exact_vertex(&x, r).unwrap();
            let oracle = brute_ball(&x, r, &p, 16);
            assert!(
                ((exact - oracle) / oracle).abs() < 1e-6,
                "r = {r}: {exact} vs {oracle}"
            );
        }
    }

    #[test]
    fn full_half_ball_is_total_mass() {
        let p = binary(2.0 * LN_2, 1.0, 8);
        let model = MeasureModel::new(&p).unwrap();
        let root = VertexPath::root();
        let est = half_ball_with(&model, 0, dist_to_boundary(&root, &p)).unwrap();
        assert!((est.exact - model.total_mass()).abs() <= 1e-14 * model.total_mass());
        assert!(model.half_ball_exact(3, 1e-9).unwrap() < 1e-7);
        assert_eq!(model.half_ball_exact(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn balls_are_monotone_and_bounded() {
        let p = binary(2.0 * LN_2, 1.0, 10);
        let model = MeasureModel::new(&p).unwrap();
        for m in [0, 3, 7, 10] {
            let mut prev = 0.0;
            for i in 1..60 {
                let r = 4.0 / LN_2 * i as f64 / 60.0;
                let v = model.ball_exact_at_level(m, r).unwrap();
                assert!(v >= prev - 1e-15 && v <= model.total_mass() * (1.0 + 1e-12));
                prev = v;
            }
        }
    }

    #[test]
    fn root_balls_model_as_radius() {
        let p = binary(2.0 * LN_2, 0.0, 10);
        let model = MeasureModel::new(&p).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for i in 1..=40 {
            let r = 4.0 / LN_2 * i as f64 / 40.0;
            let est = ball_with(
                &model,
                &BallSpec {
                    center: BallCenter::Vertex(VertexPath::root()),
                    radius: r,
                },
            )
            .unwrap();
            assert_eq!(est.modeled, r);
            lo = lo.min(est.ratio);
            hi = hi.max(est.ratio);
        }
        assert!(lo > 0.0 && hi / lo < 100.0);
    }

    #[test]
    fn geodesic_mass_comparable_to_half_ball() {
        let p = binary(2.0 * LN_2, 1.0, 12);
        let model = MeasureModel::new(&p).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for zl in 0..10 {
            for xl in zl + 1..=12 {
                let z = VertexPath::from_index(zl, 0, 2).unwrap();
                let x = VertexPath::from_index(xl, 0, 2).unwrap();
                let seg = weight_integral(zl as f64, xl as f64, &p).unwrap();
                let half = model.half_ball_exact(zl, metric_distance(&z, &x, &p)).unwrap();
                let ratio = seg / half;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
        }
        assert!(lo > 0.05 && hi <= 1.0, "[{lo}, {hi}]");
    }

    #[test]
    fn boundary_ball_is_limit_of_deep_vertex_balls() {
        let p = binary(2.0 * LN_2, 0.5, 8);
        let model = MeasureModel::new(&p).unwrap();
        for r in [0.3, 1.0, 2.5] {
            let b = model.ball_exact_boundary(r).unwrap();
            let v = model.ball_exact_at_level(40, r).unwrap();
            assert!(((b - v) / b).abs() < 1e-9, "{b} vs {v}");
        }
    }

    #[test]
    fn cylinder_measure_is_uniform() {
        assert_eq!(nu_cylinder(&VertexPath::root(), 3), 1.0);
        let v = VertexPath::from_index(4, 7, 3).unwrap();
        assert_eq!(nu_cylinder(&v, 3), 3f64.powi(-4));
        let up = nu_cylinder(&v.parent().unwrap(), 3);
        assert!((up - 3.0 * nu_cylinder(&v, 3)).abs() <= 1e-16 * up);
        let w = VertexPath::from_index(9, 300, 2).unwrap();
        assert_eq!(nu_cylinder(&w.parent().unwrap(), 2), 2.0 * nu_cylinder(&w, 2));
        let sum: f64 = (0..81)
            .map(|i| nu_cylinder(&VertexPath::from_index(4, i, 3).unwrap(), 3))
            .sum();
        assert!((sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nu_ball_matches_cell_counting() {
        let p = binary(2.0 * LN_2, 0.0, 7);
        let xi = VertexPath::from_index(7, 37, 2).unwrap();
        for i in 0..50 {
            let r = 0.02 + 3.0 * i as f64 / 50.0;
            let mut count = 0;
            for j in 0..128 {
                let zeta = VertexPath::from_index(7, j, 2).unwrap();
                let d = crate::tree_model::boundary_distance(&xi, &zeta, &p).unwrap();
                if d < r {
                    count += 1;
                }
            }
            assert_eq!(nu_ball(r, &p), count as f64 / 128.0, "r = {r}");
        }
    }

    #[test]
    fn ahlfors_ratios_stay_in_band() {
        for depth in [8, 10, 12] {
            let p = binary(2.0 * LN_2, 0.0, depth);
            let rep = ahlfors_check(200, &p).unwrap();
            assert_eq!(rep.q, 1.0);
            let (lo, hi) = ahlfors_bounds(&p);
            assert!(rep.min_ratio >= lo * (1.0 - 1e-12) && rep.max_ratio <= hi * (1.0 + 1e-12));
        }
        // Radii exactly at a split distance capture a whole cylinder.
        let p = binary(2.0 * LN_2, 0.0, 8);
        let r = 2.0 / LN_2 * (-LN_2 * 3.0).exp();
        assert_eq!(nu_ball(r * (1.0 + 1e-12), &p), 0.125);
    }

    #[test]
    fn doubling_scan_is_bounded() {
        let p = binary(2.0 * LN_2, 1.0, 8);
        let rep = doubling_scan(90, &p).unwrap();
        assert_eq!(rep.rows.len(), 90);
        assert!(rep.min_ratio >= 1.0 && rep.max_ratio.is_finite());
    }
}
