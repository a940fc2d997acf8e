//! Gauss–Legendre rules and a globally adaptive bisection integrator.
//!
//! Each panel is integrated once with the rule and once on its two halves;
//! the difference serves as the error estimate and the finer value is kept.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Relative tolerance used by every weighted-measure integral in the crate.
pub const REL_TOL: f64 = 1e-10;

const MAX_PANELS: usize = 20_000;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on `[-1, 1]`, nodes by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Mapped nodes and weights on `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn apply<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.on(a, b).map(|(t, w)| w * f(t)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, dp)
}

/// Shared 16-point rule.
pub fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// Coarse and refined estimates on one panel.
fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let g = rule();
    let coarse = g.apply(a, b, &mut *f);
    let mid = 0.5 * (a + b);
    let fine = g.apply(a, mid, &mut *f) + g.apply(mid, b, &mut *f);
    (coarse, fine)
}

/// `∫_a^b f` on a finite interval to relative tolerance `rel_tol`.
///
/// Panels are bisected until every panel's estimated error is below its
/// share of `rel_tol · |I|`; the absolute floor keeps integrals that vanish
/// identically from spinning forever.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    let (_, first) = panel(&mut f, a, b);
    let mut pending = vec![(a, b, 0u32)];
    let mut total = 0.0;
    let mut panels = 0usize;
    let scale = first.abs();
    while let Some((lo, hi, depth)) = pending.pop() {
        panels += 1;
        if panels > MAX_PANELS {
            return Err(Error::QuadratureFailed { a, b });
        }
        let (coarse, fine) = panel(&mut f, lo, hi);
        let width_share = (hi - lo) / (b - a);
        let allowed = (rel_tol * scale.max(fine.abs()) * width_share).max(1e-300);
        if (fine - coarse).abs() <= allowed || depth >= 48 {
            total += fine;
        } else {
            let mid = 0.5 * (lo + hi);
            pending.push((mid, hi, depth + 1));
            pending.push((lo, mid, depth + 1));
        }
    }
    Ok(total)
}
