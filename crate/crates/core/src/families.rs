//! Random boundary functions used by the experiment suites.
//!
//! Every case draws from its own ChaCha stream (`seed`, stream = case
//! index), so a case is reproducible on its own and independent of how
//! many other cases run.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boundary_space::BoundaryFn;
use crate::error::Result;
use crate::tree_model::VertexPath;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Independent cell values, uniform on `[-1, 1]`.
    Uniform,
    /// Martingale whose level-`n` increments are scaled by `n^{-s}`.
    Martingale { s: f64 },
    /// Indicator of a single cylinder.
    Indicator,
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::Uniform => "uniform".into(),
            Family::Martingale { s } => format!("martingale-s{s}"),
            Family::Indicator => "indicator".into(),
        }
    }
}

/// The rotation used by the suites: uniform, martingales with
/// `s ∈ {0.5, 1, 2}`, then an indicator.
pub const MIX: [Family; 5] = [
    Family::Uniform,
    Family::Martingale { s: 0.5 },
    Family::Martingale { s: 1.0 },
    Family::Martingale { s: 2.0 },
    Family::Indicator,
];

pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

pub fn uniform(k: usize, depth: usize, rng: &mut impl Rng) -> Result<BoundaryFn> {
    let n = k.pow(depth as u32);
    BoundaryFn::new(k, depth, (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect())
}

/// Root value uniform on `[-1, 1]`; the `K` increments below each vertex
/// are drawn uniformly, centred to sum to zero and scaled by `n^{-s}`, so
/// each vertex value is exactly the mean of its children.
pub fn martingale(k: usize, depth: usize, s: f64, rng: &mut impl Rng) -> Result<BoundaryFn> {
    let mut level = vec![rng.gen_range(-1.0..=1.0)];
    let mut inc = vec![0.0; k];
    for n in 1..=depth {
        let scale = (n as f64).powf(-s);
        let mut next = Vec::with_capacity(level.len() * k);
        for &v in &level {
            for slot in inc.iter_mut() {
                *slot = rng.gen_range(-1.0..=1.0);
            }
            let mean = inc.iter().sum::<f64>() / k as f64;
            next.extend(inc.iter().map(|d| v + scale * (d - mean)));
        }
        level = next;
    }
    BoundaryFn::new(k, depth, level)
}

/// Indicator of a uniformly chosen cylinder at `level`.
pub fn indicator(k: usize, depth: usize, level: usize, rng: &mut impl Rng) -> Result<BoundaryFn> {
    let level = level.min(depth);
    let index = rng.gen_range(0..k.pow(level as u32));
    BoundaryFn::indicator(k, depth, &VertexPath::from_index(level, index, k)?)
}

/// Case `case` of the standard mix. Indicator levels cycle through
/// `1..=max_level` as the case index grows.
pub fn sample_case(
    seed: u64,
    case: usize,
    k: usize,
    depth: usize,
    max_level: usize,
) -> Result<(Family, BoundaryFn)> {
    let family = MIX[case % MIX.len()];
    let mut rng = case_rng(seed, case);
    let f = match family {
        Family::Uniform => uniform(k, depth, &mut rng)?,
        Family::Martingale { s } => martingale(k, depth, s, &mut rng)?,
        Family::Indicator => {
            let max_level = max_level.clamp(1, depth);
            let level = 1 + (case / MIX.len()) % max_level;
            indicator(k, depth, level, &mut rng)?
        }
    };
    Ok((family, f))
}
