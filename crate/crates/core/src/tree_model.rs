//! Vertices of the K-ary tree, the uniformizing metric and the visual
//! metric on the boundary.
//!
//! A vertex is the digit string of the geodesic from the root, so the root
//! is the empty string and `x ≤ y` is the prefix order. A depth-`N` path
//! doubles as the representative of a level-`N` boundary cylinder.
//!
//! Distances never integrate numerically: along a radial segment of graph
//! parameter `[a, b]` the density `e^{-εt}` integrates to
//! `(e^{-εa} - e^{-εb})/ε`.

use std::fmt;

use crate::error::{Error, Result};
use crate::params::SpaceParams;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexPath(Vec<u32>);

impl VertexPath {
    pub fn root() -> Self {
        VertexPath(Vec::new())
    }

    pub fn from_digits(digits: Vec<u32>, k: usize) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d as usize >= k) {
            return Err(Error::InvalidVertex(format!("digit {d} out of range for K = {k}")));
        }
        Ok(VertexPath(digits))
    }

    /// Vertex `index` (lexicographic) among the `K^level` vertices of a level.
    pub fn from_index(level: usize, mut index: usize, k: usize) -> Result<Self> {
        let count = k.checked_pow(level as u32).ok_or_else(|| {
            Error::InvalidVertex(format!("level {level} overflows for K = {k}"))
        })?;
        if index >= count {
            return Err(Error::InvalidVertex(format!(
                "index {index} out of range for level {level}"
            )));
        }
        let mut digits = vec![0u32; level];
        for slot in digits.iter_mut().rev() {
            *slot = (index % k) as u32;
            index /= k;
        }
        Ok(VertexPath(digits))
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    /// Graph distance to the root, `|x|`.
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(VertexPath(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn child(&self, digit: u32) -> Self {
        let mut digits = self.0.clone();
        digits.push(digit);
        VertexPath(digits)
    }

    /// Ancestor at `level` (the vertex itself when `level == depth`).
    pub fn ancestor(&self, level: usize) -> Option<Self> {
        (level <= self.0.len()).then(|| VertexPath(self.0[..level].to_vec()))
    }

    /// `self ≤ other` in the tree order.
    pub fn is_ancestor_of(&self, other: &Self) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn common_prefix_len(&self, other: &Self) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Lexicographic index among the vertices of the same level.
    pub fn index(&self, k: usize) -> usize {
        self.0.iter().fold(0usize, |acc, &d| acc * k + d as usize)
    }
}

impl fmt::Display for VertexPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("0")?;
        for d in &self.0 {
            write!(f, ".{d}")?;
        }
        Ok(())
    }
}

/// The edge `[parent(child), child]`; its graph parameter runs over
/// `[|child| − 1, |child|]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeRef {
    child: VertexPath,
}

impl EdgeRef {
    pub fn new(child: VertexPath) -> Result<Self> {
        if child.is_root() {
            return Err(Error::InvalidVertex("the root has no parent edge".into()));
        }
        Ok(EdgeRef { child })
    }

    pub fn child(&self) -> &VertexPath {
        &self.child
    }

    pub fn parent(&self) -> VertexPath {
        self.child.parent().expect("edge child is never the root")
    }

    /// Level of the upper endpoint; the edge spans `[level, level + 1]`.
    pub fn upper_level(&self) -> usize {
        self.child.depth() - 1
    }
}

/// `∫_a^b e^{-εt} dt` for `a ≤ b` (either may be `+∞` on the right).
pub fn arc_length(a: f64, b: f64, eps: f64) -> f64 {
    if b == f64::INFINITY {
        return (-eps * a).exp() / eps;
    }
    -(-eps * a).exp() * (-eps * (b - a)).exp_m1() / eps
}

/// Length of an edge between levels `n` and `n + 1`.
pub fn edge_length(n: usize, eps: f64) -> f64 {
    arc_length(n as f64, n as f64 + 1.0, eps)
}

pub fn metric_distance(x: &VertexPath, y: &VertexPath, params: &SpaceParams) -> f64 {
    let eps = params.eps();
    let split = x.common_prefix_len(y) as f64;
    arc_length(split, x.depth() as f64, eps) + arc_length(split, y.depth() as f64, eps)
}

/// Visual distance between the boundary points represented by two depth-`N`
/// paths; `(2/ε) e^{-εk}` with `k` the length of the common prefix.
pub fn boundary_distance(xi: &VertexPath, zeta: &VertexPath, params: &SpaceParams) -> Result<f64> {
    if xi.depth() != zeta.depth() {
        return Err(Error::DepthMismatch {
            expected: xi.depth(),
            got: zeta.depth(),
        });
    }
    if xi == zeta {
        return Ok(0.0);
    }
    Ok(visual_distance_at_split(xi.common_prefix_len(zeta), params.eps()))
}

/// Distance between boundary points whose rays split at level `k`.
pub fn visual_distance_at_split(k: usize, eps: f64) -> f64 {
    2.0 / eps * (-eps * k as f64).exp()
}

pub fn dist_to_boundary(x: &VertexPath, params: &SpaceParams) -> f64 {
    arc_length(x.depth() as f64, f64::INFINITY, params.eps())
}

/// Diameter of the tree in `d_X`.
pub fn diameter(params: &SpaceParams) -> f64 {
    2.0 / params.eps()
}
