//! Plain-text file formats.
//!
//! A boundary function is `K N` on the first line followed by the `K^N`
//! cell values in lexicographic order. A tree function is the same header
//! followed by one line per level `0..=N` with that level's `K^n` vertex
//! values. Values are written in shortest round-trip form, so reading a
//! written file reproduces it bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::boundary_space::BoundaryFn;
use crate::error::{Error, Result};
use crate::tree_functions::TreeFn;

fn header(text: &str) -> Result<(usize, usize, std::str::Lines<'_>)> {
    let mut lines = text.lines();
    let first = lines
        .by_ref()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    let mut parts = first.split_whitespace();
    let mut int = |what: &str| -> Result<usize> {
        parts
            .next()
            .ok_or_else(|| Error::Parse(format!("header is missing {what}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("header {what} is not an integer")))
    };
    let k = int("K")?;
    let depth = int("N")?;
    if parts.next().is_some() {
        return Err(Error::Parse("header must be `K N`".into()));
    }
    Ok((k, depth, lines))
}

fn numbers(line: &str) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{t}` is not a number")))
        })
        .collect()
}

pub fn boundary_to_string(f: &BoundaryFn) -> String {
    let mut out = format!("{} {}\n", f.k(), f.depth());
    push_values(&mut out, f.values());
    out
}

pub fn boundary_from_str(text: &str) -> Result<BoundaryFn> {
    let (k, depth, rest) = header(text)?;
    let mut values = Vec::new();
    for line in rest {
        values.extend(numbers(line)?);
    }
    BoundaryFn::new(k, depth, values)
}

pub fn tree_to_string(u: &TreeFn) -> String {
    let mut out = format!("{} {}\n", u.k(), u.depth());
    for level in u.levels() {
        push_values(&mut out, level);
    }
    out
}

pub fn tree_from_str(text: &str) -> Result<TreeFn> {
    let (k, depth, rest) = header(text)?;
    let levels: Vec<Vec<f64>> = rest
        .filter(|l| !l.trim().is_empty())
        .map(numbers)
        .collect::<Result<_>>()?;
    if levels.len() != depth + 1 {
        return Err(Error::Parse(format!(
            "expected {} level lines, found {}",
            depth + 1,
            levels.len()
        )));
    }
    TreeFn::new(k, levels)
}

fn push_values(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v}");
    }
    out.push('\n');
}

pub fn read_boundary(path: &Path) -> Result<BoundaryFn> {
    boundary_from_str(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_boundary(path: &Path, f: &BoundaryFn) -> Result<()> {
    fs::write(path, boundary_to_string(f)).map_err(|e| Error::io(path, e))
}

pub fn read_tree(path: &Path) -> Result<TreeFn> {
    tree_from_str(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_tree(path: &Path, u: &TreeFn) -> Result<()> {
    fs::write(path, tree_to_string(u)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_text_round_trip() {
        let f = BoundaryFn::new(3, 2, vec![0.1, -2.5e-300, 1.0 / 3.0, 7.0, 0.0, -0.0, 1e300, 5.5, -1.25]).unwrap();
        let text = boundary_to_string(&f);
        assert!(text.starts_with("3 2\n"));
        let g = boundary_from_str(&text).unwrap();
        assert_eq!(f, g);
        assert!(boundary_from_str("2 2\n1 2 3").is_err());
        assert!(boundary_from_str("2\n1 2").is_err());
        assert!(boundary_from_str("2 1\n1 x").is_err());
    }

    #[test]
    fn tree_text_round_trip() {
        let u = TreeFn::new(2, vec![vec![0.5], vec![1.0 / 7.0, -3.0], vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        let text = tree_to_string(&u);
        assert_eq!(text.lines().count(), 4);
        assert_eq!(tree_from_str(&text).unwrap(), u);
        assert!(tree_from_str("2 2\n0\n1 2\n").is_err());
    }
}
