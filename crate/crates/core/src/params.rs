//! Parameters of the weighted tree and the plain-text config format.
//!
//! A config file holds one `key=value` pair per line. Recognised keys are
//! `K`, `eps`, `beta`, `lambda`, `C`, `p`, `theta` and `depth`; `C` and
//! `theta` may be omitted. Anything after `#` is a comment.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Branching, metric/measure decay, weight, exponents and truncation depth.
///
/// Fields are private so that the admissibility constraints checked in
/// [`SpaceParams::new`] cannot be bypassed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceParams {
    k: usize,
    eps: f64,
    beta: f64,
    lambda: f64,
    c: f64,
    c_explicit: bool,
    p: f64,
    theta: f64,
    theta_explicit: bool,
    depth: usize,
    q: f64,
}

/// Smallest admissible weight shift, `max{2|λ|/(β − log K), 2 log 4 / ε}`.
pub fn c_lower_bound(k: usize, eps: f64, beta: f64, lambda: f64) -> f64 {
    let gap = beta - (k as f64).ln();
    (2.0 * lambda.abs() / gap).max(2.0 * 4f64.ln() / eps)
}

/// Smoothness tied to `(β, ε, p)` by the trace theorem: `1 − (β − log K)/(εp)`.
pub fn forced_theta(k: usize, eps: f64, beta: f64, p: f64) -> f64 {
    1.0 - (beta - (k as f64).ln()) / (eps * p)
}

impl SpaceParams {
    /// Builds parameters with `C` at its lower bound and `θ` at its forced
    /// value (clamped at 0 when `p` is below the borderline exponent).
    pub fn new(k: usize, eps: f64, beta: f64, lambda: f64, p: f64, depth: usize) -> Result<Self> {
        Self::assemble(k, eps, beta, lambda, None, p, None, depth)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        k: usize,
        eps: f64,
        beta: f64,
        lambda: f64,
        c: Option<f64>,
        p: f64,
        theta: Option<f64>,
        depth: usize,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if k < 2 {
            return bad(format!("K must be at least 2, got {k}"));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return bad(format!("eps must be positive, got {eps}"));
        }
        let log_k = (k as f64).ln();
        if !(beta.is_finite() && beta > log_k) {
            return bad(format!("beta must exceed log K = {log_k}, got {beta}"));
        }
        if !lambda.is_finite() {
            return bad(format!("lambda must be finite, got {lambda}"));
        }
        if !(p.is_finite() && p >= 1.0) {
            return bad(format!("p must be at least 1, got {p}"));
        }
        if depth < 1 {
            return bad("depth must be at least 1".into());
        }
        let bound = c_lower_bound(k, eps, beta, lambda);
        let c_value = match c {
            Some(c) if !(c.is_finite() && c >= bound) => {
                return bad(format!("C must be at least {bound}, got {c}"));
            }
            Some(c) => c,
            None => bound,
        };
        let theta_value = match theta {
            Some(t) if !(t.is_finite() && (0.0..1.0).contains(&t)) => {
                return bad(format!("theta must lie in [0, 1), got {t}"));
            }
            Some(t) => t,
            None => forced_theta(k, eps, beta, p).clamp(0.0, 1.0 - f64::EPSILON),
        };
        Ok(SpaceParams {
            k,
            eps,
            beta,
            lambda,
            c: c_value,
            c_explicit: c.is_some(),
            p,
            theta: theta_value,
            theta_explicit: theta.is_some(),
            depth,
            q: log_k / eps,
        })
    }

    fn rebuild(&self) -> Result<Self> {
        Self::assemble(
            self.k,
            self.eps,
            self.beta,
            self.lambda,
            self.c_explicit.then_some(self.c),
            self.p,
            self.theta_explicit.then_some(self.theta),
            self.depth,
        )
    }

    pub fn with_c(&self, c: f64) -> Result<Self> {
        let mut next = self.clone();
        next.c = c;
        next.c_explicit = true;
        next.rebuild()
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        let mut next = self.clone();
        next.theta = theta;
        next.theta_explicit = true;
        next.rebuild()
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        let mut next = self.clone();
        next.lambda = lambda;
        next.rebuild()
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        let mut next = self.clone();
        next.p = p;
        next.rebuild()
    }

    pub fn with_depth(&self, depth: usize) -> Result<Self> {
        let mut next = self.clone();
        next.depth = depth;
        next.rebuild()
    }

    pub fn k(&self) -> usize {
        self.k
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Ahlfors dimension of the boundary, `log K / ε`.
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn log_k(&self) -> f64 {
        (self.k as f64).ln()
    }

    /// `(β − log K)/ε`, the exponent at which the trace becomes borderline.
    pub fn borderline_p(&self) -> f64 {
        (self.beta - self.log_k()) / self.eps
    }

    pub fn forced_theta(&self) -> f64 {
        forced_theta(self.k, self.eps, self.beta, self.p)
    }

    /// Number of boundary cells at the truncation depth.
    pub fn cell_count(&self) -> usize {
        self.k.pow(self.depth as u32)
    }

    pub fn parse_config(text: &str) -> Result<Self> {
        let mut k = None;
        let mut eps = None;
        let mut beta = None;
        let mut lambda = None;
        let mut c = None;
        let mut p = None;
        let mut theta = None;
        let mut depth = None;

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config { line: line_no, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
            let key = key.trim();
            let value = value.trim();
            let float = || {
                value
                    .parse::<f64>()
                    .map_err(|_| err(format!("`{value}` is not a decimal number")))
            };
            let int = || {
                value
                    .parse::<usize>()
                    .map_err(|_| err(format!("`{value}` is not a non-negative integer")))
            };
            let slot_taken = |present: bool| {
                if present {
                    Err(err(format!("duplicate key `{key}`")))
                } else {
                    Ok(())
                }
            };
            match key {
                "K" => {
                    slot_taken(k.is_some())?;
                    k = Some(int()?)
                }
                "eps" => {
                    slot_taken(eps.is_some())?;
                    eps = Some(float()?)
                }
                "beta" => {
                    slot_taken(beta.is_some())?;
                    beta = Some(float()?)
                }
                "lambda" => {
                    slot_taken(lambda.is_some())?;
                    lambda = Some(float()?)
                }
                "C" => {
                    slot_taken(c.is_some())?;
                    c = Some(float()?)
                }
                "p" => {
                    slot_taken(p.is_some())?;
                    p = Some(float()?)
                }
                "theta" => {
                    slot_taken(theta.is_some())?;
                    theta = Some(float()?)
                }
                "depth" => {
                    slot_taken(depth.is_some())?;
                    depth = Some(int()?)
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }

        let missing = |name: &str| Error::Config {
            line: 0,
            msg: format!("missing required key `{name}`"),
        };
        Self::assemble(
            k.ok_or_else(|| missing("K"))?,
            eps.ok_or_else(|| missing("eps"))?,
            beta.ok_or_else(|| missing("beta"))?,
            lambda.ok_or_else(|| missing("lambda"))?,
            c,
            p.ok_or_else(|| missing("p"))?,
            theta,
            depth.ok_or_else(|| missing("depth"))?,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_config(&text)
    }

    /// Config text that parses back to `self`. Optional keys are written only
    /// when they were given explicitly.
    pub fn to_config_string(&self) -> String {
        let mut out = format!(
            "K={}\neps={:?}\nbeta={:?}\nlambda={:?}\np={:?}\ndepth={}\n",
            self.k, self.eps, self.beta, self.lambda, self.p, self.depth
        );
        if self.c_explicit {
            out.push_str(&format!("C={:?}\n", self.c));
        }
        if self.theta_explicit {
            out.push_str(&format!("theta={:?}\n", self.theta));
        }
        out
    }
}

impl fmt::Display for SpaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K={} eps={} beta={} lambda={} C={} p={} theta={} depth={}",
            self.k, self.eps, self.beta, self.lambda, self.c, self.p, self.theta, self.depth
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn default_c_is_lower_bound() {
        let p = SpaceParams::new(2, LN2, 2.0 * LN2, 1.0, 1.0, 8).unwrap();
        let expected = (2.0 / LN2).max(2.0 * 4f64.ln() / LN2);
        assert_eq!(p.c(), expected);
        assert_eq!(p.q(), 1.0);
    }

    #[test]
    fn rejects_small_c_and_bad_beta() {
        let base = SpaceParams::new(2, LN2, 2.0 * LN2, 0.0, 1.0, 8).unwrap();
        assert!(base.with_c(1.0).is_err());
        assert!(base.with_c(base.c()).is_ok());
        assert!(SpaceParams::new(2, LN2, LN2, 0.0, 1.0, 8).is_err());
        assert!(SpaceParams::new(1, LN2, 1.0, 0.0, 1.0, 8).is_err());
        assert!(SpaceParams::new(2, 0.0, 1.0, 0.0, 1.0, 8).is_err());
        assert!(SpaceParams::new(2, LN2, 1.0, 0.0, 0.5, 8).is_err());
        assert!(SpaceParams::new(2, LN2, 1.0, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn theta_defaults_to_forced_value() {
        let p = SpaceParams::new(2, LN2, 1.5 * LN2, 0.0, 2.0, 8).unwrap();
        assert!((p.theta() - 0.75).abs() < 1e-15);
        let border = SpaceParams::new(2, LN2, 2.0 * LN2, 0.0, 1.0, 8).unwrap();
        assert_eq!(border.theta(), 0.0);
        assert!(border.with_theta(1.0).is_err());
    }

    #[test]
    fn config_round_trip_and_errors() {
        let text = "# borderline\nK=2\neps=0.6931471805599453\nbeta=1.3862943611198906 # 2 log 2\nlambda=1\np=1\ndepth=12\nC=6\n";
        let p = SpaceParams::parse_config(text).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.depth(), 12);
        assert_eq!(p.c(), 6.0);
        let again = SpaceParams::parse_config(&p.to_config_string()).unwrap();
        assert_eq!(p, again);

        assert!(matches!(
            SpaceParams::parse_config("K=2\nfoo=1\n"),
            Err(Error::Config { line: 2, .. })
        ));
        assert!(SpaceParams::parse_config("K=2\neps=x\n").is_err());
        assert!(SpaceParams::parse_config("K=2\n").is_err());
        assert!(SpaceParams::parse_config("K=2\nK=3\n").is_err());
    }
}
