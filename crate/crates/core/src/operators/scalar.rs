//! Continuous nondecreasing maps on the real line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single-valued, continuous, nondecreasing map `f: R -> R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScalarMap {
    /// `x -> scale * x * |x|^(exponent - 1)`.
    Power { scale: f64, exponent: f64 },
    /// Linear interpolation through `knots` (sorted by abscissa), extended
    /// with `left_slope` / `right_slope` outside the knot range.
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
        left_slope: f64,
        right_slope: f64,
    },
}

impl ScalarMap {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarMap::Power { scale, exponent } => {
                if !(scale.is_finite() && *scale > 0.0 && exponent.is_finite() && *exponent > 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "power map needs scale > 0 and exponent > 0, got scale = {scale}, exponent = {exponent}"
                    )));
                }
            }
            ScalarMap::PiecewiseLinear {
                knots,
                left_slope,
                right_slope,
            } => {
                if knots.is_empty() {
                    return Err(Error::InvalidSpec("piecewise-linear map needs knots".into()));
                }
                if !(*left_slope >= 0.0 && *right_slope >= 0.0) || !left_slope.is_finite() || !right_slope.is_finite() {
                    return Err(Error::InvalidSpec("end slopes must be finite and >= 0".into()));
                }
                for w in knots.windows(2) {
                    let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                    if !(x1 > x0) || y1 < y0 {
                        return Err(Error::InvalidSpec(
                            "knots must have increasing abscissae and nondecreasing values".into(),
                        ));
                    }
                }
                if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                    return Err(Error::NonFinite("piecewise-linear knots"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScalarMap::Power { .. } if x == 0.0 => 0.0,
            ScalarMap::Power { scale, exponent } => scale * x.signum() * x.abs().powf(*exponent),
            ScalarMap::PiecewiseLinear {
                knots,
                left_slope,
                right_slope,
            } => {
                let (x0, y0) = knots[0];
                let (xn, yn) = knots[knots.len() - 1];
                if x <= x0 {
                    return y0 + left_slope * (x - x0);
                }
                if x >= xn {
                    return yn + right_slope * (x - xn);
                }
                let i = knots.partition_point(|(kx, _)| *kx <= x) - 1;
                let (xa, ya) = knots[i];
                let (xb, yb) = knots[i + 1];
                ya + (yb - ya) * (x - xa) / (xb - xa)
            }
        }
    }

    /// Solves `u + gamma * f(u) = x` for `u`.
    pub fn resolve(&self, gamma: f64, x: f64) -> f64 {
        match self {
            ScalarMap::Power { .. } => self.resolve_monotone_root(gamma, x),
            ScalarMap::PiecewiseLinear {
                knots,
                left_slope,
                right_slope,
            } => {
                // g(u) = u + gamma f(u) is piecewise linear and strictly increasing.
                let g = |u: f64| u + gamma * self.eval(u);
                let (x0, _) = knots[0];
                let (xn, _) = knots[knots.len() - 1];
                let g0 = g(x0);
                if x <= g0 {
                    return x0 + (x - g0) / (1.0 + gamma * left_slope);
                }
                let gn = g(xn);
                if x >= gn {
                    return xn + (x - gn) / (1.0 + gamma * right_slope);
                }
                for w in knots.windows(2) {
                    let (xa, _) = w[0];
                    let (xb, _) = w[1];
                    let (ga, gb) = (g(xa), g(xb));
                    if x <= gb {
                        return xa + (x - ga) * (xb - xa) / (gb - ga);
                    }
                }
                xn
            }
        }
    }

    /// Safeguarded Newton on the strictly increasing `u + gamma f(u) - x`,
    /// bracketed by `[min(0, x), max(0, x)]` (valid because `f(0) = 0` for power maps).
    fn resolve_monotone_root(&self, gamma: f64, x: f64) -> f64 {
        let ScalarMap::Power { scale, exponent } = self else {
            unreachable!()
        };
        if x == 0.0 {
            return 0.0;
        }
        let g = |u: f64| u + gamma * self.eval(u) - x;
        let dg = |u: f64| 1.0 + gamma * scale * exponent * u.abs().powf(exponent - 1.0);
        let (mut lo, mut hi) = if x > 0.0 { (0.0, x) } else { (x, 0.0) };
        let mut u = x / (1.0 + gamma * scale);
        if !(lo..=hi).contains(&u) {
            u = 0.5 * (lo + hi);
        }
        for _ in 0..400 {
            let gu = g(u);
            if gu == 0.0 {
                return u;
            }
            if gu > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let d = dg(u);
            let mut next = u - gu / d;
            if !next.is_finite() || next <= lo || next >= hi {
                next = 0.5 * (lo + hi);
            }
            if next == u || hi - lo <= 2.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
                return next;
            }
            u = next;
        }
        u
    }

    /// `f^{-1}(0)` as a closed interval (bounds may be infinite).
    pub fn zero_interval(&self) -> Result<(f64, f64)> {
        match self {
            ScalarMap::Power { .. } => Ok((0.0, 0.0)),
            ScalarMap::PiecewiseLinear {
                knots,
                left_slope,
                right_slope,
            } => {
                let (x0, y0) = knots[0];
                let (xn, yn) = knots[knots.len() - 1];
                let no_zero = || Error::InvalidSpec("piecewise-linear map has no zero".into());
                // lower end: smallest x with f(x) >= 0
                let lower = if y0 >= 0.0 {
                    if y0 == 0.0 && *left_slope == 0.0 {
                        f64::NEG_INFINITY
                    } else if y0 == 0.0 {
                        x0
                    } else if *left_slope > 0.0 {
                        x0 - y0 / left_slope
                    } else {
                        return Err(no_zero());
                    }
                } else {
                    match knots.windows(2).find(|w| w[1].1 >= 0.0) {
                        Some(w) => {
                            let ((xa, ya), (xb, yb)) = (w[0], w[1]);
                            xa + (0.0 - ya) * (xb - xa) / (yb - ya)
                        }
                        None if *right_slope > 0.0 => xn - yn / right_slope,
                        None => return Err(no_zero()),
                    }
                };
                // upper end: largest x with f(x) <= 0
                let upper = if yn <= 0.0 {
                    if yn == 0.0 && *right_slope == 0.0 {
                        f64::INFINITY
                    } else if yn == 0.0 {
                        xn
                    } else if *right_slope > 0.0 {
                        xn - yn / right_slope
                    } else {
                        return Err(no_zero());
                    }
                } else {
                    match knots.windows(2).rev().find(|w| w[0].1 <= 0.0) {
                        Some(w) => {
                            let ((xa, ya), (xb, yb)) = (w[0], w[1]);
                            xb - (yb - 0.0) * (xb - xa) / (yb - ya)
                        }
                        None if *left_slope > 0.0 => x0 - y0 / left_slope,
                        None => return Err(no_zero()),
                    }
                };
                if lower > upper {
                    return Err(no_zero());
                }
                Ok((lower, upper))
            }
        }
    }
}
