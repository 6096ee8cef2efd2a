//! Per-coordinate closed proper convex functions and their subdifferentials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One coordinate of a separable convex function `g(x) = sum_i g_i(x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConvexPiece {
    /// `g_i = 0`.
    Zero,
    /// `g_i(x) = weight * |x|`.
    Abs { weight: f64 },
    /// Indicator of `[lo, hi]`; bounds may be infinite.
    Interval { lo: f64, hi: f64 },
    /// `g_i(x) = curvature / 2 * (x - center)^2`.
    Quadratic { curvature: f64, center: f64 },
}

impl ConvexPiece {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ConvexPiece::Zero => Ok(()),
            ConvexPiece::Abs { weight } if weight.is_finite() && weight >= 0.0 => Ok(()),
            ConvexPiece::Abs { weight } => Err(Error::InvalidSpec(format!(
                "|x| weight must be finite and >= 0, got {weight}"
            ))),
            ConvexPiece::Interval { lo, hi }
                if !lo.is_nan() && !hi.is_nan() && lo <= hi && lo < f64::INFINITY && hi > f64::NEG_INFINITY =>
            {
                Ok(())
            }
            ConvexPiece::Interval { lo, hi } => Err(Error::InvalidSpec(format!(
                "interval indicator needs lo <= hi with nonempty domain, got [{lo}, {hi}]"
            ))),
            ConvexPiece::Quadratic { curvature, center }
                if curvature.is_finite() && curvature >= 0.0 && center.is_finite() =>
            {
                Ok(())
            }
            ConvexPiece::Quadratic { curvature, .. } => Err(Error::InvalidSpec(format!(
                "quadratic curvature must be finite and >= 0, got {curvature}"
            ))),
        }
    }

    /// Proximal map `argmin_u g_i(u) + (u - x)^2 / (2 gamma)`.
    pub fn prox(&self, gamma: f64, x: f64) -> f64 {
        match *self {
            ConvexPiece::Zero => x,
            ConvexPiece::Abs { weight } => x.signum() * (x.abs() - gamma * weight).max(0.0),
            ConvexPiece::Interval { lo, hi } => x.clamp(lo, hi),
            ConvexPiece::Quadratic { curvature, center } => {
                (x + gamma * curvature * center) / (1.0 + gamma * curvature)
            }
        }
    }

    /// Absolute value of the minimal-norm element of `dg_i(x)`; `+inf` outside the domain.
    pub fn min_norm_subgradient(&self, x: f64) -> f64 {
        match *self {
            ConvexPiece::Zero => 0.0,
            ConvexPiece::Abs { weight } => {
                if x == 0.0 {
                    0.0
                } else {
                    weight
                }
            }
            ConvexPiece::Interval { lo, hi } => {
                if x < lo || x > hi {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            ConvexPiece::Quadratic { curvature, center } => (curvature * (x - center)).abs(),
        }
    }

    /// `argmin g_i` as a closed interval.
    pub fn argmin(&self) -> (f64, f64) {
        match *self {
            ConvexPiece::Zero => (f64::NEG_INFINITY, f64::INFINITY),
            ConvexPiece::Abs { weight } if weight > 0.0 => (0.0, 0.0),
            ConvexPiece::Abs { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            ConvexPiece::Interval { lo, hi } => (lo, hi),
            ConvexPiece::Quadratic { curvature, center } if curvature > 0.0 => (center, center),
            ConvexPiece::Quadratic { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}
