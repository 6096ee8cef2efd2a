//! Empirical regularity constants and the conversions between them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::engines::random_unit;
use crate::error::{Error, Result};
use crate::operators::{Operator, ZERO_RESIDUAL_TOL};
use crate::vector::Vector;

/// Number of halvings in the shrinking-radius trend.
pub const TREND_HALVINGS: usize = 3;
/// Growth of the sup-ratio per halving that counts as blow-up.
pub const DIVERGENCE_GROWTH: f64 = 3.0;
/// Consecutive blow-up halvings needed to flag divergence.
pub const DIVERGENCE_RUN: usize = 2;

/// Sampled subregularity modulus on `B[center; delta]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubregEstimate {
    /// Sampled `sup d(x, zer A) / d(0, Ax)`; `None` when divergent.
    pub kappa_hat: Option<f64>,
    pub divergent: bool,
    pub delta: f64,
    pub samples: usize,
    /// Sample attaining the supremum (or the first zero-denominator point).
    pub worst_witness: Option<Vector>,
    /// `(radius, sup-ratio)` over radii `delta, delta/2, delta/4, delta/8`.
    pub trend: Vec<(f64, f64)>,
}

impl SubregEstimate {
    /// Ratio between consecutive sup-ratios of the trend.
    pub fn trend_growth(&self) -> Vec<f64> {
        self.trend.windows(2).map(|w| w[1].1 / w[0].1).collect()
    }
}

impl Serialize for SubregEstimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            kappa_hat: serde_json::Value,
            delta: f64,
            samples: usize,
            trend: &'a [(f64, f64)],
        }
        let kappa_hat = match self.kappa_hat {
            Some(k) if !self.divergent => serde_json::json!(k),
            _ => serde_json::json!("divergent"),
        };
        Out {
            kappa_hat,
            delta: self.delta,
            samples: self.samples,
            trend: &self.trend,
        }
        .serialize(s)
    }
}

/// A sampled point: distance to the center and `d(x, zer A) / d(0, Ax)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSample {
    pub x: Vector,
    pub radius: f64,
    /// `None` when `d(0, Ax) = 0` and `d(x, zer A) <= 1e-12` (no information).
    pub ratio: Option<f64>,
    /// `d(0, Ax) = 0` while `d(x, zer A) > 1e-12`.
    pub unbounded: bool,
}

/// Uniform point of the unit ball: Gaussian direction, radius `U^{1/n}`.
pub fn unit_ball_point<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    let d = random_unit(rng, dim);
    let u: f64 = rng.random();
    d.scale(u.powf(1.0 / dim as f64))
}

fn check_center(op: &Operator, center: &Vector) -> Result<()> {
    center.check_dim(op.dim())?;
    let residual = op.resolvent_residual(1.0, center)?;
    if residual > ZERO_RESIDUAL_TOL {
        return Err(Error::NotAZero { residual });
    }
    op.project_zero_set(center)?;
    Ok(())
}

fn ratio_at(op: &Operator, x: Vector, center: &Vector) -> Result<RatioSample> {
    let dist = op.project_zero_set(&x)?.dist;
    let g = op.min_norm_value(&x)?;
    let radius = x.distance(center);
    let (ratio, unbounded) = if g > 0.0 {
        (Some(if g.is_infinite() { 0.0 } else { dist / g }), false)
    } else if dist > 1e-12 {
        (None, true)
    } else {
        (None, false)
    };
    Ok(RatioSample {
        x,
        radius,
        ratio,
        unbounded,
    })
}

/// Ratios at `n` fixed unit-ball directions scaled to radius `r` around `center`.
fn scaled_ratios(op: &Operator, center: &Vector, unit: &[Vector], r: f64) -> Result<Vec<RatioSample>> {
    unit.iter()
        .map(|u| ratio_at(op, center.lin_comb(1.0, u, r), center))
        .collect()
}

/// Samples `n` points uniformly in `B[center; delta]` and evaluates the ratio at each.
pub fn sample_ratios(op: &Operator, center: &Vector, delta: f64, n: usize, seed: u64) -> Result<Vec<RatioSample>> {
    check_center(op, center)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit: Vec<Vector> = (0..n).map(|_| unit_ball_point(&mut rng, op.dim())).collect();
    scaled_ratios(op, center, &unit, delta)
}

fn sup_ratio(samples: &[RatioSample]) -> (f64, Option<usize>) {
    let mut best = (0.0, None);
    for (i, s) in samples.iter().enumerate() {
        if let Some(r) = s.ratio {
            if best.1.is_none() || r > best.0 {
                best = (r, Some(i));
            }
        }
    }
    best
}

/// Estimates the subregularity modulus at `center` over `B[center; delta]`.
///
/// The trend reuses the same unit-ball sample set scaled to each radius. The
/// estimate is divergent when a sampled point has `d(0, Ax) = 0` off the zero set,
/// or when the sup-ratio grows by more than [`DIVERGENCE_GROWTH`] per halving for
/// [`DIVERGENCE_RUN`] consecutive halvings.
pub fn estimate_kappa(
    op: &Operator,
    center: &Vector,
    delta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SubregEstimate> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::RangeViolation(format!("delta must be > 0, got {delta}")));
    }
    if n_samples == 0 {
        return Err(Error::RangeViolation("need at least one sample".into()));
    }
    check_center(op, center)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit: Vec<Vector> = (0..n_samples).map(|_| unit_ball_point(&mut rng, op.dim())).collect();

    let mut trend = Vec::with_capacity(TREND_HALVINGS + 1);
    let mut witness = None;
    let mut kappa = 0.0;
    let mut unbounded = false;
    for i in 0..=TREND_HALVINGS {
        let r = delta * 0.5f64.powi(i as i32);
        let samples = scaled_ratios(op, center, &unit, r)?;
        let (sup, arg) = sup_ratio(&samples);
        let zero_den = samples.iter().position(|s| s.unbounded);
        if i == 0 {
            kappa = sup;
            witness = match (zero_den, arg) {
                (Some(z), _) => Some(samples[z].x.clone()),
                (None, Some(a)) => Some(samples[a].x.clone()),
                (None, None) => None,
            };
            unbounded = zero_den.is_some();
        }
        trend.push((r, sup));
    }
    let mut run = 0;
    let mut blow_up = false;
    for w in trend.windows(2) {
        if w[0].1 > 0.0 && w[1].1 > DIVERGENCE_GROWTH * w[0].1 {
            run += 1;
            blow_up |= run >= DIVERGENCE_RUN;
        } else {
            run = 0;
        }
    }
    let divergent = unbounded || blow_up;
    Ok(SubregEstimate {
        kappa_hat: (!divergent).then_some(kappa),
        divergent,
        delta,
        samples: n_samples,
        worst_witness: witness,
        trend,
    })
}

/// Lipschitz-at-0 data `(alpha, tau)` of `A^{-1}` gives subregularity `(alpha, alpha tau)`.
pub fn lipschitz_to_subreg(alpha: f64, tau: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && tau > 0.0) || !alpha.is_finite() || !tau.is_finite() {
        return Err(Error::RangeViolation(format!(
            "alpha and tau must be finite and > 0, got ({alpha}, {tau})"
        )));
    }
    Ok((alpha, alpha * tau))
}

/// Subregularity constant `1 + kappa/gamma` of the residual map `Id - J_{gamma A}`.
pub fn resolvent_residual_subreg(kappa: f64, gamma: f64) -> Result<f64> {
    if !(kappa > 0.0 && gamma > 0.0) || !kappa.is_finite() || !gamma.is_finite() {
        return Err(Error::RangeViolation(format!(
            "kappa and gamma must be finite and > 0, got ({kappa}, {gamma})"
        )));
    }
    Ok(1.0 + kappa / gamma)
}

/// Outcome of a sampled inequality check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledCheck {
    pub pass: bool,
    /// Samples that met the check's preconditions.
    pub checked: usize,
    /// Largest observed `lhs / rhs-factor` ratio.
    pub worst_ratio: f64,
    pub bound: f64,
    /// First violating sample.
    pub witness: Option<Vec<Vec<f64>>>,
}

/// Samples graph pairs `(z, w)` and checks `||z - xbar|| <= alpha ||w|| + 1e-10`
/// for those with `||w|| <= tau`.
pub fn verify_inverse_lipschitz(
    op: &Operator,
    alpha: f64,
    tau: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SampledCheck> {
    lipschitz_to_subreg(alpha, tau)?;
    let xbar = op.zero_set().singleton().ok_or(Error::ZeroSetNotSingleton)?.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 + alpha * tau;
    let mut out = SampledCheck {
        pass: true,
        checked: 0,
        worst_ratio: 0.0,
        bound: alpha,
        witness: None,
    };
    for _ in 0..n_samples {
        let radius = scale * 10f64.powf(rng.random_range(-3.0..1.0));
        let x = xbar.lin_comb(1.0, &unit_ball_point(&mut rng, op.dim()), radius);
        let gamma = 10f64.powf(rng.random_range(-3.0..=3.0));
        let (z, w) = op.graph_element(gamma, &x)?;
        let wn = w.norm();
        if wn > tau {
            continue;
        }
        out.checked += 1;
        let dz = z.distance(&xbar);
        if wn > 0.0 {
            out.worst_ratio = out.worst_ratio.max(dz / wn);
        }
        if dz > alpha * wn + 1e-10 && out.witness.is_none() {
            out.pass = false;
            out.witness = Some(vec![z.into_inner(), w.into_inner()]);
        }
    }
    Ok(out)
}

/// Checks `d(J x, zer A) <= d(x, zer A) / sqrt(1 + gamma^2/kappa^2)` on samples `x`
/// with `J x` in `B[center; delta]`.
pub fn resolvent_distance_contraction_check(
    op: &Operator,
    kappa: f64,
    delta: f64,
    gamma: f64,
    center: &Vector,
    n_samples: usize,
    seed: u64,
) -> Result<SampledCheck> {
    resolvent_residual_subreg(kappa, gamma)?;
    check_center(op, center)?;
    let factor = 1.0 / (1.0 + gamma * gamma / (kappa * kappa)).sqrt();
    let resolvent = op.resolvent(gamma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SampledCheck {
        pass: true,
        checked: 0,
        worst_ratio: 0.0,
        bound: factor,
        witness: None,
    };
    for _ in 0..n_samples {
        let x = center.lin_comb(1.0, &unit_ball_point(&mut rng, op.dim()), 2.0 * delta);
        let j = resolvent.apply(&x)?;
        if j.distance(center) > delta {
            continue;
        }
        out.checked += 1;
        let dx = op.project_zero_set(&x)?.dist;
        let dj = op.project_zero_set(&j)?.dist;
        if dx > 0.0 {
            out.worst_ratio = out.worst_ratio.max(dj / dx);
        }
        if dj > factor * dx + 1e-10 * (1.0 + dx * dx) && out.witness.is_none() {
            out.pass = false;
            out.witness = Some(vec![x.into_inner()]);
        }
    }
    Ok(out)
}

/// Checks `d(x, zer A) <= (1 + kappa/gamma) ||x - J_{gamma A} x|| + 1e-9` on samples in `B[center; delta]`.
pub fn residual_ratio_check(
    op: &Operator,
    kappa: f64,
    delta: f64,
    gamma: f64,
    center: &Vector,
    n_samples: usize,
    seed: u64,
) -> Result<SampledCheck> {
    let bound = resolvent_residual_subreg(kappa, gamma)?;
    check_center(op, center)?;
    let resolvent = op.resolvent(gamma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SampledCheck {
        pass: true,
        checked: 0,
        worst_ratio: 0.0,
        bound,
        witness: None,
    };
    for _ in 0..n_samples {
        let x = center.lin_comb(1.0, &unit_ball_point(&mut rng, op.dim()), delta);
        let r = x.distance(&resolvent.apply(&x)?);
        let d = op.project_zero_set(&x)?.dist;
        out.checked += 1;
        if r > 0.0 {
            out.worst_ratio = out.worst_ratio.max(d / r);
        }
        if d > bound * r + 1e-9 && out.witness.is_none() {
            out.pass = false;
            out.witness = Some(vec![x.into_inner()]);
        }
    }
    Ok(out)
}

/// Empirical evidence for both directions between Lipschitz continuity of `A^{-1}`
/// at 0 and metric subregularity. Experimental: never feeds certificates and
/// asserts no equivalence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceProbe {
    pub experimental: bool,
    pub lipschitz: SampledCheck,
    /// `kappa_hat` on `B[xbar; alpha tau]`, `None` if divergent.
    pub kappa_hat: Option<f64>,
    /// Lipschitz passed and `kappa_hat <= alpha + 1e-9`.
    pub forward_consistent: bool,
}

pub fn equivalence_probe(op: &Operator, alpha: f64, tau: f64, n_samples: usize, seed: u64) -> Result<EquivalenceProbe> {
    let lipschitz = verify_inverse_lipschitz(op, alpha, tau, n_samples, seed)?;
    let xbar = op.zero_set().singleton().ok_or(Error::ZeroSetNotSingleton)?.clone();
    let (_, delta) = lipschitz_to_subreg(alpha, tau)?;
    let est = estimate_kappa(op, &xbar, delta, n_samples, seed)?;
    let forward_consistent = !lipschitz.pass || est.kappa_hat.is_some_and(|k| k <= alpha + 1e-9);
    Ok(EquivalenceProbe {
        experimental: true,
        lipschitz,
        kappa_hat: est.kappa_hat,
        forward_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::zoo;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn kappa_examples() {
        let id = zoo::lookup("identity:3").unwrap();
        let e = estimate_kappa(&id, &Vector::zeros(3), 1.0, 500, 1).unwrap();
        assert!((e.kappa_hat.unwrap() - 1.0).abs() < 1e-12);
        let two = zoo::lookup("scalar:2").unwrap();
        let e = estimate_kappa(&two, &Vector::zeros(1), 1.0, 500, 1).unwrap();
        assert!((e.kappa_hat.unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn cubic_is_flagged() {
        let cubic = zoo::lookup("cubic").unwrap();
        let e = estimate_kappa(&cubic, &Vector::zeros(1), 0.1, 1000, 5).unwrap();
        assert!(e.divergent);
        assert!(e.trend[0].1 >= 100.0);
        for g in e.trend_growth() {
            assert!((g - 4.0).abs() < 1e-9, "growth {g}");
        }
        let j = serde_json::to_value(&e).unwrap();
        assert_eq!(j["kappa_hat"], "divergent");
    }

    #[test]
    fn center_must_be_a_zero() {
        let id = zoo::lookup("identity").unwrap();
        assert!(matches!(
            estimate_kappa(&id, &v(&[1.0]), 1.0, 10, 0),
            Err(Error::NotAZero { .. })
        ));
    }

    #[test]
    fn conversions() {
        assert_eq!(lipschitz_to_subreg(2.0, 0.5).unwrap(), (2.0, 1.0));
        assert_eq!(lipschitz_to_subreg(1.0, 1.0).unwrap(), (1.0, 1.0));
        let (k, d) = lipschitz_to_subreg(0.01, 10.0).unwrap();
        assert!(k == 0.01 && (d - 0.1).abs() < 1e-15);
        assert_eq!(resolvent_residual_subreg(1.0, 1.0).unwrap(), 2.0);
        assert_eq!(resolvent_residual_subreg(2.0, 0.5).unwrap(), 5.0);
        assert!((resolvent_residual_subreg(1e-12, 1.0).unwrap() - 1.0).abs() < 1e-11);
        assert!(lipschitz_to_subreg(0.0, 1.0).is_err());
    }

    #[test]
    fn inverse_lipschitz_examples() {
        let abs = zoo::lookup("abs").unwrap();
        assert!(verify_inverse_lipschitz(&abs, 0.01, 0.5, 2000, 3).unwrap().pass);
        let id = zoo::lookup("identity").unwrap();
        assert!(verify_inverse_lipschitz(&id, 1.0, 1.0, 2000, 3).unwrap().pass);
        let fail = verify_inverse_lipschitz(&id, 0.5, 1.0, 2000, 3).unwrap();
        assert!(!fail.pass);
        let w = fail.witness.unwrap();
        assert!((w[0][0] - w[1][0]).abs() < 1e-12);
        let bx = zoo::lookup("box:[0,1]x[0,1]").unwrap();
        assert!(matches!(
            verify_inverse_lipschitz(&bx, 1.0, 1.0, 10, 0),
            Err(Error::ZeroSetNotSingleton)
        ));
    }

    #[test]
    fn contraction_examples() {
        let rot = zoo::lookup("rotation2").unwrap();
        let c = resolvent_distance_contraction_check(&rot, 1.0, 1.0, 1.0, &Vector::zeros(2), 500, 9).unwrap();
        assert!(c.pass && c.checked > 0);
        assert!((c.worst_ratio - 0.5f64.sqrt()).abs() < 1e-12);
        let id = zoo::lookup("identity").unwrap();
        let c = resolvent_distance_contraction_check(&id, 1.0, 1.0, 1.0, &Vector::zeros(1), 500, 9).unwrap();
        assert!(c.pass);
        assert!((c.worst_ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn probe_is_experimental() {
        let abs = zoo::lookup("abs").unwrap();
        let p = equivalence_probe(&abs, 0.01, 0.5, 300, 1).unwrap();
        assert!(p.experimental && p.forward_consistent);
    }
}
