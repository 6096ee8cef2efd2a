//! Finite-dimensional maximally monotone operators with exact resolvents.
//!
//! An [`Operator`] bundles what the iteration engines and certificates need
//! from a monotone operator `A`: the resolvent `J_{gamma A} = (Id + gamma A)^{-1}`,
//! graph elements, the minimal-norm value `d(0, Ax)`, and the Euclidean
//! projector onto `zer A`.

mod scalar;
mod separable;
pub mod zoo;

use nalgebra::{linalg::LU, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

pub use scalar::ScalarMap;
pub use separable::ConvexPiece;

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Smallest admissible eigenvalue of the symmetric part of a linear operator.
pub const MONOTONE_TOL: f64 = -1e-10;
/// Resolvent residual a zero-set representative must satisfy.
pub const ZERO_RESIDUAL_TOL: f64 = 1e-10;

/// The concrete operator family.
#[derive(Debug, Clone)]
pub enum OperatorKind {
    /// `A x = M x`.
    Linear(DMatrix<f64>),
    /// `A = dg` with `g(x) = sum_i g_i(x_i)`.
    SeparableSubdifferential(Vec<ConvexPiece>),
    /// A continuous nondecreasing map of one real variable.
    ScalarMonotone(ScalarMap),
    /// Block-diagonal with `blocks` planar rotations by `theta`, `|theta| <= pi/2`.
    SkewRotation { blocks: usize, theta: f64 },
}

/// Description of `zer A`.
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroSet {
    Singleton(Vector),
    /// Coordinate box; bounds may be infinite.
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// `offset + span(basis)` with an orthonormal basis.
    Affine {
        offset: Vector,
        basis: Vec<Vector>,
    },
    /// Limit of a high-accuracy reference run, used as a singleton surrogate.
    Reference(Vector),
    Unknown,
}

impl ZeroSet {
    pub fn is_singleton(&self) -> bool {
        matches!(self, ZeroSet::Singleton(_))
    }

    /// The unique zero, if `zer A` is known to be a singleton.
    pub fn singleton(&self) -> Option<&Vector> {
        match self {
            ZeroSet::Singleton(p) => Some(p),
            _ => None,
        }
    }
}

/// A claimed metric-subregularity triple `(kappa, delta, center)`:
/// `d(x, zer A) <= kappa d(0, Ax)` on the closed ball `B[center; delta]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubregularityMeta {
    pub kappa: f64,
    pub delta: f64,
    pub center: Vector,
}

/// Claimed Lipschitz-at-0 data for `A^{-1}`: `||z - xbar|| <= alpha ||w||`
/// whenever `w in Az` and `||w|| <= tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseLipschitzMeta {
    pub alpha: f64,
    pub tau: f64,
}

/// Result of projecting onto `zer A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: Vector,
    pub dist: f64,
    /// `false` when the zero set is a reference-run surrogate.
    pub exact: bool,
}

/// A maximally monotone operator on `R^n`. Immutable once built.
#[derive(Debug, Clone)]
pub struct Operator {
    name: String,
    dim: usize,
    kind: OperatorKind,
    zero_set: ZeroSet,
    subregularity: Option<SubregularityMeta>,
    inverse_lipschitz: Option<InverseLipschitzMeta>,
    monotonicity_checked: bool,
}

/// Smallest eigenvalue of `(M + M^T) / 2`.
pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.min()
}

impl Operator {
    /// `A x = M x`. Fails with [`Error::NotMonotone`] if `M + M^T` is not PSD.
    pub fn make_linear(m: DMatrix<f64>) -> Result<Self> {
        let op = Self::linear_unchecked(m)?;
        let OperatorKind::Linear(ref mat) = op.kind else {
            unreachable!()
        };
        let min_eig = min_symmetric_eigenvalue(mat);
        if min_eig < MONOTONE_TOL {
            return Err(Error::NotMonotone {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Operator {
            monotonicity_checked: true,
            ..op
        })
    }

    /// Builds a linear operator from a row-major square matrix.
    pub fn make_linear_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::make_linear(matrix_from_rows(rows)?)
    }

    /// Linear operator without the monotonicity check. Used for matrices
    /// loaded from files; the verification suite and divergence guard catch
    /// non-monotone input downstream.
    pub fn linear_unchecked(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidSpec(format!(
                "linear operator needs a nonempty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        let n = m.nrows();
        let zero_set = kernel_zero_set(&m);
        Ok(Operator {
            name: format!("linear{n}"),
            dim: n,
            kind: OperatorKind::Linear(m),
            zero_set,
            subregularity: None,
            inverse_lipschitz: None,
            monotonicity_checked: false,
        })
    }

    /// Subdifferential of a separable closed proper convex function.
    pub fn make_separable_subdifferential(pieces: Vec<ConvexPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidSpec("separable operator needs at least one piece".into()));
        }
        for p in &pieces {
            p.validate()?;
        }
        let (lower, upper): (Vec<f64>, Vec<f64>) = pieces.iter().map(|p| p.argmin()).unzip();
        let zero_set = if lower.iter().zip(&upper).all(|(l, u)| l == u) {
            ZeroSet::Singleton(Vector::from_raw(lower))
        } else {
            ZeroSet::Box { lower, upper }
        };
        let op = Operator {
            name: "separable".into(),
            dim: pieces.len(),
            kind: OperatorKind::SeparableSubdifferential(pieces),
            zero_set,
            subregularity: None,
            inverse_lipschitz: None,
            monotonicity_checked: true,
        };
        op.check_zero_set_residual()?;
        Ok(op)
    }

    pub fn make_scalar(map: ScalarMap) -> Result<Self> {
        map.validate()?;
        let (lo, hi) = map.zero_interval()?;
        let zero_set = if lo == hi {
            ZeroSet::Singleton(Vector::from_raw(vec![lo]))
        } else {
            ZeroSet::Box {
                lower: vec![lo],
                upper: vec![hi],
            }
        };
        let op = Operator {
            name: "scalar".into(),
            dim: 1,
            kind: OperatorKind::ScalarMonotone(map),
            zero_set,
            subregularity: None,
            inverse_lipschitz: None,
            monotonicity_checked: true,
        };
        op.check_zero_set_residual()?;
        Ok(op)
    }

    pub fn make_skew_rotation(blocks: usize, theta: f64) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::InvalidSpec("skew rotation needs at least one block".into()));
        }
        if !theta.is_finite() || theta.abs() > std::f64::consts::FRAC_PI_2 + 1e-15 {
            return Err(Error::NotMonotone {
                min_eigenvalue: theta.cos(),
            });
        }
        Ok(Operator {
            name: format!("rotation{}", 2 * blocks),
            dim: 2 * blocks,
            kind: OperatorKind::SkewRotation { blocks, theta },
            zero_set: ZeroSet::Singleton(Vector::zeros(2 * blocks)),
            subregularity: None,
            inverse_lipschitz: None,
            monotonicity_checked: true,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attaches a claimed subregularity triple. The center must be a zero.
    pub fn with_subregularity(mut self, kappa: f64, delta: f64, center: Vector) -> Result<Self> {
        if !(kappa > 0.0 && delta > 0.0) || !kappa.is_finite() || !delta.is_finite() {
            return Err(Error::RangeViolation(format!(
                "subregularity needs kappa > 0 and delta > 0, got ({kappa}, {delta})"
            )));
        }
        center.check_dim(self.dim)?;
        let residual = self.resolvent_residual(1.0, &center)?;
        if residual > ZERO_RESIDUAL_TOL {
            return Err(Error::NotAZero { residual });
        }
        self.subregularity = Some(SubregularityMeta { kappa, delta, center });
        Ok(self)
    }

    /// Attaches claimed Lipschitz-at-0 data for `A^{-1}`; requires a singleton zero set.
    pub fn with_inverse_lipschitz(mut self, alpha: f64, tau: f64) -> Result<Self> {
        if !(alpha > 0.0 && tau > 0.0) || !alpha.is_finite() || !tau.is_finite() {
            return Err(Error::RangeViolation(format!(
                "inverse Lipschitz data needs alpha > 0 and tau > 0, got ({alpha}, {tau})"
            )));
        }
        if !self.zero_set.is_singleton() {
            return Err(Error::ZeroSetNotSingleton);
        }
        self.inverse_lipschitz = Some(InverseLipschitzMeta { alpha, tau });
        Ok(self)
    }

    /// Replaces an unknown zero set by the limit of an exact proximal point
    /// run (`lambda = 1`, `c = 10`) from `start`, stopped at residual `<= 1e-12`.
    pub fn with_reference_zero_set(mut self, start: &Vector, max_iter: usize) -> Result<Self> {
        start.check_dim(self.dim)?;
        let resolvent = self.resolvent(10.0)?;
        let mut x = start.clone();
        for _ in 0..max_iter {
            let j = resolvent.apply(&x)?;
            let r = x.distance(&j);
            x = j;
            if r <= 1e-12 {
                self.zero_set = ZeroSet::Reference(x);
                return Ok(self);
            }
        }
        Err(Error::NoZeroSetInfo)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn zero_set(&self) -> &ZeroSet {
        &self.zero_set
    }

    pub fn subregularity(&self) -> Option<&SubregularityMeta> {
        self.subregularity.as_ref()
    }

    pub fn inverse_lipschitz(&self) -> Option<&InverseLipschitzMeta> {
        self.inverse_lipschitz.as_ref()
    }

    pub fn monotonicity_checked(&self) -> bool {
        self.monotonicity_checked
    }

    /// Prepares `J_{gamma A}`; for linear operators this factors `I + gamma M` once.
    pub fn resolvent(&self, gamma: f64) -> Result<Resolvent<'_>> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::RangeViolation(format!("gamma must be > 0, got {gamma}")));
        }
        let lu = match &self.kind {
            OperatorKind::Linear(m) => {
                let n = m.nrows();
                let system = DMatrix::<f64>::identity(n, n) + m * gamma;
                let lu = system.lu();
                let u = lu.u();
                let diag = u.diagonal();
                let max_pivot = diag.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                let min_pivot = diag.iter().fold(f64::INFINITY, |a, b| a.min(b.abs()));
                if !(min_pivot > 1e-14 * max_pivot.max(1.0)) {
                    return Err(Error::SolveFailure { gamma });
                }
                Some(lu)
            }
            _ => None,
        };
        Ok(Resolvent { op: self, gamma, lu })
    }

    /// `J_{gamma A} x`.
    pub fn resolve(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        self.resolvent(gamma)?.apply(x)
    }

    /// `(J_{gamma A} x, (x - J_{gamma A} x) / gamma)`, a point of `gra A`.
    pub fn graph_element(&self, gamma: f64, x: &Vector) -> Result<(Vector, Vector)> {
        let p = self.resolve(gamma, x)?;
        let v = x.sub(&p).scale(1.0 / gamma);
        Ok((p, v))
    }

    /// `||x - J_{gamma A} x||`.
    pub fn resolvent_residual(&self, gamma: f64, x: &Vector) -> Result<f64> {
        Ok(x.distance(&self.resolve(gamma, x)?))
    }

    /// `d(0, Ax)`, the norm of the minimal-norm element of `Ax` (`+inf` if `Ax` is empty).
    pub fn min_norm_value(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim)?;
        let value = match &self.kind {
            OperatorKind::Linear(m) => {
                let mx = m * DVector::from_column_slice(x.as_slice());
                mx.norm()
            }
            OperatorKind::SeparableSubdifferential(pieces) => {
                let mut acc = 0.0;
                for (p, xi) in pieces.iter().zip(x.iter()) {
                    let g = p.min_norm_subgradient(*xi);
                    if g.is_infinite() {
                        return Ok(f64::INFINITY);
                    }
                    acc += g * g;
                }
                acc.sqrt()
            }
            OperatorKind::ScalarMonotone(f) => f.eval(x[0]).abs(),
            OperatorKind::SkewRotation { theta, .. } => {
                // each block is a scaled rotation: ||R x|| = ||x||
                let _ = theta;
                x.norm()
            }
        };
        Ok(value)
    }

    /// Euclidean projection onto `zer A` together with `d(x, zer A)`.
    pub fn project_zero_set(&self, x: &Vector) -> Result<Projection> {
        x.check_dim(self.dim)?;
        let (point, exact) = match &self.zero_set {
            ZeroSet::Singleton(p) => (p.clone(), true),
            ZeroSet::Box { lower, upper } => {
                let p: Vec<f64> = x
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(v, (l, u))| v.clamp(*l, *u))
                    .collect();
                (Vector::from_raw(p), true)
            }
            ZeroSet::Affine { offset, basis } => {
                let d = x.sub(offset);
                let mut p = offset.clone();
                for b in basis {
                    p = p.lin_comb(1.0, b, d.dot(b));
                }
                (p, true)
            }
            ZeroSet::Reference(p) => (p.clone(), false),
            ZeroSet::Unknown => return Err(Error::NoZeroSetInfo),
        };
        let dist = x.distance(&point);
        Ok(Projection { point, dist, exact })
    }

    fn check_zero_set_residual(&self) -> Result<()> {
        let representative = match &self.zero_set {
            ZeroSet::Unknown => return Ok(()),
            _ => self.project_zero_set(&Vector::zeros(self.dim))?.point,
        };
        let residual = self.resolvent_residual(1.0, &representative)?;
        if residual > ZERO_RESIDUAL_TOL {
            return Err(Error::NotAZero { residual });
        }
        Ok(())
    }
}

/// `J_{gamma A}` with any factorization precomputed.
pub struct Resolvent<'a> {
    op: &'a Operator,
    gamma: f64,
    lu: Option<LU<f64, Dyn, Dyn>>,
}

impl Resolvent<'_> {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.op.dim)?;
        let gamma = self.gamma;
        let out: Vec<f64> = match &self.op.kind {
            OperatorKind::Linear(_) => {
                let lu = self.lu.as_ref().expect("linear resolvent is factored");
                let rhs = DVector::from_column_slice(x.as_slice());
                let sol = lu.solve(&rhs).ok_or(Error::SolveFailure { gamma })?;
                sol.iter().copied().collect()
            }
            OperatorKind::SeparableSubdifferential(pieces) => {
                pieces.iter().zip(x.iter()).map(|(p, xi)| p.prox(gamma, *xi)).collect()
            }
            OperatorKind::ScalarMonotone(f) => vec![f.resolve(gamma, x[0])],
            OperatorKind::SkewRotation { theta, .. } => {
                let (s, c) = rotation_sin_cos(*theta);
                // (I + gamma R)^{-1} for R = [[c, -s], [s, c]]
                let a = 1.0 + gamma * c;
                let b = gamma * s;
                let det = a * a + b * b;
                x.as_slice()
                    .chunks_exact(2)
                    .flat_map(|v| [(a * v[0] + b * v[1]) / det, (-b * v[0] + a * v[1]) / det])
                    .collect()
            }
        };
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("resolvent output"));
        }
        Ok(Vector::from_raw(out))
    }
}

/// `(sin, cos)` with the quarter-turn mapped exactly to `(+-1, 0)`.
fn rotation_sin_cos(theta: f64) -> (f64, f64) {
    if theta == std::f64::consts::FRAC_PI_2 {
        (1.0, 0.0)
    } else if theta == -std::f64::consts::FRAC_PI_2 {
        (-1.0, 0.0)
    } else {
        theta.sin_cos()
    }
}

/// The dense matrix of a skew-rotation operator.
pub fn skew_rotation_matrix(blocks: usize, theta: f64) -> DMatrix<f64> {
    let (s, c) = rotation_sin_cos(theta);
    let mut m = DMatrix::zeros(2 * blocks, 2 * blocks);
    for b in 0..blocks {
        let i = 2 * b;
        m[(i, i)] = c;
        m[(i, i + 1)] = -s;
        m[(i + 1, i)] = s;
        m[(i + 1, i + 1)] = c;
    }
    m
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidSpec("matrix must be square and nonempty".into()));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(n, n, &flat))
}

/// `ker M` via the SVD: singular directions with `sigma <= 1e-10 * max(1, sigma_max)`.
fn kernel_zero_set(m: &DMatrix<f64>) -> ZeroSet {
    let n = m.nrows();
    let svd = m.clone().svd(false, true);
    let sigma_max = svd.singular_values.max();
    let tol = 1e-10 * sigma_max.max(1.0);
    let v_t = svd.v_t.expect("requested V^T");
    let basis: Vec<Vector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= tol)
        .map(|(i, _)| Vector::from_raw(v_t.row(i).iter().copied().collect()))
        .collect();
    if basis.is_empty() {
        ZeroSet::Singleton(Vector::zeros(n))
    } else {
        ZeroSet::Affine {
            offset: Vector::zeros(n),
            basis,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn make_linear_examples() {
        let rot = Operator::make_linear_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(rot.zero_set(), &ZeroSet::Singleton(Vector::zeros(2)));
        let two = Operator::make_linear_rows(&[vec![2.0]]).unwrap();
        assert_eq!(two.zero_set(), &ZeroSet::Singleton(Vector::zeros(1)));
        assert!(matches!(
            Operator::make_linear_rows(&[vec![-1.0]]),
            Err(Error::NotMonotone { .. })
        ));
    }

    #[test]
    fn singular_linear_operator_has_affine_kernel() {
        let op = Operator::make_linear_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let proj = op.project_zero_set(&v(&[3.0, -2.0])).unwrap();
        assert!(proj.exact);
        assert!((proj.point[0]).abs() < 1e-14);
        assert!((proj.point[1] + 2.0).abs() < 1e-14);
        assert!((proj.dist - 3.0).abs() < 1e-14);
    }

    #[test]
    fn separable_examples() {
        let abs = Operator::make_separable_subdifferential(vec![ConvexPiece::Abs { weight: 1.0 }]).unwrap();
        assert_eq!(abs.zero_set(), &ZeroSet::Singleton(Vector::zeros(1)));
        assert_eq!(abs.resolve(1.0, &v(&[3.0])).unwrap()[0], 2.0);
        assert_eq!(abs.resolve(1.0, &v(&[0.5])).unwrap()[0], 0.0);

        let bx = Operator::make_separable_subdifferential(vec![
            ConvexPiece::Interval { lo: 0.0, hi: 1.0 },
            ConvexPiece::Interval { lo: 0.0, hi: 1.0 },
        ])
        .unwrap();
        assert!(matches!(bx.zero_set(), ZeroSet::Box { .. }));
        assert_eq!(bx.resolve(3.0, &v(&[2.0, 0.5])).unwrap(), v(&[1.0, 0.5]));

        let zero = Operator::make_separable_subdifferential(vec![ConvexPiece::Zero; 3]).unwrap();
        let x = v(&[1.0, -2.0, 3.5]);
        assert_eq!(zero.resolve(7.0, &x).unwrap(), x);

        assert!(matches!(
            Operator::make_separable_subdifferential(vec![ConvexPiece::Abs { weight: -1.0 }]),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn resolve_examples() {
        let two = Operator::make_linear_rows(&[vec![2.0]]).unwrap();
        assert!((two.resolve(1.0, &v(&[3.0])).unwrap()[0] - 1.0).abs() < 1e-15);
        assert!(matches!(
            two.resolve(1.0, &v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
        assert!(matches!(two.resolve(0.0, &v(&[1.0])), Err(Error::RangeViolation(_))));
    }

    #[test]
    fn singular_system_is_reported() {
        // I + gamma M singular for M = -I, gamma = 1
        let op = Operator::linear_unchecked(DMatrix::from_row_slice(1, 1, &[-1.0])).unwrap();
        assert!(matches!(op.resolve(1.0, &v(&[1.0])), Err(Error::SolveFailure { .. })));
    }

    #[test]
    fn graph_element_examples() {
        let two = Operator::make_linear_rows(&[vec![2.0]]).unwrap();
        let (p, w) = two.graph_element(1.0, &v(&[3.0])).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && (w[0] - 2.0).abs() < 1e-15);
        let abs = Operator::make_separable_subdifferential(vec![ConvexPiece::Abs { weight: 1.0 }]).unwrap();
        let (p, w) = abs.graph_element(1.0, &v(&[3.0])).unwrap();
        assert_eq!((p[0], w[0]), (2.0, 1.0));
        let (p, w) = abs.graph_element(1.0, &v(&[0.0])).unwrap();
        assert_eq!((p[0], w[0]), (0.0, 0.0));
    }

    #[test]
    fn min_norm_value_examples() {
        let abs = Operator::make_separable_subdifferential(vec![ConvexPiece::Abs { weight: 1.0 }]).unwrap();
        assert_eq!(abs.min_norm_value(&v(&[0.0])).unwrap(), 0.0);
        assert_eq!(abs.min_norm_value(&v(&[2.0])).unwrap(), 1.0);
        let two = Operator::make_linear_rows(&[vec![2.0]]).unwrap();
        assert_eq!(two.min_norm_value(&v(&[3.0])).unwrap(), 6.0);
        let bx = Operator::make_separable_subdifferential(vec![ConvexPiece::Interval { lo: 0.0, hi: 1.0 }]).unwrap();
        assert_eq!(bx.min_norm_value(&v(&[2.0])).unwrap(), f64::INFINITY);
    }

    #[test]
    fn project_zero_set_examples() {
        let bx = Operator::make_separable_subdifferential(vec![
            ConvexPiece::Interval { lo: 0.0, hi: 1.0 },
            ConvexPiece::Interval { lo: 0.0, hi: 1.0 },
        ])
        .unwrap();
        let p = bx.project_zero_set(&v(&[2.0, 0.5])).unwrap();
        assert_eq!(p.point, v(&[1.0, 0.5]));
        assert_eq!(p.dist, 1.0);
        let inside = bx.project_zero_set(&v(&[0.3, 0.7])).unwrap();
        assert_eq!(inside.dist, 0.0);
        let rot = Operator::make_skew_rotation(1, std::f64::consts::FRAC_PI_2).unwrap();
        let p = rot.project_zero_set(&v(&[3.0, 4.0])).unwrap();
        assert_eq!(p.point, Vector::zeros(2));
        assert_eq!(p.dist, 5.0);
    }

    #[test]
    fn skew_rotation_scales_norm() {
        let rot = Operator::make_skew_rotation(2, std::f64::consts::FRAC_PI_2).unwrap();
        let x = v(&[1.0, -2.0, 0.5, 3.0]);
        for &g in &[0.1, 1.0, 2.0, 7.5] {
            let j = rot.resolve(g, &x).unwrap();
            let expect = x.norm() / (1.0 + g * g).sqrt();
            assert!((j.norm() - expect).abs() <= 1e-12 * expect);
        }
        // agrees with the dense linear route
        let dense = Operator::make_linear(skew_rotation_matrix(2, 0.7)).unwrap();
        let skew = Operator::make_skew_rotation(2, 0.7).unwrap();
        let a = dense.resolve(1.3, &x).unwrap();
        let b = skew.resolve(1.3, &x).unwrap();
        assert!(a.distance(&b) < 1e-14);
        assert!(Operator::make_skew_rotation(1, 2.0).is_err());
    }

    #[test]
    fn reference_zero_set_is_flagged_approximate() {
        let two = Operator::make_linear_rows(&[vec![2.0]]).unwrap();
        let op = two.with_reference_zero_set(&v(&[5.0]), 200).unwrap();
        let p = op.project_zero_set(&v(&[1.0])).unwrap();
        assert!(!p.exact);
        assert!(p.point[0].abs() < 1e-11);
    }

    #[test]
    fn metadata_preconditions() {
        let bx = Operator::make_separable_subdifferential(vec![ConvexPiece::Interval { lo: 0.0, hi: 1.0 }]).unwrap();
        assert!(matches!(
            bx.clone().with_inverse_lipschitz(1.0, 1.0),
            Err(Error::ZeroSetNotSingleton)
        ));
        assert!(matches!(
            bx.with_subregularity(1.0, 1.0, v(&[3.0])),
            Err(Error::NotAZero { .. })
        ));
    }
}
