//! Generalized proximal point and inexact Krasnosel'skii-Mann iterations.
//!
//! Both engines follow `x_{k+1} = (1 - lambda_k) x_k + lambda_k T_k x_k + eta_k e_k`;
//! the proximal point engine is the special case `T_k = J_{c_k A}` with `alpha_k = 1/2`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{Operator, Projection, Resolvent};
use crate::vector::Vector;

/// Iterates whose norm exceeds this abort the run.
pub const DIVERGENCE_NORM: f64 = 1e12;

/// Whitelisted closed-form sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    /// `1 + 1/(k+1)`.
    HarmonicPlusOne,
    /// `0.5^k`.
    GeometricHalf,
    /// `1/(k+1)^2`.
    InverseSquare,
}

impl Formula {
    pub fn at(self, k: usize) -> f64 {
        let kf = k as f64;
        match self {
            Formula::HarmonicPlusOne => 1.0 + 1.0 / (kf + 1.0),
            Formula::GeometricHalf => 0.5f64.powi(k.min(i32::MAX as usize) as i32),
            Formula::InverseSquare => 1.0 / ((kf + 1.0) * (kf + 1.0)),
        }
    }
}

/// A real sequence `k -> s_k`: a constant, an explicit list (cycled), or a formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sequence {
    Const(f64),
    List(Vec<f64>),
    Formula(Formula),
}

impl Sequence {
    pub fn at(&self, k: usize) -> f64 {
        match self {
            Sequence::Const(v) => *v,
            Sequence::List(vs) => vs[k % vs.len()],
            Sequence::Formula(f) => f.at(k),
        }
    }

    pub fn take(&self, n: usize) -> Vec<f64> {
        (0..n).map(|k| self.at(k)).collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        match self {
            Sequence::List(vs) if vs.is_empty() => Err(Error::RangeViolation(format!("{name}: list must be nonempty"))),
            Sequence::List(vs) if vs.iter().any(|v| !v.is_finite()) => Err(Error::NonFinite("sequence list")),
            Sequence::Const(v) if !v.is_finite() => Err(Error::NonFinite("sequence constant")),
            _ => Ok(()),
        }
    }
}

impl From<f64> for Sequence {
    fn from(v: f64) -> Self {
        Sequence::Const(v)
    }
}

impl From<Vec<f64>> for Sequence {
    fn from(v: Vec<f64>) -> Self {
        Sequence::List(v)
    }
}

/// How the error term `e_k` is generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ErrorPolicy {
    #[default]
    None,
    /// `eta_k ||e_k||` equals the given bound.
    Summable(Sequence),
    /// `||e_k|| <= eps_k ||x_k - x_{k+1}||` with `eps_k` the given sequence.
    Relative(Sequence),
}

fn default_eta() -> Sequence {
    Sequence::Const(1.0)
}

/// Per-iteration coefficients and the error model of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub lambda: Sequence,
    #[serde(default = "default_c")]
    pub c: Sequence,
    #[serde(default = "default_eta")]
    pub eta: Sequence,
    #[serde(default)]
    pub error: ErrorPolicy,
    #[serde(default)]
    pub seed: u64,
}

fn default_c() -> Sequence {
    Sequence::Const(1.0)
}

impl Schedule {
    /// Exact schedule with constant coefficients.
    pub fn constant(lambda: f64, c: f64) -> Self {
        Schedule {
            lambda: Sequence::Const(lambda),
            c: Sequence::Const(c),
            eta: Sequence::Const(0.0),
            error: ErrorPolicy::None,
            seed: 0,
        }
    }

    pub fn with_error(mut self, eta: Sequence, error: ErrorPolicy) -> Self {
        self.eta = eta;
        self.error = error;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks that the sequences are well formed (values are checked per k during runs).
    pub fn validate(&self) -> Result<()> {
        self.lambda.validate("lambda")?;
        self.c.validate("c")?;
        self.eta.validate("eta")?;
        match &self.error {
            ErrorPolicy::None => Ok(()),
            ErrorPolicy::Summable(s) | ErrorPolicy::Relative(s) => s.validate("error"),
        }
    }

    /// `eps_k` of a relative policy, 0 otherwise.
    pub fn eps_at(&self, k: usize) -> f64 {
        match &self.error {
            ErrorPolicy::Relative(s) => s.at(k),
            _ => 0.0,
        }
    }
}

/// One row of an [`IterationTrace`].
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub x: Vector,
    /// `T_k x_k` (for the proximal point engine, `J_{c_k A} x_k`).
    pub j: Vector,
    pub lambda: f64,
    /// `c_k`, when `T_k` is a resolvent.
    pub c: Option<f64>,
    pub eta: f64,
    pub alpha: f64,
    /// `||x_k - T_k x_k||`.
    pub residual: f64,
    /// `(1 - lambda_k) x_k + lambda_k j_k`; absent on the last row.
    pub y: Option<Vector>,
    pub e: Option<Vector>,
    /// `eta_k ||e_k||`.
    pub err_norm: Option<f64>,
    /// `eps_k` of a relative error policy.
    pub eps: Option<f64>,
    /// `||x_{k+1} - x_k||`.
    pub step: Option<f64>,
    /// `d(x_k, zer A)` and its projection, when the zero set is described.
    pub dist: Option<f64>,
    pub dist_exact: Option<bool>,
    pub proj: Option<Vector>,
    /// `P_{zer A}(j_k)`.
    pub anchor: Option<Vector>,
    /// `eta_k ||e_k|| (2 ||y_k - P x_k|| + eta_k ||e_k||)`.
    pub slack: Option<f64>,
}

/// The full record of a run: `K + 1` rows for iterates `x_0 .. x_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub rows: Vec<IterationRecord>,
    pub seed: u64,
    /// The unique fixed point, when the family has one.
    pub unique_zero: Option<Vector>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> &IterationRecord {
        self.rows.last().expect("traces are nonempty")
    }

    /// Terminal residual `||x_K - T_K x_K||`.
    pub fn terminal_residual(&self) -> f64 {
        self.last().residual
    }

    /// CSV with header `k,lambda,c,eta,err_norm,residual,step,dist,dist_exact`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,lambda,c,eta,err_norm,residual,step,dist,dist_exact\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.k,
                fmt_f64(r.lambda),
                fmt_opt(r.c),
                fmt_f64(r.eta),
                fmt_opt(r.err_norm),
                fmt_f64(r.residual),
                fmt_opt(r.step),
                fmt_opt(r.dist),
                r.dist_exact.map(|b| b.to_string()).unwrap_or_default()
            );
        }
        out
    }
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// One step of the proximal point scheme with a given error vector.
pub fn gppa_step(op: &Operator, x: &Vector, lambda: f64, c: f64, eta: f64, e: &Vector) -> Result<(Vector, Vector)> {
    e.check_dim(op.dim())?;
    let j = op.resolve(c, x)?;
    let y = relax(x, &j, lambda);
    let x_next = y.lin_comb(1.0, e, eta);
    Ok((y, x_next))
}

fn relax(x: &Vector, tx: &Vector, lambda: f64) -> Vector {
    x.lin_comb(1.0 - lambda, tx, lambda)
}

/// Uniformly random unit vector.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-300 && n.is_finite() {
            return Vector::from_raw(v.into_iter().map(|a| a / n).collect());
        }
    }
}

/// Error vector `e = s d` with `s = eps ||x - y|| / (1 + eta eps)` and `d` a random
/// unit direction, so that `||e|| <= eps ||x - (y + eta e)||`.
pub fn inject_relative_error<R: Rng + ?Sized>(
    rng: &mut R,
    y: &Vector,
    x: &Vector,
    eta: f64,
    eps: f64,
) -> Result<Vector> {
    if !(eta >= 0.0 && eps >= 0.0) {
        return Err(Error::RangeViolation(format!(
            "relative error needs eta >= 0 and eps >= 0, got ({eta}, {eps})"
        )));
    }
    if eta * eps >= 1.0 {
        return Err(Error::PolicyViolation { eta, eps });
    }
    y.check_dim(x.dim())?;
    let d = random_unit(rng, x.dim());
    let s = eps * x.distance(y) / (1.0 + eta * eps);
    Ok(d.scale(s))
}

/// A family `k -> T_k` of `alpha_k`-averaged maps.
pub trait AveragedMap {
    fn dim(&self) -> usize;
    fn alpha(&self, k: usize) -> f64;
    fn apply(&mut self, k: usize, x: &Vector) -> Result<Vector>;
    /// `c_k` when `T_k = J_{c_k A}`.
    fn parameter(&self, _k: usize) -> Option<f64> {
        None
    }
    /// Projection onto the common fixed-point set, if known.
    fn project_fixed_set(&self, _x: &Vector) -> Option<Result<Projection>> {
        None
    }
    /// The fixed-point set, when it is a single point.
    fn unique_fixed_point(&self) -> Option<Vector> {
        None
    }
}

/// `T_k = J_{c_k A}`, `alpha_k = 1/2`. Reuses the factorization while `c_k` is unchanged.
pub struct ResolventFamily<'a> {
    op: &'a Operator,
    c: Sequence,
    cached: Option<Resolvent<'a>>,
}

impl<'a> ResolventFamily<'a> {
    pub fn new(op: &'a Operator, c: Sequence) -> Self {
        ResolventFamily { op, c, cached: None }
    }
}

impl AveragedMap for ResolventFamily<'_> {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn alpha(&self, _k: usize) -> f64 {
        0.5
    }

    fn apply(&mut self, k: usize, x: &Vector) -> Result<Vector> {
        let c = self.c.at(k);
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::RangeViolation(format!("c_{k} must be > 0, got {c}")));
        }
        let stale = self.cached.as_ref().is_none_or(|r| r.gamma() != c);
        if stale {
            self.cached = Some(self.op.resolvent(c)?);
        }
        self.cached.as_ref().expect("just set").apply(x)
    }

    fn parameter(&self, k: usize) -> Option<f64> {
        Some(self.c.at(k))
    }

    fn project_fixed_set(&self, x: &Vector) -> Option<Result<Projection>> {
        match self.op.zero_set() {
            crate::operators::ZeroSet::Unknown => None,
            _ => Some(self.op.project_zero_set(x)),
        }
    }

    fn unique_fixed_point(&self) -> Option<Vector> {
        match self.op.zero_set() {
            crate::operators::ZeroSet::Singleton(p) | crate::operators::ZeroSet::Reference(p) => Some(p.clone()),
            _ => None,
        }
    }
}

/// `T x = (1 - alpha) x + alpha (R x + b)` for an orthogonal-or-contractive `R`
/// given as a dense row-major matrix; `alpha`-averaged when `||R|| <= 1`.
pub struct AffineAveraged {
    pub alpha: f64,
    pub r: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl AveragedMap for AffineAveraged {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn alpha(&self, _k: usize) -> f64 {
        self.alpha
    }

    fn apply(&mut self, _k: usize, x: &Vector) -> Result<Vector> {
        x.check_dim(self.b.len())?;
        let out = self
            .r
            .iter()
            .zip(&self.b)
            .zip(x.iter())
            .map(|((row, bi), xi)| {
                let rx: f64 = row.iter().zip(x.iter()).map(|(a, v)| a * v).sum();
                (1.0 - self.alpha) * xi + self.alpha * (rx + bi)
            })
            .collect();
        Ok(Vector::from_raw(out))
    }
}

/// Runs the proximal point scheme for `k_max` steps from `x0`.
pub fn run_gppa(op: &Operator, schedule: &Schedule, x0: &Vector, k_max: usize) -> Result<IterationTrace> {
    let mut family = ResolventFamily::new(op, schedule.c.clone());
    run_km(&mut family, schedule, x0, k_max)
}

/// Runs the relaxed inexact iteration over an averaged family.
/// The `c` sequence of `schedule` is ignored; `T_k` carries its own parameter.
pub fn run_km<M: AveragedMap + ?Sized>(
    family: &mut M,
    schedule: &Schedule,
    x0: &Vector,
    k_max: usize,
) -> Result<IterationTrace> {
    schedule.validate()?;
    if k_max == 0 {
        return Err(Error::RangeViolation("iteration count K must be >= 1".into()));
    }
    x0.check_dim(family.dim())?;
    if !x0.is_finite() {
        return Err(Error::NonFinite("x0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let mut rows = Vec::with_capacity(k_max + 1);
    let mut x = x0.clone();
    for k in 0..=k_max {
        let lambda = schedule.lambda.at(k);
        let eta = schedule.eta.at(k);
        let alpha = family.alpha(k);
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::RangeViolation(format!(
                "alpha_{k} must lie in ]0,1], got {alpha}"
            )));
        }
        if !(0.0..=1.0 / alpha).contains(&lambda) {
            return Err(Error::RangeViolation(format!(
                "lambda_{k} = {lambda} outside [0, {}]",
                1.0 / alpha
            )));
        }
        if !(eta >= 0.0) {
            return Err(Error::RangeViolation(format!("eta_{k} must be >= 0, got {eta}")));
        }
        let j = family.apply(k, &x)?;
        let residual = x.distance(&j);
        let (proj, dist, dist_exact, anchor) = match family.project_fixed_set(&x) {
            Some(p) => {
                let p = p?;
                let a = family.project_fixed_set(&j).expect("same family")?;
                (Some(p.point), Some(p.dist), Some(p.exact), Some(a.point))
            }
            None => (None, None, None, None),
        };
        let mut row = IterationRecord {
            k,
            x: x.clone(),
            j: j.clone(),
            lambda,
            c: family.parameter(k),
            eta,
            alpha,
            residual,
            y: None,
            e: None,
            err_norm: None,
            eps: None,
            step: None,
            dist,
            dist_exact,
            proj,
            anchor,
            slack: None,
        };
        if k == k_max {
            rows.push(row);
            break;
        }
        let y = relax(&x, &j, lambda);
        let (e, eps) = match &schedule.error {
            ErrorPolicy::None => (Vector::zeros(x.dim()), None),
            ErrorPolicy::Summable(bound) => {
                let b = bound.at(k);
                if !(b >= 0.0) {
                    return Err(Error::RangeViolation(format!(
                        "error bound at k = {k} must be >= 0, got {b}"
                    )));
                }
                if b == 0.0 {
                    (Vector::zeros(x.dim()), None)
                } else if eta > 0.0 {
                    (random_unit(&mut rng, x.dim()).scale(b / eta), None)
                } else {
                    return Err(Error::RangeViolation(format!(
                        "summable error bound {b} at k = {k} needs eta_k > 0"
                    )));
                }
            }
            ErrorPolicy::Relative(eps) => {
                let eps = eps.at(k);
                (inject_relative_error(&mut rng, &y, &x, eta, eps)?, Some(eps))
            }
        };
        let x_next = y.lin_comb(1.0, &e, eta);
        let norm = x_next.norm();
        if !(norm <= DIVERGENCE_NORM) {
            return Err(Error::Diverged { k: k + 1, norm });
        }
        let err_norm = eta * e.norm();
        row.slack = row.proj.as_ref().map(|p| err_norm * (2.0 * y.distance(p) + err_norm));
        row.step = Some(x_next.distance(&x));
        row.err_norm = Some(err_norm);
        row.eps = eps;
        row.y = Some(y);
        row.e = Some(e);
        rows.push(row);
        x = x_next;
    }
    Ok(IterationTrace {
        rows,
        seed: schedule.seed,
        unique_zero: family.unique_fixed_point(),
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
    fn gppa_step_examples() {
        let rot = zoo::lookup("rotation2").unwrap();
        let zero = Vector::zeros(2);
        let (_, next) = gppa_step(&rot, &v(&[1.0, 0.0]), 1.0, 1.0, 0.0, &zero).unwrap();
        assert!(next.distance(&v(&[0.5, -0.5])) < 1e-15);
        let x = v(&[0.3, -2.0]);
        let (_, next) = gppa_step(&rot, &x, 0.0, 1.0, 0.0, &zero).unwrap();
        assert_eq!(next, x);
        let one = Operator::make_linear_rows(&[vec![1.0]]).unwrap();
        let (y, next) = gppa_step(&one, &v(&[4.0]), 2.0, 1.0, 0.0, &Vector::zeros(1)).unwrap();
        assert_eq!(y[0], 0.0);
        assert_eq!(next[0], 0.0);
    }

    #[test]
    fn relative_error_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = v(&[1.0, 0.0]);
        let y = v(&[0.0, 0.0]);
        let e = inject_relative_error(&mut rng, &y, &x, 1.0, 0.1).unwrap();
        assert!((e.norm() - 1.0 / 11.0).abs() < 1e-15);
        let x_next = y.lin_comb(1.0, &e, 1.0);
        assert!(e.norm() <= 0.1 * x.distance(&x_next));
        assert_eq!(inject_relative_error(&mut rng, &y, &x, 1.0, 0.0).unwrap().norm(), 0.0);
        assert_eq!(inject_relative_error(&mut rng, &x, &x, 1.0, 0.5).unwrap().norm(), 0.0);
        assert!(matches!(
            inject_relative_error(&mut rng, &y, &x, 2.0, 0.5),
            Err(Error::PolicyViolation { .. })
        ));
    }

    #[test]
    fn rotation_run_contracts_by_sqrt_two() {
        let rot = zoo::lookup("rotation2").unwrap();
        let t = run_gppa(&rot, &Schedule::constant(1.0, 1.0), &v(&[1.0, 0.0]), 20).unwrap();
        assert_eq!(t.len(), 21);
        let ratio = t.rows[20].dist.unwrap() / t.rows[0].dist.unwrap();
        assert!((ratio - 2f64.powi(-10)).abs() < 1e-15);
    }

    #[test]
    fn abs_run_terminates_finitely() {
        let abs = zoo::lookup("abs").unwrap();
        let t = run_gppa(&abs, &Schedule::constant(1.0, 1.0), &v(&[3.0]), 6).unwrap();
        for (k, r) in t.rows.iter().enumerate() {
            assert_eq!(r.x[0], (3.0 - k as f64).max(0.0));
        }
    }

    #[test]
    fn zero_start_gives_constant_trace() {
        let rot = zoo::lookup("rotation2").unwrap();
        let t = run_gppa(&rot, &Schedule::constant(1.5, 2.0), &Vector::zeros(2), 5).unwrap();
        assert!(t.rows.iter().all(|r| r.residual == 0.0 && r.x == Vector::zeros(2)));
    }

    #[test]
    fn halving_map_km_run() {
        let mut t = AffineAveraged {
            alpha: 0.5,
            r: vec![vec![0.0]],
            b: vec![0.0],
        };
        let tr = run_km(&mut t, &Schedule::constant(1.0, 1.0), &v(&[8.0]), 3).unwrap();
        assert_eq!(tr.rows[3].x[0], 1.0);
        let tr = run_km(&mut t, &Schedule::constant(0.0, 1.0), &v(&[8.0]), 3).unwrap();
        assert!(tr.rows.iter().all(|r| r.x[0] == 8.0));
        assert!(matches!(
            run_km(&mut t, &Schedule::constant(2.5, 1.0), &v(&[8.0]), 3),
            Err(Error::RangeViolation(_))
        ));
    }

    #[test]
    fn km_over_resolvents_matches_gppa_bitwise() {
        let rot = zoo::lookup("rotation2").unwrap();
        let sched = Schedule::constant(1.0, 1.0)
            .with_error(Sequence::Const(1.0), ErrorPolicy::Relative(Sequence::Const(0.1)))
            .with_seed(42);
        let a = run_gppa(&rot, &sched, &v(&[1.0, 2.0]), 15).unwrap();
        let mut fam = ResolventFamily::new(&rot, sched.c.clone());
        let b = run_km(&mut fam, &sched, &v(&[1.0, 2.0]), 15).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reconstruction_and_relative_constraint_hold() {
        let rot = zoo::lookup("rotation2").unwrap();
        let sched = Schedule::constant(1.3, 0.7)
            .with_error(Sequence::Const(1.0), ErrorPolicy::Relative(Sequence::Const(0.3)))
            .with_seed(7);
        let t = run_gppa(&rot, &sched, &v(&[2.0, -1.0]), 30).unwrap();
        for w in t.rows.windows(2) {
            let (r, next) = (&w[0], &w[1]);
            let e = r.e.as_ref().unwrap();
            let rebuilt = r.x.lin_comb(1.0 - r.lambda, &r.j, r.lambda).lin_comb(1.0, e, r.eta);
            assert_eq!(rebuilt, next.x);
            assert!(e.norm() <= 0.3 * r.x.distance(&next.x) * (1.0 + 1e-14));
        }
    }

    #[test]
    fn divergence_guard_trips() {
        // I + M = 0.5 I with M = -0.5 I: J doubles every step
        let m = nalgebra::DMatrix::from_element(1, 1, -0.5);
        let op = Operator::linear_unchecked(m).unwrap();
        let err = run_gppa(&op, &Schedule::constant(1.0, 1.0), &v(&[1.0]), 100).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let abs = zoo::lookup("abs").unwrap();
        let t = run_gppa(&abs, &Schedule::constant(1.0, 1.0), &v(&[3.0]), 4).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,lambda,c,eta,err_norm,residual,step,dist,dist_exact");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0,1.0000000000000000e0,"));
        assert!(lines[5].ends_with(",,0.0000000000000000e0,true"));
    }

    #[test]
    fn sequences_and_serde() {
        let s: Sequence = serde_json::from_str("[0.5, 1.5]").unwrap();
        assert_eq!(s.take(3), vec![0.5, 1.5, 0.5]);
        let f: Sequence = serde_json::from_str("\"harmonic-plus-one\"").unwrap();
        assert_eq!(f.at(0), 2.0);
        let p: ErrorPolicy = serde_json::from_str("{\"relative\": 0.05}").unwrap();
        assert_eq!(p, ErrorPolicy::Relative(Sequence::Const(0.05)));
        let n: ErrorPolicy = serde_json::from_str("\"none\"").unwrap();
        assert_eq!(n, ErrorPolicy::None);
    }
}
