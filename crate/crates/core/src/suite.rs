//! Batch verification of the library's identities, inequalities, resolvent axioms,
//! tight rates, recursion bounds, regularity estimates and convergence behavior.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics;
use crate::engines::{run_gppa, ErrorPolicy, Formula, Schedule, Sequence};
use crate::error::{Error, Result};
use crate::operators::{zoo, Operator, OperatorKind, ZeroSet};
use crate::rates::{self, Metric};
use crate::subregularity::{self, unit_ball_point};
use crate::vector::Vector;

/// A group of related checks, reported as one line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Algebraic identity for the sharp rate and its two corollary inequalities.
    Identities,
    /// Firm nonexpansiveness, distance to zeros, graph monotonicity, fixed points.
    ResolventAxioms,
    /// Averaged-combination bound, rate comparison, Fejer descent along runs.
    Inequalities,
    /// Exact reproduction of closed-form rates on the rotation operator.
    TightRates,
    /// Streaming distance recursion and squared-distance certificates.
    RecursionBounds,
    /// Sampled subregularity and Lipschitz-inverse constants.
    Subregularity,
    /// Global convergence of inexact relaxed runs.
    Convergence,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Identities,
        Family::ResolventAxioms,
        Family::Inequalities,
        Family::TightRates,
        Family::RecursionBounds,
        Family::Subregularity,
        Family::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Identities => "identities",
            Family::ResolventAxioms => "resolvent-axioms",
            Family::Inequalities => "inequalities",
            Family::TightRates => "tight-rates",
            Family::RecursionBounds => "recursion-bounds",
            Family::Subregularity => "subregularity",
            Family::Convergence => "convergence",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown family `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Run only this family.
    pub only: Option<Family>,
    /// Operator ids replacing the default zoo lists.
    pub operators: Option<Vec<String>>,
    /// Samples per randomized scalar family.
    pub samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            only: None,
            operators: None,
            samples: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyOutcome {
    pub family: Family,
    pub pass: bool,
    pub checked: usize,
    pub failures: usize,
    /// First failure, if any.
    pub detail: Option<String>,
}

impl fmt::Display for FamilyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pass {
            write!(f, "PASS {:<17} {} checks", self.family.name(), self.checked)
        } else {
            write!(
                f,
                "FAIL {:<17} {}/{} failed; first: {}",
                self.family.name(),
                self.failures,
                self.checked,
                self.detail.as_deref().unwrap_or("-")
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub outcomes: Vec<FamilyOutcome>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }

    pub fn first_failure(&self) -> Option<&FamilyOutcome> {
        self.outcomes.iter().find(|o| !o.pass)
    }
}

#[derive(Default)]
struct Tally {
    checked: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn fail(&mut self, what: String) {
        self.check(false, || what);
    }

    /// Records an error raised while preparing a check.
    fn guard<T>(&mut self, label: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(format!("{label}: {e}"));
                None
            }
        }
    }
}

/// Runs the selected families and collects one outcome per family.
pub fn verify_suite(opts: &SuiteOptions) -> SuiteReport {
    let outcomes = Family::ALL
        .into_iter()
        .filter(|f| opts.only.is_none_or(|o| o == *f))
        .enumerate()
        .map(|(i, family)| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64 + 1);
            let mut t = Tally::default();
            match family {
                Family::Identities => identities(&mut t, &mut rng, opts),
                Family::ResolventAxioms => resolvent_axioms(&mut t, &mut rng, opts),
                Family::Inequalities => inequalities(&mut t, &mut rng, opts),
                Family::TightRates => tight_rates(&mut t, &mut rng, opts),
                Family::RecursionBounds => recursion_bounds(&mut t, &mut rng, opts),
                Family::Subregularity => subregularity_family(&mut t, opts),
                Family::Convergence => convergence(&mut t, &mut rng, opts),
            }
            FamilyOutcome {
                family,
                pass: t.failures == 0 && t.checked > 0,
                checked: t.checked,
                failures: t.failures,
                detail: t
                    .first
                    .or_else(|| (t.checked == 0).then(|| "no checks ran".to_string())),
            }
        })
        .collect();
    SuiteReport { outcomes }
}

fn operators(t: &mut Tally, opts: &SuiteOptions, default: &[&str]) -> Vec<(String, Operator)> {
    let ids: Vec<String> = match &opts.operators {
        Some(ids) => ids.clone(),
        None => default.iter().map(|s| s.to_string()).collect(),
    };
    ids.into_iter()
        .filter_map(|id| t.guard(&id, zoo::lookup(&id)).map(|op| (id, op)))
        .collect()
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vector {
    unit_ball_point(rng, dim).scale(radius)
}

fn identities(t: &mut Tally, rng: &mut ChaCha8Rng, opts: &SuiteOptions) {
    let n = opts.samples;
    for _ in 0..n {
        let tt: f64 = rng.random_range(-5.0..=5.0);
        let lambda: f64 = rng.random_range(-2.0..=3.0);
        if tt == -1.0 {
            continue;
        }
        match rates::identity_gap(tt, lambda) {
            Ok(g) => t.check(g.gap.abs() <= 1e-12 * (1.0 + g.lhs.abs()), || {
                format!("identity gap {:e} at t = {tt}, lambda = {lambda}", g.gap)
            }),
            Err(e) => t.fail(format!("identity at t = {tt}: {e}")),
        }
    }
    for _ in 0..n {
        let tt: f64 = rng.random_range(0.0..=10.0);
        let lhs = (1.0 - 1.0 / (tt + 1.0)).powi(2);
        let rhs = 1.0 - 1.0 / (1.0 + tt * tt);
        t.check(lhs <= rhs + 1e-12, || format!("corollary fails at t = {tt}"));
    }
    for _ in 0..n {
        let tt: f64 = rng.random_range(0.0..1.0);
        let lambda = rng.random_range(0.0..=1.0 - tt * tt);
        let lhs = (1.0 - lambda / (tt + 1.0)).powi(2);
        let rhs = 1.0 - lambda / (1.0 + tt * tt);
        t.check(lhs <= rhs + 1e-12, || {
            format!("rate comparison fails at t = {tt}, lambda = {lambda}")
        });
    }
}

/// `M + M^T = 0` and `M^T M = I`: then `||J_{gamma M} x|| = ||x|| / sqrt(1 + gamma^2)`.
fn is_unit_skew(op: &Operator) -> bool {
    match op.kind() {
        OperatorKind::Linear(m) => {
            let n = m.nrows();
            (m + m.transpose()).amax() < 1e-15 && (m.transpose() * m - nalgebra::DMatrix::identity(n, n)).amax() < 1e-15
        }
        OperatorKind::SkewRotation { theta, .. } => (theta.abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-15,
        _ => false,
    }
}

fn resolvent_axioms(t: &mut Tally, rng: &mut ChaCha8Rng, opts: &SuiteOptions) {
    let per_op = (opts.samples / 20).max(50);
    for (id, op) in operators(t, opts, zoo::BUILTIN) {
        let dim = op.dim();
        let zeros_known = !matches!(op.zero_set(), ZeroSet::Unknown);
        let unit_skew = is_unit_skew(&op);
        for _ in 0..per_op {
            let gamma = 10f64.powf(rng.random_range(-2.0..=2.0));
            let x = random_point(rng, dim, 5.0);
            let y = random_point(rng, dim, 5.0);
            let Some(res) = t.guard(&id, op.resolvent(gamma)) else {
                break;
            };
            let (Some(jx), Some(jy)) = (t.guard(&id, res.apply(&x)), t.guard(&id, res.apply(&y))) else {
                continue;
            };
            let dxy = x.distance(&y).powi(2);
            let lhs = jx.distance(&jy).powi(2) + x.sub(&jx).distance(&y.sub(&jy)).powi(2);
            t.check(lhs <= dxy + 1e-10 * (1.0 + dxy), || {
                format!("{id}: firm nonexpansiveness fails at gamma = {gamma:e} ({lhs:e} > {dxy:e})")
            });
            let (u, w) = (x.sub(&jx).scale(1.0 / gamma), y.sub(&jy).scale(1.0 / gamma));
            let dp = jx.sub(&jy);
            let dv = u.sub(&w);
            let inner = dp.dot(&dv);
            t.check(inner >= -1e-10 * (1.0 + dp.norm_sq() + dv.norm_sq()), || {
                format!("{id}: graph monotonicity fails at gamma = {gamma:e} (<p1-p2, v1-v2> = {inner:e})")
            });
            if unit_skew {
                let want = x.norm() / (1.0 + gamma * gamma).sqrt();
                t.check((jx.norm() - want).abs() <= 1e-12 * want.max(1e-300), || {
                    format!("{id}: skew resolvent norm {} != {want}", jx.norm())
                });
            }
            if zeros_known {
                let Some(p) = t.guard(&id, op.project_zero_set(&y)) else {
                    continue;
                };
                if !p.exact {
                    continue;
                }
                let z = p.point;
                let dxz = x.distance(&z).powi(2);
                let lhs = jx.distance(&z).powi(2) + x.distance(&jx).powi(2);
                t.check(lhs <= dxz + 1e-10 * (1.0 + dxz), || {
                    format!("{id}: distance-to-zero inequality fails ({lhs:e} > {dxz:e})")
                });
                if let Some(jz) = t.guard(&id, res.apply(&z)) {
                    t.check(jz.distance(&z) <= 1e-10 * (1.0 + z.norm()), || {
                        format!("{id}: zero {z:?} is not fixed by the resolvent")
                    });
                }
                if let Some(pp) = t.guard(&id, op.project_zero_set(&z)) {
                    t.check(
                        pp.point.distance(&z) <= 1e-12 * (1.0 + z.norm()) && pp.dist <= 1e-12,
                        || format!("{id}: projection is not idempotent at {z:?}"),
                    );
                }
            }
        }
    }
}

fn inequalities(t: &mut Tally, rng: &mut ChaCha8Rng, opts: &SuiteOptions) {
    let n = opts.samples;
    let mut drawn = 0;
    while drawn < n {
        let u = Vector::new((0..3).map(|_| rng.random_range(-1.0..=1.0)).collect()).expect("finite");
        let v = Vector::new((0..3).map(|_| rng.random_range(-1.0..=1.0)).collect()).expect("finite");
        let duv = u.distance(&v);
        let ratio = v.norm() / duv;
        if duv < 1e-3 || !(ratio <= 50.0) || ratio == 0.0 {
            continue;
        }
        drawn += 1;
        let lambda: f64 = rng.random_range(0.0..=1.0);
        let tt = ratio * (1.0 + rng.random_range(0.0..=2.0));
        if let Some((lhs, rhs)) = t.guard(
            "combination bound",
            rates::averaged_combination_bound(&u, &v, tt, lambda),
        ) {
            t.check(lhs <= rhs + 1e-9, || {
                format!("combination bound {lhs:e} > {rhs:e} at t = {tt}")
            });
        }
        if drawn % 10 == 0 {
            if let Some((lhs, rhs)) = t.guard(
                "combination equality",
                rates::averaged_combination_bound(&u, &v, ratio, lambda),
            ) {
                t.check((lhs - rhs).abs() <= 1e-9, || {
                    format!("combination equality gap {:e} at t = {ratio}", lhs - rhs)
                });
            }
        }
    }
    for _ in 0..n {
        let lambda: f64 = rng.random_range(1e-6..2.0 - 1e-6);
        let kappa = 10f64.powf(rng.random_range(-1.0..=1.0));
        let gamma = 10f64.powf(rng.random_range(-1.0..=1.0));
        let (Some(sharp), Some(upper)) = (
            t.guard("sharp rate", rates::rho_optimal_sq(lambda, kappa / gamma)),
            t.guard("subreg rate", rates::rho_subreg_upper(lambda, kappa, gamma)),
        ) else {
            continue;
        };
        t.check(sharp < upper * upper, || {
            format!("sharp rate {sharp} not below {} at lambda = {lambda}", upper * upper)
        });
    }
    let runs = (opts.samples / 1000).max(3);
    for (id, op) in operators(t, opts, zoo::CERTIFIED) {
        if matches!(op.zero_set(), ZeroSet::Unknown) {
            continue;
        }
        for r in 0..runs {
            let x0 = random_point(rng, op.dim(), 4.0);
            let lambda: Vec<f64> = (0..8).map(|_| rng.random_range(0.05..1.95)).collect();
            let c: Vec<f64> = (0..8).map(|_| 10f64.powf(rng.random_range(-1.0..=1.0))).collect();
            let inexact = r % 2 == 1;
            let schedule = Schedule {
                lambda: Sequence::List(lambda),
                c: Sequence::List(c),
                eta: Sequence::Const(if inexact { 1.0 } else { 0.0 }),
                error: if inexact {
                    ErrorPolicy::Summable(Sequence::Formula(Formula::GeometricHalf))
                } else {
                    ErrorPolicy::None
                },
                seed: rng.random(),
            };
            let Some(trace) = t.guard(&id, run_gppa(&op, &schedule, &x0, 30)) else {
                continue;
            };
            let Some(p) = t.guard(&id, op.project_zero_set(&x0)) else {
                continue;
            };
            if !p.exact {
                continue;
            }
            let xbar = p.point;
            for w in trace.rows.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                let y = a.y.as_ref().expect("non-terminal rows carry y");
                let dx = a.x.distance(&xbar).powi(2);
                let descent = a.lambda * (2.0 - a.lambda) * a.residual * a.residual;
                let scale = 1.0 + dx;
                t.check(y.distance(&xbar).powi(2) <= dx - descent + 1e-10 * scale, || {
                    format!("{id}: exact Fejer inequality fails at k = {}", a.k)
                });
                let en = a.err_norm.unwrap_or(0.0);
                let slack = en * (2.0 * y.distance(&xbar) + en);
                t.check(
                    b.x.distance(&xbar).powi(2) <= dx - descent + slack + 1e-10 * scale,
                    || format!("{id}: inexact Fejer inequality fails at k = {}", a.k),
                );
            }
        }
    }
}

fn rotation_run(c: f64, lambda: f64, k: usize) -> Result<crate::engines::IterationTrace> {
    let rot = zoo::lookup("rotation2")?;
    run_gppa(&rot, &Schedule::constant(lambda, c), &Vector::new(vec![1.0, 0.0])?, k)
}

fn tight_rates(t: &mut Tally, rng: &mut ChaCha8Rng, opts: &SuiteOptions) {
    for (c, want) in [(1.0, 0.5f64.sqrt()), (2.0, 1.0 / 5f64.sqrt())] {
        let Some(trace) = t.guard("rotation2", rotation_run(c, 1.0, 30)) else {
            continue;
        };
        let Some(cert) = t.guard("certificate", rates::exact_prox_certificate(1.0, &[c; 30])) else {
            continue;
        };
        if let Some(ratios) = t.guard("ratios", diagnostics::q_ratios(&trace, Metric::DistToSet)) {
            for (k, r) in ratios.iter().enumerate() {
                let r = r.unwrap_or(f64::NAN);
                t.check((r - want).abs() <= 1e-10 && r <= cert.rho[k] + 1e-10, || {
                    format!("rotation2 c = {c}: ratio {r} at k = {k}, expected {want}")
                });
            }
        }
        if let Some(rep) = t.guard("check", diagnostics::check_certificate(&trace, &cert, 1e-10)) {
            t.check(rep.overall, || format!("exact certificate fails at c = {c}"));
        }
    }
    for _ in 0..opts.samples {
        let lambda: f64 = rng.random_range(1e-9..2.0 - 1e-9);
        let tt: f64 = rng.random_range(1e-9..=5.0);
        if let Some(max_form) = t.guard("sharp rate", rates::rho_optimal_sq(lambda, tt)) {
            let piecewise = rates::rho_optimal_sq_piecewise(lambda, tt);
            t.check((max_form - piecewise).abs() <= rates::FORM_AGREEMENT_TOL, || {
                format!("max and piecewise forms differ at lambda = {lambda}, t = {tt}")
            });
        }
    }
    for _ in 0..20 {
        let lambda: f64 = rng.random_range(0.05..1.95);
        let c = 10f64.powf(rng.random_range(-1.0..=1.0));
        let Some(trace) = t.guard("rotation2", rotation_run(c, lambda, 5)) else {
            continue;
        };
        let Some(sq) = t.guard("sharp rate", rates::rho_optimal_sq(lambda, 1.0 / c)) else {
            continue;
        };
        let observed = trace.rows[1].x.norm() / trace.rows[0].x.norm();
        let reflection_branch = 1.0 - lambda * (2.0 - lambda) / (1.0 + 1.0 / (c * c));
        t.check(
            observed <= sq.sqrt() + 1e-12 && (observed - reflection_branch.sqrt()).abs() <= 1e-12,
            || format!("rotation2 sharp bound fails at lambda = {lambda}, c = {c}"),
        );
    }
}

fn brute_recursion(rho: &[f64], slack: &[f64], d0_sq: f64, k: usize) -> f64 {
    let mut total = d0_sq * rho[..=k].iter().product::<f64>();
    for i in 0..=k {
        let mut prod = 1.0;
        for r in &rho[i + 1..=k] {
            prod *= r;
        }
        total += prod * slack[i];
    }
    total
}

fn recursion_bounds(t: &mut Tally, rng: &mut ChaCha8Rng, opts: &SuiteOptions) {
    let rho = vec![0.5; 61];
    let slack: Vec<f64> = (0..61).map(|i| 0.5f64.powi(i)).collect();
    for k in 0..=60 {
        if let Some(s) = t.guard("recursion", rates::dist_recursion_bound(&rho, &slack, 1.0, k)) {
            let b = brute_recursion(&rho, &slack, 1.0, k);
            t.check((s - b).abs() <= 1e-12, || {
                format!("streaming {s} != brute force {b} at k = {k}")
            });
        }
        if let Some(xi) = t.guard("recursion", rates::dist_recursion_bound(&rho, &slack, 0.0, k)) {
            let closed = (k as f64 + 1.0) * 0.5f64.powi(k as i32);
            t.check((xi - closed).abs() <= 1e-12, || {
                format!("series {xi} != closed form {closed} at k = {k}")
            });
        }
    }
    for _ in 0..(opts.samples / 100).max(10) {
        let n = rng.random_range(1..40usize);
        let rho: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let slack: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let d0: f64 = rng.random_range(0.0..=10.0);
        let k = n - 1;
        if let Some(s) = t.guard("recursion", rates::dist_recursion_bound(&rho, &slack, d0, k)) {
            let b = brute_recursion(&rho, &slack, d0, k);
            t.check((s - b).abs() <= 1e-12 * (1.0 + b), || {
                format!("streaming {s} != brute force {b}")
            });
        }
    }
    let Some(bx) = t.guard("box", zoo::lookup("box:[0,1]x[0,1]")) else {
        return;
    };
    for run in 0..4 {
        let x0 = random_point(rng, 2, 6.0);
        let exact = run % 2 == 0;
        let schedule = if exact {
            Schedule::constant(1.0, 1.0)
        } else {
            Schedule::constant(1.0, 1.0).with_error(
                Sequence::Const(1.0),
                ErrorPolicy::Summable(Sequence::Formula(Formula::GeometricHalf)),
            )
        };
        let Some(trace) = t.guard("box run", run_gppa(&bx, &schedule.with_seed(run), &x0, 50)) else {
            continue;
        };
        let certs = [
            rates::gppa_dist_certificate(1.0, &[1.0; 50], &[1.0; 50], 50).map(|c| (c, 1e-12)),
            rates::km_certificate(&[1.0; 50], &[0.5; 50], &[2.0; 50], exact)
                .map(|c| (c, if exact { 1e-9 } else { 1e-12 })),
        ];
        for cert in certs {
            let Some((cert, tol)) = t.guard("box certificate", cert) else {
                continue;
            };
            if let Some(rep) = t.guard("box check", diagnostics::check_certificate(&trace, &cert, tol)) {
                t.check(rep.overall, || {
                    format!("box {} fails at k = {:?}", cert.theorem_id, rep.first_violation)
                });
            }
        }
    }
}

fn subregularity_family(t: &mut Tally, opts: &SuiteOptions) {
    let n = opts.samples.max(1);
    let seed = opts.seed;
    let cases = [("identity", 1.0, 1e-12), ("scalar:2", 0.5, 1e-9)];
    for (id, want, tol) in cases {
        let Some(op) = t.guard(id, zoo::lookup(id)) else {
            continue;
        };
        if let Some(est) = t.guard(
            id,
            subregularity::estimate_kappa(&op, &Vector::zeros(op.dim()), 1.0, n, seed),
        ) {
            let k = est.kappa_hat.unwrap_or(f64::NAN);
            t.check((k - want).abs() <= tol, || {
                format!("{id}: kappa_hat = {k}, expected {want}")
            });
        }
    }
    if let Some(cubic) = t.guard("cubic", zoo::lookup("cubic")) {
        if let Some(est) = t.guard(
            "cubic",
            subregularity::estimate_kappa(&cubic, &Vector::zeros(1), 1.0, n.min(1000), seed),
        ) {
            t.check(est.divergent, || "cubic: estimate not flagged divergent".into());
        }
    }
    let per_op = (n / 10).max(100);
    for (id, op) in operators(t, opts, zoo::CERTIFIED) {
        if let Some(meta) = op.inverse_lipschitz().copied() {
            let Some((_, delta)) = t.guard(&id, subregularity::lipschitz_to_subreg(meta.alpha, meta.tau)) else {
                continue;
            };
            let xbar = op
                .zero_set()
                .singleton()
                .cloned()
                .unwrap_or_else(|| Vector::zeros(op.dim()));
            if let Some(est) = t.guard(&id, subregularity::estimate_kappa(&op, &xbar, delta, per_op, seed)) {
                let k = est.kappa_hat.unwrap_or(f64::INFINITY);
                t.check(k <= meta.alpha + 1e-9, || {
                    format!("{id}: kappa_hat = {k} exceeds alpha = {}", meta.alpha)
                });
            }
            if let Some(chk) = t.guard(
                &id,
                subregularity::verify_inverse_lipschitz(&op, meta.alpha, meta.tau, per_op, seed),
            ) {
                t.check(chk.pass, || format!("{id}: inverse Lipschitz check fails"));
            }
        }
        if let Some(meta) = op.subregularity().cloned() {
            for gamma in [0.1, 1.0, 10.0] {
                let chk =
                    subregularity::residual_ratio_check(&op, meta.kappa, meta.delta, gamma, &meta.center, per_op, seed);
                if let Some(chk) = t.guard(&id, chk) {
                    t.check(chk.pass, || {
                        format!("{id}: residual ratio exceeds 1 + kappa/gamma at gamma = {gamma}")
                    });
                }
            }
        }
    }
}

fn convergence(t: &mut Tally, rng: &mut ChaCha8Rng, opts: &SuiteOptions) {
    let schedule = Schedule {
        lambda: Sequence::List(vec![0.5, 1.5]),
        c: Sequence::Formula(Formula::HarmonicPlusOne),
        eta: Sequence::Const(1.0),
        error: ErrorPolicy::Summable(Sequence::Formula(Formula::GeometricHalf)),
        seed: opts.seed,
    };
    for (id, op) in operators(t, opts, zoo::CERTIFIED) {
        let x0 = random_point(rng, op.dim(), 3.0);
        let Some(trace) = t.guard(&id, run_gppa(&op, &schedule, &x0, 500)) else {
            continue;
        };
        let r = trace.terminal_residual();
        let s = trace.rows[trace.len() - 2].step.unwrap_or(f64::NAN);
        t.check(r <= 1e-8 && s <= 1e-8, || {
            format!("{id}: terminal residual {r:e}, last step {s:e}")
        });
    }
}
