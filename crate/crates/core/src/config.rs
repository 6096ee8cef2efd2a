//! Declarative experiments: JSON configs, pre-run hypothesis checks, and the
//! orchestrated run that writes trace, certificate and verification files.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, SummabilityReport, VerificationReport};
use crate::engines::{run_gppa, ErrorPolicy, IterationTrace, Schedule};
use crate::error::{Error, Result};
use crate::operators::{zoo, Operator};
use crate::rates::{self, QMode, RateCertificate, TheoremId};
use crate::subregularity::{self, SubregEstimate};
use crate::vector::Vector;

/// Default relative/absolute tolerance of certificate checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Starting point: explicit, or uniform in a ball drawn from the config seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartPoint {
    Explicit(Vector),
    RandomInBall { center: Vector, radius: f64 },
}

/// A certificate request: the result to instantiate plus its hypothesis constants.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSpec {
    pub theorem_id: Option<TheoremId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

/// Optional local subregularity estimate around `center` (default: the operator's
/// certified center or unique zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vector>,
    pub delta: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Zoo identifier, e.g. `rotation2`, `abs`, `box:[0,1]x[0,1]`, `linear:<file>`.
    pub operator: String,
    pub x0: StartPoint,
    pub schedule: Schedule,
    /// Number of steps `K`; the trace has `K + 1` rows.
    pub iterations: usize,
    /// Drives the start point and the error directions (overrides `schedule.seed`).
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub certificates: Vec<CertificateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subregularity: Option<EstimateSpec>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Directory receiving the output files; nothing is written when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Directory that relative paths (matrix files, `output_dir`) resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl ExperimentConfig {
    /// Parses JSON text; errors carry the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })
    }

    /// Reads a config file; relative paths inside resolve against its directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::config(".", format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Builds the operator named by `operator`.
    pub fn operator(&self) -> Result<Operator> {
        let id = match self.operator.strip_prefix("linear:") {
            Some(file) => format!("linear:{}", self.resolve(Path::new(file)).display()),
            None => self.operator.clone(),
        };
        zoo::lookup(&id).map_err(|e| Error::config("operator", e.to_string()))
    }

    pub fn output_path(&self) -> Option<PathBuf> {
        self.output_dir.as_deref().map(|p| self.resolve(p))
    }

    /// The schedule actually run: the config's with the config seed.
    pub fn effective_schedule(&self) -> Schedule {
        self.schedule.clone().with_seed(self.seed)
    }

    /// Draws or returns `x0`.
    pub fn start_point(&self) -> Result<Vector> {
        match &self.x0 {
            StartPoint::Explicit(v) => Ok(v.clone()),
            StartPoint::RandomInBall { center, radius } => {
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::config("x0.radius", "radius must be finite and >= 0"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(1);
                let u = subregularity::unit_ball_point(&mut rng, center.dim());
                Ok(center.lin_comb(1.0, &u, *radius))
            }
        }
    }

    /// Checks the config against the operator and every requested certificate's
    /// hypotheses, without running anything.
    pub fn validate(&self) -> Result<Operator> {
        if self.iterations == 0 {
            return Err(Error::config("iterations", "must be >= 1"));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::config("tolerance", "must be finite and >= 0"));
        }
        let op = self.operator()?;
        let x0 = self.start_point()?;
        if x0.dim() != op.dim() {
            return Err(Error::config(
                "x0",
                format!("dimension {} does not match operator dimension {}", x0.dim(), op.dim()),
            ));
        }
        let s = &self.schedule;
        s.validate().map_err(|e| Error::config("schedule", e.to_string()))?;
        let k = self.iterations;
        let (lambda, c, eta) = (s.lambda.take(k), s.c.take(k), s.eta.take(k));
        if let Some(i) = lambda.iter().position(|l| !(0.0..=2.0).contains(l)) {
            return Err(Error::config(
                "schedule.lambda",
                format!("lambda_{i} = {} outside [0,2]", lambda[i]),
            ));
        }
        if let Some(i) = c.iter().position(|v| !(*v > 0.0)) {
            return Err(Error::config("schedule.c", format!("c_{i} = {} must be > 0", c[i])));
        }
        if let Some(i) = eta.iter().position(|v| !(*v >= 0.0)) {
            return Err(Error::config(
                "schedule.eta",
                format!("eta_{i} = {} must be >= 0", eta[i]),
            ));
        }
        match &s.error {
            ErrorPolicy::None => {}
            ErrorPolicy::Summable(b) => {
                let b = b.take(k);
                if let Some(i) = b.iter().position(|v| !(*v >= 0.0)) {
                    return Err(Error::config(
                        "schedule.error.summable",
                        format!("bound_{i} = {} must be >= 0", b[i]),
                    ));
                }
                if let Some(i) = (0..k).find(|&i| b[i] > 0.0 && eta[i] == 0.0) {
                    return Err(Error::config(
                        "schedule.error.summable",
                        format!("bound_{i} > 0 needs eta_{i} > 0"),
                    ));
                }
            }
            ErrorPolicy::Relative(e) => {
                let e = e.take(k);
                if let Some(i) = (0..k).find(|&i| !(e[i] >= 0.0) || eta[i] * e[i] >= 1.0) {
                    return Err(Error::config(
                        "schedule.error.relative",
                        format!(
                            "need eps_{i} >= 0 and eta_{i} eps_{i} < 1 (eps = {}, eta = {})",
                            e[i], eta[i]
                        ),
                    ));
                }
            }
        }
        for (i, spec) in self.certificates.iter().enumerate() {
            self.check_certificate_spec(i, spec, &op, &lambda, &c, &eta)?;
        }
        if let Some(est) = &self.subregularity {
            if !(est.delta > 0.0 && est.delta.is_finite()) {
                return Err(Error::config("subregularity.delta", "must be finite and > 0"));
            }
            if est.samples == 0 {
                return Err(Error::config("subregularity.samples", "must be >= 1"));
            }
            let center = self.estimate_center(est, &op)?;
            if center.dim() != op.dim() {
                return Err(Error::config("subregularity.center", "dimension mismatch"));
            }
        }
        Ok(op)
    }

    fn estimate_center(&self, est: &EstimateSpec, op: &Operator) -> Result<Vector> {
        if let Some(c) = &est.center {
            return Ok(c.clone());
        }
        op.subregularity()
            .map(|m| m.center.clone())
            .or_else(|| op.zero_set().singleton().cloned())
            .ok_or_else(|| Error::config("subregularity.center", "required: operator has no certified center"))
    }

    fn check_certificate_spec(
        &self,
        i: usize,
        spec: &CertificateSpec,
        op: &Operator,
        lambda: &[f64],
        c: &[f64],
        eta: &[f64],
    ) -> Result<()> {
        let at = |field: &str| format!("certificates[{i}].{field}");
        let id = spec
            .theorem_id
            .ok_or_else(|| Error::config(at("theorem_id"), "missing"))?;
        let need = |field: &str, v: Option<f64>| -> Result<f64> {
            match v {
                Some(v) if v > 0.0 && v.is_finite() => Ok(v),
                Some(v) => Err(Error::config(at(field), format!("must be finite and > 0, got {v}"))),
                None => Err(Error::config(at(field), format!("required by {id}"))),
            }
        };
        let violated = |msg: String| Err(Error::config(at("theorem_id"), format!("{id}: {msg}")));
        if id.needs_open_lambda() {
            if let Some(k) = lambda.iter().position(|l| !(*l > 0.0 && *l < 2.0)) {
                return violated(format!(
                    "hypothesis lambda in ]0,2[ fails at k = {k} (lambda = {})",
                    lambda[k]
                ));
            }
        }
        let eps: Vec<f64> = (0..lambda.len()).map(|k| self.schedule.eps_at(k)).collect();
        let exact = match &self.schedule.error {
            ErrorPolicy::None => true,
            ErrorPolicy::Summable(b) => b.take(lambda.len()).iter().all(|v| *v == 0.0),
            ErrorPolicy::Relative(_) => eta.iter().zip(&eps).all(|(a, b)| a * b == 0.0),
        };
        let summable = matches!(self.schedule.error, ErrorPolicy::None | ErrorPolicy::Summable(_));
        let unique_zero =
            op.zero_set().singleton().is_some() || matches!(op.zero_set(), crate::operators::ZeroSet::Reference(_));
        let constant = |s: &[f64]| s.iter().all(|v| *v == s[0]);
        match id {
            TheoremId::Prop5_1 => {
                need("kappa", spec.kappa)?;
                if !exact || lambda.iter().any(|l| *l != 1.0) {
                    return violated("requires an exact run with lambda = 1".into());
                }
            }
            TheoremId::Thm5_10 | TheoremId::Prop4_5 => {
                need("kappa", spec.kappa)?;
                if !summable {
                    return violated("requires no errors or summable errors".into());
                }
            }
            TheoremId::Cor4_6 => {
                need("kappa", spec.kappa)?;
                if !exact {
                    return violated("requires an exact run".into());
                }
            }
            TheoremId::Thm5_6 => {
                need("kappa", spec.kappa)?;
                need("delta", spec.delta)?;
                if !matches!(self.schedule.error, ErrorPolicy::None | ErrorPolicy::Relative(_)) {
                    return violated("requires no errors or relative errors".into());
                }
            }
            TheoremId::Thm5_8 => {
                need("alpha", spec.alpha)?;
                need("tau", spec.tau)?;
                if !matches!(self.schedule.error, ErrorPolicy::None | ErrorPolicy::Relative(_)) {
                    return violated("requires no errors or relative errors".into());
                }
            }
            TheoremId::Thm3_4 | TheoremId::Thm3_12_subreg | TheoremId::Thm3_12_lipschitz | TheoremId::Thm3_10 => {
                match id {
                    TheoremId::Thm3_12_lipschitz => {
                        need("alpha", spec.alpha)?;
                        need("tau", spec.tau)?;
                    }
                    TheoremId::Thm3_10 => {
                        if spec.t.is_none() {
                            need("alpha", spec.alpha)?;
                        } else {
                            need("t", spec.t)?;
                        }
                        if !exact {
                            return violated("requires an exact run".into());
                        }
                    }
                    _ => {
                        need("kappa", spec.kappa)?;
                        need("delta", spec.delta)?;
                    }
                }
                if !matches!(self.schedule.error, ErrorPolicy::None | ErrorPolicy::Relative(_)) {
                    return violated("requires no errors or relative errors".into());
                }
                if !(constant(lambda) && constant(c) && constant(eta) && constant(&eps)) {
                    return violated("stationary result requires constant lambda, c, eta and eps".into());
                }
            }
            TheoremId::Lem2_4 => {
                let beta = need("beta", spec.beta)?;
                if beta >= 1.0 {
                    return Err(Error::config(at("beta"), "must lie in ]0,1["));
                }
                if !matches!(self.schedule.error, ErrorPolicy::None | ErrorPolicy::Relative(_)) {
                    return violated("requires no errors or relative errors".into());
                }
            }
        }
        if let Some(k) = (0..eps.len()).find(|&k| eta[k] * eps[k] >= 1.0) {
            return violated(format!("eta_k eps_k < 1 fails at k = {k}"));
        }
        let point_metric = matches!(
            id,
            TheoremId::Lem2_4 | TheoremId::Thm3_10 | TheoremId::Thm3_12_lipschitz | TheoremId::Thm5_8
        );
        if point_metric && !unique_zero {
            return violated("needs an operator with a unique zero".into());
        }
        if !point_metric && matches!(op.zero_set(), crate::operators::ZeroSet::Unknown) {
            return violated("needs an operator with a described zero set".into());
        }
        Ok(())
    }
}

/// Builds and checks every certificate requested by `cfg` against `trace`.
pub fn certify_trace(
    cfg: &ExperimentConfig,
    trace: &IterationTrace,
) -> Result<Vec<(RateCertificate, VerificationReport)>> {
    let (c, lambda, eta, eps) = diagnostics::schedule_echo(trace)?;
    let steps = c.len();
    let tol = cfg.tolerance;
    let mut out = Vec::with_capacity(cfg.certificates.len());
    for spec in &cfg.certificates {
        let id = spec
            .theorem_id
            .ok_or_else(|| Error::config("certificates.theorem_id", "missing"))?;
        let kappa = || spec.kappa.unwrap_or(f64::NAN);
        let pair = match id {
            TheoremId::Thm5_6 | TheoremId::Thm5_8 => {
                let mode = if id == TheoremId::Thm5_6 {
                    QMode::Subreg {
                        kappa: kappa(),
                        delta: spec.delta.unwrap_or(f64::NAN),
                    }
                } else {
                    QMode::Lipschitz {
                        alpha: spec.alpha.unwrap_or(f64::NAN),
                        tau: spec.tau.unwrap_or(f64::NAN),
                    }
                };
                let xbar = trace.unique_zero.as_ref().or(trace.last().anchor.as_ref());
                diagnostics::certify_qlinear(trace, mode, xbar, tol)?
            }
            _ => {
                let cert = match id {
                    TheoremId::Prop5_1 => rates::exact_prox_certificate(kappa(), &c)?,
                    TheoremId::Thm5_10 => rates::gppa_dist_certificate(kappa(), &c, &lambda, steps)?,
                    TheoremId::Prop4_5 | TheoremId::Cor4_6 => {
                        let alpha = vec![0.5; steps];
                        let gamma = rates::residual_constants(kappa(), &c);
                        let mut cert = rates::km_certificate(&lambda, &alpha, &gamma, id == TheoremId::Cor4_6)?;
                        cert.hypotheses.kappa = spec.kappa;
                        cert
                    }
                    TheoremId::Thm3_4 => rates::subreg_upper_certificate(
                        kappa(),
                        spec.delta.unwrap_or(f64::NAN),
                        lambda[0],
                        c[0],
                        eta[0],
                        eps[0],
                        steps,
                    )?,
                    TheoremId::Thm3_12_subreg | TheoremId::Thm3_12_lipschitz => {
                        let mode = if id == TheoremId::Thm3_12_subreg {
                            QMode::Subreg {
                                kappa: kappa(),
                                delta: spec.delta.unwrap_or(f64::NAN),
                            }
                        } else {
                            QMode::Lipschitz {
                                alpha: spec.alpha.unwrap_or(f64::NAN),
                                tau: spec.tau.unwrap_or(f64::NAN),
                            }
                        };
                        rates::stationary_qlinear_certificate(mode, lambda[0], c[0], eta[0], eps[0], steps)?
                    }
                    TheoremId::Thm3_10 => {
                        let t = spec.t.unwrap_or_else(|| spec.alpha.unwrap_or(f64::NAN) / c[0]);
                        let mut cert = rates::sharp_rate_certificate(lambda[0], t, c[0], steps)?;
                        cert.hypotheses.alpha = spec.alpha;
                        cert
                    }
                    TheoremId::Lem2_4 => rates::inexact_step_certificate(spec.beta.unwrap_or(f64::NAN), &eta, &eps)?,
                    TheoremId::Thm5_6 | TheoremId::Thm5_8 => unreachable!("handled above"),
                };
                let report = diagnostics::check_certificate(trace, &cert, tol)?;
                (cert, report)
            }
        };
        out.push(pair);
    }
    Ok(out)
}

/// Compact description of a finished run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSummary {
    pub rows: usize,
    pub x_final: Vector,
    pub terminal_residual: f64,
    pub terminal_step: Option<f64>,
    pub terminal_dist: Option<f64>,
    pub dist_exact: Option<bool>,
    /// Largest `d_{k+1}/d_k` over the trailing half, when distances exist.
    pub tail_q_ratio: Option<f64>,
    pub r_rate: Option<f64>,
}

impl TraceSummary {
    pub fn of(trace: &IterationTrace) -> Self {
        let last = trace.last();
        let terminal_step = trace.rows.iter().rev().find_map(|r| r.step);
        let ratios = diagnostics::q_ratios(trace, rates::Metric::DistToSet).ok();
        let tail_q_ratio = ratios.and_then(|r| {
            let tail = &r[r.len() / 2..];
            let vals: Vec<f64> = tail.iter().flatten().copied().collect();
            (!vals.is_empty()).then(|| vals.iter().copied().fold(0.0, f64::max))
        });
        TraceSummary {
            rows: trace.len(),
            x_final: last.x.clone(),
            terminal_residual: last.residual,
            terminal_step,
            terminal_dist: last.dist,
            dist_exact: last.dist_exact,
            tail_q_ratio,
            r_rate: diagnostics::r_rate(trace, rates::Metric::DistToSet).ok(),
        }
    }
}

/// Machine-readable outcome of [`run_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub operator: String,
    pub dim: usize,
    pub iterations: usize,
    pub seed: u64,
    pub x0: Vector,
    pub trace_summary: TraceSummary,
    pub certificates: Vec<RateCertificate>,
    pub verifications: Vec<VerificationReport>,
    pub summability: SummabilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subregularity: Option<SubregEstimate>,
    /// All certificate checks passed.
    pub overall: bool,
    #[serde(skip)]
    pub trace: IterationTrace,
}

impl ExperimentReport {
    /// The files [`run_experiment`] writes, as `(name, contents)` pairs.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut files = vec![
            ("trace.csv".to_string(), self.trace.to_csv()),
            ("certificates.json".to_string(), pretty_json(&self.certificates)),
            ("verification.json".to_string(), pretty_json(&self.verifications)),
            ("report.json".to_string(), pretty_json(self)),
        ];
        for (i, v) in self.verifications.iter().enumerate() {
            files.push((format!("verification_{i}_{}.csv", v.certificate_id), v.to_csv()));
        }
        files
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, contents) in self.files() {
            fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

fn pretty_json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Validates, runs, certifies and (when `output_dir` is set) writes the output files.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let op = cfg.validate()?;
    let x0 = cfg.start_point()?;
    let trace = run_gppa(&op, &cfg.effective_schedule(), &x0, cfg.iterations)?;
    let pairs = certify_trace(cfg, &trace)?;
    let summability = diagnostics::summability_report(&trace)?;
    let subregularity = match &cfg.subregularity {
        Some(est) => {
            let center = cfg.estimate_center(est, &op)?;
            Some(subregularity::estimate_kappa(
                &op,
                &center,
                est.delta,
                est.samples,
                cfg.seed,
            )?)
        }
        None => None,
    };
    let overall = pairs.iter().all(|(_, r)| r.overall);
    let (certificates, verifications) = pairs.into_iter().unzip();
    let report = ExperimentReport {
        operator: cfg.operator.clone(),
        dim: op.dim(),
        iterations: cfg.iterations,
        seed: cfg.seed,
        x0,
        trace_summary: TraceSummary::of(&trace),
        certificates,
        verifications,
        summability,
        subregularity,
        overall,
        trace,
    };
    if let Some(dir) = cfg.output_path() {
        report.write_to(&dir)?;
    }
    Ok(report)
}

/// Convenience builder for configs assembled in code.
impl ExperimentConfig {
    pub fn new(operator: impl Into<String>, x0: Vector, schedule: Schedule, iterations: usize) -> Self {
        ExperimentConfig {
            operator: operator.into(),
            x0: StartPoint::Explicit(x0),
            schedule,
            iterations,
            seed: 0,
            certificates: Vec::new(),
            subregularity: None,
            tolerance: DEFAULT_TOLERANCE,
            output_dir: None,
            base_dir: None,
        }
    }

    pub fn with_certificate(mut self, spec: CertificateSpec) -> Self {
        self.certificates.push(spec);
        self
    }
}

impl CertificateSpec {
    pub fn new(id: TheoremId) -> Self {
        CertificateSpec {
            theorem_id: Some(id),
            ..Default::default()
        }
    }

    pub fn kappa(mut self, kappa: f64) -> Self {
        self.kappa = Some(kappa);
        self
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }
}
