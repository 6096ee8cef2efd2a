//! Trace analysis: Q-ratios, R-rate surrogates, certificate checks, summability.

use std::fmt::Write as _;

use serde::Serialize;

use crate::engines::{fmt_f64, IterationTrace};
use crate::error::{Error, Result};
use crate::rates::{self, Metric, QMode, RateCertificate, TheoremId};
use crate::vector::Vector;

/// Denominators below this are skipped by [`q_ratios`].
pub const TINY: f64 = 1e-300;
/// Minimum entries for an R-rate estimate.
pub const MIN_R_ENTRIES: usize = 10;
/// Trailing-half increment below which a partial sum counts as settled.
pub const CAUCHY_TOL: f64 = 1e-10;
/// Terminal `r_k / c_k` below which the scaled residual counts as vanished.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// The per-iterate value of `metric` along a trace.
pub fn trace_metric(trace: &IterationTrace, metric: Metric) -> Result<Vec<f64>> {
    match metric {
        Metric::DistToSet | Metric::DistSqToSet => {
            let d = trace
                .rows
                .iter()
                .map(|r| r.dist)
                .collect::<Option<Vec<f64>>>()
                .ok_or(Error::MetricUnavailable(metric.as_str()))?;
            Ok(if metric == Metric::DistSqToSet {
                d.into_iter().map(|v| v * v).collect()
            } else {
                d
            })
        }
        Metric::NormToPoint => {
            let xbar = unique_zero(trace)?;
            Ok(trace.rows.iter().map(|r| r.x.distance(xbar)).collect())
        }
    }
}

fn unique_zero(trace: &IterationTrace) -> Result<&Vector> {
    trace
        .unique_zero
        .as_ref()
        .ok_or(Error::MetricUnavailable("norm_to_point"))
}

/// `m_{k+1} / m_k`; `None` where `m_k < 1e-300`.
pub fn ratios_of(values: &[f64]) -> Vec<Option<f64>> {
    values.windows(2).map(|w| (w[0] >= TINY).then(|| w[1] / w[0])).collect()
}

pub fn q_ratios(trace: &IterationTrace, metric: Metric) -> Result<Vec<Option<f64>>> {
    Ok(ratios_of(&trace_metric(trace, metric)?))
}

/// `max m_k^{1/k}` over the trailing half of `values` (indices `k >= 1`).
pub fn r_rate_of(values: &[f64]) -> Result<f64> {
    if values.len() < MIN_R_ENTRIES {
        return Err(Error::TooShort {
            need: MIN_R_ENTRIES,
            got: values.len(),
        });
    }
    let start = (values.len() / 2).max(1);
    Ok(values[start..]
        .iter()
        .enumerate()
        .map(|(i, m)| m.abs().powf(1.0 / (start + i) as f64))
        .fold(0.0, f64::max))
}

pub fn r_rate(trace: &IterationTrace, metric: Metric) -> Result<f64> {
    r_rate_of(&trace_metric(trace, metric)?)
}

/// One compared step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub k: usize,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Result of comparing a trace with a certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub certificate_id: TheoremId,
    pub metric: Metric,
    pub per_k: Vec<CheckRow>,
    pub first_violation: Option<usize>,
    #[serde(rename = "K_detected")]
    pub k_detected: Option<usize>,
    pub overall: bool,
    pub tolerance: f64,
}

impl VerificationReport {
    /// CSV table `k,observed,bound,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,observed,bound,pass\n");
        for r in &self.per_k {
            let _ = writeln!(out, "{},{},{},{}", r.k, fmt_f64(r.observed), fmt_f64(r.bound), r.pass);
        }
        out
    }
}

fn expected_metric(id: TheoremId) -> Metric {
    match id {
        TheoremId::Lem2_4
        | TheoremId::Thm3_10
        | TheoremId::Thm3_12_lipschitz
        | TheoremId::Thm5_8
        | TheoremId::Cor4_6 => Metric::NormToPoint,
        TheoremId::Thm3_4 | TheoremId::Thm3_12_subreg | TheoremId::Prop5_1 | TheoremId::Thm5_6 => Metric::DistToSet,
        TheoremId::Prop4_5 | TheoremId::Thm5_10 => Metric::DistSqToSet,
    }
}

fn within(observed: f64, bound: f64, tol: f64) -> bool {
    observed <= bound * (1.0 + tol) + tol
}

/// Compares a trace against a certificate.
///
/// Q-type results compare `m_{k+1}` with `factor_k m_k`; anchored results use
/// `||x_{k+1} - P(J x_k)||` against `factor_k ||x_k - P(J x_k)||`; the
/// squared-distance result adds the trace slack; the product result compares with
/// the cumulative recursion; the envelope result compares `||x_k - x_hat||`
/// (with `x_hat` the last iterate) with `2 rho^{k/2} d(x_0, zer A)`.
/// Every comparison is `observed <= bound (1 + tol) + tol`.
pub fn check_certificate(trace: &IterationTrace, cert: &RateCertificate, tol: f64) -> Result<VerificationReport> {
    let id = cert.theorem_id;
    let want = expected_metric(id);
    if cert.metric != want {
        return Err(Error::MetricMismatch {
            certificate: cert.metric.as_str(),
            requested: want.as_str(),
        });
    }
    let steps = cert.steps().min(trace.len().saturating_sub(1));
    if steps == 0 {
        return Err(Error::TooShort {
            need: 2,
            got: trace.len(),
        });
    }
    let rows = &trace.rows;
    let mut per_k = Vec::with_capacity(steps + 1);
    let mut push = |k: usize, observed: f64, bound: f64| {
        per_k.push(CheckRow {
            k,
            observed,
            bound,
            pass: within(observed, bound, tol),
        })
    };
    match id {
        TheoremId::Thm3_12_subreg | TheoremId::Thm5_6 => {
            for k in 0..steps {
                let a = rows[k].anchor.as_ref().ok_or(Error::MetricUnavailable("dist_to_set"))?;
                push(k, rows[k + 1].x.distance(a), cert.factor(k) * rows[k].x.distance(a));
            }
        }
        TheoremId::Thm5_10 => {
            let d2 = trace_metric(trace, Metric::DistSqToSet)?;
            for k in 0..steps {
                push(k, d2[k + 1], cert.rho[k] * d2[k] + rows[k].slack.unwrap_or(0.0));
            }
        }
        TheoremId::Prop4_5 => {
            let d2 = trace_metric(trace, Metric::DistSqToSet)?;
            let mut b = d2[0];
            for k in 0..steps {
                b = cert.rho[k] * b + rows[k].slack.unwrap_or(0.0);
                push(k, d2[k + 1], b);
            }
        }
        TheoremId::Cor4_6 => {
            let d0 = rows[0].dist.ok_or(Error::MetricUnavailable("dist_to_set"))?;
            let x_hat = &trace.last().x;
            let rho = cert.rho_sup();
            for (k, row) in rows.iter().enumerate().take(steps + 1) {
                push(k, row.x.distance(x_hat), 2.0 * rho.powf(k as f64 / 2.0) * d0);
            }
        }
        _ => {
            let m = trace_metric(trace, want)?;
            for k in 0..steps {
                push(k, m[k + 1], cert.factor(k) * m[k]);
            }
        }
    }
    let first_violation = per_k.iter().position(|r| !r.pass);
    let k_detected = match per_k.iter().rposition(|r| !r.pass) {
        None => Some(0),
        Some(last) if last + 1 < per_k.len() => Some(per_k[last + 1].k),
        Some(_) => None,
    };
    let overall = match k_detected {
        Some(k) if id.is_eventual() => k <= cert.k,
        Some(k) => k == 0,
        None => false,
    };
    Ok(VerificationReport {
        certificate_id: id,
        metric: want,
        per_k,
        first_violation,
        k_detected,
        overall,
        tolerance: tol,
    })
}

/// Per-step `(c, lambda, eta, eps)` sequences.
pub type ScheduleEcho = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

/// Schedule echoes of a trace as per-step sequences `(c, lambda, eta, eps)`.
pub fn schedule_echo(trace: &IterationTrace) -> Result<ScheduleEcho> {
    let steps = &trace.rows[..trace.len().saturating_sub(1)];
    let c = steps
        .iter()
        .map(|r| r.c)
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| Error::HypothesisViolation("trace has no resolvent parameters c_k".into()))?;
    let lambda = steps.iter().map(|r| r.lambda).collect();
    let eta = steps.iter().map(|r| r.eta).collect();
    let eps = steps.iter().map(|r| r.eps.unwrap_or(0.0)).collect();
    Ok((c, lambda, eta, eps))
}

/// Builds the eventual Q-linear certificate for a trace and checks it: a first pass
/// locates `K_detected`, the certificate's `mu` is then taken over `k >= K_detected`.
/// `xbar` is the point the resolvents are assumed to approach; its terminal gap is recorded.
pub fn certify_qlinear(
    trace: &IterationTrace,
    mode: QMode,
    xbar: Option<&Vector>,
    tol: f64,
) -> Result<(RateCertificate, VerificationReport)> {
    let (c, lambda, eta, eps) = schedule_echo(trace)?;
    let steps = c.len();
    let probe = rates::gppa_qlinear_certificate(mode, &c, &lambda, &eta, &eps, steps)?;
    let first = check_certificate(trace, &probe, tol)?;
    let k = first.k_detected.unwrap_or(steps);
    let mut cert = match rates::gppa_qlinear_certificate(mode, &c, &lambda, &eta, &eps, k) {
        Ok(cert) => cert,
        Err(Error::NonContractive { .. }) => {
            let mut p = probe;
            p.k = k;
            p.mu = None;
            p
        }
        Err(e) => return Err(e),
    };
    cert.terminal_gap = xbar.map(|x| trace.last().j.distance(x));
    let mut report = check_certificate(trace, &cert, tol)?;
    report.overall &= cert.mu.is_some();
    Ok((cert, report))
}

/// Finite-sample witnesses for the summability and vanishing-residual conclusions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummabilityReport {
    /// `sum lambda_k (1/alpha_k - lambda_k) r_k^2`.
    pub weighted_residual_sum: f64,
    pub residual_sq_sum: f64,
    pub step_sq_sum: f64,
    /// Increments of the three sums over the trailing half.
    pub weighted_residual_tail: f64,
    pub residual_sq_tail: f64,
    pub step_sq_tail: f64,
    pub sums_settled: bool,
    /// `r_K / c_K` (or `r_K` without a resolvent parameter).
    pub terminal_scaled_residual: f64,
    pub residual_vanishing: bool,
    #[serde(skip)]
    pub partial_weighted: Vec<f64>,
    #[serde(skip)]
    pub partial_residual_sq: Vec<f64>,
    #[serde(skip)]
    pub partial_step_sq: Vec<f64>,
    #[serde(skip)]
    pub scaled_residuals: Vec<f64>,
}

fn partial_sums(terms: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    terms
        .map(|t| {
            acc += t;
            acc
        })
        .collect()
}

pub fn summability_report(trace: &IterationTrace) -> Result<SummabilityReport> {
    if trace.len() < 2 {
        return Err(Error::TooShort {
            need: 2,
            got: trace.len(),
        });
    }
    let steps = &trace.rows[..trace.len() - 1];
    let partial_weighted = partial_sums(
        steps
            .iter()
            .map(|r| r.lambda * (1.0 / r.alpha - r.lambda) * r.residual * r.residual),
    );
    let partial_residual_sq = partial_sums(steps.iter().map(|r| r.residual * r.residual));
    let partial_step_sq = partial_sums(steps.iter().map(|r| r.step.unwrap_or(0.0).powi(2)));
    let scaled_residuals: Vec<f64> = trace.rows.iter().map(|r| r.residual / r.c.unwrap_or(1.0)).collect();
    let mid = partial_weighted.len() / 2;
    let tail = |s: &[f64]| {
        let end = s[s.len() - 1];
        if mid == 0 {
            end
        } else {
            end - s[mid - 1]
        }
    };
    let (wt, rt, st) = (
        tail(&partial_weighted),
        tail(&partial_residual_sq),
        tail(&partial_step_sq),
    );
    let terminal = *scaled_residuals.last().expect("nonempty");
    Ok(SummabilityReport {
        weighted_residual_sum: *partial_weighted.last().expect("nonempty"),
        residual_sq_sum: *partial_residual_sq.last().expect("nonempty"),
        step_sq_sum: *partial_step_sq.last().expect("nonempty"),
        weighted_residual_tail: wt,
        residual_sq_tail: rt,
        step_sq_tail: st,
        sums_settled: wt < CAUCHY_TOL && rt < CAUCHY_TOL && st < CAUCHY_TOL,
        terminal_scaled_residual: terminal,
        residual_vanishing: terminal < RESIDUAL_TOL,
        partial_weighted,
        partial_residual_sq,
        partial_step_sq,
        scaled_residuals,
    })
}
