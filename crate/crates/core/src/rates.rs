//! Closed-form rate factors, algebraic identities, and rate certificates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Relative agreement required between the max and piecewise forms of the sharp rate.
pub const FORM_AGREEMENT_TOL: f64 = 1e-12;

fn open_unit_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 2.0 {
        Ok(())
    } else {
        Err(Error::RangeViolation(format!("lambda must lie in ]0,2[, got {lambda}")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::RangeViolation(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// Both sides of the identity
/// `(1 - l/(t+1))^2 - (1 - l(2-l)/(1+t^2)) = 2 t l (1 - l - t^2) / ((1+t^2)(t+1)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityGap {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

pub fn identity_gap(t: f64, lambda: f64) -> Result<IdentityGap> {
    if t == -1.0 {
        return Err(Error::DomainError("t = -1".into()));
    }
    if !t.is_finite() || !lambda.is_finite() {
        return Err(Error::NonFinite("identity arguments"));
    }
    let a = 1.0 - lambda / (t + 1.0);
    let lhs = a * a - (1.0 - lambda * (2.0 - lambda) / (1.0 + t * t));
    let rhs = 2.0 * t * lambda / ((1.0 + t * t) * (t + 1.0) * (t + 1.0)) * (1.0 - lambda - t * t);
    Ok(IdentityGap {
        lhs,
        rhs,
        gap: lhs - rhs,
    })
}

/// `(lhs, rhs)` of the bound
/// `||(1-l)u + l v||^2 <= (1 - l/(t+1))^2 ||u||^2 + l(t^2 + l - 1) ||(sqrt t/(1+t)) u - v/sqrt t||^2`,
/// valid when `||v|| <= t ||u - v||`.
pub fn averaged_combination_bound(u: &Vector, v: &Vector, t: f64, lambda: f64) -> Result<(f64, f64)> {
    positive("t", t)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::RangeViolation(format!("lambda must lie in [0,1], got {lambda}")));
    }
    v.check_dim(u.dim())?;
    let limit = t * u.distance(v);
    if v.norm() > limit * (1.0 + 1e-12) {
        return Err(Error::HypothesisViolation(format!(
            "||v|| = {} exceeds t ||u - v|| = {limit}",
            v.norm()
        )));
    }
    let lhs = u.lin_comb(1.0 - lambda, v, lambda).norm_sq();
    let st = t.sqrt();
    let a = 1.0 - lambda / (t + 1.0);
    let w = u.lin_comb(st / (1.0 + t), v, -1.0 / st);
    let rhs = a * a * u.norm_sq() + lambda * (t * t + lambda - 1.0) * w.norm_sq();
    Ok((lhs, rhs))
}

/// `(1 - l(2-l) / (1 + kappa/gamma)^2)^{1/2}`.
pub fn rho_subreg_upper(lambda: f64, kappa: f64, gamma: f64) -> Result<f64> {
    open_unit_lambda(lambda)?;
    positive("kappa", kappa)?;
    positive("gamma", gamma)?;
    let g = 1.0 + kappa / gamma;
    Ok((1.0 - lambda * (2.0 - lambda) / (g * g)).sqrt())
}

/// Squared sharp factor `max{(1 - l/(t+1))^2, 1 - l(2-l)/(1+t^2)}`.
pub fn rho_optimal_sq(lambda: f64, t: f64) -> Result<f64> {
    open_unit_lambda(lambda)?;
    positive("t", t)?;
    let a = 1.0 - lambda / (t + 1.0);
    let max_form = (a * a).max(1.0 - lambda * (2.0 - lambda) / (1.0 + t * t));
    debug_assert!(
        (max_form - rho_optimal_sq_piecewise(lambda, t)).abs() <= FORM_AGREEMENT_TOL * max_form.max(1.0),
        "max and piecewise forms disagree at lambda = {lambda}, t = {t}"
    );
    Ok(max_form)
}

/// Piecewise form: the first branch when `l <= 1 - t^2`, the second otherwise.
pub fn rho_optimal_sq_piecewise(lambda: f64, t: f64) -> f64 {
    if lambda <= 1.0 - t * t {
        let a = 1.0 - lambda / (t + 1.0);
        a * a
    } else {
        1.0 - lambda * (2.0 - lambda) / (1.0 + t * t)
    }
}

/// `(rho + eta eps) / (1 - eta eps)`.
pub fn rho_inexact(rho: f64, eta: f64, eps: f64) -> Result<f64> {
    if !(eta >= 0.0 && eps >= 0.0) {
        return Err(Error::RangeViolation(format!(
            "eta and eps must be >= 0, got ({eta}, {eps})"
        )));
    }
    let p = eta * eps;
    if p >= 1.0 {
        return Err(Error::PolicyViolation { eta, eps });
    }
    Ok((rho + p) / (1.0 - p))
}

/// `beta = l(1/alpha - l)/gamma^2` and `rho = 1 - beta` (`beta <= 1`) or `1/(1+beta)`.
pub fn km_contraction(lambda: f64, alpha: f64, gamma_sub: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::RangeViolation(format!("alpha must lie in ]0,1], got {alpha}")));
    }
    if !(0.0..=1.0 / alpha).contains(&lambda) {
        return Err(Error::RangeViolation(format!(
            "lambda must lie in [0, {}], got {lambda}",
            1.0 / alpha
        )));
    }
    positive("gamma", gamma_sub)?;
    let beta = lambda * (1.0 / alpha - lambda) / (gamma_sub * gamma_sub);
    let rho = if beta <= 1.0 { 1.0 - beta } else { 1.0 / (1.0 + beta) };
    Ok((beta, rho))
}

/// `(prod_{i<=k} rho_i) d0_sq + sum_{i<=k} (prod_{i<j<=k} rho_j) slack_i`, evaluated
/// by the recursion `b <- rho_i b + slack_i`.
pub fn dist_recursion_bound(rho: &[f64], slack: &[f64], d0_sq: f64, k: usize) -> Result<f64> {
    if rho.len() <= k || slack.len() <= k {
        return Err(Error::TooShort {
            need: k + 1,
            got: rho.len().min(slack.len()),
        });
    }
    if !(d0_sq >= 0.0) {
        return Err(Error::RangeViolation(format!("d0_sq must be >= 0, got {d0_sq}")));
    }
    let mut b = d0_sq;
    for i in 0..=k {
        if !(0.0..=1.0).contains(&rho[i]) || !(slack[i] >= 0.0) {
            return Err(Error::RangeViolation(format!(
                "rho_{i} = {} must lie in [0,1] and slack_{i} = {} must be >= 0",
                rho[i], slack[i]
            )));
        }
        b = rho[i] * b + slack[i];
    }
    Ok(b)
}

/// Which result a certificate instantiates.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    Lem2_4,
    Thm3_4,
    Thm3_10,
    Thm3_12_subreg,
    Thm3_12_lipschitz,
    Prop4_5,
    Cor4_6,
    Prop5_1,
    Thm5_6,
    Thm5_8,
    Thm5_10,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::Lem2_4,
        TheoremId::Thm3_4,
        TheoremId::Thm3_10,
        TheoremId::Thm3_12_subreg,
        TheoremId::Thm3_12_lipschitz,
        TheoremId::Prop4_5,
        TheoremId::Cor4_6,
        TheoremId::Prop5_1,
        TheoremId::Thm5_6,
        TheoremId::Thm5_8,
        TheoremId::Thm5_10,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Lem2_4 => "Lem2_4",
            TheoremId::Thm3_4 => "Thm3_4",
            TheoremId::Thm3_10 => "Thm3_10",
            TheoremId::Thm3_12_subreg => "Thm3_12_subreg",
            TheoremId::Thm3_12_lipschitz => "Thm3_12_lipschitz",
            TheoremId::Prop4_5 => "Prop4_5",
            TheoremId::Cor4_6 => "Cor4_6",
            TheoremId::Prop5_1 => "Prop5_1",
            TheoremId::Thm5_6 => "Thm5_6",
            TheoremId::Thm5_8 => "Thm5_8",
            TheoremId::Thm5_10 => "Thm5_10",
        }
    }

    /// Results that only hold "for every k large enough".
    pub fn is_eventual(self) -> bool {
        matches!(self, TheoremId::Thm5_6 | TheoremId::Thm5_8)
    }

    /// Results whose coefficients require `lambda_k` in the open interval `]0,2[`.
    pub fn needs_open_lambda(self) -> bool {
        matches!(
            self,
            TheoremId::Thm3_4
                | TheoremId::Thm3_10
                | TheoremId::Thm3_12_subreg
                | TheoremId::Thm3_12_lipschitz
                | TheoremId::Thm5_6
                | TheoremId::Thm5_8
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown theorem id `{s}`")))
    }
}

/// The quantity a certificate bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `||x_k - xbar||` for a unique zero (or, for envelopes, the trace limit).
    NormToPoint,
    /// `d(x_k, zer A)`; anchored certificates use `||x_k - P_{zer A}(J x_k)||`.
    DistToSet,
    /// `d^2(x_k, zer A)`.
    DistSqToSet,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::NormToPoint => "norm_to_point",
            Metric::DistToSet => "dist_to_set",
            Metric::DistSqToSet => "dist_sq_to_set",
        }
    }
}

/// The hypothesis constants and schedule summary a certificate was built from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Hypotheses {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Contraction factor of the exact step, for generic inexact bounds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_eps_max: Option<f64>,
    pub exact: bool,
}

impl Hypotheses {
    fn with_schedule(mut self, lambda: &[f64], c: &[f64]) -> Self {
        let min = |s: &[f64]| s.iter().copied().fold(f64::INFINITY, f64::min);
        let max = |s: &[f64]| s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lambda.is_empty() {
            self.lambda_min = Some(min(lambda));
            self.lambda_max = Some(max(lambda));
        }
        if !c.is_empty() {
            self.c_min = Some(min(c));
            self.c_max = Some(max(c));
        }
        self
    }
}

/// A theorem-indexed bound: per-step factors, threshold index and uniform factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCertificate {
    pub theorem_id: TheoremId,
    pub metric: Metric,
    #[serde(rename = "K")]
    pub k: usize,
    /// Uniform factor, present only when it is `< 1`.
    pub mu: Option<f64>,
    /// Per-step factors in `[0,1]`.
    pub rho: Vec<f64>,
    /// Per-step inexact factors `(rho_k + eta_k eps_k)/(1 - eta_k eps_k)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective: Option<Vec<f64>>,
    pub hypotheses: Hypotheses,
    /// Terminal gap `||J x_K - xbar||`, recorded for results that assume `J x_k -> xbar`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal_gap: Option<f64>,
}

impl RateCertificate {
    /// Factor applied at step `k`: the inexact one when present.
    pub fn factor(&self, k: usize) -> f64 {
        match &self.effective {
            Some(e) => e[k],
            None => self.rho[k],
        }
    }

    pub fn steps(&self) -> usize {
        self.rho.len()
    }

    /// `sup rho_k`.
    pub fn rho_sup(&self) -> f64 {
        self.rho.iter().copied().fold(0.0, f64::max)
    }
}

fn sup_below_one(values: &[f64]) -> Option<f64> {
    let s = values.iter().copied().fold(0.0, f64::max);
    (s < 1.0).then_some(s)
}

fn check_lengths(n: usize, lens: &[usize]) -> Result<()> {
    match lens.iter().find(|len| **len < n) {
        Some(len) => Err(Error::TooShort { need: n, got: *len }),
        None => Ok(()),
    }
}

fn check_closed_lambda(lambda: &[f64]) -> Result<()> {
    match lambda.iter().position(|l| !(0.0..=2.0).contains(l)) {
        Some(k) => Err(Error::RangeViolation(format!(
            "lambda_{k} = {} outside [0,2]",
            lambda[k]
        ))),
        None => Ok(()),
    }
}

fn check_positive_c(c: &[f64]) -> Result<()> {
    match c.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        Some(k) => Err(Error::RangeViolation(format!("c_{k} = {} must be > 0", c[k]))),
        None => Ok(()),
    }
}

/// Squared-distance certificate: `rho_k = 1 - l_k(2-l_k)/(1 + kappa/c_k)^2`.
pub fn gppa_dist_certificate(kappa: f64, c: &[f64], lambda: &[f64], steps: usize) -> Result<RateCertificate> {
    positive("kappa", kappa)?;
    check_lengths(steps, &[c.len(), lambda.len()])?;
    let (c, lambda) = (&c[..steps], &lambda[..steps]);
    check_closed_lambda(lambda)?;
    check_positive_c(c)?;
    let rho: Vec<f64> = c
        .iter()
        .zip(lambda)
        .map(|(ck, lk)| {
            let g = 1.0 + kappa / ck;
            1.0 - lk * (2.0 - lk) / (g * g)
        })
        .collect();
    Ok(RateCertificate {
        theorem_id: TheoremId::Thm5_10,
        metric: Metric::DistSqToSet,
        k: 0,
        mu: sup_below_one(&rho),
        rho,
        effective: None,
        hypotheses: Hypotheses {
            kappa: Some(kappa),
            ..Default::default()
        }
        .with_schedule(lambda, c),
        terminal_gap: None,
    })
}

/// The regularity assumption behind a Q-linear certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QMode {
    /// Metric subregularity `(kappa, delta)`; the bound is anchored at `P_{zer A}(J x_k)`.
    Subreg { kappa: f64, delta: f64 },
    /// Lipschitz continuity of `A^{-1}` at 0 with `(alpha, tau)`; the bound is to the unique zero.
    Lipschitz { alpha: f64, tau: f64 },
}

impl QMode {
    fn modulus(self) -> f64 {
        match self {
            QMode::Subreg { kappa, .. } => kappa,
            QMode::Lipschitz { alpha, .. } => alpha,
        }
    }

    fn hypotheses(self) -> Hypotheses {
        match self {
            QMode::Subreg { kappa, delta } => Hypotheses {
                kappa: Some(kappa),
                delta: Some(delta),
                ..Default::default()
            },
            QMode::Lipschitz { alpha, tau } => Hypotheses {
                alpha: Some(alpha),
                tau: Some(tau),
                ..Default::default()
            },
        }
    }
}

fn qlinear(
    theorem_id: TheoremId,
    mode: QMode,
    c: &[f64],
    lambda: &[f64],
    eta: &[f64],
    eps: &[f64],
    k_detected: usize,
) -> Result<RateCertificate> {
    let m = mode.modulus();
    positive("regularity modulus", m)?;
    let steps = c.len();
    check_lengths(steps, &[lambda.len(), eta.len(), eps.len()])?;
    check_positive_c(c)?;
    let mut rho = Vec::with_capacity(steps);
    let mut effective = Vec::with_capacity(steps);
    let mut pe_max: f64 = 0.0;
    for k in 0..steps {
        let r = rho_optimal_sq(lambda[k], m / c[k])?.sqrt();
        effective.push(rho_inexact(r, eta[k], eps[k])?);
        pe_max = pe_max.max(eta[k] * eps[k]);
        rho.push(r);
    }
    let mu = effective[k_detected.min(steps)..].iter().copied().fold(0.0, f64::max);
    if mu >= 1.0 {
        return Err(Error::NonContractive { mu });
    }
    let metric = match mode {
        QMode::Subreg { .. } => Metric::DistToSet,
        QMode::Lipschitz { .. } => Metric::NormToPoint,
    };
    let mut hypotheses = mode.hypotheses().with_schedule(&lambda[..steps], c);
    hypotheses.eta_eps_max = Some(pe_max);
    hypotheses.exact = pe_max == 0.0;
    Ok(RateCertificate {
        theorem_id,
        metric,
        k: k_detected,
        mu: Some(mu),
        rho,
        effective: Some(effective),
        hypotheses,
        terminal_gap: None,
    })
}

/// Q-linear certificate for the nonstationary scheme with relative errors:
/// `rho_k = rho_optimal_sq(l_k, m/c_k)^{1/2}` with `m = kappa` or `alpha`,
/// effective factor `(rho_k + eta_k eps_k)/(1 - eta_k eps_k)`, and
/// `mu = sup_{k >= K} effective_k`. The length of `c` fixes the number of steps.
pub fn gppa_qlinear_certificate(
    mode: QMode,
    c: &[f64],
    lambda: &[f64],
    eta: &[f64],
    eps: &[f64],
    k_detected: usize,
) -> Result<RateCertificate> {
    let id = match mode {
        QMode::Subreg { .. } => TheoremId::Thm5_6,
        QMode::Lipschitz { .. } => TheoremId::Thm5_8,
    };
    qlinear(id, mode, c, lambda, eta, eps, k_detected)
}

/// Stationary single-step version of [`gppa_qlinear_certificate`], repeated over `steps`.
pub fn stationary_qlinear_certificate(
    mode: QMode,
    lambda: f64,
    gamma: f64,
    eta: f64,
    eps: f64,
    steps: usize,
) -> Result<RateCertificate> {
    let id = match mode {
        QMode::Subreg { .. } => TheoremId::Thm3_12_subreg,
        QMode::Lipschitz { .. } => TheoremId::Thm3_12_lipschitz,
    };
    let n = steps.max(1);
    qlinear(
        id,
        mode,
        &vec![gamma; n],
        &vec![lambda; n],
        &vec![eta; n],
        &vec![eps; n],
        0,
    )
}

/// Stationary subregularity bound `d(x_{k+1}) <= (rho + eta eps)/(1 - eta eps) d(x_k)`
/// with `rho = rho_subreg_upper(lambda, kappa, gamma)`.
pub fn subreg_upper_certificate(
    kappa: f64,
    delta: f64,
    lambda: f64,
    gamma: f64,
    eta: f64,
    eps: f64,
    steps: usize,
) -> Result<RateCertificate> {
    let r = rho_subreg_upper(lambda, kappa, gamma)?;
    let e = rho_inexact(r, eta, eps)?;
    let n = steps.max(1);
    Ok(RateCertificate {
        theorem_id: TheoremId::Thm3_4,
        metric: Metric::DistToSet,
        k: 0,
        mu: (e < 1.0).then_some(e),
        rho: vec![r; n],
        effective: Some(vec![e; n]),
        hypotheses: Hypotheses {
            kappa: Some(kappa),
            delta: Some(delta),
            eta_eps_max: Some(eta * eps),
            exact: eta * eps == 0.0,
            ..Default::default()
        }
        .with_schedule(&[lambda], &[gamma]),
        terminal_gap: None,
    })
}

/// Exact sharp bound `||y - z|| <= rho_optimal_sq(lambda, t)^{1/2} ||x - z||`.
pub fn sharp_rate_certificate(lambda: f64, t: f64, gamma: f64, steps: usize) -> Result<RateCertificate> {
    let r = rho_optimal_sq(lambda, t)?.sqrt();
    let n = steps.max(1);
    Ok(RateCertificate {
        theorem_id: TheoremId::Thm3_10,
        metric: Metric::NormToPoint,
        k: 0,
        mu: (r < 1.0).then_some(r),
        rho: vec![r; n],
        effective: None,
        hypotheses: Hypotheses {
            t: Some(t),
            exact: true,
            ..Default::default()
        }
        .with_schedule(&[lambda], &[gamma]),
        terminal_gap: None,
    })
}

/// Generic inexact step: exact factor `beta` degraded to `(beta + eta eps)/(1 - eta eps)`.
pub fn inexact_step_certificate(beta: f64, eta: &[f64], eps: &[f64]) -> Result<RateCertificate> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::RangeViolation(format!("beta must lie in [0,1[, got {beta}")));
    }
    let steps = eta.len();
    check_lengths(steps, &[eps.len()])?;
    let effective = (0..steps)
        .map(|k| rho_inexact(beta, eta[k], eps[k]))
        .collect::<Result<Vec<f64>>>()?;
    let pe = (0..steps).map(|k| eta[k] * eps[k]).fold(0.0, f64::max);
    Ok(RateCertificate {
        theorem_id: TheoremId::Lem2_4,
        metric: Metric::NormToPoint,
        k: 0,
        mu: sup_below_one(&effective),
        rho: vec![beta; steps],
        effective: Some(effective),
        hypotheses: Hypotheses {
            beta: Some(beta),
            eta_eps_max: Some(pe),
            exact: pe == 0.0,
            ..Default::default()
        },
        terminal_gap: None,
    })
}

/// Exact proximal point with `lambda = 1`: `rho_k = 1/sqrt(1 + c_k^2/kappa^2)`.
pub fn exact_prox_certificate(kappa: f64, c: &[f64]) -> Result<RateCertificate> {
    positive("kappa", kappa)?;
    check_positive_c(c)?;
    let rho: Vec<f64> = c
        .iter()
        .map(|ck| 1.0 / (1.0 + ck * ck / (kappa * kappa)).sqrt())
        .collect();
    Ok(RateCertificate {
        theorem_id: TheoremId::Prop5_1,
        metric: Metric::DistToSet,
        k: 0,
        mu: sup_below_one(&rho),
        rho,
        effective: None,
        hypotheses: Hypotheses {
            kappa: Some(kappa),
            exact: true,
            ..Default::default()
        }
        .with_schedule(&[1.0], c),
        terminal_gap: None,
    })
}

/// Averaged-family recursion factors `rho_k` from [`km_contraction`] with residual-map
/// constants `gamma_k`. `exact` selects the envelope form (`rho_k = 1 - beta_k`).
pub fn km_certificate(lambda: &[f64], alpha: &[f64], gamma_sub: &[f64], exact: bool) -> Result<RateCertificate> {
    let steps = lambda.len();
    check_lengths(steps, &[alpha.len(), gamma_sub.len()])?;
    let mut rho = Vec::with_capacity(steps);
    for k in 0..steps {
        let (beta, r) = km_contraction(lambda[k], alpha[k], gamma_sub[k])?;
        rho.push(if exact { (1.0 - beta).max(0.0) } else { r });
    }
    Ok(RateCertificate {
        theorem_id: if exact { TheoremId::Cor4_6 } else { TheoremId::Prop4_5 },
        metric: if exact {
            Metric::NormToPoint
        } else {
            Metric::DistSqToSet
        },
        k: 0,
        mu: sup_below_one(&rho),
        rho,
        effective: None,
        hypotheses: Hypotheses {
            exact,
            ..Default::default()
        }
        .with_schedule(lambda, gamma_sub),
        terminal_gap: None,
    })
}

/// Residual-map constants `1 + kappa/c_k` of the resolvent family.
pub fn residual_constants(kappa: f64, c: &[f64]) -> Vec<f64> {
    c.iter().map(|ck| 1.0 + kappa / ck).collect()
}

/// Named parameters of [`evaluate`].
pub type Params = std::collections::BTreeMap<String, f64>;

fn param(params: &Params, id: TheoremId, name: &str) -> Result<f64> {
    params
        .get(name)
        .copied()
        .ok_or_else(|| Error::InvalidSpec(format!("{id} needs parameter `{name}`")))
}

fn param_or(params: &Params, name: &str, default: f64) -> f64 {
    params.get(name).copied().unwrap_or(default)
}

/// Evaluates the closed-form factor(s) behind a result at the given parameters.
///
/// | id | parameters | values |
/// |----|------------|--------|
/// | `Lem2_4` | `beta, eta, eps` | `effective` |
/// | `Thm3_4` | `lambda, kappa, gamma [, eta, eps]` | `rho, effective` |
/// | `Thm3_10` | `lambda, t` | `rho_sq, rho` |
/// | `Thm3_12_subreg` | `lambda, kappa, gamma [, eta, eps]` | `rho, effective` |
/// | `Thm3_12_lipschitz` | `lambda, alpha, gamma [, eta, eps]` | `rho, effective` |
/// | `Prop4_5` | `lambda, alpha, gamma` | `beta, rho` |
/// | `Cor4_6` | `lambda, alpha, gamma` | `beta, rho` |
/// | `Prop5_1` | `kappa, c` | `rho` |
/// | `Thm5_6` | `lambda, kappa, c [, eta, eps]` | `rho, effective` |
/// | `Thm5_8` | `lambda, alpha, c [, eta, eps]` | `rho, effective` |
/// | `Thm5_10` | `lambda, kappa, c` | `rho` |
pub fn evaluate(id: TheoremId, params: &Params) -> Result<Vec<(&'static str, f64)>> {
    let p = |name: &str| param(params, id, name);
    let eta = param_or(params, "eta", 0.0);
    let eps = param_or(params, "eps", 0.0);
    let sharp = |m: f64, gamma: f64| -> Result<Vec<(&'static str, f64)>> {
        positive("gamma", gamma)?;
        let rho = rho_optimal_sq(p("lambda")?, m / gamma)?.sqrt();
        Ok(vec![("rho", rho), ("effective", rho_inexact(rho, eta, eps)?)])
    };
    match id {
        TheoremId::Lem2_4 => Ok(vec![("effective", rho_inexact(p("beta")?, p("eta")?, p("eps")?)?)]),
        TheoremId::Thm3_4 => {
            let rho = rho_subreg_upper(p("lambda")?, p("kappa")?, p("gamma")?)?;
            Ok(vec![("rho", rho), ("effective", rho_inexact(rho, eta, eps)?)])
        }
        TheoremId::Thm3_10 => {
            let sq = rho_optimal_sq(p("lambda")?, p("t")?)?;
            Ok(vec![("rho_sq", sq), ("rho", sq.sqrt())])
        }
        TheoremId::Thm3_12_subreg => sharp(p("kappa")?, p("gamma")?),
        TheoremId::Thm3_12_lipschitz => sharp(p("alpha")?, p("gamma")?),
        TheoremId::Thm5_6 => sharp(p("kappa")?, p("c")?),
        TheoremId::Thm5_8 => sharp(p("alpha")?, p("c")?),
        TheoremId::Prop4_5 | TheoremId::Cor4_6 => {
            let (beta, rho) = km_contraction(p("lambda")?, p("alpha")?, p("gamma")?)?;
            let rho = if id == TheoremId::Cor4_6 {
                (1.0 - beta).max(0.0)
            } else {
                rho
            };
            Ok(vec![("beta", beta), ("rho", rho)])
        }
        TheoremId::Prop5_1 => Ok(vec![("rho", exact_prox_certificate(p("kappa")?, &[p("c")?])?.rho[0])]),
        TheoremId::Thm5_10 => {
            let cert = gppa_dist_certificate(p("kappa")?, &[p("c")?], &[p("lambda")?], 1)?;
            Ok(vec![("rho", cert.rho[0])])
        }
    }
}
