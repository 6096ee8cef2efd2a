//! Acceptance criteria 1-11, one PASS/FAIL line each. Oracles are computed here,
//! independently of the library's own formulas.

use std::fs;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use proxlab::config::{run_experiment, CertificateSpec, ExperimentConfig};
use proxlab::diagnostics::{certify_qlinear, check_certificate, q_ratios};
use proxlab::engines::{run_gppa, ErrorPolicy, Formula, Schedule, Sequence};
use proxlab::operators::zoo;
use proxlab::rates::{self, Metric, QMode, TheoremId};
use proxlab::subregularity::{estimate_kappa, residual_ratio_check};
use proxlab::{Operator, Vector};

const SEED: u64 = 20240611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn v(x: &[f64]) -> Vector {
    Vector::new(x.to_vec()).unwrap()
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn ball_point(r: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vector {
    loop {
        let p: Vec<f64> = (0..dim).map(|_| r.random_range(-1.0..=1.0)).collect();
        let n2: f64 = p.iter().map(|x| x * x).sum();
        if n2 <= 1.0 {
            return v(&p.iter().map(|x| x * radius).collect::<Vec<_>>());
        }
    }
}

/// Exact proximal point with `lambda = 1` on the rotation reproduces `1/sqrt(1 + c^2/kappa^2)`.
fn c1_tight_rate() -> Outcome {
    let rot = zoo::lookup("rotation2").unwrap();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for c in [1.0f64, 2.0] {
        let oracle = 1.0 / (1.0 + c * c).sqrt();
        let trace = run_gppa(&rot, &Schedule::constant(1.0, c), &v(&[1.0, 0.0]), 30).unwrap();
        let cert = rates::exact_prox_certificate(1.0, &[c; 30]).unwrap();
        for (k, r) in q_ratios(&trace, Metric::DistToSet).unwrap().into_iter().enumerate() {
            let r = r.unwrap_or(f64::NAN);
            worst = worst.max((r - oracle).abs());
            ok &= (r - oracle).abs() <= 1e-10 && r <= cert.rho[k] + 1e-10 && (cert.rho[k] - oracle).abs() <= 1e-15;
        }
        ok &= check_certificate(&trace, &cert, 1e-10).unwrap().overall;
    }
    outcome(
        ok,
        format!("max |ratio - closed form| = {worst:.1e} over c in {{1, 2}}"),
    )
}

fn c2_identity() -> Outcome {
    let mut r = rng(2);
    let mut failures = 0;
    let mut n = 0;
    while n < 10_000 {
        let t: f64 = r.random_range(-5.0..=5.0);
        let lambda: f64 = r.random_range(-2.0..=3.0);
        if t == -1.0 {
            continue;
        }
        n += 1;
        let g = rates::identity_gap(t, lambda).unwrap();
        let lhs = (1.0 - lambda / (t + 1.0)).powi(2) - (1.0 - lambda * (2.0 - lambda) / (1.0 + t * t));
        let rhs = 2.0 * t * lambda * (1.0 - lambda - t * t) / ((1.0 + t * t) * (t + 1.0).powi(2));
        let tol = 1e-12 * (1.0 + lhs.abs());
        if !(g.gap.abs() <= tol && (g.lhs - lhs).abs() <= tol && (lhs - rhs).abs() <= tol) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{n} samples, {failures} failures"))
}

fn c3_sharp_forms() -> Outcome {
    let mut r = rng(3);
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let lambda: f64 = r.random_range(0.0..2.0);
        let t: f64 = r.random_range(0.0..=5.0);
        if lambda == 0.0 || t == 0.0 {
            continue;
        }
        let first = (1.0 - lambda / (t + 1.0)).powi(2);
        let second = 1.0 - lambda * (2.0 - lambda) / (1.0 + t * t);
        let piecewise = if lambda <= 1.0 - t * t { first } else { second };
        let max_form = rates::rho_optimal_sq(lambda, t).unwrap();
        let lib_piecewise = rates::rho_optimal_sq_piecewise(lambda, t);
        let d = (max_form - piecewise).abs().max((lib_piecewise - piecewise).abs());
        worst = worst.max(d);
        if d > 1e-12 {
            failures += 1;
        }
    }
    let mut violations = 0;
    for _ in 0..10_000 {
        let t: f64 = r.random_range(0.0..=20.0);
        if (1.0 - 1.0 / (t + 1.0)).powi(2) > 1.0 - 1.0 / (1.0 + t * t) + 1e-12 {
            violations += 1;
        }
        let t: f64 = r.random_range(0.0..1.0);
        let lambda = r.random_range(0.0..=1.0 - t * t);
        if (1.0 - lambda / (t + 1.0)).powi(2) > 1.0 - lambda / (1.0 + t * t) + 1e-12 {
            violations += 1;
        }
    }
    outcome(
        failures == 0 && violations == 0,
        format!("max form gap {worst:.1e}, {failures} form mismatches, {violations} inequality violations"),
    )
}

fn c4_combination_bound() -> Outcome {
    let mut r = rng(4);
    let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut over = 0;
    let mut n = 0;
    while n < 10_000 {
        let u: Vec<f64> = (0..3).map(|_| r.random_range(-2.0..=2.0)).collect();
        let w: Vec<f64> = (0..3).map(|_| r.random_range(-2.0..=2.0)).collect();
        let duw: f64 = norm(&u.iter().zip(&w).map(|(a, b)| a - b).collect::<Vec<_>>());
        if duw < 1e-6 {
            continue;
        }
        let t = norm(&w) / duw * r.random_range(1.0..=3.0);
        if !(t > 0.0 && t < 1e3) {
            continue;
        }
        n += 1;
        let lambda: f64 = r.random_range(0.0..=1.0);
        let (lhs, rhs) = rates::averaged_combination_bound(&v(&u), &v(&w), t, lambda).unwrap();
        let comb: Vec<f64> = u.iter().zip(&w).map(|(a, b)| (1.0 - lambda) * a + lambda * b).collect();
        let o_lhs = norm(&comb).powi(2);
        let st = t.sqrt();
        let corr: Vec<f64> = u.iter().zip(&w).map(|(a, b)| st / (1.0 + t) * a - b / st).collect();
        let o_rhs = (1.0 - lambda / (t + 1.0)).powi(2) * norm(&u).powi(2)
            + lambda * (t * t + lambda - 1.0) * norm(&corr).powi(2);
        if lhs > rhs + 1e-9 || (lhs - o_lhs).abs() > 1e-9 || (rhs - o_rhs).abs() > 1e-9 {
            over += 1;
        }
    }
    let mut eq_fail = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..1_000 {
        let w = ball_point(&mut r, 3, 2.0);
        let dir = ball_point(&mut r, 3, 1.0);
        if dir.norm() < 1e-3 || w.norm() < 1e-3 {
            eq_fail += 1;
            continue;
        }
        let t: f64 = r.random_range(0.1..=10.0);
        let u = w.lin_comb(1.0, &dir, w.norm() / (t * dir.norm()));
        let lambda: f64 = r.random_range(0.0..=1.0);
        let (lhs, rhs) = rates::averaged_combination_bound(&u, &w, t, lambda).unwrap();
        worst = worst.max((lhs - rhs).abs());
        if (lhs - rhs).abs() > 1e-9 {
            eq_fail += 1;
        }
    }
    outcome(
        over == 0 && eq_fail == 0,
        format!(
            "{n} inequality samples ({over} failures), 1000 equality cases (max gap {worst:.1e}, {eq_fail} failures)"
        ),
    )
}

fn c5_inexact_qlinear() -> Outcome {
    let abs = zoo::lookup("abs").unwrap();
    let schedule = Schedule::constant(1.0, 1.0)
        .with_error(Sequence::Const(1.0), ErrorPolicy::Relative(Sequence::Const(0.05)))
        .with_seed(SEED);
    let trace = run_gppa(&abs, &schedule, &v(&[1.0]), 100).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for (mode, m) in [
        (QMode::Lipschitz { alpha: 0.01, tau: 0.5 }, 0.01),
        (QMode::Subreg { kappa: 1.0, delta: 1.0 }, 1.0),
    ] {
        let (cert, rep) = certify_qlinear(&trace, mode, Some(&Vector::zeros(1)), 1e-10).unwrap();
        let t: f64 = m / 1.0;
        let rho = (1.0 - 1.0 / (t + 1.0)).powi(2).max(1.0 - 1.0 / (1.0 + t * t)).sqrt();
        let eff = (rho + 0.05) / (1.0 - 0.05);
        let factors_match = cert
            .effective
            .as_ref()
            .is_some_and(|e| e.iter().all(|x| (x - eff).abs() <= 1e-12));
        let k = rep.k_detected;
        ok &= rep.overall && factors_match && k.is_some_and(|k| k <= 5);
        notes.push(format!("{} K_detected={k:?} effective={eff:.4}", cert.theorem_id));
    }
    outcome(ok, notes.join(", "))
}

fn c6_r_linear_box() -> Outcome {
    let bx = zoo::lookup("box:[0,1]x[0,1]").unwrap();
    let mut r = rng(6);
    let mut ok = true;
    let mut worst_slack: f64 = f64::NEG_INFINITY;
    for _ in 0..20 {
        let x0 = ball_point(&mut r, 2, 10.0).add(&v(&[0.5, 0.5]));
        let trace = run_gppa(&bx, &Schedule::constant(1.0, 1.0), &x0, 50).unwrap();
        let dist_cert = rates::gppa_dist_certificate(1.0, &[1.0; 50], &[1.0; 50], 50).unwrap();
        ok &= dist_cert.rho.iter().all(|rho| (rho - 0.75).abs() <= 1e-15);
        let d: Vec<f64> = trace.rows.iter().map(|row| box_dist(row.x.as_slice())).collect();
        for k in 0..50 {
            let gap = d[k + 1].powi(2) - (dist_cert.rho[k] * d[k].powi(2) + 1e-12);
            worst_slack = worst_slack.max(gap);
            ok &= gap <= 0.0;
        }
        let x_hat = trace.last().x.clone();
        let rho = 0.75f64;
        for (k, row) in trace.rows.iter().enumerate() {
            ok &= row.x.distance(&x_hat) <= 2.0 * rho.powf(k as f64 / 2.0) * d[0] + 1e-9;
        }
        let env = rates::km_certificate(&[1.0; 50], &[0.5; 50], &[2.0; 50], true).unwrap();
        ok &= check_certificate(&trace, &dist_cert, 1e-12).unwrap().overall;
        ok &= check_certificate(&trace, &env, 1e-9).unwrap().overall;
    }
    outcome(ok, format!("20 starts, max d^2 excess over bound {worst_slack:.1e}"))
}

fn box_dist(x: &[f64]) -> f64 {
    x.iter()
        .map(|c| {
            if *c < 0.0 {
                -c
            } else if *c > 1.0 {
                c - 1.0
            } else {
                0.0
            }
        })
        .map(|e| e * e)
        .sum::<f64>()
        .sqrt()
}

#[allow(clippy::needless_range_loop)]
fn c7_series_oracle() -> Outcome {
    let rho = vec![0.5; 61];
    let slack: Vec<f64> = (0..61).map(|i| 0.5f64.powi(i)).collect();
    let mut worst: f64 = 0.0;
    for k in 0..=60usize {
        for d0 in [0.0, 1.0, 3.5] {
            let mut brute = d0;
            for i in 0..=k {
                brute *= rho[i];
            }
            for i in 0..=k {
                let mut prod = 1.0;
                for j in i + 1..=k {
                    prod *= rho[j];
                }
                brute += prod * slack[i];
            }
            let s = rates::dist_recursion_bound(&rho, &slack, d0, k).unwrap();
            worst = worst.max((s - brute).abs());
        }
        let xi = rates::dist_recursion_bound(&rho, &slack, 0.0, k).unwrap();
        worst = worst.max((xi - (k as f64 + 1.0) * 0.5f64.powi(k as i32)).abs());
    }
    outcome(worst <= 1e-12, format!("max deviation {worst:.1e} for k <= 60"))
}

fn c8_subregularity() -> Outcome {
    let id = zoo::lookup("identity").unwrap();
    let e_id = estimate_kappa(&id, &Vector::zeros(id.dim()), 1.0, 10_000, SEED).unwrap();
    let m2 = Operator::make_linear_rows(&[vec![2.0]]).unwrap();
    let e_m2 = estimate_kappa(&m2, &Vector::zeros(1), 1.0, 10_000, SEED).unwrap();
    let cubic = zoo::lookup("cubic").unwrap();
    let e_cu = estimate_kappa(&cubic, &Vector::zeros(1), 0.1, 10_000, SEED).unwrap();
    let k_id = e_id.kappa_hat.unwrap_or(f64::NAN);
    let k_m2 = e_m2.kappa_hat.unwrap_or(f64::NAN);
    let growth = e_cu.trend_growth();
    let ok_id = (k_id - 1.0).abs() <= 1e-12;
    let ok_m2 = (k_m2 - 0.5).abs() <= 1e-9;
    let ok_flag = e_cu.divergent && e_cu.trend[0].1 >= 100.0;
    let ok_growth = growth.iter().all(|g| *g >= 10.0);
    outcome(
        ok_id && ok_m2 && ok_flag && ok_growth,
        format!(
            "identity {k_id}, [[2]] {k_m2}, cubic divergent={} sup@0.1={:.0}, growth per halving {:?} (>= 10 required{})",
            e_cu.divergent,
            e_cu.trend[0].1,
            growth.iter().map(|g| format!("{g:.3}")).collect::<Vec<_>>(),
            if ok_growth { "" } else { "; r^-2 scaling gives 4" }
        ),
    )
}

fn c9_regularity_chains() -> Outcome {
    let mut ok = true;
    let mut checked = Vec::new();
    let mut r = rng(9);
    for id in zoo::BUILTIN {
        let op = zoo::lookup(id).unwrap();
        if let Some(meta) = op.inverse_lipschitz().copied() {
            let xbar = op.zero_set().singleton().unwrap().clone();
            let est = estimate_kappa(&op, &xbar, meta.alpha * meta.tau, 2_000, SEED).unwrap();
            let k = est.kappa_hat.unwrap_or(f64::INFINITY);
            ok &= k <= meta.alpha + 1e-9;
            checked.push(format!("{id}:{k:.3}<={}", meta.alpha));
        }
        if let Some(meta) = op.subregularity().cloned() {
            for gamma in [0.1, 1.0, 10.0] {
                let bound = 1.0 + meta.kappa / gamma;
                for _ in 0..500 {
                    let x = meta.center.add(&ball_point(&mut r, op.dim(), meta.delta));
                    let res = x.distance(&op.resolve(gamma, &x).unwrap());
                    let d = op.project_zero_set(&x).unwrap().dist;
                    ok &= d <= bound * res + 1e-9;
                }
                ok &= residual_ratio_check(&op, meta.kappa, meta.delta, gamma, &meta.center, 500, SEED)
                    .unwrap()
                    .pass;
            }
        }
    }
    outcome(ok, format!("kappa_hat vs alpha: {}", checked.join(" ")))
}

fn c10_global_convergence() -> Outcome {
    let schedule = Schedule {
        lambda: Sequence::List(vec![0.5, 1.5]),
        c: Sequence::Formula(Formula::HarmonicPlusOne),
        eta: Sequence::Const(1.0),
        error: ErrorPolicy::Summable(Sequence::Formula(Formula::GeometricHalf)),
        seed: SEED,
    };
    let mut r = rng(10);
    let mut ok = true;
    let mut worst = (0.0f64, 0.0f64);
    for id in zoo::CERTIFIED {
        let op = zoo::lookup(id).unwrap();
        let x0 = ball_point(&mut r, op.dim(), 3.0);
        let trace = run_gppa(&op, &schedule, &x0, 500).unwrap();
        let res = trace.terminal_residual();
        let step = trace.rows[trace.len() - 2].step.unwrap();
        ok &= res <= 1e-8 && step <= 1e-8;
        worst = (worst.0.max(res), worst.1.max(step));
    }
    outcome(
        ok,
        format!(
            "{} certified members, max terminal residual {:.1e}, max final step {:.1e}",
            zoo::CERTIFIED.len(),
            worst.0,
            worst.1
        ),
    )
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(
        "abs:3",
        v(&[1.0, -2.0, 0.5]),
        Schedule::constant(1.0, 1.0).with_error(Sequence::Const(1.0), ErrorPolicy::Relative(Sequence::Const(0.05))),
        60,
    )
    .with_certificate(CertificateSpec::new(TheoremId::Thm5_6).kappa(1.0).delta(1.0))
    .with_certificate(CertificateSpec::new(TheoremId::Thm5_8).alpha(0.01).tau(0.5));
    cfg.seed = SEED;
    cfg.x0 = proxlab::config::StartPoint::RandomInBall {
        center: Vector::zeros(3),
        radius: 4.0,
    };
    let mut names = Vec::new();
    let mut same = true;
    let mut outputs = Vec::new();
    for run in 0..3 {
        let out = dir.path().join(format!("run{run}"));
        cfg.output_dir = Some(out.clone());
        run_experiment(&cfg).unwrap();
        let mut files: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        let contents: Vec<(String, Vec<u8>)> = files
            .iter()
            .map(|p| {
                (
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    fs::read(p).unwrap(),
                )
            })
            .collect();
        names = contents.iter().map(|(n, _)| n.clone()).collect();
        outputs.push(contents);
    }
    for o in &outputs[1..] {
        same &= *o == outputs[0];
    }
    outcome(same && !names.is_empty(), format!("3 runs, files {names:?}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("tight-rate reproduction", c1_tight_rate),
        ("identity suite", c2_identity),
        ("sharp-rate consistency", c3_sharp_forms),
        ("averaged-combination inequality", c4_combination_bound),
        ("inexact Q-linear certification", c5_inexact_qlinear),
        ("R-linear distance recursion", c6_r_linear_box),
        ("series oracle", c7_series_oracle),
        ("subregularity estimation", c8_subregularity),
        ("regularity chains", c9_regularity_chains),
        ("global convergence", c10_global_convergence),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
