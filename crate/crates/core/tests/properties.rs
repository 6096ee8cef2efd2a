use proptest::prelude::*;

use proxlab::config::{CertificateSpec, ExperimentConfig};
use proxlab::engines::{run_gppa, run_km, ErrorPolicy, ResolventFamily, Schedule, Sequence};
use proxlab::operators::zoo;
use proxlab::rates::{self, TheoremId};
use proxlab::Vector;

fn v(x: Vec<f64>) -> Vector {
    Vector::new(x).unwrap()
}

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, dim)
}

fn member() -> impl Strategy<Value = &'static str> {
    prop::sample::select(zoo::BUILTIN.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn resolvent_is_firmly_nonexpansive(id in member(), gamma in 0.05..20.0f64, seed in any::<u64>()) {
        let op = zoo::lookup(id).unwrap();
        let n = op.dim();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let x = proxlab::engines::random_unit(&mut rng, n).scale(5.0);
        let y = proxlab::engines::random_unit(&mut rng, n).scale(3.0);
        let jx = op.resolve(gamma, &x).unwrap();
        let jy = op.resolve(gamma, &y).unwrap();
        let lhs = jx.sub(&jy).norm_sq();
        let rhs = x.sub(&y).dot(&jx.sub(&jy));
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn graph_pairs_are_monotone(id in member(), g1 in 0.1..5.0f64, g2 in 0.1..5.0f64, seed in any::<u64>()) {
        let op = zoo::lookup(id).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let x = proxlab::engines::random_unit(&mut rng, op.dim()).scale(4.0);
        let y = proxlab::engines::random_unit(&mut rng, op.dim()).scale(2.0);
        let (p, u) = op.graph_element(g1, &x).unwrap();
        let (q, w) = op.graph_element(g2, &y).unwrap();
        prop_assert!(p.sub(&q).dot(&u.sub(&w)) >= -1e-9);
    }

    #[test]
    fn resolvent_parameter_rescaling(x in point(2), c in 0.1..5.0f64, mu in 0.1..5.0f64) {
        // J_c x = J_mu( (mu/c) x + (1 - mu/c) J_c x )
        let op = zoo::lookup("rotation2").unwrap();
        let x = v(x);
        let jc = op.resolve(c, &x).unwrap();
        let inner = x.lin_comb(mu / c, &jc, 1.0 - mu / c);
        let rhs = op.resolve(mu, &inner).unwrap();
        prop_assert!(jc.distance(&rhs) <= 1e-10 * (1.0 + x.norm()));
    }

    #[test]
    fn exact_iterates_are_fejer(id in member(), lambda in 0.05..1.95f64, c in 0.1..5.0f64, x in point(3)) {
        let op = zoo::lookup(id).unwrap();
        let x0 = v(x[..op.dim().min(3)].to_vec());
        prop_assume!(x0.dim() == op.dim());
        let trace = run_gppa(&op, &Schedule::constant(lambda, c), &x0, 20).unwrap();
        let d: Vec<f64> = trace.rows.iter().map(|r| r.dist.unwrap()).collect();
        for w in d.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10);
        }
    }

    #[test]
    fn gppa_matches_km_over_resolvents(lambda in 0.1..1.9f64, c in 0.2..4.0f64, x in point(2), seed in any::<u64>()) {
        let op = zoo::lookup("skew:2:0.7").unwrap();
        let x0 = v(vec![x[0], x[1], -x[0], 0.5]);
        let sched = Schedule::constant(lambda, c)
            .with_error(Sequence::Const(1.0), ErrorPolicy::Relative(Sequence::Const(0.1)))
            .with_seed(seed);
        let a = run_gppa(&op, &sched, &x0, 15).unwrap();
        let b = run_km(&mut ResolventFamily::new(&op, Sequence::Const(c)), &sched, &x0, 15).unwrap();
        prop_assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn identity_gap_is_roundoff(t in -5.0..5.0f64, lambda in -2.0..3.0f64) {
        prop_assume!((t + 1.0).abs() > 1e-3);
        let g = rates::identity_gap(t, lambda).unwrap();
        prop_assert!(g.gap.abs() <= 1e-12 * (1.0 + g.lhs.abs()));
    }

    #[test]
    fn optimal_rate_is_a_contraction(lambda in 0.001..1.999f64, t in 0.001..50.0f64) {
        let r = rates::rho_optimal_sq(lambda, t).unwrap();
        prop_assert!((0.0..1.0).contains(&r));
    }

    #[test]
    fn config_json_round_trip(lambda in 0.1..1.9f64, c in 0.1..10.0f64, iters in 1usize..200, seed in any::<u64>(), kappa in 0.1..5.0f64) {
        let mut cfg = ExperimentConfig::new("rotation2", v(vec![1.0, -1.0]), Schedule::constant(lambda, c), iters)
            .with_certificate(CertificateSpec::new(TheoremId::Thm5_10).kappa(kappa));
        cfg.seed = seed;
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
