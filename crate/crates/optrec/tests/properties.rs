//! Property-based invariants for the piecewise calculus, the class
//! seminorm, the ideal-spline solver and the interpolation space.

use optrec::classes::{sample_member, seminorm, ClassSpec};
use optrec::ideal::{solve, SolverOptions};
use optrec::interp::{interpolate, SplineSpace};
use optrec::piecewise::{PiecewisePolynomial, PERIOD};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Random periodic piecewise polynomial with a handful of pieces of degree
/// at most three (not necessarily continuous).
fn arb_piecewise() -> impl Strategy<Value = PiecewisePolynomial> {
    (
        proptest::collection::vec(0.05f64..0.95, 1..5),
        proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, 1..5), 6),
    )
        .prop_map(|(cuts, coeff_lists)| {
            let mut breaks: Vec<f64> = cuts.iter().map(|c| c * PERIOD).collect();
            breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            let mut bp = vec![0.0];
            bp.extend(breaks);
            bp.push(PERIOD);
            let json = serde_json::json!({
                "breakpoints": bp,
                "pieces": coeff_lists[..bp.len() - 1].to_vec(),
            });
            serde_json::from_value(json).expect("valid piecewise JSON")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The derivative of the antiderivative reproduces the function.
    #[test]
    fn antiderivative_inverts_differentiation(
        pp in arb_piecewise(),
        base in 0.0f64..PERIOD,
        ts in proptest::collection::vec(0.0f64..PERIOD, 20),
    ) {
        let anti = pp.antiderivative(base);
        let back = anti.derivative();
        for t in ts {
            // stay clear of breakpoints where one-sided limits differ
            let near_break = pp.breakpoints().iter().any(|b| (b - t).abs() < 1e-6);
            if !near_break {
                let scale = 1.0 + pp.evaluate(t, 0).abs();
                prop_assert!((back.evaluate(t, 0) - pp.evaluate(t, 0)).abs() <= 1e-12 * scale);
            }
        }
        prop_assert!(anti.evaluate(base, 0).abs() <= 1e-12);
    }

    /// Mean removal leaves an exactly centered function.
    #[test]
    fn subtract_mean_centers(pp in arb_piecewise()) {
        let centered = pp.subtract_mean();
        prop_assert!(centered.mean().abs() < 1e-14 * (1.0 + pp.mean().abs()));
    }

    /// The sup norm dominates every sampled value.
    #[test]
    fn sup_norm_dominates_samples(
        pp in arb_piecewise(),
        ts in proptest::collection::vec(0.0f64..PERIOD, 50),
    ) {
        let (sup, _) = pp.sup_norm(0);
        for t in ts {
            prop_assert!(pp.evaluate(t, 0).abs() <= sup + 1e-12);
        }
    }

    /// On the normalized measure the L_p norms are nondecreasing in p.
    #[test]
    fn lp_norms_monotone_in_p(pp in arb_piecewise()) {
        let normalized = |p: f64| {
            if p.is_infinite() {
                pp.lp_norm(p)
            } else {
                pp.lp_norm(p) / PERIOD.powf(1.0 / p)
            }
        };
        let exponents = [1.0, 2.0, 4.0, f64::INFINITY];
        let values: Vec<f64> = exponents.iter().map(|&p| normalized(p)).collect();
        for w in values.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9 * (1.0 + w[0]), "{values:?}");
        }
    }

    /// The class seminorm is absolutely homogeneous.
    #[test]
    fn seminorm_absolutely_homogeneous(seed in 0u64..500, lambda in -4.0f64..4.0) {
        let spec = ClassSpec::rm1(2, 1.0).unwrap();
        let member = sample_member(&spec, seed, 2);
        let base = seminorm(&member.body, &spec).unwrap();
        let scaled = seminorm(&member.body.scale(lambda), &spec).unwrap();
        prop_assert!((scaled - lambda.abs() * base).abs() <= 1e-10 * (1.0 + base));
    }

    /// The class seminorm is subadditive.
    #[test]
    fn seminorm_subadditive(seed_a in 0u64..200, seed_b in 200u64..400) {
        let spec = ClassSpec::rm2(3, 1.0).unwrap();
        let a = sample_member(&spec, seed_a, 2);
        let b = sample_member(&spec, seed_b, 3);
        let sum = seminorm(&a.body.add(&b.body), &spec).unwrap();
        let parts = seminorm(&a.body, &spec).unwrap() + seminorm(&b.body, &spec).unwrap();
        prop_assert!(sum <= parts + 1e-10 * (1.0 + parts));
    }
}

/// Every sampler output stays strictly inside the class.
#[test]
fn hundred_sampled_members_stay_inside() {
    for (i, spec) in [
        ClassSpec::rm1(2, 1.0).unwrap(),
        ClassSpec::rm2(3, 0.5).unwrap(),
        ClassSpec::rm1m2(4, 1.0, 2.0).unwrap(),
    ]
    .iter()
    .enumerate()
    {
        for seed in 0..100u64 {
            let m = sample_member(spec, seed, 1 + (seed % 5) as u32);
            let rho = seminorm(&m.body, spec).unwrap();
            assert!(
                rho <= 0.95 + 1e-9,
                "config {i}, seed {seed}: seminorm {rho}"
            );
        }
    }
}

/// Solved splines attain the top-derivative bound and alternate sign between
/// consecutive zeros.
#[test]
fn solved_splines_attain_bound_and_interlace() {
    let configs = [
        (ClassSpec::rm1(2, 1.0).unwrap(), vec![0.3, 1.8, 3.4, 5.0]),
        (ClassSpec::rm2(3, 1.0).unwrap(), vec![0.5, 2.0, 3.7, 5.2]),
        (
            ClassSpec::rm1m2(3, 1.0, 1.0).unwrap(),
            vec![0.4, 1.7, 2.9, 4.6],
        ),
    ];
    for (spec, nodes) in configs {
        let out = solve(&nodes, &spec, &SolverOptions::default()).unwrap();
        assert!(out.report.passed());
        let r = spec.r as usize;
        let top = out.spline.body.sup_norm(r).0;
        assert!(
            (top - 1.0).abs() <= 1e-9,
            "{:?}: ‖φ^({r})‖ = {top}",
            spec.variant
        );
        // alternating signs at mid-gap points
        let two_n = nodes.len();
        let mut signs = Vec::new();
        for k in 0..two_n {
            let a = nodes[k];
            let b = if k + 1 < two_n {
                nodes[k + 1]
            } else {
                nodes[0] + PERIOD
            };
            signs.push(out.spline.body.evaluate(0.5 * (a + b), 0));
        }
        for k in 0..two_n {
            assert!(
                signs[k] * signs[(k + 1) % two_n] < 0.0,
                "{:?}: signs {signs:?}",
                spec.variant
            );
        }
    }
}

/// Interpolating an element of the space at the nodes reproduces it.
#[test]
fn space_reproduces_its_own_elements() {
    use rand::{Rng, SeedableRng};
    let spec = ClassSpec::rm2(3, 1.0).unwrap();
    let nodes = [0.5, 2.0, 3.7, 5.2];
    let out = solve(&nodes, &spec, &SolverOptions::default()).unwrap();
    let space = SplineSpace::from_ideal(&out.spline).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let mut s = PiecewisePolynomial::zero();
        for f in &space.basis {
            s = s.add(&f.scale(rng.random_range(-2.0..2.0)));
        }
        let values: Vec<f64> = nodes.iter().map(|&u| s.evaluate(u, 0)).collect();
        let back = interpolate(&space, &nodes, &values).unwrap().spline;
        let dist = s.sub(&back).sup_norm(0).0;
        assert!(dist <= 1e-9 * (1.0 + s.sup_norm(0).0), "distance {dist}");
    }
}

/// The Euler construction: a symmetric two-piece top derivative integrates to
/// a multiple of `t(π−t)/2` and the solved best error matches it.
#[test]
fn euler_shape_consistency() {
    let spec = ClassSpec::rm1(2, 10.0).unwrap();
    let out = solve(&[0.0, PI], &spec, &SolverOptions::default()).unwrap();
    let phi = &out.spline.body;
    // φ(t) = ±t(π−t)/2 on [0, π]
    let kappa = phi.evaluate(PI / 2.0, 0) / (PI * PI / 8.0);
    assert!((kappa.abs() - 1.0).abs() <= 1e-8);
    for k in 0..50 {
        let t = PI * k as f64 / 50.0;
        let expected = kappa * t * (PI - t) / 2.0;
        assert!((phi.evaluate(t, 0) - expected).abs() <= 1e-8);
    }
}
