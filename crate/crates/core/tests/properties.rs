use proptest::prelude::*;

use skagree::dsbe::{dsbe_pmf, dsbe_thresholds, repetition_rate};
use skagree::feasibility::{corollary1_test, set_test, swap_advantage_lb, SwapInstance};
use skagree::info::{conditional_mutual_information, to_bits};
use skagree::pmf::{preceq_check, preceq_simulation_channels};
use skagree::thresholds::epsilon2;
use skagree::{build_erasure_source, JointPmf, Source};

fn normalized(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn joint_strategy(max: usize) -> impl Strategy<Value = JointPmf> {
    (2..=max, 2..=max).prop_flat_map(|(nx, ny)| {
        prop::collection::vec(0.02f64..1.0, nx * ny)
            .prop_map(move |v| JointPmf::from_flat(nx, ny, &normalized(v)).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn preceq_recovers_scaled_pmf(
        p in joint_strategy(4),
        seed_a in prop::collection::vec(0.05f64..3.0, 4),
        seed_b in prop::collection::vec(0.05f64..3.0, 4),
        eps in 0.0f64..=1.0,
    ) {
        let (nx, ny) = (p.nx(), p.ny());
        let raw: Vec<f64> = (0..nx * ny)
            .map(|i| seed_a[i / ny] * seed_b[i % ny] * p.probs()[i])
            .collect();
        let q = JointPmf::from_flat(nx, ny, &normalized(raw)).unwrap();
        let w = preceq_check(&q, &p).unwrap().expect("scaled pmf is dominated");
        for (r, t) in w.reconstruct(&p).iter().zip(q.probs()) {
            prop_assert!((r - t).abs() <= 1e-10);
        }

        let source = build_erasure_source(p.clone(), eps).unwrap();
        let sim = preceq_simulation_channels(&source, &w).unwrap();
        let kept: f64 = (0..nx * ny)
            .map(|i| sim.alice.get(i / ny, 0) * sim.bob.get(i % ny, 0) * p.probs()[i])
            .sum();
        prop_assert!((kept - sim.acceptance_probability).abs() <= 1e-12);

        let eve = source.eve_channel();
        let law = sim.conditional_law(&source);
        let nz = eve.n_outputs();
        for c in 0..nx * ny {
            for z in 0..nz {
                prop_assert!((law[c * nz + z] - q.probs()[c] * eve.get(c, z)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn source_json_round_trip(p in joint_strategy(4), eps in 0.0f64..=1.0) {
        let s = build_erasure_source(p, eps).unwrap();
        let back = Source::from_json_str(&s.to_json_string().unwrap()).unwrap();
        for (a, b) in back.joint().probs().iter().zip(s.joint().probs()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
        prop_assert_eq!(back.erasure_probability(), Some(eps));
    }

    #[test]
    fn singleton_set_test_matches_corollary1(p in joint_strategy(3), eps in 0.0f64..=1.0) {
        let source = build_erasure_source(p.clone(), eps).unwrap();
        let mut any = false;
        for x1 in 0..p.nx() {
            for x2 in (0..p.nx()).filter(|&x| x != x1) {
                for y1 in 0..p.ny() {
                    for y2 in (0..p.ny()).filter(|&y| y != y1) {
                        let v = set_test(&source, &[vec![x1]], &[vec![x2]], &[vec![y1]], &[vec![y2]], 1).unwrap();
                        any |= v.positive;
                    }
                }
            }
        }
        prop_assert_eq!(any, corollary1_test(&source).positive);
    }

    #[test]
    fn swap_never_helps_independent_sources(
        px in prop::collection::vec(0.05f64..1.0, 2..4),
        py in prop::collection::vec(0.05f64..1.0, 2..4),
        eps in 0.0f64..=1.0,
        half in 1usize..40,
    ) {
        let p = JointPmf::product(&normalized(px), &normalized(py)).unwrap();
        let source = build_erasure_source(p, eps).unwrap();
        let inst = SwapInstance::new(source, 0, 0, 1, 1, 2 * half).unwrap();
        prop_assert!(swap_advantage_lb(&inst).unwrap() <= 1e-12);
    }
}

#[test]
fn repetition_rate_below_conditional_mi() {
    for i in 1..10 {
        let p = 0.05 * i as f64;
        let joint = dsbe_pmf(p).unwrap();
        for k in 0..=50 {
            let eps = k as f64 / 50.0;
            let cmi = to_bits(conditional_mutual_information(&build_erasure_source(joint.clone(), eps).unwrap()));
            for n in 1..=8 {
                assert!(repetition_rate(p, eps, n).unwrap() <= cmi + 1e-9, "p={p} eps={eps} n={n}");
            }
        }
    }
}

#[test]
fn dsbe_eps2_matches_general_threshold() {
    for i in 1..50 {
        let p = 0.01 * i as f64;
        let (e2, _) = epsilon2(&dsbe_pmf(p).unwrap());
        let closed = dsbe_thresholds(p).unwrap().eps2;
        assert!((e2 - closed).abs() <= 4.0 * f64::EPSILON * closed, "p={p}");
    }
}

#[test]
fn swap_turns_positive_above_eps2() {
    for i in 0..8 {
        let p = 0.1 + 0.05 * i as f64;
        let eps2 = p / (1.0 - p);
        let joint = dsbe_pmf(p).unwrap();
        let mut eps = eps2 + 0.05;
        while eps <= 1.0 {
            let source = build_erasure_source(joint.clone(), eps).unwrap();
            let positive = (1..=100).any(|half| {
                let inst = SwapInstance::new(source.clone(), 0, 0, 1, 1, 2 * half).unwrap();
                swap_advantage_lb(&inst).unwrap() > 0.0
            });
            assert!(positive, "p={p} eps={eps}");
            eps += 0.02;
        }
    }
}

#[test]
fn general_channel_source_agrees_with_erasure() {
    let joint = dsbe_pmf(0.3).unwrap();
    let erasure = build_erasure_source(joint.clone(), 0.6).unwrap();
    let general = Source::general(joint, erasure.eve_channel()).unwrap();
    let a = corollary1_test(&erasure);
    let b = corollary1_test(&general);
    assert_eq!(a.positive, b.positive);
    assert!((a.lhs_chernoff - b.lhs_chernoff).abs() < 1e-9);
}
