//! Property tests for the structural and dynamical invariants.

use contagion_core::harness::seeding::{derive_rng, Stream};
use contagion_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_activation() -> impl Strategy<Value = ActivationSpec> {
    // q never exceeds rho: sub-threshold adoption is the rare event.
    prop_oneof![
        (0.0..=1.0f64).prop_map(|beta| ActivationSpec::Simple { beta }),
        (1u32..5, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(theta, frac, rho)| {
            ActivationSpec::NoisyThreshold {
                theta,
                q: frac * rho,
                rho,
            }
        }),
        (1.0..6.0f64, 0.05..3.0f64)
            .prop_map(|(theta, sigma)| ActivationSpec::Probit { theta, sigma }),
        (1.0..6.0f64, 0.05..3.0f64)
            .prop_map(|(theta, sigma)| ActivationSpec::Logit { theta, sigma }),
        (0.01..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(theta_star, frac, rho)| {
            ActivationSpec::FractionalThreshold {
                theta_star,
                q: frac * rho,
                rho,
            }
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn activation_is_a_monotone_probability(spec in arb_activation(), degree in 0u32..30) {
        let mut prev = 0.0f64;
        for x in 0..=degree {
            let p = activation_probability(&spec, x, degree).unwrap();
            prop_assert!((0.0..=1.0).contains(&p), "p = {p} for x = {x}");
            prop_assert!(p >= prev - 1e-12, "not monotone at x = {x}: {prev} -> {p}");
            prev = p;
        }
    }

    #[test]
    fn erdos_renyi_draws_are_valid_and_reproducible(
        n in 2usize..120,
        p in 0.0..=1.0f64,
        seed in any::<u64>(),
    ) {
        let g1 = erdos_renyi(n, p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        g1.check_invariants().unwrap();
        let g2 = erdos_renyi(n, p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(g1.edges(), g2.edges());
    }

    #[test]
    fn cycle_power_is_2k_regular(n in 3usize..150, k in 1usize..6) {
        prop_assume!(n > 2 * k);
        let g = cycle_power(n, k).unwrap();
        g.check_invariants().unwrap();
        for u in 0..n as NodeId {
            prop_assert_eq!(g.degree(u), 2 * k);
        }
        prop_assert_eq!(g.count_label(EdgeLabel::Cycle1), n);
        prop_assert_eq!(g.count_label(EdgeLabel::CycleExtra), n * (k - 1));
    }

    #[test]
    fn eta_rewired_is_valid_and_keeps_the_cycle(
        n in 5usize..200,
        eta in 0.0..500.0f64,
        seed in any::<u64>(),
    ) {
        let g = eta_rewired_c2(n, eta, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        g.check_invariants().unwrap();
        prop_assert_eq!(g.count_label(EdgeLabel::Cycle1), n);
    }

    #[test]
    fn union_contains_both_edge_sets(seed in any::<u64>(), n in 5usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = erdos_renyi(n, 0.15, &mut rng).unwrap();
        let b = cycle_power(n, 2).unwrap();
        let u = a.union(&b).unwrap();
        u.check_invariants().unwrap();
        for e in a.edges().iter().chain(b.edges()) {
            prop_assert!(u.has_edge(e.u, e.v));
        }
    }

    #[test]
    fn interventions_preserve_bookkeeping(
        seed in any::<u64>(),
        n in 20usize..80,
        fraction in 0.0..0.4f64,
    ) {
        let g = cycle_power(n, 2).unwrap();
        let m = g.edge_count();
        let budget = (fraction * m as f64 + 0.5).floor() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let rewired = rewire(&g, fraction, &mut rng).unwrap();
        rewired.check_invariants().unwrap();
        prop_assert_eq!(rewired.edge_count(), m);
        prop_assert_eq!(rewired.node_count(), n);

        let grown = add_random(&g, fraction, &mut rng).unwrap();
        grown.check_invariants().unwrap();
        prop_assert_eq!(grown.edge_count(), m + budget);

        let triad = add_triad_closing(&g, fraction, TriadWeighting::Batch, &mut rng).unwrap();
        triad.graph.check_invariants().unwrap();
        prop_assert_eq!(triad.graph.edge_count(), m + budget);
    }

    #[test]
    fn deterministic_runs_reach_exactly_the_closure(
        seed in any::<u64>(),
        n in 4usize..16,
        p in 0.1..0.6f64,
        theta in 2u32..4,
    ) {
        let g = erdos_renyi(n, p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assume!(g.edge_count() > 0);
        let seeds = {
            let e = g.edges()[0];
            vec![e.u, e.v]
        };
        let closure = deterministic_closure(&g, &seeds, theta).unwrap();
        let spec = ActivationSpec::NoisyThreshold { theta, q: 0.0, rho: 1.0 };
        let (outcome, state) = run_with_state(
            &g,
            &spec,
            &DynamicsConfig::default(),
            &seeds,
            &mut ChaCha8Rng::seed_from_u64(seed ^ 0xABCD),
        )
        .unwrap();
        prop_assert_eq!(oracle::mask_of(&state.infected_nodes()), closure.final_set);
        if closure.final_set == (1u32 << n) - 1 {
            prop_assert_eq!(outcome.spread_time, Some(closure.rounds));
        } else {
            prop_assert!(outcome.censored);
        }
    }

    #[test]
    fn infected_fraction_never_decreases(
        seed in any::<u64>(),
        gamma in 0.0..=1.0f64,
        spec in arb_activation(),
    ) {
        let g = cycle_power(30, 2).unwrap();
        let config = DynamicsConfig {
            gamma,
            record_trajectory: true,
            max_rounds: Some(80),
            ..DynamicsConfig::default()
        };
        let outcome = run(&g, &spec, &config, &[0, 1], &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let trajectory = outcome.trajectory.unwrap();
        for w in trajectory.windows(2) {
            prop_assert!(w[1].infected >= w[0].infected);
        }
    }

    #[test]
    fn replicates_are_independent_of_execution_order(seed in any::<u64>()) {
        // Re-running single replicates out of order reproduces the batch.
        let cond = Condition {
            id: "order".into(),
            axes: AxisValues::default(),
            source: GraphSource::CycleUnionEr {
                n: 80,
                k: 1,
                p: EdgeProbability::Scaled(1.5),
            },
            intervention: None,
            activation: ActivationSpec::NoisyThreshold { theta: 2, q: 0.2, rho: 1.0 },
            dynamics: DynamicsConfig::default(),
            seed_rule: SeedRule::Cycle1Edge,
            fresh_graph: true,
        };
        let batch = run_condition(&cond, seed, 3, 8).unwrap();
        let again = run_condition(&cond, seed, 3, 8).unwrap();
        prop_assert_eq!(&batch, &again);
    }
}

#[test]
fn coupled_eta_path_is_monotone_across_many_levels() {
    let n = 80;
    for seed in [1u64, 99, 12345] {
        let mut prev_extra = n;
        let mut prev_random = 0usize;
        for step in 0..12 {
            let eta = step as f64 * 12.0;
            let g = eta_rewired_c2_coupled(n, eta, seed).unwrap();
            let extra = g.count_label(EdgeLabel::CycleExtra);
            let random = g.count_label(EdgeLabel::Random);
            assert!(extra <= prev_extra, "removals not monotone at eta={eta}");
            assert!(random >= prev_random, "additions not monotone at eta={eta}");
            prev_extra = extra;
            prev_random = random;
        }
    }
}

#[test]
fn derived_streams_differ_between_replicates() {
    use rand::RngCore;
    let mut a = derive_rng(5, 0, 0, Stream::Dynamics);
    let mut b = derive_rng(5, 0, 1, Stream::Dynamics);
    let (mut xa, mut xb) = ([0u8; 16], [0u8; 16]);
    a.fill_bytes(&mut xa);
    b.fill_bytes(&mut xb);
    assert_ne!(xa, xb);
}
