use dmc_capacity::infogeo::{e_project_to_m, e_projection_objective, m_project_to_e};
use dmc_capacity::prob::{kl_divergence, kl_divergence_slices, log_sum_exp, mutual_information};
use dmc_capacity::verify::{certified_bracket, DEFAULT_SUPPORT_THRESHOLD};
use dmc_capacity::*;
use proptest::prelude::*;

fn normalize(w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..1.0, n).prop_map(normalize)
}

fn dist(n: usize) -> impl Strategy<Value = Distribution> {
    weights(n).prop_map(|w| Distribution::new(w).unwrap())
}

fn channel(n: usize, m: usize) -> impl Strategy<Value = Channel> {
    prop::collection::vec(weights(m), n).prop_map(|rows| Channel::from_rows(&rows).unwrap())
}

fn sized_channel(max: usize) -> impl Strategy<Value = Channel> {
    (2..=max, 2..=max).prop_flat_map(|(n, m)| channel(n, m))
}

/// A channel together with an interior input and an output distribution.
fn triple(max: usize) -> impl Strategy<Value = (Channel, Distribution, Distribution)> {
    (2..=max, 2..=max).prop_flat_map(|(n, m)| (channel(n, m), dist(n), dist(m)))
}

fn solve(ch: &Channel) -> CapacityResult {
    let opts = SolveOptions {
        tol: 1e-12,
        max_iters: 1_000_000,
        initial: None,
    };
    solve_arimoto(ch, &opts).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kl_is_non_negative_and_zero_on_itself(
        (p, q) in (2usize..=16).prop_flat_map(|n| (dist(n), dist(n)))
    ) {
        prop_assert!(kl_divergence(&p, &q).unwrap() >= 0.0);
        prop_assert!(kl_divergence(&p, &p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn log_sum_exp_is_shift_invariant(
        v in prop::collection::vec(-50.0f64..50.0, 1..20),
        shift in -500.0f64..500.0,
    ) {
        let shifted: Vec<f64> = v.iter().map(|x| x + shift).collect();
        prop_assert!((log_sum_exp(&shifted) - log_sum_exp(&v) - shift).abs() < 1e-9);
    }

    #[test]
    fn mutual_information_is_distance_to_product_of_marginals(
        w in (2usize..=6, 2usize..=6).prop_flat_map(|(n, m)| (Just(n), Just(m), weights(n * m)))
    ) {
        let (n, m, w) = w;
        let p = JointDistribution::new(n, m, w).unwrap();
        let proj = m_project_to_e(&p);
        let d = kl_divergence_slices(p.flatten(), proj.to_joint().flatten()).unwrap();
        prop_assert!((mutual_information(&p) - d).abs() < 1e-12);
        // the projection factors are exactly the marginals
        let (q, r) = p.marginals();
        prop_assert_eq!(proj.input_factor, q);
        prop_assert_eq!(proj.output_factor, r);
    }

    #[test]
    fn channel_joint_recovers_input_and_output(
        (ch, q, _) in triple(8)
    ) {
        let (qm, rm) = ch.joint(&q).unwrap().marginals();
        prop_assert!(qm.max_abs_diff(&q) < 1e-14);
        prop_assert!(rm.max_abs_diff(&ch.output_marginal(&q).unwrap()) < 1e-14);
    }

    #[test]
    fn channel_json_round_trips(ch in sized_channel(6)) {
        let text = ch.to_json();
        let back = load_channel(text.as_bytes(), ChannelFormat::Json).unwrap();
        prop_assert_eq!(back, ch);
    }

    #[test]
    fn e_projection_beats_perturbations(
        ((ch, q, r), dir) in triple(5).prop_flat_map(|t| {
            let n = t.0.inputs();
            (Just(t), prop::collection::vec(-1.0f64..1.0, n))
        })
    ) {
        let e = ProductPoint::new(q, r);
        let q_hat = e_project_to_m(&e, &ch).unwrap();
        let best = e_projection_objective(&q_hat, &e, &ch).unwrap();
        let logits: Vec<f64> = q_hat.weights().iter().zip(&dir).map(|(w, d)| w.ln() + 0.05 * d).collect();
        let other = Distribution::from_log_weights(&logits).unwrap();
        prop_assert!(e_projection_objective(&other, &e, &ch).unwrap() >= best - 1e-12);
    }

    #[test]
    fn arimoto_step_increases_mutual_information((ch, q, _) in triple(10)) {
        let next = arimoto_step(&q, &ch).unwrap();
        let before = mutual_information(&ch.joint(&q).unwrap());
        let after = mutual_information(&ch.joint(&next).unwrap());
        prop_assert!(after >= before - 1e-12);
        let (lower, upper) = capacity_bracket(&q, &ch).unwrap();
        prop_assert!(lower <= upper);
        prop_assert!((lower - before).abs() < 1e-12);
    }

    #[test]
    fn backward_member_stays_in_e_t((ch, q_t, r) in triple(8)) {
        let member = backward_e_member(&q_t, &r, &ch).unwrap();
        let back = e_project_to_m(&member.product(), &ch).unwrap();
        prop_assert!(back.max_abs_diff(&q_t) < 1e-12);
        let p_t = ch.joint(&q_t).unwrap();
        let d = kl_divergence_slices(p_t.flatten(), member.product().to_joint().flatten()).unwrap();
        prop_assert!((d - member.log_phi).abs() < 1e-12);
        prop_assert!(member.log_phi >= 0.0);
    }

    #[test]
    fn pythagorean_relation_for_any_point_of_m(
        ((ch, q_t, r), q_other) in triple(6).prop_flat_map(|t| {
            let n = t.0.inputs();
            (Just(t), dist(n))
        })
    ) {
        // D(p'||q⊗r) = D(p'||p_t) + D(p_t||q⊗r) for p' in M and q⊗r in E_t
        let member = backward_e_member(&q_t, &r, &ch).unwrap();
        let target = member.product().to_joint();
        let p_t = ch.joint(&q_t).unwrap();
        let p_other = ch.joint(&q_other).unwrap();
        let lhs = kl_divergence_slices(p_other.flatten(), target.flatten()).unwrap();
        let rhs = kl_divergence_slices(p_other.flatten(), p_t.flatten()).unwrap() + member.log_phi;
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn approximate_m_step_is_arimoto((ch, q, _) in triple(8)) {
        let a = approximate_m_step(&q, &ch).unwrap();
        let b = arimoto_step(&q, &ch).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn mixture_stays_in_family(
        ((ch, q_t, r1), r2, t) in triple(6).prop_flat_map(|t| {
            let m = t.0.outputs();
            (Just(t), dist(m), 0.0f64..=1.0)
        })
    ) {
        let check = geometric_mixture_check(&q_t, &r1, &r2, t, &ch).unwrap();
        prop_assert!(check.max_deviation <= 1e-10);
        prop_assert!(check.normalizer_deviation <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn converged_optimum_is_a_circumcenter(ch in sized_channel(6)) {
        let res = solve(&ch);
        let rep = circumcenter_check(&res.optimal_input, &ch, DEFAULT_SUPPORT_THRESHOLD, 1e-6).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
        // and conversely: equal divergences certify the capacity
        if let Some(c) = converse_check(&ch, &res.optimal_input, 1e-6).unwrap() {
            prop_assert!(c >= res.lower - 1e-6 && c <= res.upper + 1e-6);
        }
    }

    #[test]
    fn two_input_capacity_matches_grid_search(ch in (2usize..=5).prop_flat_map(|m| channel(2, m))) {
        let res = solve(&ch);
        let (grid, argmax) = brute_force_capacity(&ch, 1e-4).unwrap();
        prop_assert!(grid <= res.upper + 1e-12);
        let (_, grid_upper) = certified_bracket(&argmax, &ch).unwrap();
        prop_assert!(res.lower <= grid_upper + 1e-12);
        prop_assert!(res.capacity - grid < 1e-6);
    }

    #[test]
    fn both_algorithms_agree(ch in sized_channel(5)) {
        let opts = SolveOptions { tol: 1e-10, max_iters: 1_000_000, initial: None };
        let (a, _) = solve_arimoto(&ch, &opts).unwrap();
        let em = BackwardEmOptions { solve: opts, m_step: MStepOptions::default() };
        let (b, trace) = solve_backward_em(&ch, &em).unwrap();
        prop_assert!((a.capacity - b.capacity).abs() <= 2e-10);
        for w in trace.records.windows(2) {
            prop_assert!(w[1].mutual_info >= w[0].mutual_info - 1e-12);
        }
    }
}
