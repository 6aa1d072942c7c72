use num_traits::{One, Zero};
use proptest::prelude::*;

use infoelicit::algebra::{rank, ratio, Matrix};
use infoelicit::elicit::{copies_needed, indistinguishable, is_coarser, maximal_partition, unbiased_weights, verify_unbiased, Elicitability, StatisticFamily};
use infoelicit::grid::belief_grid;
use infoelicit::mechanisms::{level_set_decomposition, mean_mechanism, payoff_gap, pushforward, quadratic_mechanism, table_mechanism, Report, ScoreForm};
use infoelicit::orders::{blackwell_dominates, elicitation_dominates};
use infoelicit::{F64Experiment, Rational, RationalExperiment};

fn experiment_from(rows: Vec<Vec<u8>>) -> RationalExperiment {
    let rows: Vec<Vec<Rational>> = rows
        .into_iter()
        .map(|r| {
            let total: i64 = r.iter().map(|&x| x as i64).sum();
            if total == 0 {
                let mut unit = vec![Rational::zero(); r.len()];
                unit[0] = Rational::one();
                unit
            } else {
                r.iter().map(|&x| ratio(x as i64, total)).collect()
            }
        })
        .collect();
    RationalExperiment::from_kernel(Matrix::from_rows(rows).unwrap()).unwrap()
}

fn experiment(max_params: usize, max_outcomes: usize) -> impl Strategy<Value = RationalExperiment> {
    (2..=max_params, 1..=max_outcomes).prop_flat_map(|(n, m)| {
        prop::collection::vec(prop::collection::vec(0u8..4, m), n).prop_map(experiment_from)
    })
}

fn with_statistic(max: usize) -> impl Strategy<Value = (RationalExperiment, Vec<Rational>)> {
    experiment(max, max).prop_flat_map(|e| {
        let n = e.num_parameters();
        (Just(e), prop::collection::vec((-3i64..=3).prop_map(|v| ratio(v, 1)), n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn weights_exist_iff_statistic_is_coarser((e, g) in with_statistic(5)) {
        let family = StatisticFamily::unlabeled(e.parameters().to_vec(), vec![g.clone()]).unwrap();
        let coarser = is_coarser(&family, &maximal_partition(&e)).unwrap();
        match unbiased_weights(&e, &g).unwrap() {
            Elicitability::Elicitable { weights } => {
                prop_assert!(coarser);
                prop_assert!(verify_unbiased(&e, &weights, &g).is_ok());
            }
            Elicitability::NotElicitable { witness: (p, q) } => {
                prop_assert!(!coarser);
                prop_assert_eq!(e.mean_outcome_distribution(&p).unwrap(), e.mean_outcome_distribution(&q).unwrap());
                prop_assert_ne!(p.expectation(&g).unwrap(), q.expectation(&g).unwrap());
                prop_assert!(indistinguishable(&maximal_partition(&e), &p, &q).unwrap());
            }
        }
    }

    #[test]
    fn coarser_is_a_preorder((e, g) in with_statistic(4), h in prop::collection::vec(-2i64..=2, 4)) {
        let params = e.parameters().to_vec();
        let n = params.len();
        let single = StatisticFamily::unlabeled(params.clone(), vec![g.clone()]).unwrap();
        let h: Vec<Rational> = h[..n].iter().map(|&v| ratio(v, 1)).collect();
        let pair = StatisticFamily::unlabeled(params.clone(), vec![g.clone(), h]).unwrap();
        let full = maximal_partition(&e);
        prop_assert!(is_coarser(&single, &single).unwrap());
        prop_assert!(is_coarser(&single, &pair).unwrap());
        if is_coarser(&pair, &full).unwrap() {
            prop_assert!(is_coarser(&single, &full).unwrap());
        }
        let trivial = StatisticFamily::trivial(params);
        prop_assert!(is_coarser(&trivial, &single).unwrap());
    }

    #[test]
    fn quadratic_score_is_truthful(e in experiment(3, 3)) {
        let m = quadratic_mechanism(&e);
        let grid = belief_grid::<Rational>(e.num_parameters(), 3);
        for p in &grid {
            let truth = m.expected_payoff(p, &Report::Belief(p.clone())).unwrap();
            for q in &grid {
                prop_assert!(m.expected_payoff(p, &Report::Belief(q.clone())).unwrap() <= truth);
            }
        }
    }

    #[test]
    fn mean_score_is_truthful_for_elicitable_statistics((e, g) in with_statistic(3)) {
        if let Elicitability::Elicitable { weights } = unbiased_weights(&e, &g).unwrap() {
            let m = mean_mechanism(&e, g.clone(), weights, ScoreForm::Quadratic).unwrap();
            let grid = belief_grid::<Rational>(e.num_parameters(), 3);
            for p in &grid {
                let truth = m.expected_payoff(p, &Report::Belief(p.clone())).unwrap();
                for q in &grid {
                    prop_assert!(m.expected_payoff(p, &Report::Belief(q.clone())).unwrap() <= truth);
                }
            }
        }
    }

    #[test]
    fn level_sets_rebuild_the_payoff_vector(values in prop::collection::vec(0i64..=6, 1..6)) {
        let values: Vec<Rational> = values.into_iter().map(|v| ratio(v, 6)).collect();
        let eta = level_set_decomposition(&values).unwrap();
        prop_assert!(eta.iter().all(|w| *w >= Rational::zero()));
        prop_assert_eq!(eta.iter().cloned().fold(Rational::zero(), |a, b| a + b), Rational::one());
        for (z, v) in values.iter().enumerate() {
            let rebuilt = eta.iter().enumerate().filter(|(mask, _)| mask & (1 << z) != 0).fold(Rational::zero(), |a, (_, w)| a + w.clone());
            prop_assert_eq!(&rebuilt, v);
        }
    }

    #[test]
    fn pushforward_through_garbling_is_equivalent(e in experiment(3, 3), channel in experiment(3, 3)) {
        let channel = channel.kernel().clone();
        prop_assume!(channel.rows() == e.num_outcomes());
        let z = e.garble(&channel).unwrap();
        let bw = blackwell_dominates(&e, &z).unwrap();
        prop_assert!(bw.holds);
        let payoffs = Matrix::from_rows((0..2).map(|r| (0..z.num_outcomes()).map(|c| ratio(((r + 2 * c) % 3) as i64, 2)).collect()).collect()).unwrap();
        let psi = table_mechanism(&z, vec!["a".into(), "b".into()], payoffs).unwrap();
        let grid = belief_grid::<Rational>(e.num_parameters(), 3);
        let reports = [Report::Index(0), Report::Index(1)];
        for m in [bw.matrix().unwrap().clone(), channel] {
            let phi = pushforward(&psi, &m, &e).unwrap();
            prop_assert!(payoff_gap(&psi, &phi, &grid, &reports).unwrap().is_none());
        }
    }

    #[test]
    fn copies_needed_matches_explicit_powers(e in experiment(4, 3)) {
        let n = e.num_parameters();
        let found = copies_needed(&e);
        for c in 1..=3 {
            let full = rank(e.power(c).kernel()) == n;
            match found {
                Some(k) => prop_assert_eq!(full, c >= k),
                None => prop_assert!(!full),
            }
        }
    }

    #[test]
    fn float_answers_find_garblings(e in experiment(3, 3), channel in experiment(3, 3)) {
        let channel = channel.kernel().clone();
        prop_assume!(channel.rows() == e.num_outcomes());
        let z = e.garble(&channel).unwrap();
        let to_f64 = |x: &RationalExperiment| -> F64Experiment { x.cast(|v| num_traits::ToPrimitive::to_f64(v).unwrap()).unwrap() };
        // Garbled pairs are dominated exactly; the float LP must find that too.
        prop_assert!(blackwell_dominates(&e, &z).unwrap().holds);
        prop_assert!(blackwell_dominates(&to_f64(&e), &to_f64(&z)).unwrap().holds);
        prop_assert!(elicitation_dominates(&to_f64(&e), &to_f64(&z)).unwrap().holds);
    }
}
