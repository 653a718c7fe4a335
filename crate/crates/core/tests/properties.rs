use evoscheme_core::catalog;
use evoscheme_core::conditions::{condition_set, evaluate_conditions};
use evoscheme_core::de::{
    self, adapt_control_parameters, crossover, initialize_population, pick_donors, reinject,
    rng_from_seed, ControlAverages, DeSettings, FnFitness, F_MAX, F_MIN,
};
use evoscheme_core::fitness::{
    bell_pair, log_error, FdFitness, RkFitness, TrainingSet, ERROR_FLOOR,
};
use evoscheme_core::scheme::genome_len;
use evoscheme_core::validation::estimate_order_from;
use evoscheme_core::{ButcherTableau, StencilScheme, StencilTemplate};
use proptest::prelude::*;

fn genome(stage: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, genome_len(stage))
}

proptest! {
    #[test]
    fn tableau_round_trip((stage, g) in (1usize..=6).prop_flat_map(|s| (Just(s), genome(s)))) {
        let t = ButcherTableau::decode(&g, stage).unwrap();
        prop_assert_eq!(t.encode(), g);
        prop_assert_eq!(ButcherTableau::decode(&t.encode(), stage).unwrap(), t.clone());
        for i in 0..stage {
            let row: f64 = (0..i).map(|j| t.a(i, j)).sum();
            prop_assert_eq!(t.nodes()[i], row);
        }
    }

    #[test]
    fn stencil_linear_in_function(
        coeffs in prop::collection::vec(-3.0f64..3.0, 4),
        alpha in -5.0f64..5.0,
        x in -1.0f64..1.0,
        h in 0.001f64..0.2,
    ) {
        let s = StencilScheme::new(vec![-2, -1, 1, 2], coeffs).unwrap();
        let f = |t: f64| t.sin();
        let g = |t: f64| t * t * t;
        let lhs = s.apply(|t| alpha * f(t) + g(t), x, h);
        let rhs = alpha * s.apply(f, x, h) + s.apply(g, x, h);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn residual_sum_bounded_by_targets_at_zero(stage in 1usize..=6) {
        // the zero tableau leaves every condition at its full target
        let t = ButcherTableau::decode(&vec![0.0; genome_len(stage)], stage).unwrap();
        for order in 1..=evoscheme_core::conditions::max_order_for_stage(stage) {
            let r = evaluate_conditions(&t, order).unwrap().sum();
            let expect = condition_set(order).unwrap().target_sum();
            prop_assert!((r - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn rk_fitness_never_below_clamp(g in genome(3)) {
        let fit = RkFitness::new(3, 3).unwrap();
        use evoscheme_core::de::Fitness;
        prop_assert!(fit.evaluate(&g) >= log_error(ERROR_FLOOR));
    }

    #[test]
    fn fd_fitness_monotone_link(a in prop::collection::vec(-1.0f64..1.0, 2), b in prop::collection::vec(-1.0f64..1.0, 2)) {
        let template = StencilTemplate::central(2, false).unwrap();
        let pair = bell_pair();
        let training = TrainingSet::for_stencil(&pair, &template, 25).unwrap();
        let fit = FdFitness::new(&template, &pair, &training);
        use evoscheme_core::de::Fitness;
        let (ea, eb) = (fit.error_sum(&a), fit.error_sum(&b));
        let (fa, fb) = (fit.evaluate(&a), fit.evaluate(&b));
        if ea < eb { prop_assert!(fa <= fb); }
        if fa < fb { prop_assert!(ea < eb); }
    }

    #[test]
    fn fd_fitness_permutation_invariant(g in prop::collection::vec(-1.0f64..1.0, 2), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let template = StencilTemplate::central(2, false).unwrap();
        let pair = bell_pair();
        let training = TrainingSet::for_stencil(&pair, &template, 40).unwrap();
        let mut shuffled = training.clone();
        shuffled.points.shuffle(&mut rng_from_seed(seed));
        let a = FdFitness::new(&template, &pair, &training).error_sum(&g);
        let b = FdFitness::new(&template, &pair, &shuffled).error_sum(&g);
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn slope_recovers_power_law(c in 1e-6f64..1e3, p in 1u32..=8) {
        // ladder chosen so every point lands inside the fit window
        let hs: Vec<f64> = (0..4).map(|j| 0.5f64.powi(j)).collect();
        let scale = 1e-2 / c;
        let errs: Vec<(f64, f64)> = hs.iter().map(|&h| (h, c * scale * h.powi(p as i32) + 0.0)).collect();
        let errs: Vec<(f64, f64)> = errs.into_iter().filter(|&(_, e)| e >= 1e-13).collect();
        prop_assume!(errs.len() >= 2);
        let fit = estimate_order_from(&errs);
        prop_assert!((fit.slope().unwrap() - p as f64).abs() < 1e-10);
    }

    #[test]
    fn slope_invariant_under_scaling(k in 0.01f64..10.0, noise in prop::collection::vec(0.5f64..2.0, 5)) {
        let errs: Vec<(f64, f64)> = noise.iter().enumerate()
            .map(|(j, n)| { let h = 0.1 * 0.5f64.powi(j as i32); (h, 1e-3 * n * h * h) })
            .collect();
        let scaled: Vec<(f64, f64)> = errs.iter().map(|&(h, e)| (h, e * k)).collect();
        let a = estimate_order_from(&errs).slope().unwrap();
        let b = estimate_order_from(&scaled).slope().unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn crossover_keeps_a_mutant_entry(
        d in 1usize..8, cr in 0.0f64..=1.0, seed in any::<u64>(),
    ) {
        let mut rng = rng_from_seed(seed);
        let target = vec![0.0; d];
        let mutant = vec![1.0; d];
        let trial = crossover(&target, &mutant, cr, &mut rng).unwrap();
        prop_assert!(trial.contains(&1.0));
    }

    #[test]
    fn donors_pairwise_distinct(np in 4usize..40, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        for target in 0..np {
            let [a, b, c] = pick_donors(target, np, &mut rng);
            let all = [a, b, c, target];
            for i in 0..4 { for j in i + 1..4 { prop_assert_ne!(all[i], all[j]); } }
            prop_assert!(a < np && b < np && c < np);
        }
    }

    #[test]
    fn adaptation_truncates(
        succ in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 0..10),
        seed in any::<u64>(),
    ) {
        let settings = DeSettings { population_size: 20, ..DeSettings::default() };
        let mut rng = rng_from_seed(seed);
        let mut pop = initialize_population(&settings, 3, &mut rng).unwrap();
        let (cr, f): (Vec<f64>, Vec<f64>) = succ.into_iter().unzip();
        let prev = ControlAverages { cr: 0.25, f: 0.6 };
        adapt_control_parameters(&cr, &f, prev, 0.1, &mut pop, &mut rng);
        for ind in &pop {
            prop_assert!((0.0..=1.0).contains(&ind.cr));
            prop_assert!((F_MIN..=F_MAX).contains(&ind.f));
        }
    }

    #[test]
    fn reinjection_spares_best(np in 6usize..30, count in 0usize..6, best in 0usize..6, seed in any::<u64>()) {
        prop_assume!(count < np && best < np);
        let settings = DeSettings { population_size: np, ..DeSettings::default() };
        let mut rng = rng_from_seed(seed);
        let mut pop = initialize_population(&settings, 2, &mut rng).unwrap();
        for ind in pop.iter_mut() { ind.fitness = Some(1.0); }
        let before = pop.clone();
        reinject(&mut pop, count, best, ControlAverages { cr: 0.3, f: 0.5 }, &mut rng).unwrap();
        prop_assert_eq!(&pop[best], &before[best]);
        prop_assert_eq!(pop.iter().filter(|i| i.fitness.is_none()).count(), count);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn runs_are_deterministic_and_monotone(
        np in 4usize..30, d in 1usize..5, seed in any::<u64>(), stall in 1usize..20,
    ) {
        let settings = DeSettings {
            population_size: np,
            stall_generations: stall,
            max_generations: 60,
            reinjection_count: np.min(5) - 1,
            seed,
            ..DeSettings::default()
        };
        let fit = FnFitness(|x: &[f64]| x.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>());
        let a = de::run(&settings, d, &fit).unwrap();
        let b = de::run(&settings, d, &fit).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.generations_run <= settings.max_generations);
        let bests: Vec<f64> = a.best_per_generation().map(|(_, f)| f).collect();
        for w in bests.windows(2) { prop_assert!(w[1] <= w[0]); }
        prop_assert_eq!(a.best_fitness(), *bests.last().unwrap());
    }
}

#[test]
fn theory_padding_keeps_moments() {
    use evoscheme_core::conditions::taylor_moment_check;
    let t = StencilTemplate::central(4, true).unwrap();
    let padded = &catalog::theory_for_template(&t)[0];
    assert_eq!(padded.offsets(), t.offsets());
    for r in taylor_moment_check(padded, 4) {
        assert!(r < 1e-12);
    }
}

#[test]
fn superset_training_never_lowers_error() {
    let template = StencilTemplate::central(2, false).unwrap();
    let pair = bell_pair();
    let genome = [-0.45, 0.5];
    let mut last = 0.0;
    // n = 2^j + 1 evenly spaced sets nest inside one another
    for j in 1..7 {
        let n = (1 << j) + 1;
        let training = TrainingSet::for_stencil(&pair, &template, n).unwrap();
        let e = FdFitness::new(&template, &pair, &training).error_sum(&genome);
        assert!(e >= last, "n={n}: {e} < {last}");
        last = e;
    }
}
