use evoscheme_core::catalog;
use evoscheme_core::fitness::{exponential_pair, reference_ivp, AbFitness, Reference};
use evoscheme_core::scheme::continue_multistep;
use evoscheme_core::validation::{compare_schemes, estimate_order, sweep, Ladder, SweepScheme};

fn slope(s: &SweepScheme, r: &Reference, loc: f64) -> f64 {
    let sw = sweep(s, r, loc, &Ladder::default()).unwrap();
    estimate_order(&sw)
        .slope()
        .expect("enough points in window")
}

#[test]
fn forward_six_computed_bends() {
    let row = catalog::computed_forward()
        .into_iter()
        .find(|l| l.stated_order == 6)
        .unwrap();
    let sw = sweep(
        &SweepScheme::Stencil(row.scheme),
        &Reference::Function(exponential_pair()),
        0.0,
        &Ladder::default(),
    )
    .unwrap();
    let (argmin, _) = sw
        .errors
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .unwrap();
    assert!(
        argmin > 0 && argmin < sw.errors.len() - 1,
        "{:?}",
        sw.errors
    );
}

#[test]
fn evolved_four_stage_tracks_rk4() {
    let ivp = Reference::Ivp(reference_ivp());
    let c = compare_schemes(
        &[
            ("rk4".into(), SweepScheme::RungeKutta(catalog::rk4())),
            (
                "evolved4".into(),
                SweepScheme::RungeKutta(catalog::evolved_stage4()),
            ),
        ],
        &ivp,
        1.0,
        &Ladder::default(),
    )
    .unwrap();
    for col in &c.columns {
        assert!((col.fit.slope().unwrap() - 4.0).abs() < 0.4);
    }
    for (a, b) in c.columns[0].errors.iter().zip(&c.columns[1].errors) {
        if *a > 1e-12 {
            assert!((a - b).abs() / a < 0.05, "{a} {b}");
        }
    }
}

#[test]
fn order_five_tableaus() {
    let ivp = Reference::Ivp(reference_ivp());
    for t in [catalog::evolved_stage6(), catalog::butcher5()] {
        let s = slope(&SweepScheme::RungeKutta(t), &ivp, 1.0);
        assert!((s - 5.0).abs() <= 0.4, "{s}");
    }
}

#[test]
fn central_six_and_ab_four() {
    let exp = Reference::Function(exponential_pair());
    let c6 = catalog::theory_central()
        .into_iter()
        .find(|l| l.stated_order == 6)
        .unwrap();
    let s = slope(&SweepScheme::Stencil(c6.scheme), &exp, 0.0);
    assert!((5.6..=6.4).contains(&s), "{s}");
    let ab4 = SweepScheme::AdamsBashforth {
        scheme: catalog::adams_bashforth(4).unwrap(),
        starter: catalog::starter_for_order(4),
    };
    let s = slope(&ab4, &exp, 0.0);
    assert!((3.6..=4.4).contains(&s), "{s}");
}

#[test]
fn ab_training_with_exact_start_is_close() {
    // Replacing the starter's values with exact ones shifts the error sum by
    // no more than the starter's own local error contribution.
    let pair = exponential_pair();
    let n = 400;
    let k = 3;
    let scheme = catalog::adams_bashforth(k).unwrap();
    let starter = catalog::starter_for_order(k).unwrap();
    let fit = AbFitness::new(k, &pair, n, Some(&starter)).unwrap();
    let standard = fit.error_sum(scheme.betas());

    let h = fit.step();
    let (lo, _) = pair.domain;
    let start: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let t = lo + i as f64 * h;
            (t, (pair.f)(t))
        })
        .collect();
    let fp = pair.f_prime;
    let traj = continue_multistep(&scheme, |t, _| fp(t), &start, h, n - (k - 1));
    let mut exact_start = 0.0;
    for (t, y) in start.iter().skip(1).chain(traj.points.iter().skip(k)) {
        exact_start += (y - (pair.f)(*t)).abs();
    }

    let mut starter_local = 0.0;
    for i in 0..k - 1 {
        let t = lo + i as f64 * h;
        let y = starter.step(|t, _| fp(t), t, (pair.f)(t), h);
        starter_local += (y - (pair.f)(t + h)).abs();
    }
    assert!(
        (standard - exact_start).abs() <= n as f64 * starter_local + 1e-9,
        "{standard} {exact_start} {starter_local}"
    );
}
