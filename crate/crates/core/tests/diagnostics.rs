use graal::diagnostics::{check_demicontractive, ergodic_point, min_obtuse_product, psi_value, scaled_gap_ratio};
use graal::linalg::dist;
use graal::problems::{make_balls_cfp, make_logistic, make_nash, synthetic_logistic, GammaRule, NashScenario};
use graal::rng::RngStream;
use graal::solvers::{run, Method, RunOptions, StepsizeRule, StopRule, Target};

#[test]
fn averaged_ball_projections_are_demicontractive_around_the_origin() {
    let t = make_balls_cfp(15, 25, 4).unwrap();
    let origin = vec![0.0; 15];
    let mut rng = RngStream::new(1);
    let samples: Vec<_> = (0..200).map(|_| rng.normal(0.0, 30.0, 15).unwrap()).collect();
    assert!(check_demicontractive(&t, &origin, &samples).unwrap() <= 1e-6);
    assert!(min_obtuse_product(&t, &origin, &samples) >= -1e-6);
}

#[test]
fn demicontractive_check_needs_a_fixed_point() {
    let t = make_balls_cfp(5, 5, 2).unwrap();
    let far = vec![1e6; 5];
    assert!(check_demicontractive(&t, &far, &[vec![0.0; 5]]).is_err());
}

#[test]
fn ergodic_gap_decays_like_one_over_k_on_logistic_regression() {
    let data = synthetic_logistic(120, 30, 9).unwrap();
    let p = make_logistic(&data, GammaRule::Default).unwrap();
    let opts = RunOptions { record_energy: true, record_ergodic_energy: true, ..RunOptions::default() };
    let long =
        run(&Method::Fista { lambda: None }, Target::Vi(&p), &[0.0; 30], &opts, &StopRule::iterations(6000)).unwrap();
    let j_star = long.records.iter().filter_map(|r| r.energy).fold(f64::INFINITY, f64::min);
    let trace =
        run(&Method::Agraal(StepsizeRule::default()), Target::Vi(&p), &[0.0; 30], &opts, &StopRule::iterations(1500))
            .unwrap();
    let gaps: Vec<f64> = trace.records.iter().map(|r| r.ergodic_energy.unwrap() - j_star).collect();
    assert!(gaps.iter().all(|g| *g >= -1e-9));
    let ratio = scaled_gap_ratio(&gaps, 0.2).unwrap().expect("positive reference gap");
    assert!(ratio <= 2.0, "ratio {ratio}");

    let z = ergodic_point(&trace).unwrap();
    assert!((p.energy(&z).unwrap() - trace.records.last().unwrap().ergodic_energy.unwrap()).abs() <= 1e-9);
}

#[test]
fn psi_is_nonnegative_at_a_computed_equilibrium() {
    let p = make_nash(NashScenario::A, 6, 2).unwrap();
    let trace = run(
        &Method::Agraal(StepsizeRule::default()),
        Target::Vi(&p),
        &[1.0; 6],
        &RunOptions::default(),
        &StopRule::new(1e-10, 100_000),
    )
    .unwrap();
    assert!(trace.converged());
    let star = &trace.final_point;
    let mut rng = RngStream::new(3);
    for _ in 0..100 {
        let z = rng.uniform(0.1, 40.0, 6).unwrap();
        assert!(psi_value(&p, star, &z).unwrap() >= -1e-7 * (1.0 + dist(&z, star)));
    }
}
