use std::f64::consts::PI;

use iss_certify::*;
use proptest::prelude::*;

fn suite(base_spec: ProblemSpec, n_trials: usize, families: ScenarioFamilies) -> ScenarioSuite {
    ScenarioSuite {
        base_spec,
        n_trials,
        seed: 42,
        families,
        overrides: SplitOverrides::default(),
    }
}

#[test]
fn report_does_not_depend_on_thread_count() {
    let s = suite(presets::reaction_diffusion(1.0, 0.5, 1.0, 1.0), 6, ScenarioFamilies::default());
    let grid = Grid::new(41, 200, 1.0).unwrap();
    let opts = SolverOptions::default();
    let serial = run_scenario_suite(&s, &grid, &opts, 1e-2, Some(0)).unwrap();
    let pooled = run_scenario_suite(&s, &grid, &opts, 1e-2, Some(3)).unwrap();
    assert_eq!(serial, pooled);
    assert!(serial.passed);
}

#[test]
fn undisturbed_trials_decay_exponentially() {
    let s = suite(
        presets::ginzburg_landau(1.0, -0.5, 1.0, 1.0, 1.0),
        4,
        ScenarioFamilies::undisturbed(),
    );
    let grid = Grid::new(101, 1000, 1.0).unwrap();
    let report = run_scenario_suite(&s, &grid, &SolverOptions::default(), 1e-2, Some(0)).unwrap();
    assert!(report.passed);
    for trial in &report.trials {
        assert_eq!(trial.sups, [0.0; 3]);
        // only the decay check applies without disturbances
        assert_eq!(trial.checks.len(), 1);
        assert!(trial.phi_l2 > 0.0);
    }
}

#[test]
fn family_flags_do_not_shift_other_draws() {
    let base = presets::reaction_diffusion(1.0, 0.0, 1.0, 1.0);
    let all = suite(base.clone(), 5, ScenarioFamilies::default());
    let no_f = suite(
        base,
        5,
        ScenarioFamilies {
            include_f: false,
            ..Default::default()
        },
    );
    for i in 0..5 {
        let (x, y) = (all.scenario(i), no_f.scenario(i));
        assert!(y.f.is_zero());
        assert_eq!(x.d0, y.d0);
        assert_eq!(x.d1, y.d1);
        assert_eq!(x.phi, y.phi);
    }
}

#[test]
fn drawn_disturbances_vanish_at_start() {
    let s = suite(presets::reaction_diffusion(1.0, 0.0, 1.0, 1.0), 30, ScenarioFamilies::default());
    for i in 0..30 {
        let spec = s.scenario(i);
        assert!(spec.d0.value(0.0).abs() < 1e-12);
        assert!(spec.d1.value(0.0).abs() < 1e-12);
        assert!(spec.f.value(0.3, 0.0).abs() < 1e-12);
    }
}

#[test]
fn inflated_rate_is_caught() {
    let mut spec = presets::reaction_diffusion(1.0, 0.0, 1.0, 1.0);
    spec.phi = InitialProfile::sine_mode(1.0, 1);
    let grid = Grid::new(101, 1000, 1.0).unwrap();
    let u = simulate_full(&spec, &grid, &SolverOptions::default()).unwrap();
    let mut gains = certify(&spec, None).unwrap().gains;
    let phi_l2 = l2_profile(&u)[0].1;
    assert!(verify_iss(&u, &gains, phi_l2, [0.0; 3], 1e-2).passed);
    gains.lambda *= 20.0;
    let report = verify_iss(&u, &gains, phi_l2, [0.0; 3], 1e-2);
    assert!(!report.passed);
    assert!(report.worst_location.t > 0.0);
}

proptest! {
    #[test]
    fn trigonometric_polynomials_satisfy_agmon(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
        p in -1.0f64..1.0,
        len in 1e-2f64..2.0,
        frac in 0.0f64..=1.0,
    ) {
        let (q, point) = (p + len, p + frac * len);
        let n = 401;
        let values: Vec<f64> = (0..n)
            .map(|j| {
                let x = p + len * j as f64 / (n - 1) as f64;
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, (s, c))| {
                        let w = (k + 1) as f64 * PI * x;
                        s * w.sin() + c * w.cos()
                    })
                    .sum()
            })
            .collect();
        prop_assert!(agmon_check(&values, p, q, point).unwrap());
    }
}
