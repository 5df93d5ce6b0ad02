use approx::assert_abs_diff_eq;
use iss_certify::*;
use proptest::prelude::*;

fn boundary_side() -> impl Strategy<Value = (f64, f64)> {
    prop_oneof![
        (0.2f64..3.0).prop_map(|alpha| (alpha, 0.0)),
        (0.0f64..3.0, 0.2f64..3.0),
    ]
}

fn certified_system() -> impl Strategy<Value = (TransformedSpec, SplitParams)> {
    (0.2f64..3.0, -3.0f64..3.0, -1.0f64..4.0, boundary_side(), boundary_side())
        .prop_map(|(a, b, c, left, right)| ProblemSpec::linear(a, b, c, [left, right]))
        .prop_filter_map("certifiable", |spec| {
            let cert = certify(&spec, None).ok()?;
            Some((cert.tspec, cert.params))
        })
}

/// `-A (1 - exp(-r t))`: nonpositive and zero at `t = 0`.
fn ramp(amplitude: f64, rate: f64) -> Signal {
    Signal::new(vec![
        SignalTerm::Constant {
            amplitude: -amplitude,
        },
        SignalTerm::DecayingExp { amplitude, rate },
    ])
}

fn exact_heat(shift: f64, c_tilde: f64, a: f64, x: f64, t: f64) -> f64 {
    let k = std::f64::consts::PI;
    (shift * x).exp() * (-(a * k * k + c_tilde) * t).exp() * (k * x).sin()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn nonpositive_inputs_keep_v_nonpositive(
        (tspec, params) in certified_system(),
        fa in 0.0f64..5.0,
        da in prop::array::uniform2(0.0f64..5.0),
        rate in 0.5f64..5.0,
        mode in 0u32..3,
    ) {
        let space = if mode == 0 {
            SpaceFactor::Polynomial { coeffs: vec![1.0] }
        } else {
            // m x (1 - x) >= 0 on [0, 1]
            SpaceFactor::Polynomial { coeffs: vec![0.0, mode as f64, -(mode as f64)] }
        };
        let f = Field {
            terms: vec![FieldTerm { space, time: ramp(fa, rate) }],
            weight_rate: 0.0,
        };
        let grid = Grid::new(21, 40, 1.0).unwrap();
        let v = simulate_v(
            &tspec, &params, &f, &ramp(da[0], rate), &ramp(da[1], rate),
            &grid, &SolverOptions::implicit_euler(),
        ).unwrap();
        let top = v.values.iter().flatten().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        prop_assert!(top <= 1e-10, "max v = {}", top);
    }

    #[test]
    fn l2_profile_is_nonnegative(amp in -5.0f64..5.0, mode in 1u32..4, b in -2.0f64..2.0) {
        let mut spec = ProblemSpec::linear(1.0, b, 1.0, [(1.0, 0.0), (1.0, 1.0)]);
        spec.phi = InitialProfile::sine_mode(amp, mode);
        let u = simulate_full(&spec, &Grid::new(21, 20, 0.5).unwrap(), &SolverOptions::default()).unwrap();
        for (_, norm) in l2_profile(&u) {
            prop_assert!(norm >= 0.0);
        }
    }
}

#[test]
fn advection_diffusion_converges_at_second_order() {
    let (a, b, c) = (1.0, 0.8, 0.5);
    let mut spec = ProblemSpec::linear(a, b, c, [(1.0, 0.0), (1.0, 0.0)]);
    spec.phi = InitialProfile::sine_mode(1.0, 1);
    spec.phi.weight_rate = b / (2.0 * a);
    let grids: Vec<Grid> = [21, 41, 81]
        .iter()
        .map(|&nx| Grid::new(nx, 4000, 0.1).unwrap())
        .collect();
    let study = convergence_study(&spec, &grids, &SolverOptions::default()).unwrap();
    for order in &study.orders {
        assert!(*order >= 1.9, "{:?}", study);
    }
}

#[test]
fn transformed_solution_matches_oracle() {
    let (a, b, c) = (0.5, -0.6, 0.2);
    let shift = b / (2.0 * a);
    let c_tilde = b * b / (4.0 * a) + c;
    let mut spec = ProblemSpec::linear(a, b, c, [(1.0, 0.0), (1.0, 0.0)]);
    spec.phi = InitialProfile::sine_mode(1.0, 1);
    spec.phi.weight_rate = shift;
    let grid = Grid::new(101, 1000, 0.2).unwrap();
    let u = simulate_full(&spec, &grid, &SolverOptions::default()).unwrap();
    let u_tilde = transform_trajectory(&u, a, b);
    let n = grid.nt;
    for j in 0..grid.nx {
        let x = grid.x(j);
        assert_abs_diff_eq!(u.row(n)[j], exact_heat(shift, c_tilde, a, x, grid.t_final), epsilon = 1e-4);
        assert_abs_diff_eq!(u_tilde.row(n)[j], exact_heat(0.0, c_tilde, a, x, grid.t_final), epsilon = 1e-4);
    }
}

#[test]
fn implicit_euler_matches_cn_to_first_order() {
    let mut spec = presets::ginzburg_landau(1.0, 0.5, 1.0, 1.0, 1.0);
    spec.phi = InitialProfile::sine_mode(0.5, 1);
    spec.d0 = Signal::constant(0.3);
    let grid = Grid::new(51, 2000, 1.0).unwrap();
    let cn = simulate_full(&spec, &grid, &SolverOptions::default()).unwrap();
    let ie = simulate_full(&spec, &grid, &SolverOptions::implicit_euler()).unwrap();
    for (x, y) in cn.row(grid.nt).iter().zip(ie.row(grid.nt)) {
        assert_abs_diff_eq!(x, y, epsilon = 5e-3);
    }
}

#[test]
fn margins_are_stable_under_refinement() {
    let suite = ScenarioSuite {
        base_spec: presets::ginzburg_landau(1.0, 1.0, 1.0, 1.0, 1.0),
        n_trials: 2,
        seed: 7,
        families: ScenarioFamilies::default(),
        overrides: SplitOverrides::default(),
    };
    let opts = SolverOptions::default();
    let coarse = run_scenario_suite(&suite, &Grid::new(101, 1000, 1.0).unwrap(), &opts, 1e-2, Some(0)).unwrap();
    let fine = run_scenario_suite(&suite, &Grid::new(201, 2000, 1.0).unwrap(), &opts, 1e-2, Some(0)).unwrap();
    for (c, f) in coarse.trials.iter().zip(&fine.trials) {
        let (c, f) = (&c.checks[0], &f.checks[0]);
        assert_eq!(c.name, "iss");
        assert!((c.worst_margin - f.worst_margin).abs() <= 1e-3, "{c:?} vs {f:?}");
    }
}
