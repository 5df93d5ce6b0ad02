use iss_certify::*;
use proptest::prelude::*;

fn boundary_side() -> impl Strategy<Value = (f64, f64)> {
    prop_oneof![
        (0.2f64..3.0).prop_map(|alpha| (alpha, 0.0)),
        (0.0f64..3.0, 0.2f64..3.0),
    ]
}

fn nonlinearity() -> impl Strategy<Value = Nonlinearity> {
    prop_oneof![
        Just(Nonlinearity::Zero),
        (0.0f64..2.0, 0.0f64..2.0).prop_map(|(c1, c3)| Nonlinearity::PolynomialOdd {
            coeffs: vec![0.0, c1, 0.0, c3],
        }),
        (0.1f64..2.0, 0.1f64..2.0).prop_map(|(c2, c3)| Nonlinearity::CubicQuintic { c2, c3 }),
    ]
}

/// Specs that pass the structural validation.
fn admissible_spec() -> impl Strategy<Value = ProblemSpec> {
    (
        0.2f64..3.0,
        -3.0f64..3.0,
        -1.0f64..4.0,
        boundary_side(),
        boundary_side(),
        nonlinearity(),
    )
        .prop_map(|(a, b, c, left, right, h)| {
            let mut spec = ProblemSpec::linear(a, b, c, [left, right]);
            spec.h = h;
            spec
        })
        .prop_filter("structural conditions", |s| validate_structure(s).passed)
}

fn log_grid() -> Vec<f64> {
    (0..=180).map(|i| 10f64.powf(-6.0 + i as f64 / 20.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn default_split_is_feasible(spec in admissible_spec()) {
        let t = transform_spec(&spec).unwrap();
        let p = choose_split_params(&t, None);
        // the only admissible failure is the measure-zero edge -alpha/beta == a
        match p {
            Ok(p) => {
                prop_assert!(p.lambda > 0.0);
                prop_assert!(split_feasibility_report(&t, &p).passed);
            }
            Err(Error::Infeasible(msg)) => prop_assert!(msg.contains("no room"), "{}", msg),
            Err(e) => prop_assert!(false, "unexpected {}", e),
        }
    }

    #[test]
    fn gains_are_class_k(spec in admissible_spec()) {
        let Ok(cert) = certify(&spec, None) else { return Ok(()); };
        let g = &cert.gains;
        for k in [&g.gamma, &g.gamma0, &g.gamma1] {
            prop_assert_eq!(k.value(0.0), 0.0);
            let values: Vec<f64> = log_grid().iter().map(|&s| k.value(s)).collect();
            for w in values.windows(2) {
                prop_assert!(w[1] > w[0], "{:?} not increasing: {} -> {}", k, w[0], w[1]);
            }
        }
    }

    #[test]
    fn zero_nonlinearity_has_no_nonlinear_part(spec in admissible_spec()) {
        let mut spec = spec;
        spec.h = Nonlinearity::Zero;
        let Ok(cert) = certify(&spec, None) else { return Ok(()); };
        for k in [&cert.gains.gamma, &cert.gains.gamma0, &cert.gains.gamma1] {
            prop_assert_eq!(k.q, 0.0);
        }
    }

    #[test]
    fn reaction_diffusion_shape_reduces_to_closed_form(
        a in 0.2f64..3.0, b in -3.0f64..3.0, c in -0.5f64..3.0, extra in 0.01f64..3.0,
    ) {
        let k1 = b.abs() / (2.0 * a) + extra;
        let spec = presets::reaction_diffusion(a, b, c, k1);
        prop_assume!(validate_structure(&spec).passed);
        let cert = certify(&spec, None).unwrap();
        // the closed form additionally needs 2(K1 + b/2a) > eps/2
        prop_assume!(2.0 * (k1 + b / (2.0 * a)) - cert.params.eps / 2.0 > 0.0);
        let cf = closed_form_gains_reaction_diffusion(a, b, c, k1, cert.params.eps).unwrap();
        prop_assert!(cert.gains.max_relative_deviation(&cf) <= 1e-12);
    }

    #[test]
    fn iss_bound_is_monotone(
        spec in admissible_spec(),
        base in prop::array::uniform5(0.0f64..5.0),
        bump in prop::array::uniform5(0.0f64..2.0),
    ) {
        let Ok(cert) = certify(&spec, None) else { return Ok(()); };
        let g = &cert.gains;
        let at = |v: [f64; 5]| evaluate_iss_bound(g, v[0], v[1], v[2], v[3], v[4]);
        let b0 = at(base);
        for i in 0..4 {
            let mut up = base;
            up[i] += bump[i];
            prop_assert!(at(up) >= b0);
        }
        let mut later = base;
        later[4] += bump[4];
        prop_assert!(at(later) <= b0);
    }

    #[test]
    fn bound_isolates_each_gain(spec in admissible_spec(), s in 0.0f64..10.0, t in 0.0f64..10.0) {
        let Ok(cert) = certify(&spec, None) else { return Ok(()); };
        let g = &cert.gains;
        prop_assert_eq!(evaluate_iss_bound(g, 0.0, s, 0.0, 0.0, t), g.gamma.value(s));
        prop_assert_eq!(evaluate_iss_bound(g, 0.0, 0.0, s, 0.0, t), g.gamma0.value(s));
        prop_assert_eq!(evaluate_iss_bound(g, 0.0, 0.0, 0.0, s, t), g.gamma1.value(s));
    }
}

#[test]
fn max_estimate_is_horizon_independent() {
    let s = presets::reaction_diffusion(1.0, 0.5, 1.0, 1.0);
    let t = transform_spec(&s).unwrap();
    let p = choose_split_params(&t, None).unwrap();
    let (f, d0, d1) = (Signal::constant(0.7), Signal::constant(-2.0), Signal::constant(1.5));
    let at = |horizon: f64| {
        let sup_f = sup_norm_signal(&f, horizon, 100);
        let sup_0 = sup_norm_signal(&t.tilde_signal(0, &d0), horizon, 100);
        let sup_1 = sup_norm_signal(&t.tilde_signal(1, &d1), horizon, 100);
        max_estimate_bound(&t, &p, sup_f, sup_0, sup_1).unwrap().value
    };
    assert_eq!(at(3.0).to_bits(), at(6.0).to_bits());
}

#[test]
fn overrides_trade_rate_against_gain() {
    let s = presets::ginzburg_landau(1.0, -1.0, 2.0, 1.0, 1.0);
    let base = certify(&s, None).unwrap();
    let smaller = SplitOverrides {
        eps: Some(base.params.eps / 4.0),
        ..Default::default()
    };
    let tuned = certify(&s, Some(&smaller)).unwrap();
    assert!(tuned.params.lambda > base.params.lambda);
    assert!(tuned.gains.gamma.q > base.gains.gamma.q);
}
