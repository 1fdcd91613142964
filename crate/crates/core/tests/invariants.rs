use proptest::prelude::*;
use wwlab_core::defaults::ALPHA;
use wwlab_core::dynsys::QuadratureGrid;
use wwlab_core::inequalities::{cubes_bound_check, vdc_bound_check, ww_vdc_bound_check};
use wwlab_core::wwdr::wn_average;
use wwlab_core::{
    integrate_observable, transform_point, Complex64, Observable, Phase, StatePoint, SystemSpec,
    WeightedExponentialSum,
};

fn complex_vec(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (0.0f64..=1.0, 0.0f64..1.0)
            .prop_map(|(r, t)| Complex64::from_polar(r, std::f64::consts::TAU * t)),
        len,
    )
}

fn trig_observable() -> impl Strategy<Value = Observable> {
    prop::collection::vec((-6i64..=6, -1.0f64..1.0, -1.0f64..1.0), 1..5).prop_map(|terms| {
        let coeffs: Vec<(i64, Complex64)> = terms
            .into_iter()
            .map(|(k, r, i)| (k, Complex64::new(r, i)))
            .collect();
        Observable::trig_polynomial(0, &coeffs)
    })
}

fn systems() -> Vec<SystemSpec> {
    vec![
        SystemSpec::rotation(ALPHA).unwrap(),
        SystemSpec::skew_product(ALPHA).unwrap(),
        SystemSpec::doubling(),
        SystemSpec::cyclic_product(4, ALPHA).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transformations_preserve_the_measure(f in trig_observable(), power in 1i64..6) {
        for sys in systems() {
            let grid = QuadratureGrid::default_for(&sys);
            let b = f.bind(&sys).unwrap();
            let direct = integrate_observable(&sys, &f, &grid).unwrap();
            let pulled: Vec<Complex64> = grid
                .points(&sys)
                .iter()
                .map(|p| b.eval(&transform_point(&sys, p, power).unwrap()).unwrap())
                .collect();
            let pulled = pulled.iter().sum::<Complex64>() * grid.weight(&sys);
            prop_assert!((direct - pulled).norm() <= 1e-10, "{} {direct} {pulled}", sys.name());
        }
    }

    #[test]
    fn powers_compose(m in -1000i64..1000, n in -1000i64..1000, x in 0.0f64..1.0) {
        let sys = SystemSpec::skew_product(ALPHA).unwrap();
        let p = StatePoint::Torus(Phase::from_f64(x), Phase::from_f64(x * x));
        let once = transform_point(&sys, &p, m + n).unwrap();
        let twice = transform_point(&sys, &transform_point(&sys, &p, m).unwrap(), n).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn certificate_dominates_dense_grid(coeffs in complex_vec(1..40)) {
        let p = WeightedExponentialSum::new(coeffs).unwrap();
        let est = p.sup_modulus_certified(8).unwrap();
        let dense = p.grid_modulus(1 << 18).unwrap().into_iter().fold(0.0, f64::max);
        prop_assert!(dense <= est.certified_upper * (1.0 + 1e-12));
        prop_assert!(est.grid_max <= dense * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn sup_is_homogeneous(coeffs in complex_vec(1..64), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let c = Complex64::new(re, im);
        let p = WeightedExponentialSum::new(coeffs).unwrap();
        let (a, b) = (p.sup_modulus_certified(16).unwrap(), p.scaled(c).sup_modulus_certified(16).unwrap());
        prop_assert!((b.grid_max - c.norm() * a.grid_max).abs() <= 1e-12 * (1.0 + b.grid_max));
    }

    #[test]
    fn inequalities_hold(a in complex_vec(1..64), b in complex_vec(1..64), c in complex_vec(1..128), h in 1usize..80) {
        prop_assert!(vdc_bound_check(&a, h.min(a.len() - 1)).unwrap().holds);
        prop_assert!(ww_vdc_bound_check(&a, h.min(a.len()), 16).unwrap().holds);
        let n = a.len().min(b.len()).min(c.len().div_ceil(2));
        prop_assert!(cubes_bound_check(&a[..n], &b[..n], &c[..2 * n - 1], n).unwrap().holds);
    }

    #[test]
    fn frequency_is_periodic(t in -2.0f64..2.0, x in 0.0f64..1.0, n in 1usize..300) {
        let sys = SystemSpec::rotation(ALPHA).unwrap();
        let (f1, f2) = (Observable::cos(1), Observable::sin(2));
        let p = StatePoint::Circle(Phase::from_f64(x));
        let w0 = wn_average(&sys, &f1, &f2, 1, 2, &p, n, t).unwrap();
        let w1 = wn_average(&sys, &f1, &f2, 1, 2, &p, n, t + 1.0).unwrap();
        prop_assert!((w0 - w1).norm() <= 1e-12);
    }

    #[test]
    fn observable_grammar_round_trips(f in trig_observable()) {
        let text = f.to_string();
        let back: Observable = text.parse().unwrap();
        prop_assert_eq!(back.to_string(), text);
    }
}

#[test]
fn shifted_observable_integrates_like_the_original() {
    let sys = SystemSpec::rotation(ALPHA).unwrap();
    let grid = QuadratureGrid::default_for(&sys);
    let f: Observable = "cos:2*sin:1+0.5*cos:3".parse().unwrap();
    let a = integrate_observable(&sys, &f, &grid).unwrap();
    for h in [1, 5, 40] {
        let b = integrate_observable(&sys, &f.clone().shift(h), &grid).unwrap();
        assert!((a - b).norm() <= 1e-12);
    }
}
