use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use wwlab_core::dynsys::QuadratureGrid;
use wwlab_core::nil::{
    group_multiply, group_power_closed_form, leibman_average, reduce_to_fundamental_domain,
    weyl_sum_average, GroupElement, HeisenbergPoint, PolynomialSequenceSpec,
};
use wwlab_core::{integrate_observable, Complex64, Observable, StatePoint, SystemSpec};

fn ladder() -> Vec<usize> {
    (10..=16).map(|k| 1usize << k).collect()
}

fn random_element(rng: &mut ChaCha8Rng, r: f64) -> GroupElement {
    GroupElement::new(
        rng.gen_range(-r..r),
        rng.gen_range(-r..r),
        rng.gen_range(-r..r),
    )
}

#[test]
fn group_law_is_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let (u, v, w) = (
            random_element(&mut rng, 10.0),
            random_element(&mut rng, 10.0),
            random_element(&mut rng, 10.0),
        );
        let l = group_multiply(&group_multiply(&u, &v), &w);
        let r = group_multiply(&u, &group_multiply(&v, &w));
        assert!(
            (l.x - r.x).abs() <= 1e-12 && (l.y - r.y).abs() <= 1e-12 && (l.z - r.z).abs() <= 1e-12
        );
    }
}

#[test]
fn reduction_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let p = reduce_to_fundamental_domain(&random_element(&mut rng, 10.0));
        assert!([p.x, p.y, p.z].iter().all(|c| (0.0..1.0).contains(c)));
        assert_eq!(reduce_to_fundamental_domain(&p.as_element()), p);
    }
}

#[test]
fn closed_form_power_matches_iteration() {
    let g = GroupElement::new(0.3819, 0.7073, 0.125);
    let mut acc = GroupElement::IDENTITY;
    for _ in 0..10_000 {
        acc = group_multiply(&acc, &g);
    }
    let c = group_power_closed_form(&g, 10_000);
    for (i, c) in [(acc.x, c.x), (acc.y, c.y), (acc.z, c.z)] {
        assert!((i - c).abs() <= 1e-9 * c.abs(), "{i} vs {c}");
    }
}

#[test]
fn translations_preserve_haar_measure() {
    let sys = SystemSpec::heisenberg(0.1, 0.2, 0.3).unwrap();
    let grid = QuadratureGrid::default_for(&sys);
    let f: Observable = "cos:1*sin:2@1+0.5*cos:3@1+sin:1".parse().unwrap();
    let bound = f.bind(&sys).unwrap();
    let reference = integrate_observable(&sys, &f, &grid).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..8 {
        let g = random_element(&mut rng, 3.0);
        let total: Complex64 = grid
            .points(&sys)
            .iter()
            .map(|p| match p {
                StatePoint::Heisenberg(h) => {
                    let moved = reduce_to_fundamental_domain(&group_multiply(&g, &h.as_element()));
                    bound.eval(&StatePoint::Heisenberg(moved)).unwrap()
                }
                _ => unreachable!(),
            })
            .sum();
        assert!((total * grid.weight(&sys) - reference).norm() <= 1e-8);
    }
}

#[test]
fn reference_sequence_gaps_shrink() {
    let f: Observable = "cos:1*cos:1@1+-1*sin:1*sin:1@1".parse().unwrap();
    let s = leibman_average(
        &PolynomialSequenceSpec::reference(),
        &HeisenbergPoint::new(0.0, 0.0, 0.0),
        &f,
        &ladder(),
    )
    .unwrap();
    assert!(s.gaps_non_increasing(), "{:?}", s.gaps);
    assert!(*s.gaps.last().unwrap() <= 0.02);
    let long = leibman_average(
        &PolynomialSequenceSpec::reference(),
        &HeisenbergPoint::new(0.0, 0.0, 0.0),
        &f,
        &[1 << 18],
    )
    .unwrap();
    assert!((long.averages[0] - s.averages.last().unwrap()).norm() <= 0.02);
}

#[test]
fn character_gaps_follow_the_rotation_closed_form() {
    // On x + y the sequence is a rotation by beta, so
    // |A_{2N} - A_N| = 2 sin^2(pi N beta) / (N |e(beta) - 1|).
    let spec = PolynomialSequenceSpec::reference();
    let beta = spec.a as f64 * (spec.g1.x + spec.g1.y)
        + spec.b as f64 * (spec.g2.x + spec.g2.y)
        + spec.g3.x
        + spec.g3.y;
    let f: Observable = "char:1*char:1@1".parse().unwrap();
    let x0 = HeisenbergPoint::new(0.25, 0.5, 0.0);
    let s = leibman_average(&spec, &x0, &f, &ladder()).unwrap();
    let denom = (Complex64::from_polar(1.0, TAU * beta) - 1.0).norm();
    for (&n, gap) in s.ladder.iter().zip(&s.gaps) {
        let closed = 2.0
            * (std::f64::consts::PI * (n as f64 * beta).rem_euclid(1.0))
                .sin()
                .powi(2)
            / (n as f64 * denom);
        assert!((gap - closed).abs() <= 1e-9, "N = {n}: {gap} vs {closed}");
    }
}

#[test]
fn weyl_sums() {
    let theta = 2f64.sqrt() - 1.0;
    let w = weyl_sum_average(theta, 0.0, 0.0, 1 << 16).unwrap();
    let w4 = weyl_sum_average(theta, 0.0, 0.0, 1 << 18).unwrap();
    assert!(w.norm() <= 0.05 && w4.norm() <= w.norm().max(0.05));
    assert!((weyl_sum_average(0.5, 0.5, 0.0, 1000).unwrap() - 1.0).norm() <= 1e-12);
    assert!(
        (weyl_sum_average(0.0, 0.0, 0.3, 7).unwrap() - Complex64::from_polar(1.0, TAU * 0.3))
            .norm()
            <= 1e-12
    );
}
