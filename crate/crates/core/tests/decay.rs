use wwlab_core::defaults::{ALPHA, BOUND_CONSTANT, OVERSAMPLING};
use wwlab_core::wwdr::{
    maxisom_bound_check, uniform_decay_experiment, z2_inequality_experiment, Z2Kind, Z2Params,
};
use wwlab_core::{AveragingScheme, Observable, SystemSpec};

const SEED: u64 = 7;
const LADDER: [usize; 3] = [1 << 10, 1 << 12, 1 << 14];

fn scheme(a: i64, b: i64) -> AveragingScheme {
    AveragingScheme::new(a, b, LADDER.to_vec()).unwrap()
}

fn medians(s: &wwlab_core::WWSeries) -> Vec<f64> {
    s.records.iter().map(|r| r.median_certified).collect()
}

#[test]
fn doubling_pair_decays() {
    let cos = Observable::cos(1);
    let s = uniform_decay_experiment(
        &SystemSpec::doubling(),
        &cos,
        &cos,
        &scheme(1, 2),
        32,
        SEED,
        OVERSAMPLING,
    )
    .unwrap();
    println!("doubling medians {:?}", medians(&s));
    assert!(s.decay.passed, "{:?}", s.decay);
}

#[test]
fn rotation_pair_persists() {
    let cos = Observable::cos(1);
    let sys = SystemSpec::rotation(ALPHA).unwrap();
    let s =
        uniform_decay_experiment(&sys, &cos, &cos, &scheme(1, 2), 32, SEED, OVERSAMPLING).unwrap();
    println!("rotation medians {:?}", medians(&s));
    assert!(!s.decay.passed);
    assert!(s.records.iter().all(|r| r.median_grid_max >= 0.2));
}

#[test]
fn single_function_powers_decay() {
    let (cos, one) = (Observable::cos(1), Observable::one());
    for a in 1..=3 {
        let s = uniform_decay_experiment(
            &SystemSpec::doubling(),
            &cos,
            &one,
            &scheme(a, a),
            32,
            SEED,
            OVERSAMPLING,
        )
        .unwrap();
        println!("a = {a}: medians {:?}", medians(&s));
        assert!(s.decay.passed, "a = {a}: {:?}", s.decay);
    }
}

#[test]
fn maxisom_bounds() {
    let cos = Observable::cos(1);
    let d = maxisom_bound_check(
        &SystemSpec::doubling(),
        &cos,
        &cos,
        1,
        2,
        32,
        SEED,
        1 << 14,
        64,
        BOUND_CONSTANT,
        OVERSAMPLING,
    )
    .unwrap();
    println!("doubling maxisom n2 {} median {}", d.n2, d.median_sup);
    assert!(d.holds && d.n2 <= 0.05 && d.median_sup <= 0.15);
    let r = maxisom_bound_check(
        &SystemSpec::rotation(ALPHA).unwrap(),
        &cos,
        &cos,
        1,
        2,
        32,
        SEED,
        1 << 14,
        64,
        BOUND_CONSTANT,
        OVERSAMPLING,
    )
    .unwrap();
    println!("rotation maxisom n2 {} median {}", r.n2, r.median_sup);
    assert!(r.holds && (r.n2 - 0.5f64.sqrt()).abs() <= 0.02);
}

#[test]
fn integral_inequalities() {
    let cos = Observable::cos(1);
    let s = AveragingScheme::new(1, 2, vec![1 << 10, 1 << 12, 1 << 14]).unwrap();
    let p = Z2Params {
        samples: 32,
        seed: SEED,
        h: 1000,
        ..Z2Params::default()
    };
    for sys in [SystemSpec::doubling(), SystemSpec::rotation(ALPHA).unwrap()] {
        for kind in [
            Z2Kind::Cl,
            Z2Kind::DoubleFctn,
            Z2Kind::DoubleFctnWw,
            Z2Kind::SingleFctn,
        ] {
            let r = z2_inequality_experiment(&sys, kind, &cos, &cos, &s, &p).unwrap();
            println!(
                "{} {kind:?}: lhs {:?} bound {} rhs {} ratio {:?} ni {}",
                sys.name(),
                r.lhs,
                r.seminorm_bound,
                r.rhs,
                r.ratio,
                r.non_increasing
            );
            assert!(r.holds);
        }
    }
}
