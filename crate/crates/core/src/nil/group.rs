use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{choose2, frac, frac_mul, frac_mul2, mul_split};

/// The group element with matrix `[[1, x, z], [0, 1, y], [0, 0, 1]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> GroupElement {
        GroupElement { x, y, z }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement::new(-self.x, -self.y, self.x * self.y - self.z)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// `(x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y')`.
pub fn group_multiply(u: &GroupElement, v: &GroupElement) -> GroupElement {
    GroupElement::new(u.x + v.x, u.y + v.y, u.z + v.z + u.x * v.y)
}

/// `g^n = (n a, n b, n c + C(n, 2) a b)` for `g = (a, b, c)`.
pub fn group_power_closed_form(g: &GroupElement, n: i64) -> GroupElement {
    let m = n as f64;
    let c2 = choose2(n as i128) as f64;
    GroupElement::new(m * g.x, m * g.y, m * g.z + c2 * (g.x * g.y))
}

/// A point of the nilmanifold in reduced coordinates, each in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HeisenbergPoint {
    /// The coset of `(x, y, z)`, reduced to the fundamental domain.
    pub fn new(x: f64, y: f64, z: f64) -> HeisenbergPoint {
        reduce_to_fundamental_domain(&GroupElement::new(x, y, z))
    }

    pub fn as_element(&self) -> GroupElement {
        GroupElement::new(self.x, self.y, self.z)
    }
}

/// Right-multiplies by the integer element `(p, q, r)` with `q = -floor(y)`,
/// `p = -floor(x)` and `r = -floor(z + x q)`.
pub fn reduce_to_fundamental_domain(g: &GroupElement) -> HeisenbergPoint {
    let q = -g.y.floor();
    let zq = g.z + g.x * q;
    HeisenbergPoint {
        x: frac(g.x),
        y: frac(g.y + q),
        z: frac(zq),
    }
}

/// `reduce(g^p * point)` with the fractional parts of all large products
/// computed exactly. Fails when `p * floor(p b + y)` does not fit in 128 bits.
pub fn translate_power(
    g: &GroupElement,
    p: i64,
    point: &HeisenbergPoint,
) -> Result<HeisenbergPoint> {
    let pw = p as i128;
    let xf = frac_mul(pw, g.x);
    let (yi, yf) = mul_split(pw, g.y);
    // X = p a + x,  Y = p b + y,  q = -floor(Y)
    let x_new = frac(xf + point.x);
    let y_sum = yf + point.y;
    let q = -(yi + y_sum.floor() as i128);
    let y_new = frac(y_sum);
    let pq = pw.checked_mul(q).ok_or(Error::PowerOutOfRange(pw))?;
    // Z + X q = p c + C(p,2) a b + z + p a y + p q a + x q
    let parts = [
        frac_mul(pw, g.z),
        frac_mul2(choose2(pw), g.x, g.y),
        point.z,
        frac_mul2(pw, g.x, point.y),
        frac_mul(pq, g.x),
        frac_mul(q, point.x),
    ];
    let z_new = frac(parts.iter().map(|v| frac(*v)).sum::<f64>());
    Ok(HeisenbergPoint {
        x: x_new,
        y: y_new,
        z: z_new,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &GroupElement, b: &GroupElement, tol: f64) -> bool {
        (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol && (a.z - b.z).abs() <= tol
    }

    #[test]
    fn multiplication_examples() {
        let v = GroupElement::new(0.3, -1.5, 2.0);
        assert_eq!(group_multiply(&GroupElement::IDENTITY, &v), v);
        let e = group_multiply(
            &GroupElement::new(1.0, 0.0, 0.0),
            &GroupElement::new(0.0, 1.0, 0.0),
        );
        assert_eq!(e, GroupElement::new(1.0, 1.0, 1.0));
        let a = GroupElement::new(1.0, 0.0, 0.0);
        let b = GroupElement::new(0.0, 1.0, 0.0);
        let comm = [a, b, a.inverse(), b.inverse()]
            .iter()
            .fold(GroupElement::IDENTITY, |acc, g| group_multiply(&acc, g));
        assert_eq!(comm, GroupElement::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn power_examples() {
        let g = GroupElement::new(0.7, -0.2, 0.1);
        assert_eq!(group_power_closed_form(&g, 0), GroupElement::IDENTITY);
        assert_eq!(
            group_power_closed_form(&GroupElement::new(1.0, 1.0, 0.0), 3),
            GroupElement::new(3.0, 3.0, 3.0)
        );
        let g = GroupElement::new(0.618_033_988_749_894_8, 0.414_213_562_373_095_1, 0.1);
        let mut acc = GroupElement::IDENTITY;
        for _ in 0..10_000 {
            acc = group_multiply(&acc, &g);
        }
        let closed = group_power_closed_form(&g, 10_000);
        assert!(
            close(&acc, &closed, 1e-9 * closed.z.abs().max(1.0)),
            "{acc:?} vs {closed:?}"
        );
        let inv = group_power_closed_form(&g, -1);
        assert!(close(&inv, &g.inverse(), 1e-15));
    }

    #[test]
    fn reduction_examples() {
        let p = reduce_to_fundamental_domain(&GroupElement::new(0.2, 0.3, 0.4));
        assert_eq!((p.x, p.y, p.z), (0.2, 0.3, 0.4));
        let p = reduce_to_fundamental_domain(&GroupElement::new(1.2, 0.3, 0.4));
        assert!((p.x - 0.2).abs() < 1e-15 && p.y == 0.3 && p.z == 0.4);
    }

    #[test]
    fn reduction_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let g = GroupElement::new(
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
            );
            let p = reduce_to_fundamental_domain(&g);
            for c in [p.x, p.y, p.z] {
                assert!((0.0..1.0).contains(&c));
            }
            assert_eq!(reduce_to_fundamental_domain(&p.as_element()), p);
        }
    }

    #[test]
    fn associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut draw = || {
            GroupElement::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        };
        for _ in 0..10_000 {
            let (u, v, w) = (draw(), draw(), draw());
            let l = group_multiply(&group_multiply(&u, &v), &w);
            let r = group_multiply(&u, &group_multiply(&v, &w));
            assert!(close(&l, &r, 1e-12));
        }
    }

    fn circ(a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        d.min(1.0 - d)
    }

    #[test]
    fn translate_power_matches_direct_product_for_small_powers() {
        let g = GroupElement::new(
            0.618_033_988_749_894_8,
            0.414_213_562_373_095_1,
            0.302_775_637_731_995,
        );
        let pt = HeisenbergPoint::new(0.25, 0.8, 0.1);
        for p in -50..50 {
            let direct = reduce_to_fundamental_domain(&group_multiply(
                &group_power_closed_form(&g, p),
                &pt.as_element(),
            ));
            let fast = translate_power(&g, p, &pt).unwrap();
            assert!(
                circ(direct.x, fast.x) < 1e-12
                    && circ(direct.y, fast.y) < 1e-12
                    && circ(direct.z, fast.z) < 1e-10,
                "p = {p}"
            );
        }
    }

    #[test]
    fn translate_power_composes() {
        let g = GroupElement::new(
            0.618_033_988_749_894_8,
            0.414_213_562_373_095_1,
            0.302_775_637_731_995,
        );
        let pt = HeisenbergPoint::new(0.25, 0.8, 0.1);
        let big = 1i64 << 40;
        let once = translate_power(&g, big + 7, &pt).unwrap();
        let twice = translate_power(&g, 7, &translate_power(&g, big, &pt).unwrap()).unwrap();
        assert!(
            circ(once.x, twice.x) < 1e-9
                && circ(once.y, twice.y) < 1e-9
                && circ(once.z, twice.z) < 1e-6
        );
    }

    proptest! {
        #[test]
        fn power_is_a_homomorphism(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, m in -200i64..200, n in -200i64..200) {
            let g = GroupElement::new(a, b, c);
            let lhs = group_power_closed_form(&g, m + n);
            let rhs = group_multiply(&group_power_closed_form(&g, m), &group_power_closed_form(&g, n));
            prop_assert!(close(&lhs, &rhs, 1e-9));
        }
    }
}
