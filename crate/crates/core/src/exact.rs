//! Compensated products of integers with reals, reduced modulo one.
//!
//! Orbit phases such as `n^2 * theta` or `C(p, 2) * a * b` exceed 2^30 long
//! before the experiments end; naive `f64` products then lose the fractional
//! part. These helpers split the integer into 26-bit limbs and use fused
//! multiply-add residuals so the fractional part stays accurate to a few ulps.

const LIMB_BITS: u32 = 26;
const LIMB_MASK: u128 = (1 << LIMB_BITS) - 1;
const LIMB_SCALE: f64 = (1u64 << LIMB_BITS) as f64;

/// Fractional part in `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Returns `(floor(m * r), frac(m * r))`. The integer part wraps when it
/// does not fit in `i128`; the fractional part is always accurate.
pub fn mul_split(m: i128, r: f64) -> (i128, f64) {
    let negative = m < 0;
    let mut rest = m.unsigned_abs();
    let mut int: i128 = 0;
    let mut fr = 0.0f64;
    let mut scaled = r;
    while rest != 0 {
        let limb = (rest & LIMB_MASK) as f64;
        let ip = scaled.floor();
        let fp = scaled - ip;
        int = int.wrapping_add((limb as i128).wrapping_mul(ip as i128));
        let p = limb * fp;
        let e = limb.mul_add(fp, -p);
        let pi = p.floor();
        int = int.wrapping_add(pi as i128);
        fr += (p - pi) + e;
        let fi = fr.floor();
        int = int.wrapping_add(fi as i128);
        fr -= fi;
        rest >>= LIMB_BITS;
        scaled *= LIMB_SCALE;
    }
    if fr >= 1.0 {
        fr -= 1.0;
        int = int.wrapping_add(1);
    }
    if negative {
        if fr == 0.0 {
            (int.wrapping_neg(), 0.0)
        } else {
            (int.wrapping_neg().wrapping_sub(1), frac(1.0 - fr))
        }
    } else {
        (int, fr)
    }
}

/// `frac(m * r)`.
pub fn frac_mul(m: i128, r: f64) -> f64 {
    mul_split(m, r).1
}

/// Splits a product of two reals into `hi + lo` exactly.
pub fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `frac(m * a * b)` with the real product kept in two parts.
pub fn frac_mul2(m: i128, a: f64, b: f64) -> f64 {
    let (hi, lo) = two_product(a, b);
    frac(frac_mul(m, hi) + frac_mul(m, lo))
}

/// Binomial coefficient `C(n, 2)` for any integer `n`.
pub fn choose2(n: i128) -> i128 {
    n * (n - 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_products_match_naive() {
        for &(m, r) in &[(3i128, 0.25f64), (-3, 0.25), (7, -0.1), (0, 0.3), (1, 1.5)] {
            let (i, f) = mul_split(m, r);
            let exact = m as f64 * r;
            assert!((i as f64 + f - exact).abs() < 1e-12, "{m} {r}");
            assert!((0.0..1.0).contains(&f));
        }
    }

    #[test]
    fn large_product_keeps_fraction() {
        // 2^40 * 0.5 = 2^39 exactly, fraction 0; and 2^40 * (0.5 + 2^-45) has fraction 2^-5
        let r = 0.5 + 2f64.powi(-45);
        let (i, f) = mul_split(1i128 << 40, r);
        assert_eq!(i, 1i128 << 39);
        assert!((f - 2f64.powi(-5)).abs() < 1e-15);
    }

    #[test]
    fn negative_multiplier() {
        let (i, f) = mul_split(-5, 0.3);
        assert_eq!(i, -2);
        assert!((f - 0.5).abs() < 1e-15);
    }

    #[test]
    fn choose2_values() {
        assert_eq!(choose2(3), 3);
        assert_eq!(choose2(0), 0);
        assert_eq!(choose2(-1), 1);
    }
}
