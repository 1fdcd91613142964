use num_complex::Complex64;

use super::observable::BoundObservable;
use super::point::StatePoint;
use super::system::{transform_point, SystemKind, SystemSpec, MAX_POWER};
use crate::error::{Error, Result};

fn check_span(sys: &SystemSpec, len: usize, step: i64) -> Result<()> {
    if step < 0 && !sys.is_invertible() {
        return Err(Error::NonInvertible(step));
    }
    let reach = step.unsigned_abs() as u128 * len as u128;
    if reach > MAX_POWER as u128 {
        return Err(Error::PowerOutOfRange(reach as i128));
    }
    Ok(())
}

/// The points `x, T^a x, T^{2a} x, ...` of one orbit.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    step: i64,
    points: Vec<StatePoint>,
}

impl OrbitTable {
    /// Generates `len` points with stride `step`. Group rotations are
    /// iterated exactly in fixed point; Heisenberg points are recomputed from
    /// the closed form at every index so rounding does not accumulate.
    pub fn new(
        sys: &SystemSpec,
        x: &StatePoint,
        len: usize,
        step: i64,
        extra_span: u64,
    ) -> Result<OrbitTable> {
        check_span(sys, len, step)?;
        if !x.matches(sys) {
            return Err(Error::PointMismatch(sys.name()));
        }
        let start = match x {
            StatePoint::Doubling(d) => StatePoint::Doubling(
                d.with_cache(step.unsigned_abs() * len as u64 + extra_span + 64),
            ),
            other => other.clone(),
        };
        let mut points = Vec::with_capacity(len);
        match sys.kind() {
            SystemKind::Heisenberg { .. } => {
                for n in 0..len as i64 {
                    points.push(transform_point(sys, &start, n * step)?);
                }
            }
            _ => {
                let mut cur = start;
                for n in 0..len {
                    if n + 1 < len {
                        let next = transform_point(sys, &cur, step)?;
                        points.push(std::mem::replace(&mut cur, next));
                    } else {
                        points.push(cur.clone());
                    }
                }
            }
        }
        Ok(OrbitTable { step, points })
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    pub fn points(&self) -> &[StatePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self, f: &BoundObservable) -> Vec<Complex64> {
        self.points.iter().map(|p| f.eval_unchecked(p)).collect()
    }
}

/// `f(T^{a n} x)` for `n = 0, ..., len - 1`.
pub fn orbit_observable_values(
    f: &BoundObservable,
    x: &StatePoint,
    len: usize,
    step: i64,
) -> Result<Vec<Complex64>> {
    let table = OrbitTable::new(f.system(), x, len, step, f.max_shift())?;
    Ok(table.values(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults::ALPHA;
    use crate::dynsys::{DoublingPoint, Observable};
    use crate::phase::Phase;

    #[test]
    fn rotation_orbit_matches_closed_form() {
        let sys = SystemSpec::rotation(ALPHA).unwrap();
        let f: Observable = "char:1".parse().unwrap();
        let b = f.bind(&sys).unwrap();
        let x = StatePoint::Circle(Phase::from_f64(0.3));
        let v = orbit_observable_values(&b, &x, 1000, 3).unwrap();
        for (n, z) in v.iter().enumerate() {
            let y = transform_point(&sys, &x, 3 * n as i64).unwrap();
            assert_eq!(*z, b.eval(&y).unwrap());
        }
    }

    #[test]
    fn doubling_orbits_shift_bits() {
        let sys = SystemSpec::doubling();
        let b = Observable::cos(1).bind(&sys).unwrap();
        let x = StatePoint::Doubling(DoublingPoint::seeded(1, 2, 3));
        let v = orbit_observable_values(&b, &x, 5000, 2).unwrap();
        let y = transform_point(&sys, &x, 2 * 4321).unwrap();
        assert_eq!(v[4321], b.eval(&y).unwrap());
        assert!(orbit_observable_values(&b, &x, 10, -1).is_err());
    }

    #[test]
    fn overflowing_span_is_rejected() {
        let sys = SystemSpec::rotation(ALPHA).unwrap();
        let b = Observable::cos(1).bind(&sys).unwrap();
        let x = StatePoint::Circle(Phase::ZERO);
        assert!(matches!(
            orbit_observable_values(&b, &x, 1 << 20, 1 << 60),
            Err(Error::PowerOutOfRange(_))
        ));
    }
}
