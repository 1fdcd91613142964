//! Truncated estimators for the Gowers-Host-Kra seminorms `|||f|||_k`, the
//! seminorms `<f>_k` of a possibly non-ergodic transformation, and the
//! Assani-Presser seminorm `N_2`.
//!
//! With `I(h) = int f . f o U^h` and
//! `I(h, k) = int f . f o U^h . f o U^k . f o U^{h+k}`,
//!
//! ```text
//! |||f|||_2^4 ~ (1/H) sum_{h=1}^H I(h)^2
//! |||f|||_3^8 ~ (1/H) sum_{h=1}^H (1/K) sum_{k=1}^K I(h, k)^2
//! N_2(f)^4   ~ (1/H) sum_{h=1}^H || E(f . f o T^h | Kronecker) ||_2^2
//! ```
//!
//! Integrals are computed on a quadrature grid. On a rotation, a
//! trigonometric polynomial keeps its degree under composition, so the grid
//! is shrunk to the smallest power of two that still integrates the
//! integrand exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::dynsys::{
    BoundObservable, Observable, OrbitTable, QuadratureGrid, SystemKind, SystemSpec,
};
use crate::error::{Error, Result};
use crate::inequalities::{verdict, InequalityReport};
use crate::sum::pairwise_sum;

const NODE_CHUNK: usize = 64;

/// Outer length `h`, inner length `k` and the per-axis quadrature node count
/// (`None` picks it from the system and the observable).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationParams {
    pub h: usize,
    pub k: usize,
    pub nodes: Option<u32>,
}

impl TruncationParams {
    /// `K = H` and automatic quadrature.
    pub fn new(h: usize) -> TruncationParams {
        TruncationParams {
            h,
            k: h,
            nodes: None,
        }
    }

    pub fn with_inner(self, k: usize) -> TruncationParams {
        TruncationParams { k, ..self }
    }

    pub fn with_nodes(self, nodes: u32) -> TruncationParams {
        TruncationParams {
            nodes: Some(nodes),
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if self.h == 0 || self.k == 0 {
            return Err(Error::InvalidArgument(
                "truncation lengths H and K must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "seminorm", content = "k", rename_all = "snake_case")]
pub enum SeminormKind {
    Ghk(u8),
    Angle(u8),
    Ap(u8),
}

impl SeminormKind {
    /// The power the estimator computes before taking the root.
    pub fn raised_power(&self) -> u32 {
        match self {
            SeminormKind::Ghk(k) | SeminormKind::Angle(k) => 1 << k,
            SeminormKind::Ap(_) => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormEstimate {
    pub kind: SeminormKind,
    pub value: f64,
    pub raised_power_value: f64,
    pub params: TruncationParams,
}

impl SeminormEstimate {
    fn from_raised(kind: SeminormKind, raised: f64, params: TruncationParams) -> SeminormEstimate {
        let raised = raised.max(0.0);
        let value = raised.powf(1.0 / kind.raised_power() as f64);
        SeminormEstimate {
            kind,
            value,
            raised_power_value: raised,
            params,
        }
    }
}

/// The transformation `U = T^{a_1} x ... x T^{a_m}` on `X^m`, acting on
/// tensor products `f_1 (x) ... (x) f_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductSystem {
    base: SystemSpec,
    powers: Vec<i64>,
}

impl ProductSystem {
    pub fn new(base: SystemSpec, powers: Vec<i64>) -> Result<ProductSystem> {
        if powers.is_empty() {
            return Err(Error::InvalidArgument(
                "a product system needs at least one factor".into(),
            ));
        }
        for &a in &powers {
            if a == 0 {
                return Err(Error::InvalidArgument(
                    "factor powers must be nonzero".into(),
                ));
            }
            if a < 0 && !base.is_invertible() {
                return Err(Error::NonInvertible(a));
            }
        }
        Ok(ProductSystem { base, powers })
    }

    /// `U = T^a` on `X`.
    pub fn power(base: &SystemSpec, a: i64) -> Result<ProductSystem> {
        ProductSystem::new(base.clone(), vec![a])
    }

    pub fn base(&self) -> &SystemSpec {
        &self.base
    }

    pub fn powers(&self) -> &[i64] {
        &self.powers
    }
}

pub(crate) fn require_real(f: &Observable) -> Result<()> {
    if f.is_real() {
        Ok(())
    } else {
        Err(Error::ComplexObservable(format!(
            "`{f}` is complex valued; seminorm estimators take real observables"
        )))
    }
}

/// Picks the quadrature for integrands of the given trigonometric degree.
pub(crate) fn choose_grid(
    sys: &SystemSpec,
    nodes: Option<u32>,
    degree: Option<u64>,
) -> Result<QuadratureGrid> {
    if let Some(n) = nodes {
        return QuadratureGrid::new(n);
    }
    let default = QuadratureGrid::default_for(sys);
    match (sys.kind(), degree) {
        (SystemKind::Rotation { .. }, Some(d)) => {
            let exact = (d + 1).next_power_of_two().max(8);
            QuadratureGrid::new((exact.min(default.nodes_per_axis() as u64)) as u32)
        }
        _ => Ok(default),
    }
}

/// One tensor factor: a real observable iterated by `T^step` from the nodes
/// of a grid.
struct Factor {
    f: BoundObservable,
    step: i64,
    grid: QuadratureGrid,
}

impl Factor {
    fn new(
        sys: &SystemSpec,
        f: &Observable,
        step: i64,
        copies: u64,
        nodes: Option<u32>,
    ) -> Result<Factor> {
        require_real(f)?;
        let grid = choose_grid(sys, nodes, f.circle_degree().map(|d| d * copies))?;
        Ok(Factor {
            f: f.bind(sys)?,
            step,
            grid,
        })
    }

    fn sys(&self) -> &SystemSpec {
        self.f.system()
    }

    fn chunks(&self) -> Vec<std::ops::Range<usize>> {
        let q = self.grid.len(self.sys());
        (0..q)
            .step_by(NODE_CHUNK)
            .map(|s| s..(s + NODE_CHUNK).min(q))
            .collect()
    }

    /// `f(U^j x_c)` for `j = 0..len`, as rows `j` over the nodes of `range`.
    fn table(&self, range: std::ops::Range<usize>, len: usize) -> Result<Vec<Vec<f64>>> {
        let mut rows = vec![vec![0.0; range.len()]; len];
        for (c, i) in range.enumerate() {
            let x = self.grid.point(self.sys(), i);
            let orbit = OrbitTable::new(self.sys(), &x, len, self.step, self.f.max_shift())?;
            for (j, p) in orbit.points().iter().enumerate() {
                rows[j][c] = self.f.eval_unchecked(p).re;
            }
        }
        Ok(rows)
    }

    /// `I(h)` for `h = 0..=h_max`.
    fn corr2(&self, h_max: usize) -> Result<Vec<f64>> {
        let w = self.grid.weight(self.sys());
        let partials: Vec<Vec<f64>> = self
            .chunks()
            .into_par_iter()
            .map(|range| {
                let rows = self.table(range, h_max + 1)?;
                Ok(rows
                    .iter()
                    .map(|row| row.iter().zip(&rows[0]).map(|(a, b)| a * b).sum::<f64>())
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(sum_partials(&partials, h_max + 1, w))
    }

    /// `I(h, k)` for `h = 1..=h_max`, `k = 1..=k_max`, row-major in `h`.
    fn corr3(&self, h_max: usize, k_max: usize) -> Result<Vec<f64>> {
        let w = self.grid.weight(self.sys());
        let mut acc = vec![0.0; h_max * k_max];
        for range in self.chunks() {
            let rows = self.table(range, h_max + k_max + 1)?;
            acc.par_chunks_mut(k_max).enumerate().for_each(|(hi, out)| {
                let h = hi + 1;
                let p: Vec<f64> = rows[0].iter().zip(&rows[h]).map(|(a, b)| a * b).collect();
                for (ki, slot) in out.iter_mut().enumerate() {
                    let k = ki + 1;
                    let s: f64 = p
                        .iter()
                        .zip(&rows[k])
                        .zip(&rows[h + k])
                        .map(|((a, b), c)| a * b * c)
                        .sum();
                    *slot += s;
                }
            });
        }
        acc.iter_mut().for_each(|v| *v *= w);
        Ok(acc)
    }
}

fn sum_partials(partials: &[Vec<f64>], len: usize, w: f64) -> Vec<f64> {
    (0..len)
        .map(|j| pairwise_sum(&partials.iter().map(|p| p[j]).collect::<Vec<_>>()) * w)
        .collect()
}

fn factors(
    u: &ProductSystem,
    fs: &[Observable],
    copies: u64,
    params: &TruncationParams,
) -> Result<Vec<Factor>> {
    if fs.len() != u.powers.len() {
        return Err(Error::InvalidArgument(format!(
            "{} observables given for a product of {} factors",
            fs.len(),
            u.powers.len()
        )));
    }
    u.powers
        .iter()
        .zip(fs)
        .map(|(&a, f)| Factor::new(&u.base, f, a, copies, params.nodes))
        .collect()
}

fn product_of(tables: Vec<Vec<f64>>) -> Vec<f64> {
    let mut it = tables.into_iter();
    let first = it.next().expect("at least one factor");
    it.fold(first, |acc, t| {
        acc.iter().zip(&t).map(|(a, b)| a * b).collect()
    })
}

fn mean(v: &[f64]) -> f64 {
    pairwise_sum(v) / v.len() as f64
}

/// Row statistics `S(h) = (1/K) sum_k I(h, k)^2` for `h = 1..=h_max`.
fn third_order_rows(fs: &[Factor], h_max: usize, k_max: usize) -> Result<Vec<f64>> {
    let table = product_of(
        fs.iter()
            .map(|f| f.corr3(h_max, k_max))
            .collect::<Result<_>>()?,
    );
    Ok(table
        .chunks(k_max)
        .map(|row| mean(&row.iter().map(|v| v * v).collect::<Vec<_>>()))
        .collect())
}

fn raised_value(fs: &[Factor], k: u8, params: &TruncationParams) -> Result<f64> {
    match k {
        2 => {
            let c = product_of(
                fs.iter()
                    .map(|f| f.corr2(params.h))
                    .collect::<Result<_>>()?,
            );
            Ok(mean(&c[1..].iter().map(|v| v * v).collect::<Vec<_>>()))
        }
        3 => Ok(mean(&third_order_rows(fs, params.h, params.k)?)),
        _ => Err(Error::Unsupported(format!(
            "seminorms of order {k}; only k = 2 and k = 3 are implemented"
        ))),
    }
}

/// `<f_1 (x) ... (x) f_m>_k` for the product transformation `u`.
pub fn angle_seminorm_estimate(
    u: &ProductSystem,
    fs: &[Observable],
    k: u8,
    params: &TruncationParams,
) -> Result<SeminormEstimate> {
    params.validate()?;
    if !(2..=3).contains(&k) {
        return Err(Error::Unsupported(format!(
            "seminorms of order {k}; only k = 2 and k = 3 are implemented"
        )));
    }
    let copies = 1u64 << (k - 1);
    let fs = factors(u, fs, copies, params)?;
    let raised = raised_value(&fs, k, params)?;
    let mut resolved = *params;
    resolved.nodes = Some(fs[0].grid.nodes_per_axis());
    Ok(SeminormEstimate::from_raised(
        SeminormKind::Angle(k),
        raised,
        resolved,
    ))
}

/// `|||f|||_k` for `k` in `{2, 3}`.
pub fn ghk_seminorm_estimate(
    sys: &SystemSpec,
    f: &Observable,
    k: u8,
    params: &TruncationParams,
) -> Result<SeminormEstimate> {
    let mut est = angle_seminorm_estimate(
        &ProductSystem::power(sys, 1)?,
        std::slice::from_ref(f),
        k,
        params,
    )?;
    est.kind = SeminormKind::Ghk(k);
    Ok(est)
}

/// Size of the node groups sharing one Kronecker coordinate, in grid order.
fn kronecker_group(sys: &SystemSpec, grid: &QuadratureGrid) -> Result<usize> {
    match sys.kind() {
        SystemKind::Rotation { .. } => Ok(1),
        SystemKind::SkewProduct { .. } => Ok(grid.nodes_per_axis() as usize),
        SystemKind::Doubling => Ok(grid.len(sys)),
        _ => Err(Error::Unsupported(format!(
            "the Kronecker factor of the {} system is not implemented",
            sys.name()
        ))),
    }
}

/// `N_2(f)`, with the Kronecker factor taken as the whole circle for a
/// rotation, the base circle for the skew product and the trivial factor for
/// the doubling map.
pub fn nk_seminorm_estimate(
    sys: &SystemSpec,
    f: &Observable,
    k: u8,
    params: &TruncationParams,
) -> Result<SeminormEstimate> {
    params.validate()?;
    if k != 2 {
        return Err(Error::Unsupported(format!(
            "N_{k}; only N_2 is implemented"
        )));
    }
    require_real(f)?;
    let grid = choose_grid(sys, params.nodes, f.circle_degree().map(|d| 4 * d))?;
    let group = kronecker_group(sys, &grid)?;
    let factor = Factor {
        f: f.bind(sys)?,
        step: 1,
        grid,
    };
    let q = grid.len(sys);
    let per_chunk = (NODE_CHUNK / group).max(1) * group;
    let ranges: Vec<_> = (0..q)
        .step_by(per_chunk)
        .map(|s| s..(s + per_chunk).min(q))
        .collect();
    let h = params.h;
    let partials: Vec<Vec<f64>> = ranges
        .into_par_iter()
        .map(|range| {
            let rows = factor.table(range, h + 1)?;
            Ok((0..=h)
                .map(|j| {
                    let g: Vec<f64> = rows[j].iter().zip(&rows[0]).map(|(a, b)| a * b).collect();
                    g.chunks(group)
                        .map(|c| {
                            let m = c.iter().sum::<f64>() / group as f64;
                            m * m * group as f64
                        })
                        .sum::<f64>()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let norms = sum_partials(&partials, h + 1, grid.weight(sys));
    let raised = mean(&norms[1..]);
    let mut resolved = *params;
    resolved.nodes = Some(grid.nodes_per_axis());
    Ok(SeminormEstimate::from_raised(
        SeminormKind::Ap(2),
        raised,
        resolved,
    ))
}

/// Checks `(1/H) sum_h |||f . f o T^{a h}|||_2^4 <= |a| |||f|||_3^8`, the
/// right side estimated with outer length `|a| H`, with 5% slack.
pub fn power_bound_check(
    sys: &SystemSpec,
    f: &Observable,
    a: i64,
    k: u8,
    params: &TruncationParams,
) -> Result<InequalityReport> {
    params.validate()?;
    if a == 0 {
        return Err(Error::InvalidArgument("the power a must be nonzero".into()));
    }
    if k != 2 {
        return Err(Error::Unsupported(format!(
            "the power bound for k = {k}; only k = 2 is implemented"
        )));
    }
    if a < 0 && !sys.is_invertible() {
        return Err(Error::NonInvertible(a));
    }
    let m = a.unsigned_abs() as usize;
    let long = m * params.h;
    let factor = Factor::new(sys, f, 1, 4, params.nodes)?;
    let rows = third_order_rows(std::slice::from_ref(&factor), long, params.k)?;
    let lhs = mean(&(1..=params.h).map(|h| rows[m * h - 1]).collect::<Vec<_>>());
    let rhs = m as f64 * mean(&rows);
    let holds = verdict(lhs, rhs * (1.0 + defaults::ESTIMATE_SLACK));
    Ok(InequalityReport {
        lhs,
        rhs,
        holds,
        n: long,
        h: Some(params.h),
        lhs_certified: None,
    })
}
