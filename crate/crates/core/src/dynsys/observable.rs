use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::StatePoint;
use super::quadrature::{integrate_observable, QuadratureGrid};
use super::system::{transform_point, SystemKind, SystemSpec, MAX_POWER};
use crate::error::{Error, Result};
use crate::phase::Phase;

/// An observable as an expression tree.
///
/// Primitives act on one circle coordinate (`coord`, default 0) or on the
/// cyclic index (`Fiber`). The tree is closed under sums, products,
/// composition with a power of the transformation (`Shift`) and the
/// mean-zero adjustment `f - integral(f)`.
///
/// The text form used on the command line is
///
/// ```text
/// cos:1   sin:2@1   char:-3   fiber:0   0.5   c(0.5,-1)
/// meanzero(cos:1*cos:1)   shift:3(cos:1)   cos:1+0.5*sin:2
/// ```
///
/// where `@c` selects a coordinate. Parsing is the exact inverse of
/// [`fmt::Display`].
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    Const(Complex64),
    Char { k: i64, coord: u8 },
    Cos { k: i64, coord: u8 },
    Sin { k: i64, coord: u8 },
    Fiber(u32),
    Sum(Vec<Observable>),
    Product(Vec<Observable>),
    Shift(i64, Box<Observable>),
    MeanZero(Box<Observable>),
}

impl Observable {
    pub fn constant(c: f64) -> Observable {
        Observable::Const(Complex64::new(c, 0.0))
    }

    pub fn complex_constant(c: Complex64) -> Observable {
        Observable::Const(c)
    }

    pub fn zero() -> Observable {
        Observable::constant(0.0)
    }

    pub fn one() -> Observable {
        Observable::constant(1.0)
    }

    /// `x -> cos(2 pi k x)`.
    pub fn cos(k: i64) -> Observable {
        Observable::Cos { k, coord: 0 }
    }

    pub fn sin(k: i64) -> Observable {
        Observable::Sin { k, coord: 0 }
    }

    /// `x -> exp(2 pi i k x)`.
    pub fn character(k: i64) -> Observable {
        Observable::Char { k, coord: 0 }
    }

    pub fn fiber(i: u32) -> Observable {
        Observable::Fiber(i)
    }

    /// Moves a primitive to circle coordinate `coord`.
    pub fn on(self, coord: u8) -> Observable {
        match self {
            Observable::Char { k, .. } => Observable::Char { k, coord },
            Observable::Cos { k, .. } => Observable::Cos { k, coord },
            Observable::Sin { k, .. } => Observable::Sin { k, coord },
            other => other,
        }
    }

    pub fn scale(self, c: f64) -> Observable {
        Observable::Product(vec![Observable::constant(c), self])
    }

    pub fn scale_complex(self, c: Complex64) -> Observable {
        Observable::Product(vec![Observable::Const(c), self])
    }

    /// `f o T^h`.
    pub fn shift(self, h: i64) -> Observable {
        Observable::Shift(h, Box::new(self))
    }

    pub fn mean_zero(self) -> Observable {
        Observable::MeanZero(Box::new(self))
    }

    pub fn sum(mut items: Vec<Observable>) -> Observable {
        match items.len() {
            0 => Observable::zero(),
            1 => items.pop().unwrap(),
            _ => Observable::Sum(items),
        }
    }

    pub fn product(mut items: Vec<Observable>) -> Observable {
        match items.len() {
            0 => Observable::one(),
            1 => items.pop().unwrap(),
            _ => Observable::Product(items),
        }
    }

    /// Builds `sum_k c_k exp(2 pi i k x)` on one coordinate, folding
    /// conjugate pairs into cosines and sines.
    pub fn trig_polynomial(coord: u8, coeffs: &[(i64, Complex64)]) -> Observable {
        use std::collections::BTreeMap;
        let map: BTreeMap<i64, Complex64> = coeffs
            .iter()
            .copied()
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        let scale = map.values().fold(0.0f64, |m, c| m.max(c.norm()));
        let mut terms = Vec::new();
        let mut done = std::collections::BTreeSet::new();
        let push = |terms: &mut Vec<Observable>, c: Complex64, base: Observable| {
            if c == Complex64::new(1.0, 0.0) {
                terms.push(base);
            } else if c.im == 0.0 {
                terms.push(base.scale(c.re));
            } else {
                terms.push(base.scale_complex(c));
            }
        };
        for (&k, &c) in &map {
            if done.contains(&k) {
                continue;
            }
            if k == 0 {
                terms.push(Observable::Const(c));
                continue;
            }
            let partner = map.get(&-k).copied();
            match partner {
                Some(d) if (d - c.conj()).norm() <= 1e-14 * scale => {
                    done.insert(-k);
                    let kk = k.abs();
                    // c e(kx) + conj(c) e(-kx) with c taken at +|k|
                    let cp = if k > 0 { c } else { d };
                    if cp.re != 0.0 {
                        push(
                            &mut terms,
                            Complex64::new(2.0 * cp.re, 0.0),
                            Observable::cos(kk).on(coord),
                        );
                    }
                    if cp.im != 0.0 {
                        push(
                            &mut terms,
                            Complex64::new(-2.0 * cp.im, 0.0),
                            Observable::sin(kk).on(coord),
                        );
                    }
                }
                _ => push(&mut terms, c, Observable::character(k).on(coord)),
            }
        }
        Observable::sum(terms)
    }

    /// Structural test for real values at every point.
    pub fn is_real(&self) -> bool {
        match self {
            Observable::Const(c) => c.im == 0.0,
            Observable::Char { k, .. } => *k == 0,
            Observable::Cos { .. } | Observable::Sin { .. } | Observable::Fiber(_) => true,
            Observable::Sum(v) | Observable::Product(v) => v.iter().all(Observable::is_real),
            Observable::Shift(_, f) | Observable::MeanZero(f) => f.is_real(),
        }
    }

    /// An upper bound for the sup norm.
    pub fn sup_bound(&self) -> f64 {
        match self {
            Observable::Const(c) => c.norm(),
            Observable::Char { .. }
            | Observable::Cos { .. }
            | Observable::Sin { .. }
            | Observable::Fiber(_) => 1.0,
            Observable::Sum(v) => v.iter().map(Observable::sup_bound).sum(),
            Observable::Product(v) => v.iter().map(Observable::sup_bound).product(),
            Observable::Shift(_, f) => f.sup_bound(),
            Observable::MeanZero(f) => 2.0 * f.sup_bound(),
        }
    }

    pub fn uses_coord(&self, coord: u8) -> bool {
        match self {
            Observable::Char { coord: c, .. }
            | Observable::Cos { coord: c, .. }
            | Observable::Sin { coord: c, .. } => *c == coord,
            Observable::Const(_) | Observable::Fiber(_) => false,
            Observable::Sum(v) | Observable::Product(v) => v.iter().any(|f| f.uses_coord(coord)),
            Observable::Shift(_, f) | Observable::MeanZero(f) => f.uses_coord(coord),
        }
    }

    pub fn uses_fiber(&self) -> bool {
        match self {
            Observable::Fiber(_) => true,
            Observable::Sum(v) | Observable::Product(v) => v.iter().any(Observable::uses_fiber),
            Observable::Shift(_, f) | Observable::MeanZero(f) => f.uses_fiber(),
            _ => false,
        }
    }

    /// Largest `|k|` sum along products when only coordinate 0 is used and no
    /// fiber indicator appears; for a rotation this bounds the Fourier support.
    pub fn circle_degree(&self) -> Option<u64> {
        match self {
            Observable::Const(_) => Some(0),
            Observable::Char { k, coord }
            | Observable::Cos { k, coord }
            | Observable::Sin { k, coord } => (*coord == 0).then(|| k.unsigned_abs()),
            Observable::Fiber(_) => None,
            Observable::Sum(v) => v
                .iter()
                .try_fold(0u64, |m, f| Some(m.max(f.circle_degree()?))),
            Observable::Product(v) => v.iter().try_fold(0u64, |m, f| Some(m + f.circle_degree()?)),
            Observable::Shift(_, f) | Observable::MeanZero(f) => f.circle_degree(),
        }
    }

    /// Sum of `|h|` over nested shifts along the deepest path.
    pub fn max_shift(&self) -> u64 {
        match self {
            Observable::Sum(v) | Observable::Product(v) => {
                v.iter().map(Observable::max_shift).max().unwrap_or(0)
            }
            Observable::Shift(h, f) => h.unsigned_abs().saturating_add(f.max_shift()),
            Observable::MeanZero(f) => f.max_shift(),
            _ => 0,
        }
    }

    fn has_negative_shift(&self) -> bool {
        match self {
            Observable::Sum(v) | Observable::Product(v) => {
                v.iter().any(Observable::has_negative_shift)
            }
            Observable::Shift(h, f) => *h < 0 || f.has_negative_shift(),
            Observable::MeanZero(f) => f.has_negative_shift(),
            _ => false,
        }
    }

    /// Binds the observable to a system, checking compatibility and resolving
    /// mean-zero wrappers with the default quadrature grid.
    pub fn bind(&self, sys: &SystemSpec) -> Result<BoundObservable> {
        self.check(sys)?;
        Ok(BoundObservable {
            sys: sys.clone(),
            node: self.resolve(sys)?,
            sup_bound: self.sup_bound(),
            max_shift: self.max_shift(),
        })
    }

    fn check(&self, sys: &SystemSpec) -> Result<()> {
        if self.max_shift() > MAX_POWER as u64 {
            return Err(Error::PowerOutOfRange(self.max_shift() as i128));
        }
        if !sys.is_invertible() && self.has_negative_shift() {
            return Err(Error::NonInvertible(-1));
        }
        self.check_node(sys)
    }

    fn check_node(&self, sys: &SystemSpec) -> Result<()> {
        match self {
            Observable::Const(c) => {
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return Err(Error::IncompatibleObservable(format!(
                        "non-finite constant {c}"
                    )));
                }
            }
            Observable::Char { coord, .. }
            | Observable::Cos { coord, .. }
            | Observable::Sin { coord, .. } => {
                if *coord as usize >= sys.circle_dim() {
                    return Err(Error::IncompatibleObservable(format!(
                        "coordinate {coord} does not exist on the {} system",
                        sys.name()
                    )));
                }
            }
            Observable::Fiber(i) => match sys.kind() {
                SystemKind::CyclicProduct { q, .. } if i < q => {}
                SystemKind::CyclicProduct { q, .. } => {
                    return Err(Error::IncompatibleObservable(format!(
                        "fiber {i} out of range for q = {q}"
                    )))
                }
                _ => {
                    return Err(Error::IncompatibleObservable(format!(
                        "fiber indicators need a cyclic product, not the {} system",
                        sys.name()
                    )))
                }
            },
            Observable::Sum(v) | Observable::Product(v) => {
                for f in v {
                    f.check_node(sys)?;
                }
            }
            Observable::Shift(_, f) | Observable::MeanZero(f) => f.check_node(sys)?,
        }
        Ok(())
    }

    fn resolve(&self, sys: &SystemSpec) -> Result<Node> {
        Ok(match self {
            Observable::Const(c) => Node::Const(*c),
            Observable::Char { k, coord } => Node::Char(*k, *coord as usize),
            Observable::Cos { k, coord } => Node::Cos(*k, *coord as usize),
            Observable::Sin { k, coord } => Node::Sin(*k, *coord as usize),
            Observable::Fiber(i) => Node::Fiber(*i),
            Observable::Sum(v) => {
                Node::Sum(v.iter().map(|f| f.resolve(sys)).collect::<Result<_>>()?)
            }
            Observable::Product(v) => {
                Node::Product(v.iter().map(|f| f.resolve(sys)).collect::<Result<_>>()?)
            }
            Observable::Shift(h, f) => Node::Shift(*h, Box::new(f.resolve(sys)?)),
            Observable::MeanZero(f) => {
                let mean = integrate_observable(sys, f, &QuadratureGrid::default_for(sys))?;
                Node::Sum(vec![f.resolve(sys)?, Node::Const(-mean)])
            }
        })
    }
}

impl Add for Observable {
    type Output = Observable;
    fn add(self, rhs: Observable) -> Observable {
        match self {
            Observable::Sum(mut v) => {
                v.push(rhs);
                Observable::Sum(v)
            }
            lhs => Observable::Sum(vec![lhs, rhs]),
        }
    }
}

impl Mul for Observable {
    type Output = Observable;
    fn mul(self, rhs: Observable) -> Observable {
        match self {
            Observable::Product(mut v) => {
                v.push(rhs);
                Observable::Product(v)
            }
            lhs => Observable::Product(vec![lhs, rhs]),
        }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Const(Complex64),
    Char(i64, usize),
    Cos(i64, usize),
    Sin(i64, usize),
    Fiber(u32),
    Sum(Vec<Node>),
    Product(Vec<Node>),
    Shift(i64, Box<Node>),
}

struct Coords {
    phases: [Phase; 3],
    index: u32,
}

impl Coords {
    fn of(x: &StatePoint) -> Coords {
        Coords {
            phases: x.phases(),
            index: x.index(),
        }
    }
}

fn angle(p: Phase) -> f64 {
    TAU * p.to_f64()
}

/// An observable bound to a system, ready for evaluation.
#[derive(Clone, Debug)]
pub struct BoundObservable {
    sys: SystemSpec,
    node: Node,
    sup_bound: f64,
    max_shift: u64,
}

impl BoundObservable {
    pub fn system(&self) -> &SystemSpec {
        &self.sys
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn max_shift(&self) -> u64 {
        self.max_shift
    }

    pub fn eval(&self, x: &StatePoint) -> Result<Complex64> {
        if !x.matches(&self.sys) {
            return Err(Error::PointMismatch(self.sys.name()));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &StatePoint) -> Complex64 {
        self.eval_node(&self.node, x, &Coords::of(x))
    }

    fn eval_node(&self, node: &Node, x: &StatePoint, c: &Coords) -> Complex64 {
        match node {
            Node::Const(v) => *v,
            Node::Char(k, i) => {
                let (s, co) = angle(c.phases[*i].mul_int(*k)).sin_cos();
                Complex64::new(co, s)
            }
            Node::Cos(k, i) => Complex64::new(angle(c.phases[*i].mul_int(*k)).cos(), 0.0),
            Node::Sin(k, i) => Complex64::new(angle(c.phases[*i].mul_int(*k)).sin(), 0.0),
            Node::Fiber(i) => Complex64::new(if c.index == *i { 1.0 } else { 0.0 }, 0.0),
            Node::Sum(v) => v.iter().fold(Complex64::new(0.0, 0.0), |acc, n| {
                acc + self.eval_node(n, x, c)
            }),
            Node::Product(v) => v.iter().fold(Complex64::new(1.0, 0.0), |acc, n| {
                acc * self.eval_node(n, x, c)
            }),
            Node::Shift(h, inner) => {
                // validated at bind time: matching point, invertibility and range
                let y = transform_point(&self.sys, x, *h).expect("shift validated at bind time");
                self.eval_node(inner, &y, &Coords::of(&y))
            }
        }
    }
}

// ---- text form ----------------------------------------------------------

fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    write!(f, "{x}")
}

impl Observable {
    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, in_product: bool) -> fmt::Result {
        let wrap = matches!(self, Observable::Sum(_))
            || (in_product && matches!(self, Observable::Product(_)));
        if wrap {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coord =
            |f: &mut fmt::Formatter<'_>, c: u8| if c == 0 { Ok(()) } else { write!(f, "@{c}") };
        match self {
            Observable::Const(c) => {
                if c.im == 0.0 {
                    write_real(f, c.re)
                } else {
                    write!(f, "c(")?;
                    write_real(f, c.re)?;
                    write!(f, ",")?;
                    write_real(f, c.im)?;
                    write!(f, ")")
                }
            }
            Observable::Char { k, coord: c } => {
                write!(f, "char:{k}")?;
                coord(f, *c)
            }
            Observable::Cos { k, coord: c } => {
                write!(f, "cos:{k}")?;
                coord(f, *c)
            }
            Observable::Sin { k, coord: c } => {
                write!(f, "sin:{k}")?;
                coord(f, *c)
            }
            Observable::Fiber(i) => write!(f, "fiber:{i}"),
            Observable::Sum(v) => {
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    t.fmt_child(f, false)?;
                }
                Ok(())
            }
            Observable::Product(v) => {
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    t.fmt_child(f, true)?;
                }
                Ok(())
            }
            Observable::Shift(h, inner) => write!(f, "shift:{h}({inner})"),
            Observable::MeanZero(inner) => write!(f, "meanzero({inner})"),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn expr(&mut self) -> Result<Observable> {
        let mut terms = vec![self.term()?];
        while self.eat("+") {
            terms.push(self.term()?);
        }
        Ok(Observable::sum(terms))
    }

    fn term(&mut self) -> Result<Observable> {
        let mut factors = vec![self.factor()?];
        while self.eat("*") {
            factors.push(self.factor()?);
        }
        Ok(Observable::product(factors))
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.s.len() && (self.s[self.pos] == b'-' || self.s[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        match text.parse::<i64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("expected an integer")
            }
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.s;
        let mut i = self.pos;
        if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
            i += 1;
        }
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            i += 1;
            if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
                i += 1;
            }
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        let text = std::str::from_utf8(&bytes[start..i]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos = i;
                Ok(v)
            }
            _ => self.err("expected a finite number"),
        }
    }

    fn coord(&mut self) -> Result<u8> {
        if self.eat("@") {
            let c = self.integer()?;
            if !(0..3).contains(&c) {
                return self.err("coordinate must be 0, 1 or 2");
            }
            Ok(c as u8)
        } else {
            Ok(0)
        }
    }

    fn factor(&mut self) -> Result<Observable> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(b'-') => {
                let next = self.s.get(self.pos + 1).copied();
                if matches!(next, Some(c) if c.is_ascii_digit() || c == b'.') {
                    Ok(Observable::constant(self.number()?))
                } else {
                    self.pos += 1;
                    Ok(Observable::Product(vec![
                        Observable::constant(-1.0),
                        self.factor()?,
                    ]))
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' || c == b'+' => {
                Ok(Observable::constant(self.number()?))
            }
            Some(_) => {
                if self.eat("meanzero(") {
                    let e = self.expr()?;
                    self.expect(")")?;
                    Ok(e.mean_zero())
                } else if self.eat("shift:") {
                    let h = self.integer()?;
                    self.expect("(")?;
                    let e = self.expr()?;
                    self.expect(")")?;
                    Ok(e.shift(h))
                } else if self.eat("cos:") {
                    let k = self.integer()?;
                    Ok(Observable::Cos {
                        k,
                        coord: self.coord()?,
                    })
                } else if self.eat("sin:") {
                    let k = self.integer()?;
                    Ok(Observable::Sin {
                        k,
                        coord: self.coord()?,
                    })
                } else if self.eat("char:") {
                    let k = self.integer()?;
                    Ok(Observable::Char {
                        k,
                        coord: self.coord()?,
                    })
                } else if self.eat("fiber:") {
                    let i = self.integer()?;
                    if !(0..=u32::MAX as i64).contains(&i) {
                        return self.err("fiber index must be a nonnegative integer");
                    }
                    Ok(Observable::Fiber(i as u32))
                } else if self.eat("c(") {
                    let re = self.number()?;
                    self.expect(",")?;
                    let im = self.number()?;
                    self.expect(")")?;
                    Ok(Observable::Const(Complex64::new(re, im)))
                } else {
                    self.err("unknown observable; expected cos:k, sin:k, char:k, fiber:i, a number, meanzero(..) or shift:h(..)")
                }
            }
        }
    }
}

impl FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Observable> {
        let mut p = Parser {
            s: s.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return p.err("trailing input");
        }
        Ok(e)
    }
}

impl Serialize for Observable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
