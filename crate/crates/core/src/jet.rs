//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] carries the value of a scalar function at a point together with
//! its partial derivatives up to order three, stored densely:
//! `[value, d1 (n), d2 (n*n), d3 (n*n*n)]`. Second and third derivative blocks
//! are always written through their symmetric orbit, so they are exactly
//! symmetric under index permutations.
//!
//! Arithmetic between jets of different orders truncates to the smaller
//! order. Order 0 (value only) is used internally for plain values; the public
//! constructor [`lift_coordinate`] accepts orders 1 to 3.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{GeomError, Result};

pub const MAX_ORDER: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    nvars: usize,
    order: usize,
    data: Vec<f64>,
}

#[inline]
fn storage_len(n: usize, order: usize) -> usize {
    let mut len = 1;
    if order >= 1 {
        len += n;
    }
    if order >= 2 {
        len += n * n;
    }
    if order >= 3 {
        len += n * n * n;
    }
    len
}

impl Jet {
    pub fn constant(nvars: usize, order: usize, value: f64) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} above {MAX_ORDER}");
        let mut data = vec![0.0; storage_len(nvars, order)];
        data[0] = value;
        Jet { nvars, order, data }
    }

    /// The jet of the `index`-th coordinate function with value `value`.
    pub fn variable(nvars: usize, order: usize, index: usize, value: f64) -> Self {
        assert!(index < nvars, "variable index {index} out of range {nvars}");
        let mut jet = Jet::constant(nvars, order, value);
        if order >= 1 {
            jet.data[1 + index] = 1.0;
        }
        jet
    }

    /// Jets of all coordinate functions at `x`.
    pub fn coordinates(x: &[f64], order: usize) -> Vec<Jet> {
        let n = x.len();
        x.iter()
            .enumerate()
            .map(|(i, &xi)| Jet::variable(n, order, i, xi))
            .collect()
    }

    /// Build a jet from raw derivative blocks (`d2`, `d3` are symmetrised).
    pub fn from_parts(value: f64, d1: &[f64], d2: Option<&[f64]>, d3: Option<&[f64]>) -> Self {
        let n = d1.len();
        let order = match (d2, d3) {
            (Some(_), Some(_)) => 3,
            (Some(_), None) => 2,
            _ => 1,
        };
        let mut jet = Jet::constant(n, order, value);
        jet.data[1..1 + n].copy_from_slice(d1);
        if let Some(d2) = d2 {
            assert_eq!(d2.len(), n * n);
            for i in 0..n {
                for j in i..n {
                    let v = 0.5 * (d2[i * n + j] + d2[j * n + i]);
                    jet.set_d2(i, j, v);
                }
            }
        }
        if let Some(d3) = d3 {
            assert_eq!(d3.len(), n * n * n);
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let v = d3[(i * n + j) * n + k];
                        jet.set_d3(i, j, k, v);
                    }
                }
            }
        }
        jet
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.data[0]
    }

    #[inline]
    fn off2(&self) -> usize {
        1 + self.nvars
    }

    #[inline]
    fn off3(&self) -> usize {
        1 + self.nvars + self.nvars * self.nvars
    }

    /// First partial derivative; zero beyond the stored order.
    #[inline]
    pub fn d1(&self, i: usize) -> f64 {
        if self.order >= 1 {
            self.data[1 + i]
        } else {
            0.0
        }
    }

    #[inline]
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        if self.order >= 2 {
            self.data[self.off2() + i * self.nvars + j]
        } else {
            0.0
        }
    }

    #[inline]
    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        if self.order >= 3 {
            let n = self.nvars;
            self.data[self.off3() + (i * n + j) * n + k]
        } else {
            0.0
        }
    }

    pub fn gradient(&self) -> &[f64] {
        if self.order >= 1 {
            &self.data[1..1 + self.nvars]
        } else {
            &[]
        }
    }

    /// Dense second-derivative block (row-major), if present.
    pub fn hessian(&self) -> Option<&[f64]> {
        (self.order >= 2).then(|| &self.data[self.off2()..self.off2() + self.nvars * self.nvars])
    }

    /// Dense third-derivative block, if present.
    pub fn third(&self) -> Option<&[f64]> {
        (self.order >= 3).then(|| &self.data[self.off3()..])
    }

    #[inline]
    fn set_d2(&mut self, i: usize, j: usize, v: f64) {
        let n = self.nvars;
        let o = self.off2();
        self.data[o + i * n + j] = v;
        self.data[o + j * n + i] = v;
    }

    #[inline]
    fn set_d3(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.nvars;
        let o = self.off3();
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.data[o + (a * n + b) * n + c] = v;
        }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        Jet {
            nvars: self.nvars,
            order,
            data: self.data[..storage_len(self.nvars, order)].to_vec(),
        }
    }

    /// Partial derivative with respect to variable `i`, as a jet of one lower order.
    pub fn partial(&self, i: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let n = self.nvars;
        let mut out = Jet::constant(n, self.order - 1, self.d1(i));
        if self.order >= 2 {
            for j in 0..n {
                out.data[1 + j] = self.d2(i, j);
            }
        }
        if self.order >= 3 {
            for j in 0..n {
                for k in j..n {
                    out.set_d2(j, k, self.d3(i, j, k));
                }
            }
        }
        out
    }

    /// Re-express the jet in a larger variable set: old variable `i` becomes
    /// new variable `map[i]`; the jet does not depend on the other new variables.
    pub fn reindex(&self, new_nvars: usize, map: &[usize]) -> Jet {
        assert_eq!(map.len(), self.nvars);
        let n = self.nvars;
        let mut out = Jet::constant(new_nvars, self.order, self.value());
        if self.order >= 1 {
            for i in 0..n {
                out.data[1 + map[i]] = self.d1(i);
            }
        }
        if self.order >= 2 {
            for i in 0..n {
                for j in i..n {
                    out.set_d2(map[i], map[j], self.d2(i, j));
                }
            }
        }
        if self.order >= 3 {
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        out.set_d3(map[i], map[j], map[k], self.d3(i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Chain rule `f(inner)`: `outer` is the jet of `f` in `inner.len()`
    /// variables expanded at the values of `inner`.
    pub fn compose(outer: &Jet, inner: &[Jet]) -> Jet {
        let m = outer.nvars;
        assert_eq!(inner.len(), m, "compose: outer has {m} variables");
        let inner_order = inner.iter().map(Jet::order).min().unwrap_or(MAX_ORDER);
        let n = inner
            .iter()
            .find(|j| j.order > 0)
            .map(Jet::nvars)
            .unwrap_or(0);
        let order = outer.order.min(inner_order);
        let mut out = Jet::constant(n, order, outer.value());
        if order == 0 {
            return out;
        }
        // y1[mu][a]
        let y1: Vec<f64> = (0..m)
            .flat_map(|mu| (0..n).map(move |a| (mu, a)))
            .map(|(mu, a)| inner[mu].d1(a))
            .collect();
        for a in 0..n {
            let mut s = 0.0;
            for mu in 0..m {
                s += outer.d1(mu) * y1[mu * n + a];
            }
            out.data[1 + a] = s;
        }
        if order < 2 {
            return out;
        }
        // g[nu][a] = sum_mu f_{mu nu} y1[mu][a]
        let mut g = vec![0.0; m * n];
        for nu in 0..m {
            for a in 0..n {
                let mut s = 0.0;
                for mu in 0..m {
                    s += outer.d2(mu, nu) * y1[mu * n + a];
                }
                g[nu * n + a] = s;
            }
        }
        for a in 0..n {
            for b in a..n {
                let mut s = 0.0;
                for mu in 0..m {
                    s += g[mu * n + a] * y1[mu * n + b] + outer.d1(mu) * inner[mu].d2(a, b);
                }
                out.set_d2(a, b, s);
            }
        }
        if order < 3 {
            return out;
        }
        // t2[rho][a][b] = sum_{mu,nu} f_{mu nu rho} y1[mu][a] y1[nu][b]
        let mut t1 = vec![0.0; m * m * n];
        for nu in 0..m {
            for rho in 0..m {
                for a in 0..n {
                    let mut s = 0.0;
                    for mu in 0..m {
                        s += outer.d3(mu, nu, rho) * y1[mu * n + a];
                    }
                    t1[(nu * m + rho) * n + a] = s;
                }
            }
        }
        let mut t2 = vec![0.0; m * n * n];
        for rho in 0..m {
            for a in 0..n {
                for b in 0..n {
                    let mut s = 0.0;
                    for nu in 0..m {
                        s += t1[(nu * m + rho) * n + a] * y1[nu * n + b];
                    }
                    t2[(rho * n + a) * n + b] = s;
                }
            }
        }
        for a in 0..n {
            for b in a..n {
                for c in b..n {
                    let mut s = 0.0;
                    for mu in 0..m {
                        let y = &inner[mu];
                        s += t2[(mu * n + a) * n + b] * y1[mu * n + c];
                        s += y.d2(a, b) * g[mu * n + c]
                            + y.d2(a, c) * g[mu * n + b]
                            + y.d2(b, c) * g[mu * n + a];
                        s += outer.d1(mu) * y.d3(a, b, c);
                    }
                    out.set_d3(a, b, c, s);
                }
            }
        }
        out
    }

    fn shape_with(&self, other: &Jet) -> (usize, usize) {
        let order = self.order.min(other.order);
        if self.order > 0 && other.order > 0 {
            assert_eq!(
                self.nvars, other.nvars,
                "jet arithmetic between incompatible variable sets"
            );
        }
        let n = if self.order > 0 {
            self.nvars
        } else {
            other.nvars
        };
        (n, order)
    }

    fn zip_linear(&self, other: &Jet, a: f64, b: f64) -> Jet {
        let (n, order) = self.shape_with(other);
        let len = storage_len(n, order);
        let data = (0..len)
            .map(|i| a * self.data[i] + b * other.data[i])
            .collect();
        Jet {
            nvars: n,
            order,
            data,
        }
    }

    /// True when the value and every stored derivative vanish.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// Largest absolute stored coefficient.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            nvars: self.nvars,
            order: self.order,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.data[0] += s;
        out
    }

    pub fn mul_jet(&self, other: &Jet) -> Jet {
        let (n, order) = self.shape_with(other);
        let (a, b) = (self, other);
        let mut out = Jet::constant(n, order, a.value() * b.value());
        if order == 0 {
            return out;
        }
        let (a0, b0) = (a.value(), b.value());
        for i in 0..n {
            out.data[1 + i] = a.d1(i) * b0 + a0 * b.d1(i);
        }
        if order >= 2 {
            for i in 0..n {
                for j in i..n {
                    let v = a.d2(i, j) * b0
                        + a.d1(i) * b.d1(j)
                        + a.d1(j) * b.d1(i)
                        + a0 * b.d2(i, j);
                    out.set_d2(i, j, v);
                }
            }
        }
        if order >= 3 {
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let v = a.d3(i, j, k) * b0
                            + a.d2(i, j) * b.d1(k)
                            + a.d2(i, k) * b.d1(j)
                            + a.d2(j, k) * b.d1(i)
                            + a.d1(i) * b.d2(j, k)
                            + a.d1(j) * b.d2(i, k)
                            + a.d1(k) * b.d2(i, j)
                            + a0 * b.d3(i, j, k);
                        out.set_d3(i, j, k, v);
                    }
                }
            }
        }
        out
    }

    /// `f(self)` given `f` and its first three derivatives at `self.value()`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64, f3: f64) -> Jet {
        let n = self.nvars;
        let a = self;
        let mut out = Jet::constant(n, self.order, f0);
        if self.order >= 1 {
            for i in 0..n {
                out.data[1 + i] = f1 * a.d1(i);
            }
        }
        if self.order >= 2 {
            for i in 0..n {
                for j in i..n {
                    out.set_d2(i, j, f1 * a.d2(i, j) + f2 * a.d1(i) * a.d1(j));
                }
            }
        }
        if self.order >= 3 {
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let v = f1 * a.d3(i, j, k)
                            + f2 * (a.d2(i, j) * a.d1(k)
                                + a.d2(i, k) * a.d1(j)
                                + a.d2(j, k) * a.d1(i))
                            + f3 * a.d1(i) * a.d1(j) * a.d1(k);
                        out.set_d3(i, j, k, v);
                    }
                }
            }
        }
        out
    }

    fn domain(op: &'static str, value: f64) -> GeomError {
        GeomError::Domain {
            op,
            value,
            point: Vec::new(),
        }
    }

    pub fn recip(&self) -> Result<Jet> {
        let x = self.value();
        if x == 0.0 || !x.is_finite() {
            return Err(Jet::domain("div", x));
        }
        let r = 1.0 / x;
        Ok(self.chain(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r))
    }

    pub fn checked_div(&self, other: &Jet) -> Result<Jet> {
        Ok(self.mul_jet(&other.recip()?))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let x = self.value();
        if x <= 0.0 || !x.is_finite() {
            return Err(Jet::domain("sqrt", x));
        }
        let s = libm::sqrt(x);
        Ok(self.chain(
            s,
            0.5 / s,
            -0.25 / (x * s),
            0.375 / (x * x * s),
        ))
    }

    pub fn ln(&self) -> Result<Jet> {
        let x = self.value();
        if x <= 0.0 || !x.is_finite() {
            return Err(Jet::domain("log", x));
        }
        let r = 1.0 / x;
        Ok(self.chain(libm::log(x), r, -r * r, 2.0 * r * r * r))
    }

    pub fn exp(&self) -> Jet {
        let e = libm::exp(self.value());
        self.chain(e, e, e, e)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = (libm::sin(self.value()), libm::cos(self.value()));
        self.chain(s, c, -s, -c)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = (libm::sin(self.value()), libm::cos(self.value()));
        self.chain(c, -s, -c, s)
    }

    pub fn atan(&self) -> Jet {
        let x = self.value();
        let q = 1.0 / (1.0 + x * x);
        self.chain(
            libm::atan(x),
            q,
            -2.0 * x * q * q,
            (6.0 * x * x - 2.0) * q * q * q,
        )
    }

    /// Integer power; negative exponents require a non-zero value.
    pub fn powi(&self, p: i32) -> Result<Jet> {
        let x = self.value();
        if p < 0 && x == 0.0 {
            return Err(Jet::domain("pow", x));
        }
        let pf = p as f64;
        let pw = |e: i32| if e == 0 { 1.0 } else { libm::pow(x, e as f64) };
        Ok(self.chain(
            pw(p),
            pf * pw(p - 1),
            pf * (pf - 1.0) * pw(p - 2),
            pf * (pf - 1.0) * (pf - 2.0) * pw(p - 3),
        ))
    }

    /// Real power `self^p` for positive values.
    pub fn powf(&self, p: f64) -> Result<Jet> {
        let x = self.value();
        if x <= 0.0 {
            return Err(Jet::domain("pow", x));
        }
        let pw = |e: f64| libm::pow(x, e);
        Ok(self.chain(
            pw(p),
            p * pw(p - 1.0),
            p * (p - 1.0) * pw(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * pw(p - 3.0),
        ))
    }

    /// `self^exponent` for a jet-valued exponent, via `exp(exponent * ln self)`.
    pub fn pow(&self, exponent: &Jet) -> Result<Jet> {
        Ok(exponent.mul_jet(&self.ln()?).exp())
    }
}

/// Binary and unary jet operations, addressable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sqrt,
    Exp,
    Sin,
    Cos,
    Atan,
}

/// Apply `op` to `a` (and `b` for binary operations; ignored for unary ones).
pub fn jet_arithmetic(a: &Jet, b: &Jet, op: JetOp) -> Result<Jet> {
    let binary = matches!(op, JetOp::Add | JetOp::Sub | JetOp::Mul | JetOp::Div | JetOp::Pow);
    if binary && a.order > 0 && b.order > 0 && a.nvars != b.nvars {
        return Err(GeomError::DimensionMismatch {
            expected: a.nvars,
            got: b.nvars,
        });
    }
    Ok(match op {
        JetOp::Add => a + b,
        JetOp::Sub => a - b,
        JetOp::Mul => a * b,
        JetOp::Div => a.checked_div(b)?,
        JetOp::Pow => a.pow(b)?,
        JetOp::Sqrt => a.sqrt()?,
        JetOp::Exp => a.exp(),
        JetOp::Sin => a.sin(),
        JetOp::Cos => a.cos(),
        JetOp::Atan => a.atan(),
    })
}

/// The jet of the `i`-th coordinate function at `x0`.
pub fn lift_coordinate(i: usize, x0: &[f64], order: usize) -> Result<Jet> {
    if i >= x0.len() {
        return Err(GeomError::IndexOutOfRange {
            index: i,
            dim: x0.len(),
        });
    }
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(GeomError::InvalidOrder(order));
    }
    Ok(Jet::variable(x0.len(), order, i, x0[i]))
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip_linear(rhs, 1.0, 1.0)
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip_linear(rhs, 1.0, -1.0)
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Mul<&Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self.add_scalar(-rhs)
    }
}

impl Sub<f64> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self.add_scalar(-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        if self.order <= rhs.order && (self.order == 0 || self.nvars == rhs.nvars) {
            for (a, b) in self.data.iter_mut().zip(&rhs.data) {
                *a += *b;
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self += &rhs;
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        if self.order <= rhs.order && (self.order == 0 || self.nvars == rhs.nvars) {
            for (a, b) in self.data.iter_mut().zip(&rhs.data) {
                *a -= *b;
            }
        } else {
            *self = &*self - rhs;
        }
    }
}

impl SubAssign<Jet> for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self -= &rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lift_coordinate_basics() {
        let x = lift_coordinate(0, &[2.0, 5.0], 2).unwrap();
        assert_eq!(x.value(), 2.0);
        assert_eq!(x.gradient(), &[1.0, 0.0]);
        assert!(x.hessian().unwrap().iter().all(|&v| v == 0.0));

        let y = lift_coordinate(1, &[0.0, 0.0, 0.0], 1).unwrap();
        assert_eq!(y.gradient(), &[0.0, 1.0, 0.0]);

        assert!(matches!(
            lift_coordinate(2, &[0.0, 0.0], 1),
            Err(GeomError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            lift_coordinate(0, &[0.0], 4),
            Err(GeomError::InvalidOrder(4))
        ));
    }

    #[test]
    fn sine_taylor_coefficients_at_zero() {
        let s = lift_coordinate(0, &[0.0], 3).unwrap().sin();
        assert_eq!(s.value(), 0.0);
        assert_eq!(s.d1(0), 1.0);
        assert_eq!(s.d2(0, 0), 0.0);
        assert_eq!(s.d3(0, 0, 0), -1.0);
    }

    #[test]
    fn square_and_reciprocal() {
        let x = lift_coordinate(0, &[3.0], 2).unwrap();
        let sq = &x * &x;
        assert_eq!((sq.value(), sq.d1(0), sq.d2(0, 0)), (9.0, 6.0, 2.0));

        let x = lift_coordinate(0, &[2.0], 2).unwrap();
        let one = Jet::constant(1, 2, 1.0);
        let q = one.checked_div(&x).unwrap();
        assert_relative_eq!(q.value(), 0.5);
        assert_relative_eq!(q.d1(0), -0.25);
        assert_relative_eq!(q.d2(0, 0), 0.25);
    }

    #[test]
    fn exp_at_zero_copies_gradient() {
        let x = lift_coordinate(0, &[0.0, 0.0], 1).unwrap();
        let y = lift_coordinate(1, &[0.0, 0.0], 1).unwrap();
        let z = (&x * 3.0 - &y * 2.0).exp();
        assert_eq!(z.value(), 1.0);
        assert_eq!(z.gradient(), &[3.0, -2.0]);
    }

    #[test]
    fn domain_errors() {
        let zero = Jet::constant(1, 1, 0.0);
        assert!(matches!(
            Jet::constant(1, 1, 1.0).checked_div(&zero),
            Err(GeomError::Domain { op: "div", .. })
        ));
        assert!(matches!(
            Jet::constant(1, 1, -1.0).sqrt(),
            Err(GeomError::Domain { op: "sqrt", .. })
        ));
        assert!(matches!(
            zero.ln(),
            Err(GeomError::Domain { op: "log", .. })
        ));
    }

    #[test]
    fn mixed_orders_truncate() {
        let a = lift_coordinate(0, &[1.0, 2.0], 3).unwrap();
        let b = lift_coordinate(1, &[1.0, 2.0], 1).unwrap();
        let c = &a * &b;
        assert_eq!(c.order(), 1);
        assert!(c.hessian().is_none());
        assert!(c.third().is_none());
        assert_eq!((&a + &b).order(), 1);
    }

    #[test]
    fn partial_and_reindex() {
        // f = x^2 y at (2, 3)
        let x = lift_coordinate(0, &[2.0, 3.0], 3).unwrap();
        let y = lift_coordinate(1, &[2.0, 3.0], 3).unwrap();
        let f = &(&x * &x) * &y;
        let fx = f.partial(0); // 2xy
        assert_eq!(fx.order(), 2);
        assert_relative_eq!(fx.value(), 12.0);
        assert_relative_eq!(fx.d1(0), 6.0);
        assert_relative_eq!(fx.d1(1), 4.0);
        assert_relative_eq!(fx.d2(0, 1), 2.0);

        let g = f.reindex(3, &[2, 0]);
        assert_relative_eq!(g.d1(2), 12.0);
        assert_relative_eq!(g.d1(0), 4.0);
        assert_relative_eq!(g.d3(2, 2, 0), 2.0);
        assert_relative_eq!(g.d3(0, 2, 2), 2.0);
    }

    #[test]
    fn compose_matches_direct_evaluation() {
        // outer f(a, b) = sin(a) * b^2 evaluated on a = u*v, b = u + v^2
        let p = [0.4, -0.7];
        let u = Jet::variable(2, 3, 0, p[0]);
        let v = Jet::variable(2, 3, 1, p[1]);
        let a = &u * &v;
        let b = &u + &(&v * &v);
        let direct = &a.sin() * &(&b * &b);

        let y0 = [a.value(), b.value()];
        let av = Jet::variable(2, 3, 0, y0[0]);
        let bv = Jet::variable(2, 3, 1, y0[1]);
        let outer = &av.sin() * &(&bv * &bv);
        let composed = Jet::compose(&outer, &[a, b]);
        for (x, y) in direct.data.iter().zip(&composed.data) {
            assert_relative_eq!(x, y, epsilon = 1e-13, max_relative = 1e-12);
        }
    }
}
