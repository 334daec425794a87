//! Truncated multivariate Taylor polynomials ("jets").
//!
//! A `Jet<N>` carries the Taylor coefficients of a smooth function of `N`
//! variables about a base point, up to total degree [`MAX_ORDER`]. The
//! coefficient of the monomial `h^e` is `∂^e f / e!`. Every jet also records
//! the degree up to which its coefficients are trustworthy; products keep the
//! smaller of the two orders and differentiation lowers the order by one, so a
//! chain of derived quantities always knows how many derivatives it still
//! carries.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::math;

/// Highest total degree carried by any jet.
pub const MAX_ORDER: usize = 4;

const CAP: usize = 35;
const MUL_CAP: usize = 210;
const NONE: u8 = u8::MAX;

struct Tables {
    /// number of monomials of degree `<= k`
    len: [usize; MAX_ORDER + 1],
    exps: [[u8; 3]; CAP],
    up: [[u8; 3]; CAP],
    /// `(i, j, k)` with `exps[i] + exps[j] == exps[k]`, sorted by degree of `k`
    mul: [[u8; 3]; MUL_CAP],
    mul_len: [usize; MAX_ORDER + 1],
}

const fn find(exps: &[[u8; 3]; CAP], count: usize, e: [u8; 3]) -> u8 {
    let mut i = 0;
    while i < count {
        if exps[i][0] == e[0] && exps[i][1] == e[1] && exps[i][2] == e[2] {
            return i as u8;
        }
        i += 1;
    }
    NONE
}

const fn build(nvars: usize) -> Tables {
    let mut exps = [[0u8; 3]; CAP];
    let mut len = [0usize; MAX_ORDER + 1];
    let mut count = 0;
    let mut d = 0;
    while d <= MAX_ORDER {
        let mut a = d as i32;
        while a >= 0 {
            let mut b = (d as i32) - a;
            while b >= 0 {
                let c = (d as i32) - a - b;
                let ok = match nvars {
                    1 => b == 0 && c == 0,
                    2 => c == 0,
                    _ => true,
                };
                if ok {
                    exps[count] = [a as u8, b as u8, c as u8];
                    count += 1;
                }
                b -= 1;
            }
            a -= 1;
        }
        len[d] = count;
        d += 1;
    }

    let mut up = [[NONE; 3]; CAP];
    let mut j = 0;
    while j < count {
        let mut v = 0;
        while v < nvars {
            let mut e = exps[j];
            e[v] += 1;
            up[j][v] = find(&exps, count, e);
            v += 1;
        }
        j += 1;
    }

    let mut mul = [[0u8; 3]; MUL_CAP];
    let mut mul_len = [0usize; MAX_ORDER + 1];
    let mut m = 0;
    let mut k = 0;
    let mut deg = 0;
    while k < count {
        let ek = exps[k];
        let dk = (ek[0] + ek[1] + ek[2]) as usize;
        while deg < dk {
            mul_len[deg] = m;
            deg += 1;
        }
        let mut i = 0;
        while i < count {
            let ei = exps[i];
            if ei[0] <= ek[0] && ei[1] <= ek[1] && ei[2] <= ek[2] {
                let ej = [ek[0] - ei[0], ek[1] - ei[1], ek[2] - ei[2]];
                let jj = find(&exps, count, ej);
                mul[m] = [i as u8, jj, k as u8];
                m += 1;
            }
            i += 1;
        }
        k += 1;
    }
    while deg <= MAX_ORDER {
        mul_len[deg] = m;
        deg += 1;
    }

    Tables { len, exps, up, mul, mul_len }
}

static T1: Tables = build(1);
static T2: Tables = build(2);
static T3: Tables = build(3);

const FACT: [f64; MAX_ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Truncated Taylor polynomial in `N` variables (`1 <= N <= 3`).
#[derive(Clone, Copy, PartialEq)]
pub struct Jet<const N: usize> {
    c: [f64; CAP],
    order: u8,
}

impl<const N: usize> fmt::Debug for Jet<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = Self::tables().len[self.order as usize];
        f.debug_struct("Jet").field("order", &self.order).field("coeffs", &&self.c[..n]).finish()
    }
}

impl<const N: usize> Jet<N> {
    #[inline]
    fn tables() -> &'static Tables {
        match N {
            1 => &T1,
            2 => &T2,
            3 => &T3,
            _ => panic!("jets support 1 to 3 variables"),
        }
    }

    /// Number of coefficients stored for a jet of the given order.
    pub fn coefficient_count(order: usize) -> usize {
        Self::tables().len[order.min(MAX_ORDER)]
    }

    /// An exact constant; valid to every order.
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; CAP];
        c[0] = v;
        Jet { c, order: MAX_ORDER as u8 }
    }

    /// The coordinate function `x_var` expanded about `value`, carried to `order`.
    pub fn variable(value: f64, var: usize, order: usize) -> Self {
        assert!(var < N);
        let mut j = Self::constant(value);
        if order >= 1 {
            j.c[1 + var] = 1.0;
        }
        j.order = order.min(MAX_ORDER) as u8;
        j
    }

    /// Builds a jet from raw Taylor coefficients in graded order.
    pub fn from_coefficients(coeffs: &[f64], order: usize) -> Self {
        let order = order.min(MAX_ORDER);
        let n = Self::tables().len[order];
        assert!(coeffs.len() >= n);
        let mut c = [0.0; CAP];
        c[..n].copy_from_slice(&coeffs[..n]);
        Jet { c, order: order as u8 }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c[..Self::tables().len[self.order as usize]]
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(mut self, order: usize) -> Self {
        let order = order.min(self.order as usize);
        let t = Self::tables();
        for v in &mut self.c[t.len[order]..] {
            *v = 0.0;
        }
        self.order = order as u8;
        self
    }

    /// Partial derivative `∂f/∂x_var` as a jet one order lower.
    pub fn partial(&self, var: usize) -> Self {
        assert!(var < N);
        assert!(self.order > 0, "cannot differentiate an order-0 jet");
        let t = Self::tables();
        let order = self.order as usize - 1;
        let mut c = [0.0; CAP];
        for (j, cj) in c.iter_mut().enumerate().take(t.len[order]) {
            let k = t.up[j][var] as usize;
            *cj = (t.exps[j][var] as f64 + 1.0) * self.c[k];
        }
        Jet { c, order: order as u8 }
    }

    /// Derivative along a constant direction: `Σ dir_i ∂_i f`.
    pub fn directional(&self, dir: &[f64; N]) -> Self {
        assert!(self.order > 0, "cannot differentiate an order-0 jet");
        let mut out = Self::constant(0.0).truncate(self.order as usize - 1);
        for (i, d) in dir.iter().enumerate() {
            if *d != 0.0 {
                out += self.partial(i) * *d;
            }
        }
        out
    }

    /// Gradient at the base point.
    pub fn gradient(&self) -> [f64; N] {
        let mut g = [0.0; N];
        if self.order >= 1 {
            g.copy_from_slice(&self.c[1..1 + N]);
        }
        g
    }

    /// Mixed partial derivative `∂^e f` at the base point.
    pub fn derivative(&self, e: &[u8; N]) -> f64 {
        let deg: usize = e.iter().map(|&x| x as usize).sum();
        assert!(deg <= self.order as usize, "derivative beyond jet order");
        let mut full = [0u8; 3];
        full[..N].copy_from_slice(e);
        let t = Self::tables();
        let idx = find(&t.exps, t.len[MAX_ORDER], full) as usize;
        let scale: f64 = e.iter().map(|&x| FACT[x as usize]).product();
        self.c[idx] * scale
    }

    /// Applies a univariate function given its normalized derivatives
    /// `d[k] = f^(k)(value) / k!` at the base value.
    fn apply(&self, d: &[f64; MAX_ORDER + 1]) -> Self {
        let order = self.order as usize;
        let mut h = *self;
        h.c[0] = 0.0;
        let mut out = Self::constant(d[0]).truncate(order);
        let mut pow = h;
        for dk in d.iter().take(order + 1).skip(1) {
            out += pow * *dk;
            pow *= h;
        }
        out
    }

    pub fn recip(&self) -> Self {
        let x = self.c[0];
        let r = 1.0 / x;
        let mut d = [0.0; MAX_ORDER + 1];
        let mut p = r;
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = if k % 2 == 0 { p } else { -p };
            p *= r;
        }
        self.apply(&d)
    }

    /// `x^r` for real `r` via the binomial series; requires a positive value
    /// unless `r` is a non-negative integer.
    pub fn powf(&self, r: f64) -> Self {
        let x = self.c[0];
        let mut d = [0.0; MAX_ORDER + 1];
        let mut binom = 1.0;
        for (k, dk) in d.iter_mut().enumerate() {
            if k > 0 {
                binom *= (r - (k as f64 - 1.0)) / k as f64;
            }
            *dk = binom * math::powf(x, r - k as f64);
        }
        self.apply(&d)
    }

    pub fn powi(&self, n: i32) -> Self {
        match n {
            0 => Self::constant(1.0),
            1 => *self,
            2 => *self * *self,
            _ if n > 0 => {
                let mut acc = *self;
                for _ in 1..n {
                    acc *= *self;
                }
                acc
            }
            _ => self.powi(-n).recip(),
        }
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn exp(&self) -> Self {
        let e = math::exp(self.c[0]);
        let mut d = [0.0; MAX_ORDER + 1];
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = e / FACT[k];
        }
        self.apply(&d)
    }

    pub fn ln(&self) -> Self {
        let x = self.c[0];
        let mut d = [0.0; MAX_ORDER + 1];
        d[0] = math::ln(x);
        let mut p = 1.0;
        for (k, dk) in d.iter_mut().enumerate().skip(1) {
            p /= x;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *dk = sign * p / k as f64;
        }
        self.apply(&d)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = (math::sin(self.c[0]), math::cos(self.c[0]));
        let cyc = [s, c, -s, -c];
        let mut d = [0.0; MAX_ORDER + 1];
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = cyc[k % 4] / FACT[k];
        }
        self.apply(&d)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = (math::sin(self.c[0]), math::cos(self.c[0]));
        let cyc = [c, -s, -c, s];
        let mut d = [0.0; MAX_ORDER + 1];
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = cyc[k % 4] / FACT[k];
        }
        self.apply(&d)
    }

    /// Substitutes jets for the variables: `f(inner_1, ..., inner_N)`, where
    /// this jet is expanded about the base values of `inner`.
    pub fn compose<const M: usize>(&self, inner: &[Jet<M>; N]) -> Jet<M> {
        let t = Self::tables();
        let mut order = self.order as usize;
        for j in inner {
            order = order.min(j.order as usize);
        }
        let mut powers = [[Jet::<M>::constant(0.0); MAX_ORDER + 1]; N];
        for (v, j) in inner.iter().enumerate() {
            let mut h = j.truncate(order);
            h.c[0] = 0.0;
            powers[v][0] = Jet::constant(1.0);
            for k in 1..=order {
                powers[v][k] = powers[v][k - 1] * h;
            }
        }
        let mut out = Jet::<M>::constant(0.0).truncate(order);
        for idx in 0..t.len[order] {
            let ck = self.c[idx];
            if ck == 0.0 {
                continue;
            }
            let e = t.exps[idx];
            let mut term = powers[0][e[0] as usize];
            for v in 1..N {
                if e[v] > 0 {
                    term *= powers[v][e[v] as usize];
                }
            }
            out += term * ck;
        }
        out
    }
}

impl<const N: usize> Default for Jet<N> {
    fn default() -> Self {
        Self::constant(0.0)
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for Jet<N> {
    fn add_assign(&mut self, rhs: Self) {
        let order = self.order.min(rhs.order);
        let n = Self::tables().len[order as usize];
        for i in 0..n {
            self.c[i] += rhs.c[i];
        }
        if order < self.order {
            *self = self.truncate(order as usize);
        }
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<const N: usize> SubAssign for Jet<N> {
    fn sub_assign(&mut self, rhs: Self) {
        let order = self.order.min(rhs.order);
        let n = Self::tables().len[order as usize];
        for i in 0..n {
            self.c[i] -= rhs.c[i];
        }
        if order < self.order {
            *self = self.truncate(order as usize);
        }
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for v in &mut self.c {
            *v = -*v;
        }
        self
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let order = self.order.min(rhs.order);
        let t = Self::tables();
        let mut c = [0.0; CAP];
        for m in &t.mul[..t.mul_len[order as usize]] {
            c[m[2] as usize] += self.c[m[0] as usize] * rhs.c[m[1] as usize];
        }
        Jet { c, order }
    }
}

impl<const N: usize> MulAssign for Jet<N> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<const N: usize> Add<f64> for Jet<N> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.c[0] += rhs;
        self
    }
}

impl<const N: usize> Sub<f64> for Jet<N> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.c[0] -= rhs;
        self
    }
}

impl<const N: usize> Mul<f64> for Jet<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        for v in &mut self.c {
            *v *= rhs;
        }
        self
    }
}

impl<const N: usize> Div<f64> for Jet<N> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self * (1.0 / rhs)
    }
}

impl<const N: usize> Mul<Jet<N>> for f64 {
    type Output = Jet<N>;
    fn mul(self, rhs: Jet<N>) -> Jet<N> {
        rhs * self
    }
}

/// Arithmetic shared by plain floats and jets, used by expression evaluation.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self> {
    fn from_f64(v: f64) -> Self;
    fn value(&self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, r: f64) -> Self;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn exp(self) -> Self {
        math::exp(self)
    }
    fn ln(self) -> Self {
        math::ln(self)
    }
    fn sin(self) -> Self {
        math::sin(self)
    }
    fn cos(self) -> Self {
        math::cos(self)
    }
    fn sqrt(self) -> Self {
        math::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        math::powi(self, n)
    }
    fn powf(self, r: f64) -> Self {
        math::powf(self, r)
    }
}

impl<const N: usize> Scalar for Jet<N> {
    fn from_f64(v: f64) -> Self {
        Jet::constant(v)
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn exp(self) -> Self {
        Jet::exp(&self)
    }
    fn ln(self) -> Self {
        Jet::ln(&self)
    }
    fn sin(self) -> Self {
        Jet::sin(&self)
    }
    fn cos(self) -> Self {
        Jet::cos(&self)
    }
    fn sqrt(self) -> Self {
        Jet::sqrt(&self)
    }
    fn powi(self, n: i32) -> Self {
        Jet::powi(&self, n)
    }
    fn powf(self, r: f64) -> Self {
        Jet::powf(&self, r)
    }
}

pub type Jet1 = Jet<1>;
pub type Jet2 = Jet<2>;
pub type Jet3 = Jet<3>;

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        math::abs(a - b) <= tol * (1.0 + math::abs(b))
    }

    #[test]
    fn table_sizes() {
        assert_eq!(Jet3::coefficient_count(4), 35);
        assert_eq!(Jet3::coefficient_count(3), 20);
        assert_eq!(Jet2::coefficient_count(4), 15);
        assert_eq!(Jet1::coefficient_count(4), 5);
        assert_eq!(T3.mul_len[MAX_ORDER], 210);
    }

    #[test]
    fn exp_series() {
        let x = Jet1::variable(0.0, 0, 4).exp();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (c, w) in x.coefficients().iter().zip(want) {
            assert!(close(*c, w, 1e-15));
        }
    }

    #[test]
    fn product_of_polynomials() {
        // (1 + x + y) (2 - y) at the origin
        let x = Jet2::variable(0.0, 0, 4);
        let y = Jet2::variable(0.0, 1, 4);
        let p = (x + y + 1.0) * (Jet2::constant(2.0) - y);
        assert_eq!(p.value(), 2.0);
        assert_eq!(p.derivative(&[1, 0]), 2.0);
        assert_eq!(p.derivative(&[0, 1]), 1.0);
        assert_eq!(p.derivative(&[1, 1]), -1.0);
        assert_eq!(p.derivative(&[0, 2]), -2.0);
    }

    #[test]
    fn partial_lowers_order() {
        let x = Jet3::variable(0.5, 0, 3);
        let f = x.sin();
        let df = f.partial(0);
        assert_eq!(df.order(), 2);
        assert!(close(df.value(), math::cos(0.5), 1e-15));
        assert!(close(df.derivative(&[2, 0, 0]), -math::cos(0.5), 1e-14));
    }

    #[test]
    fn order_is_min_of_operands() {
        let a = Jet3::variable(1.0, 0, 4);
        let b = Jet3::variable(2.0, 1, 2);
        assert_eq!((a * b).order(), 2);
        assert_eq!((a + b).order(), 2);
        assert_eq!((a * 3.0).order(), 4);
    }

    #[test]
    fn recip_sqrt_ln() {
        let x = Jet1::variable(2.0, 0, 4);
        let r = x.recip();
        // 1/x: derivatives -1/x^2, 2/x^3, -6/x^4, 24/x^5
        assert!(close(r.derivative(&[1]), -0.25, 1e-15));
        assert!(close(r.derivative(&[3]), -6.0 / 16.0, 1e-14));
        let s = x.sqrt();
        assert!(close(s.derivative(&[2]), -0.25 * math::powf(2.0, -1.5), 1e-14));
        let l = x.ln();
        assert!(close(l.derivative(&[4]), -6.0 / 16.0, 1e-14));
    }

    #[test]
    fn compose_matches_direct_evaluation() {
        // f(x, y, z) = x y + z^2 about (1, 2, 3); substitute x = 1 + u, y = 2 + v, z = 3 + u v
        let p = [1.0, 2.0, 3.0];
        let vars: [Jet3; 3] = core::array::from_fn(|i| Jet3::variable(p[i], i, 4));
        let f = vars[0] * vars[1] + vars[2] * vars[2];
        let u = Jet2::variable(0.0, 0, 4);
        let v = Jet2::variable(0.0, 1, 4);
        let inner = [u + 1.0, v + 2.0, u * v + 3.0];
        let g = f.compose(&inner);
        let direct = inner[0] * inner[1] + inner[2] * inner[2];
        for (a, b) in g.coefficients().iter().zip(direct.coefficients()) {
            assert!(close(*a, *b, 1e-14));
        }
    }
}
