//! Smooth fields on a single global chart and the derivative oracle built on
//! jets: exact partial derivatives, Lie brackets and directional derivatives.

use alloc::boxed::Box;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Jet3, Scalar, MAX_ORDER};

/// A point of the global chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ChartPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        ChartPoint { x, y, z }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Coordinate jets `(x, y, z)` about this point.
    pub fn jets(&self, order: usize) -> [Jet3; 3] {
        [Jet3::variable(self.x, 0, order), Jet3::variable(self.y, 1, order), Jet3::variable(self.z, 2, order)]
    }
}

impl From<[f64; 3]> for ChartPoint {
    fn from(c: [f64; 3]) -> Self {
        ChartPoint::new(c[0], c[1], c[2])
    }
}

pub type JetVector = [Jet3; 3];

/// A vector field in chart components.
///
/// `eval` receives coordinate jets (or any jets of the coordinates) and must
/// return the components as jets of the same inputs.
pub trait VectorField: Send + Sync {
    fn eval(&self, p: &[Jet3; 3]) -> [Jet3; 3];

    fn value_at(&self, p: ChartPoint) -> [f64; 3] {
        let v = self.eval(&p.jets(0));
        [v[0].value(), v[1].value(), v[2].value()]
    }
}

/// A scalar field in chart coordinates.
pub trait ScalarField: Send + Sync {
    fn eval(&self, p: &[Jet3; 3]) -> Jet3;
}

/// Field whose components are expressions in `x, y, z` (variables 0, 1, 2).
#[derive(Debug, Clone, PartialEq)]
pub struct ExprField {
    pub components: [Expr; 3],
}

impl ExprField {
    pub fn new(components: [Expr; 3]) -> Self {
        ExprField { components }
    }

    pub fn eval_generic<S: Scalar>(&self, p: &[S; 3]) -> [S; 3] {
        [self.components[0].eval(p), self.components[1].eval(p), self.components[2].eval(p)]
    }
}

impl VectorField for ExprField {
    fn eval(&self, p: &[Jet3; 3]) -> [Jet3; 3] {
        self.eval_generic(p)
    }
}

impl ScalarField for Expr {
    fn eval(&self, p: &[Jet3; 3]) -> Jet3 {
        Expr::eval(self, p)
    }
}

/// Field given by a closure over coordinate jets.
pub struct FnField<F>(pub F);

impl<F> VectorField for FnField<F>
where
    F: Fn(&[Jet3; 3]) -> [Jet3; 3] + Send + Sync,
{
    fn eval(&self, p: &[Jet3; 3]) -> [Jet3; 3] {
        (self.0)(p)
    }
}

impl<F> ScalarField for FnField<F>
where
    F: Fn(&[Jet3; 3]) -> Jet3 + Send + Sync,
{
    fn eval(&self, p: &[Jet3; 3]) -> Jet3 {
        (self.0)(p)
    }
}

/// Constant-coefficient field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstField(pub [f64; 3]);

impl VectorField for ConstField {
    fn eval(&self, _p: &[Jet3; 3]) -> [Jet3; 3] {
        self.0.map(Jet3::constant)
    }
}

impl<T: VectorField + ?Sized> VectorField for Box<T> {
    fn eval(&self, p: &[Jet3; 3]) -> [Jet3; 3] {
        (**self).eval(p)
    }
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn eval(&self, p: &[Jet3; 3]) -> [Jet3; 3] {
        (**self).eval(p)
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(Error::OrderOutOfRange { order })
    } else {
        Ok(())
    }
}

/// Components of `field` and all their partial derivatives up to `order` at `p`.
pub fn evaluate_jet<V: VectorField + ?Sized>(field: &V, p: ChartPoint, order: usize) -> Result<JetVector> {
    check_order(order)?;
    let out = field.eval(&p.jets(order));
    Ok(out.map(|c| c.truncate(order)))
}

/// Derivative of a jet along a jet-valued vector field: `Σ v_j ∂_j f`.
pub fn derive_along(f: &Jet3, v: &[Jet3; 3]) -> Jet3 {
    f.partial(0) * v[0] + f.partial(1) * v[1] + f.partial(2) * v[2]
}

/// `[V, W] = (DW)V − (DV)W` on jets; the result is one order lower.
pub fn bracket_jets(v: &[Jet3; 3], w: &[Jet3; 3]) -> [Jet3; 3] {
    let mut out = [Jet3::constant(0.0); 3];
    for i in 0..3 {
        out[i] = derive_along(&w[i], v) - derive_along(&v[i], w);
    }
    out
}

pub fn lie_bracket<V, W>(v: &V, w: &W, p: ChartPoint) -> Result<[f64; 3]>
where
    V: VectorField + ?Sized,
    W: VectorField + ?Sized,
{
    let vj = evaluate_jet(v, p, 1)?;
    let wj = evaluate_jet(w, p, 1)?;
    let b = bracket_jets(&vj, &wj);
    Ok([b[0].value(), b[1].value(), b[2].value()])
}

/// `V f` at `p`, i.e. `∇f(p) · V(p)`.
pub fn directional_derivative<F, V>(f: &F, v: &V, p: ChartPoint) -> Result<f64>
where
    F: ScalarField + ?Sized,
    V: VectorField + ?Sized,
{
    let fj = f.eval(&p.jets(1));
    let vv = v.value_at(p);
    let g = fj.gradient();
    Ok(g[0] * vv[0] + g[1] * vv[1] + g[2] * vv[2])
}
