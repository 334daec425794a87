//! Piecewise smooth boundary curves of surface patches.
//!
//! A boundary is a closed chain of parameter-space pieces `t ↦ (u(t), v(t))`.
//! Along it we track the angle functions `ψ = α(γ̇)` and `θ` (with
//! `γ̇ = cos θ X + sin θ X₂` for the unit tangent), the `ε`-geodesic
//! curvature, the corners, and the points where `γ̇` enters or leaves `E`.

use alloc::vec;
use alloc::vec::Vec;

use crate::contact::{frame_inner, ContactStructure, Epsilon};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Jet1, Scalar};
use crate::levi_civita::christoffel;
use crate::linalg;
use crate::math::{abs, atan2, ceil, signum, sqrt, PI};
use crate::quadrature::{crossing, gauss_bonnet_integral, integrate_1d, slope_at_zero, CumulativeProfile, Integrator, SlopeFit};
use crate::surface::{frame_from, SurfaceJets, SurfacePatch, SurfacePointFrame, CHAR_TOL};

/// `|ψ|` at or below this counts as tangent to `E`.
pub const ZERO_TOL: f64 = 1e-10;
/// Smallest admissible one-sided `|dψ/ds|` at an endpoint of `W`.
pub const STAR_TOL: f64 = 1e-6;
/// Unit tangents further apart than this at a junction make a corner.
pub const CORNER_TOL: f64 = 1e-8;
/// Default number of classification samples along the whole curve.
pub const DEFAULT_SAMPLES: usize = 2000;

const LENGTH_TOL: f64 = 1e-12;

/// One smooth piece; the expressions use variable 0 for the curve parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePiece {
    pub u: Expr,
    pub v: Expr,
    pub range: [f64; 2],
}

impl CurvePiece {
    pub fn new(u: Expr, v: Expr, range: [f64; 2]) -> Self {
        CurvePiece { u, v, range }
    }

    pub fn uv(&self, t: f64) -> [f64; 2] {
        [self.u.eval(&[t]), self.v.eval(&[t])]
    }

    /// `(u, v)` as jets in `t`.
    pub fn jets(&self, t: f64, order: usize) -> [Jet1; 2] {
        let tj = [Jet1::variable(t, 0, order)];
        [self.u.eval(&tj), self.v.eval(&tj)]
    }

    /// `d(u, v)/dt`.
    pub fn velocity(&self, t: f64) -> [f64; 2] {
        let j = self.jets(t, 1);
        [j[0].derivative(&[1]), j[1].derivative(&[1])]
    }
}

/// A position on the curve: piece index and parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub piece: usize,
    pub t: f64,
}

/// Which one-sided limit to take at a junction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Before,
    After,
}

/// A closed, positively oriented, piecewise smooth boundary curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub pieces: Vec<CurvePiece>,
    /// `g`-length of each piece.
    pub lengths: Vec<f64>,
    /// Arclength at the start of each piece.
    pub starts: Vec<f64>,
    pub length: f64,
    /// Indices of pieces whose starting point is a corner.
    pub corners: Vec<usize>,
}

/// Unit tangent of `γ` in frame components together with `|γ'|_g`.
fn unit_tangent(cs: &ContactStructure, patch: &SurfacePatch, piece: &CurvePiece, t: f64) -> Result<([f64; 3], f64)> {
    let sj = SurfaceJets::new(cs, patch, piece.uv(t), 2, 1)?;
    let w = sj.push_forward(&piece.velocity(t));
    let n = linalg::norm(&w);
    if !(n > 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok((linalg::scale(&w, 1.0 / n), n))
}

fn speed(cs: &ContactStructure, patch: &SurfacePatch, piece: &CurvePiece, t: f64) -> Result<f64> {
    Ok(unit_tangent(cs, patch, piece, t)?.1)
}

/// Runs `integrate_1d` on a fallible integrand.
pub(crate) fn integrate_fallible<F: FnMut(f64) -> Result<f64>>(lo: f64, hi: f64, tol: f64, mut f: F) -> Result<f64> {
    let mut failure = None;
    let v = integrate_1d(lo, hi, tol, |t| match f(t) {
        Ok(x) => x,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    v
}

impl BoundaryCurve {
    /// Measures the pieces, checks that consecutive pieces join in the
    /// immersed surface and finds the corners.
    pub fn new(cs: &ContactStructure, patch: &SurfacePatch, pieces: Vec<CurvePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Domain("a boundary needs at least one piece"));
        }
        let n = pieces.len();
        let mut lengths = Vec::with_capacity(n);
        for p in &pieces {
            if !(p.range[1] > p.range[0]) {
                return Err(Error::Domain("curve piece ranges must be increasing"));
            }
            lengths.push(integrate_fallible(p.range[0], p.range[1], LENGTH_TOL, |t| speed(cs, patch, p, t))?);
        }
        let mut starts = Vec::with_capacity(n);
        let mut acc = 0.0;
        for l in &lengths {
            starts.push(acc);
            acc += l;
        }
        let mut corners = Vec::new();
        for j in 0..n {
            let prev = &pieces[(j + n - 1) % n];
            let next = &pieces[j];
            let pa = patch.immersion.point(prev.uv(prev.range[1]));
            let pb = patch.immersion.point(next.uv(next.range[0]));
            let (a, b) = ([pa.x, pa.y, pa.z], [pb.x, pb.y, pb.z]);
            let gap = linalg::norm(&linalg::sub(&a, &b));
            if gap > 1e-9 * (1.0 + linalg::norm(&a)) {
                return Err(Error::Domain("boundary pieces must join into a closed curve"));
            }
            let (ta, _) = unit_tangent(cs, patch, prev, prev.range[1])?;
            let (tb, _) = unit_tangent(cs, patch, next, next.range[0])?;
            if linalg::norm(&linalg::sub(&ta, &tb)) > CORNER_TOL {
                corners.push(j);
            }
        }
        Ok(BoundaryCurve { pieces, lengths, starts, length: acc, corners })
    }

    pub fn is_corner(&self, piece: usize) -> bool {
        self.corners.contains(&piece)
    }

    fn wrap(&self, s: f64) -> f64 {
        let r = s % self.length;
        if r < 0.0 {
            r + self.length
        } else {
            r
        }
    }

    /// Arclength of a curve point.
    pub fn arclength(&self, cs: &ContactStructure, patch: &SurfacePatch, at: CurvePoint) -> Result<f64> {
        let p = &self.pieces[at.piece];
        let part = integrate_fallible(p.range[0], at.t, LENGTH_TOL, |t| speed(cs, patch, p, t))?;
        Ok(self.starts[at.piece] + part)
    }

    /// Whether arclength `s` is a junction, returning the piece it starts.
    pub fn junction_at(&self, s: f64) -> Option<usize> {
        let s = self.wrap(s);
        let tol = 1e-12 * self.length;
        self.starts.iter().position(|&st| abs(s - st) <= tol || abs(s - st - self.length) <= tol)
    }

    /// Inverts the arclength parametrization.
    pub fn locate(&self, cs: &ContactStructure, patch: &SurfacePatch, s: f64, side: Side) -> Result<CurvePoint> {
        if !s.is_finite() {
            return Err(Error::Domain("arclength must be finite"));
        }
        let n = self.pieces.len();
        if let Some(j) = self.junction_at(s) {
            return Ok(match side {
                Side::After => CurvePoint { piece: j, t: self.pieces[j].range[0] },
                Side::Before => {
                    let i = (j + n - 1) % n;
                    CurvePoint { piece: i, t: self.pieces[i].range[1] }
                }
            });
        }
        let s = self.wrap(s);
        let j = (0..n).rev().find(|&j| self.starts[j] <= s).unwrap_or(0);
        let p = &self.pieces[j];
        let target = s - self.starts[j];
        let (mut lo, mut hi) = (p.range[0], p.range[1]);
        let mut t = lo + (hi - lo) * target / self.lengths[j];
        for _ in 0..60 {
            let f = integrate_fallible(p.range[0], t, LENGTH_TOL, |x| speed(cs, patch, p, x))? - target;
            if abs(f) <= 1e-13 * self.length {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let next = t - f / speed(cs, patch, p, t)?;
            t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        Ok(CurvePoint { piece: j, t })
    }
}

/// Pointwise data along the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveState {
    pub uv: [f64; 2],
    /// `|γ'|_g` with respect to the piece parameter.
    pub speed: f64,
    pub a: f64,
    pub psi: f64,
    /// `dψ/ds` for `g`-arclength.
    pub psi_dot: f64,
    /// Undefined at characteristic points.
    pub theta: Option<f64>,
    pub theta_dot: Option<f64>,
}

fn state_with(cs: &ContactStructure, patch: &SurfacePatch, piece: &CurvePiece, t: f64) -> Result<(CurveState, SurfaceJets)> {
    let uvj = piece.jets(t, 2);
    let uv = [uvj[0].value(), uvj[1].value()];
    let sj = SurfaceJets::new(cs, patch, uv, 3, 2)?;
    let cu = sj.cu.map(|c| c.compose(&uvj));
    let cv = sj.cv.map(|c| c.compose(&uvj));
    let (du, dv) = (uvj[0].partial(0), uvj[1].partial(0));
    let w: [Jet1; 3] = core::array::from_fn(|k| cu[k] * du + cv[k] * dv);
    let len = linalg::dot(&w, &w).sqrt();
    let speed = len.value();
    if !(speed > 0.0) {
        return Err(Error::ZeroVector);
    }
    let psi = w[2] / len;
    let a = sj.a().value();
    let (theta, theta_dot) = if abs(a) >= 1.0 - CHAR_TOL {
        (None, None)
    } else {
        let x = sj.x_jets()?.map(|c| c.compose(&uvj));
        let aj = sj.a().compose(&uvj);
        let b0 = (Jet1::from_f64(1.0) - aj * aj).sqrt();
        let x2 = [aj * -x[1], aj * x[0], b0];
        let c = linalg::dot(&w, &x);
        let s = linalg::dot(&w, &x2);
        let (cv0, sv0) = (c.value(), s.value());
        let rate = (cv0 * s.derivative(&[1]) - sv0 * c.derivative(&[1])) / (cv0 * cv0 + sv0 * sv0);
        (Some(atan2(sv0, cv0)), Some(rate / speed))
    };
    Ok((CurveState { uv, speed, a, psi: psi.value(), psi_dot: psi.derivative(&[1]) / speed, theta, theta_dot }, sj))
}

/// Curve state at a piece parameter.
pub fn curve_state(cs: &ContactStructure, patch: &SurfacePatch, piece: &CurvePiece, t: f64) -> Result<CurveState> {
    Ok(state_with(cs, patch, piece, t)?.0)
}

/// `(ψ, θ)` at arclength `s`.
pub fn psi_theta(cs: &ContactStructure, patch: &SurfacePatch, curve: &BoundaryCurve, s: f64) -> Result<(f64, f64)> {
    if let Some(j) = curve.junction_at(s) {
        if curve.is_corner(j) {
            return Err(Error::CornerPoint { t: s });
        }
    }
    let at = curve.locate(cs, patch, s, Side::After)?;
    let st = curve_state(cs, patch, &curve.pieces[at.piece], at.t)?;
    let theta = st.theta.ok_or(Error::CharacteristicPoint { a: st.a })?;
    Ok((st.psi, theta))
}

/// Geodesic curvature of the boundary for `g_ε`, computed two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicCurvature {
    /// `⟨∇^ε_γ̇ γ̇, I^ε γ̇⟩_ε / |γ̇|³_ε` from chart Christoffel symbols.
    pub definitional: f64,
    /// From the frame expansion in `θ`; undefined at characteristic points.
    pub expansion: Option<f64>,
    /// `|γ'|_ε` with respect to the piece parameter.
    pub speed_eps: f64,
}

/// Parameter-space rotation by a right angle in `(TΣ, h_ε)`.
fn rotate(h: [f64; 3], w: [f64; 2], sign: f64) -> [f64; 2] {
    let (h11, h12, h22) = (h[0], h[1], h[2]);
    let r = sign / sqrt(h11 * h22 - h12 * h12);
    [r * (-h12 * w[0] - h22 * w[1]), r * (h11 * w[0] + h12 * w[1])]
}

fn gram_eps(sj: &SurfaceJets, eps: Epsilon) -> [f64; 3] {
    let cu = linalg::values(&sj.cu);
    let cv = linalg::values(&sj.cv);
    [frame_inner(&cu, &cu, eps), frame_inner(&cu, &cv, eps), frame_inner(&cv, &cv, eps)]
}

fn definitional(patch: &SurfacePatch, piece: &CurvePiece, t: f64, sj: &SurfaceJets, eps: Epsilon) -> Result<(f64, f64)> {
    let uvj = piece.jets(t, 2);
    let pj = patch.immersion.eval1(&uvj);
    let p1 = pj.map(|p| p.derivative(&[1]));
    let p2 = pj.map(|p| p.derivative(&[2]));
    let gam = christoffel(&sj.lc, eps)?;
    let mut d = p2;
    for (l, dl) in d.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                *dl += gam[l][i][j] * p1[i] * p1[j];
            }
        }
    }
    let df = sj.lc.to_frame(&d);
    let h = gram_eps(sj, eps);
    let w = [uvj[0].derivative(&[1]), uvj[1].derivative(&[1])];
    let iw = sj.push_forward(&rotate(h, w, patch.orientation_sign()));
    let sp = sqrt(h[0] * w[0] * w[0] + 2.0 * h[1] * w[0] * w[1] + h[2] * w[1] * w[1]);
    Ok((frame_inner(&df, &iw, eps) / (sp * sp * sp), sp))
}

/// The frame expansion of `k^ε_g` for the unit tangent `cos θ X + sin θ X₂`.
fn expansion(sj: &SurfaceJets, f: &SurfacePointFrame, u: &[f64; 3], theta_dot: f64, eps: Epsilon) -> Result<f64> {
    let e = eps.get();
    let (a, b0) = (f.a, f.b0);
    let c = linalg::dot(u, &f.x);
    let s = linalg::dot(u, &f.x2);
    let xj = sj.x_jets()?;
    let kappa = sj.connection_along(&xj, u);
    let a_dot = sj.derive(&sj.a(), u);
    let b_dot = -a * a_dot / b0;
    let (t0, t1) = (f.tau0, f.tau1);
    let psi = b0 * s;
    let tau_uu = t0 * (c * c - a * a * s * s) + 2.0 * a * t1 * s * c;
    let cx = -theta_dot * s - a * kappa * s + psi * (c * t0 + s * a * t1) + psi * s * a / e;
    let al = theta_dot * c * b0 + s * b_dot - e * tau_uu;
    let jx = theta_dot * c * a + c * kappa + s * a_dot + psi * (c * t1 - s * a * t0) - psi * c / e;
    let be = sqrt(1.0 + (e - 1.0) * a * a);
    let c2 = (b0 * al + e * a * jx) / (be * be);
    let ue = sqrt(c * c + s * s * be * be / e);
    Ok((be / sqrt(e)) * (c2 * c - cx * s) / (ue * ue * ue))
}

/// `k^ε_g` at a piece parameter.
pub fn geodesic_curvature_at(
    cs: &ContactStructure,
    patch: &SurfacePatch,
    piece: &CurvePiece,
    t: f64,
    eps: Epsilon,
) -> Result<GeodesicCurvature> {
    let (st, sj) = state_with(cs, patch, piece, t)?;
    let (def, speed_eps) = definitional(patch, piece, t, &sj, eps)?;
    let exp = match st.theta_dot {
        Some(td) => {
            let f = frame_from(&sj, Epsilon::ONE)?;
            let w = sj.push_forward(&piece.velocity(t));
            let u = linalg::scale(&w, 1.0 / st.speed);
            Some(expansion(&sj, &f, &u, td, eps)?)
        }
        None => None,
    };
    Ok(GeodesicCurvature { definitional: def, expansion: exp, speed_eps })
}

/// `k^ε_g` at arclength `s`; corners are rejected.
pub fn geodesic_curvature_eps(
    cs: &ContactStructure,
    patch: &SurfacePatch,
    curve: &BoundaryCurve,
    s: f64,
    eps: Epsilon,
) -> Result<GeodesicCurvature> {
    if let Some(j) = curve.junction_at(s) {
        if curve.is_corner(j) {
            return Err(Error::CornerPoint { t: s });
        }
    }
    let at = curve.locate(cs, patch, s, Side::After)?;
    geodesic_curvature_at(cs, patch, &curve.pieces[at.piece], at.t, eps)
}

/// `k_E⁰ = a⟨∇_X X, JX⟩`, the leaf curvature entering the limit formula.
pub fn leaf_curvature_ke0(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2]) -> Result<f64> {
    let f = frame_from(&SurfaceJets::new(cs, patch, uv, 3, 2)?, Epsilon::ONE)?;
    Ok(f.a * f.kx)
}

/// `g_ε`-geodesic curvature of the characteristic leaf through `uv`,
/// oriented by `X`: `√ε (a⟨∇_X X, JX⟩ − b₀τ₀)/b_ε`.
pub fn leaf_curvature_eps(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], eps: Epsilon) -> Result<f64> {
    let f = frame_from(&SurfaceJets::new(cs, patch, uv, 3, 2)?, eps)?;
    Ok(sqrt(eps.get()) * (f.a * f.kx - f.b0 * f.tau0) / f.b_eps)
}

/// Oriented `g_ε` angle from `v` to `w` (parameter-space tangent vectors).
pub fn corner_angle(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], v: [f64; 2], w: [f64; 2], eps: Epsilon) -> Result<f64> {
    if (v[0] == 0.0 && v[1] == 0.0) || (w[0] == 0.0 && w[1] == 0.0) {
        return Err(Error::ZeroVector);
    }
    let sj = SurfaceJets::new(cs, patch, uv, 2, 1)?;
    let h = gram_eps(&sj, eps);
    let inner = |p: [f64; 2], q: [f64; 2]| h[0] * p[0] * q[0] + h[1] * (p[0] * q[1] + p[1] * q[0]) + h[2] * p[1] * q[1];
    let iv = rotate(h, v, patch.orientation_sign());
    Ok(atan2(inner(iv, w), inner(v, w)))
}

/// `lim_{ε→0} β^ε` for the angle from `v` to `w`.
pub fn corner_angle_limit(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], v: [f64; 2], w: [f64; 2]) -> Result<f64> {
    if (v[0] == 0.0 && v[1] == 0.0) || (w[0] == 0.0 && w[1] == 0.0) {
        return Err(Error::ZeroVector);
    }
    let sj = SurfaceJets::new(cs, patch, uv, 2, 1)?;
    let (fv, fw) = (sj.push_forward(&v), sj.push_forward(&w));
    let (pv, pw) = (fv[2] / linalg::norm(&fv), fw[2] / linalg::norm(&fw));
    Ok(match (abs(pv) <= ZERO_TOL, abs(pw) <= ZERO_TOL) {
        (true, true) => abs(corner_angle(cs, patch, uv, v, w, Epsilon::ONE)?),
        (true, false) | (false, true) => PI / 2.0,
        (false, false) => PI / 2.0 * (1.0 - signum(pv * pw)),
    })
}

/// Per-sample classification tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    /// A corner.
    T0,
    /// A characteristic point of the surface.
    T1,
    /// `γ̇` tangent to `E`.
    T2,
    /// `γ̇` transverse to `E`.
    T3,
}

/// Corner classes by how many of the two one-sided tangents lie in `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerClass {
    S0,
    S1,
    S2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerDatum {
    pub s: f64,
    /// The piece starting at the corner.
    pub piece: usize,
    pub uv: [f64; 2],
    /// Incoming and outgoing parameter-space tangents.
    pub before: [f64; 2],
    pub after: [f64; 2],
    /// Oriented `g` angle from the incoming to the outgoing tangent.
    pub beta: f64,
    pub class: CornerClass,
    /// `sign(α(v)α(w))`.
    pub sign: f64,
    /// `sign cos θ` before and after.
    pub p: [f64; 2],
    /// `sign ψ` before and after.
    pub q: [f64; 2],
}

/// An endpoint of a component of `W = {ψ ≠ 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangency {
    pub s: f64,
    pub at: CurvePoint,
    pub corner: bool,
    pub characteristic: bool,
    /// One-sided `dψ/ds` on the `W` side, at the zero of `ψ`.
    pub psi_dot: f64,
    /// `sign cos θ`, zero at characteristic points.
    pub p: f64,
    /// `sign ψ` on the `W` side.
    pub q: f64,
    /// `dθ/ds`; NaN at characteristic points.
    pub theta_dot: f64,
    /// `k_E⁰`; NaN at characteristic points.
    pub k_e0: f64,
}

impl Tangency {
    /// Whether the point belongs to `Ŵ±`.
    pub fn regular(&self) -> bool {
        !self.corner && !self.characteristic
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryClassification {
    /// Points where a component of `W` starts.
    pub w_plus: Vec<Tangency>,
    /// Points where a component of `W` ends.
    pub w_minus: Vec<Tangency>,
    /// Arclength intervals on which `γ̇ ∈ E`.
    pub leaf_runs: Vec<(f64, f64)>,
    pub corners: Vec<CornerDatum>,
    /// Approximate arclength and tag of every sample.
    pub tags: Vec<(f64, Tag)>,
    /// `(s, dψ/ds)` at endpoints of `W` where the one-sided derivative vanishes.
    pub violations: Vec<(f64, f64)>,
}

impl BoundaryClassification {
    pub fn star_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// `W` is the whole curve.
    pub fn transverse_everywhere(&self) -> bool {
        self.w_plus.is_empty() && self.w_minus.is_empty() && self.leaf_runs.is_empty()
    }
}

#[derive(Clone, Copy)]
struct Sample {
    piece: usize,
    t: f64,
    s: f64,
    psi: f64,
    a: f64,
}

fn psi_a(cs: &ContactStructure, patch: &SurfacePatch, piece: &CurvePiece, t: f64) -> Result<(f64, f64)> {
    let sj = SurfaceJets::new(cs, patch, piece.uv(t), 2, 1)?;
    let w = sj.push_forward(&piece.velocity(t));
    let n = linalg::norm(&w);
    if !(n > 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok((w[2] / n, sj.a().value()))
}

/// `(ψ, dψ/dt, d²ψ/dt², |γ'|_g)` at a piece parameter.
fn psi_jet(cs: &ContactStructure, patch: &SurfacePatch, piece: &CurvePiece, t: f64) -> Result<([f64; 3], f64)> {
    let uvj = piece.jets(t, 3);
    let sj = SurfaceJets::new(cs, patch, [uvj[0].value(), uvj[1].value()], 4, 3)?;
    let cu = sj.cu.map(|c| c.compose(&uvj));
    let cv = sj.cv.map(|c| c.compose(&uvj));
    let (du, dv) = (uvj[0].partial(0), uvj[1].partial(0));
    let w: [Jet1; 3] = core::array::from_fn(|k| cu[k] * du + cv[k] * dv);
    let len = linalg::dot(&w, &w).sqrt();
    if !(len.value() > 0.0) {
        return Err(Error::ZeroVector);
    }
    let psi = w[2] / len;
    Ok(([psi.value(), psi.derivative(&[1]), psi.derivative(&[2])], len.value()))
}

/// `dψ/ds` at the zero of the local quadratic model of `ψ` nearest `t`.
///
/// Zeros are only located to `ZERO_TOL` in `ψ`; near a double zero the
/// derivative at the located point is of order `√ZERO_TOL`, while the model
/// recovers the vanishing slope.
fn slope_at_zero_of(cs: &ContactStructure, patch: &SurfacePatch, piece: &CurvePiece, t: f64) -> Result<f64> {
    let ([p0, p1, p2], speed) = psi_jet(cs, patch, piece, t)?;
    let disc = p1 * p1 - 2.0 * p0 * p2;
    Ok(signum(p1) * sqrt(disc.max(0.0)) / speed)
}

fn is_zero(psi: f64) -> bool {
    abs(psi) <= ZERO_TOL
}

/// Last parameter where `ψ` is zero between a zero at `z` and a nonzero at `nz`.
fn zero_edge(cs: &ContactStructure, patch: &SurfacePatch, piece: &CurvePiece, mut z: f64, mut nz: f64) -> Result<f64> {
    let scale = abs(piece.range[1] - piece.range[0]);
    while abs(nz - z) > 1e-13 * scale {
        let m = 0.5 * (z + nz);
        if is_zero(psi_a(cs, patch, piece, m)?.0) {
            z = m;
        } else {
            nz = m;
        }
    }
    Ok(z)
}

/// Minimum of `|ψ|` on `[lo, hi]` by golden-section search.
fn dip(cs: &ContactStructure, patch: &SurfacePatch, piece: &CurvePiece, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (sqrt(5.0) - 1.0);
    let f = |t: f64| -> Result<f64> { Ok(abs(psi_a(cs, patch, piece, t)?.0)) };
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

struct Classifier<'a> {
    cs: &'a ContactStructure,
    patch: &'a SurfacePatch,
    curve: &'a BoundaryCurve,
}

impl Classifier<'_> {
    fn snap(&self, piece: usize, t: f64) -> f64 {
        let r = self.curve.pieces[piece].range;
        let tol = 1e-9 * (r[1] - r[0]);
        if abs(t - r[0]) <= tol {
            r[0]
        } else if abs(t - r[1]) <= tol {
            r[1]
        } else {
            t
        }
    }

    fn tangency(&self, piece: usize, t: f64, q: f64) -> Result<Tangency> {
        let curve = self.curve;
        let n = curve.pieces.len();
        let p = &curve.pieces[piece];
        let t = self.snap(piece, t);
        let corner = (t == p.range[0] && curve.is_corner(piece)) || (t == p.range[1] && curve.is_corner((piece + 1) % n));
        let (st, sj) = state_with(self.cs, self.patch, p, t)?;
        let mut s = curve.arclength(self.cs, self.patch, CurvePoint { piece, t })?;
        if s >= curve.length * (1.0 - 1e-12) {
            s -= curve.length;
        }
        s = s.max(0.0);
        let (pp, theta_dot, k_e0, characteristic) = match (st.theta, st.theta_dot) {
            (Some(th), Some(td)) => {
                let f = frame_from(&sj, Epsilon::ONE)?;
                (signum(crate::math::cos(th)), td, f.a * f.kx, false)
            }
            _ => (0.0, f64::NAN, f64::NAN, true),
        };
        Ok(Tangency {
            s,
            at: CurvePoint { piece, t },
            corner,
            characteristic,
            psi_dot: slope_at_zero_of(self.cs, self.patch, p, t)?,
            p: pp,
            q,
            theta_dot,
            k_e0,
        })
    }

    fn samples(&self, total: usize) -> Result<Vec<Sample>> {
        let curve = self.curve;
        let mut out = Vec::with_capacity(total + 2 * curve.pieces.len());
        for (j, p) in curve.pieces.iter().enumerate() {
            let n = (ceil(total as f64 * curve.lengths[j] / curve.length) as usize).max(8);
            let h = (p.range[1] - p.range[0]) / n as f64;
            let mut speeds = Vec::with_capacity(n + 1);
            let mut raw = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let t = if i == n { p.range[1] } else { p.range[0] + h * i as f64 };
                let (psi, a) = psi_a(self.cs, self.patch, p, t)?;
                speeds.push(speed(self.cs, self.patch, p, t)?);
                raw.push((t, psi, a));
            }
            // cumulative trapezoid, rescaled to the measured piece length
            let mut cum = vec![0.0; n + 1];
            for i in 1..=n {
                cum[i] = cum[i - 1] + 0.5 * h * (speeds[i - 1] + speeds[i]);
            }
            let k = if cum[n] > 0.0 { curve.lengths[j] / cum[n] } else { 0.0 };
            for (i, &(t, psi, a)) in raw.iter().enumerate() {
                out.push(Sample { piece: j, t, s: curve.starts[j] + k * cum[i], psi, a });
            }
        }
        Ok(out)
    }

    fn corner(&self, j: usize) -> Result<CornerDatum> {
        let curve = self.curve;
        let n = curve.pieces.len();
        let (prev, next) = (&curve.pieces[(j + n - 1) % n], &curve.pieces[j]);
        let uv = next.uv(next.range[0]);
        let before = prev.velocity(prev.range[1]);
        let after = next.velocity(next.range[0]);
        let beta = corner_angle(self.cs, self.patch, uv, before, after, Epsilon::ONE)?;
        let sb = curve_state(self.cs, self.patch, prev, prev.range[1])?;
        let sa = curve_state(self.cs, self.patch, next, next.range[0])?;
        let class = match (is_zero(sb.psi), is_zero(sa.psi)) {
            (true, true) => CornerClass::S2,
            (false, false) => CornerClass::S0,
            _ => CornerClass::S1,
        };
        let pc = |st: &CurveState| st.theta.map_or(0.0, |th| signum(crate::math::cos(th)));
        let q = |st: &CurveState| if is_zero(st.psi) { 0.0 } else { signum(st.psi) };
        Ok(CornerDatum {
            s: curve.starts[j],
            piece: j,
            uv,
            before,
            after,
            beta,
            class,
            sign: q(&sb) * q(&sa),
            p: [pc(&sb), pc(&sa)],
            q: [q(&sb), q(&sa)],
        })
    }
}

/// Samples the curve, locates the endpoints of `W`, the leaf runs and the
/// corners, and checks the transversality condition at every endpoint.
pub fn classify_boundary(
    cs: &ContactStructure,
    patch: &SurfacePatch,
    curve: &BoundaryCurve,
    samples: usize,
) -> Result<BoundaryClassification> {
    let cl = Classifier { cs, patch, curve };
    let smp = cl.samples(samples.max(DEFAULT_SAMPLES / 2))?;
    let n_pieces = curve.pieces.len();

    let mut tags = Vec::with_capacity(smp.len());
    let mut prev_char = false;
    for (k, x) in smp.iter().enumerate() {
        let p = &curve.pieces[x.piece];
        let at_corner = (x.t == p.range[0] && curve.is_corner(x.piece)) || (x.t == p.range[1] && curve.is_corner((x.piece + 1) % n_pieces));
        let ch = abs(x.a) >= 1.0 - CHAR_TOL;
        let same_point = k > 0 && smp[k - 1].piece != x.piece;
        if ch && prev_char && !same_point {
            return Err(Error::UnsupportedBoundary);
        }
        prev_char = ch;
        let tag = if at_corner {
            Tag::T0
        } else if ch {
            Tag::T1
        } else if is_zero(x.psi) {
            Tag::T2
        } else {
            Tag::T3
        };
        tags.push((x.s, tag));
    }

    let mut w_plus = Vec::new();
    let mut w_minus = Vec::new();
    // (s, entering) for zero-run transitions, in curve order
    let mut edges: Vec<(f64, bool)> = Vec::new();
    let m = smp.len();
    for k in 0..m {
        let (x, y) = (smp[k], smp[(k + 1) % m]);
        let (zx, zy) = (is_zero(x.psi), is_zero(y.psi));
        let junction = x.piece != y.piece || k + 1 == m;
        if junction {
            // ψ jumps here, so the point is a corner of the leaf run but not an
            // endpoint of W, which needs ψ → 0 from the W side
            let s_j = curve.starts[y.piece];
            if zx && !zy {
                edges.push((s_j, false));
            } else if !zx && zy {
                edges.push((s_j, true));
            }
            continue;
        }
        let p = &curve.pieces[x.piece];
        if zx && !zy {
            let c = zero_edge(cs, patch, p, x.t, y.t)?;
            let tg = cl.tangency(x.piece, c, signum(y.psi))?;
            edges.push((tg.s, false));
            w_plus.push(tg);
        } else if !zx && zy {
            let c = zero_edge(cs, patch, p, y.t, x.t)?;
            let tg = cl.tangency(x.piece, c, signum(x.psi))?;
            edges.push((tg.s, true));
            w_minus.push(tg);
        } else if !zx && !zy && signum(x.psi) != signum(y.psi) {
            let r = crossing(x.t, x.psi, y.t, y.psi, |t| Ok(psi_a(cs, patch, p, t)?.0))?;
            w_minus.push(cl.tangency(x.piece, r, signum(x.psi))?);
            w_plus.push(cl.tangency(x.piece, r, signum(y.psi))?);
        }
    }
    // interior minima of |ψ| that touch zero without a sign change
    for k in 1..m.saturating_sub(1) {
        let (x, y, z) = (smp[k - 1], smp[k], smp[k + 1]);
        if x.piece != y.piece || y.piece != z.piece || is_zero(x.psi) || is_zero(y.psi) || is_zero(z.psi) {
            continue;
        }
        if signum(x.psi) != signum(y.psi) || signum(y.psi) != signum(z.psi) {
            continue;
        }
        if !(abs(y.psi) < abs(x.psi) && abs(y.psi) <= abs(z.psi)) {
            continue;
        }
        let (tm, fm) = dip(cs, patch, &curve.pieces[y.piece], x.t, z.t)?;
        if fm <= 10.0 * ZERO_TOL {
            w_minus.push(cl.tangency(y.piece, tm, signum(y.psi))?);
            w_plus.push(cl.tangency(y.piece, tm, signum(y.psi))?);
        }
    }

    let mut leaf_runs = Vec::new();
    if smp.iter().all(|x| is_zero(x.psi)) {
        leaf_runs.push((0.0, curve.length));
    } else if !edges.is_empty() {
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));
        let first_exit = edges.iter().position(|e| !e.1).unwrap_or(0);
        let k = edges.len();
        for i in 0..k {
            let (s0, entering) = edges[(first_exit + i) % k];
            if entering {
                let (s1, _) = edges[(first_exit + i + 1) % k];
                leaf_runs.push((s0, if s1 < s0 { s1 + curve.length } else { s1 }));
            }
        }
    }

    leaf_runs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut violations = Vec::new();
    for tg in w_plus.iter().chain(w_minus.iter()) {
        if !(abs(tg.psi_dot) >= STAR_TOL) {
            violations.push((tg.s, tg.psi_dot));
        }
    }
    violations.sort_by(|a, b| a.0.total_cmp(&b.0));
    w_plus.sort_by(|a, b| a.s.total_cmp(&b.s));
    w_minus.sort_by(|a, b| a.s.total_cmp(&b.s));

    let corners = curve.corners.iter().map(|&j| cl.corner(j)).collect::<Result<Vec<_>>>()?;
    Ok(BoundaryClassification { w_plus, w_minus, leaf_runs, corners, tags, violations })
}

/// The limit `ε → 0` of the Gauss–Bonnet formula with boundary, term by term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRhs {
    pub slope: SlopeFit,
    /// Contribution of boundary arcs inside the characteristic set; always
    /// zero for supported boundaries.
    pub characteristic_arcs: f64,
    /// `Σ_{S₂} β`.
    pub s2: f64,
    /// `(π/2) Σ_{S₁} sign β`.
    pub s1: f64,
    /// `Σ_{S₀} (π/2)(1 − q⁺q⁻) sign β`.
    pub s0: f64,
    /// `(π/2)(Σ_{Ŵ⁺} p⁺q⁺ − Σ_{Ŵ⁻} p⁻q⁻)`.
    pub w_signs: f64,
    /// `(π/2)(Σ_{Ŵ⁺} k_E⁰q⁺/θ̇ − Σ_{Ŵ⁻} k_E⁰q⁻/θ̇)`.
    pub w_curvature: f64,
    pub total: f64,
    /// The total with `k_E⁰` read as `lim k_E^ε`, which vanishes.
    pub total_vanishing_leaf: f64,
}

/// Assembles the limit right-hand side from a classification and a
/// cumulative profile of `∫_{|a|>1−c} K_{Σ,E} dσ`.
pub fn assemble_rhs(cls: &BoundaryClassification, profile: &CumulativeProfile) -> Result<BoundaryRhs> {
    if let Some(&(s, d)) = cls.violations.first() {
        return Err(Error::StarViolation { t: s, derivative: d });
    }
    let slope = slope_at_zero(profile)?;
    let half = PI / 2.0;
    let mut s2 = 0.0;
    let mut s1 = 0.0;
    let mut s0 = 0.0;
    for c in &cls.corners {
        match c.class {
            CornerClass::S2 => s2 += c.beta,
            CornerClass::S1 => s1 += half * signum(c.beta),
            CornerClass::S0 => s0 += half * (1.0 - c.q[0] * c.q[1]) * signum(c.beta),
        }
    }
    let plus = cls.w_plus.iter().filter(|t| t.regular());
    let minus = cls.w_minus.iter().filter(|t| t.regular());
    let w_signs = half * (plus.clone().map(|t| t.p * t.q).sum::<f64>() - minus.clone().map(|t| t.p * t.q).sum::<f64>());
    let w_curvature =
        half * (plus.map(|t| t.k_e0 * t.q / t.theta_dot).sum::<f64>() - minus.map(|t| t.k_e0 * t.q / t.theta_dot).sum::<f64>());
    let total = slope.slope + s2 + s1 + s0 + w_signs + w_curvature;
    Ok(BoundaryRhs { slope, characteristic_arcs: 0.0, s2, s1, s0, w_signs, w_curvature, total, total_vanishing_leaf: total - w_curvature })
}

/// Classifies the curve with the default sampling and assembles the limit
/// right-hand side.
pub fn gb_boundary_rhs(
    cs: &ContactStructure,
    patch: &SurfacePatch,
    curve: &BoundaryCurve,
    profile: &CumulativeProfile,
) -> Result<BoundaryRhs> {
    assemble_rhs(&classify_boundary(cs, patch, curve, DEFAULT_SAMPLES)?, profile)
}

/// `∮ k^ε_g ds^ε` over the smooth pieces.
pub fn boundary_curvature_integral(cs: &ContactStructure, patch: &SurfacePatch, curve: &BoundaryCurve, eps: Epsilon) -> Result<f64> {
    let mut total = 0.0;
    for p in &curve.pieces {
        total += integrate_fallible(p.range[0], p.range[1], 1e-10, |t| {
            let k = geodesic_curvature_at(cs, patch, p, t, eps)?;
            Ok(k.definitional * k.speed_eps)
        })?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannianGaussBonnet {
    /// `∫ K^ε dσ^ε`.
    pub surface: f64,
    /// `∮ k^ε_g ds^ε`.
    pub boundary: f64,
    /// `Σ β^ε` over the corners.
    pub corners: f64,
    pub total: f64,
}

/// The three terms of the Riemannian Gauss–Bonnet formula for `g_ε`; their
/// sum is `2πχ`.
pub fn riemannian_gauss_bonnet(
    cs: &ContactStructure,
    patch: &SurfacePatch,
    curve: &BoundaryCurve,
    eps: Epsilon,
    q: &Integrator,
) -> Result<RiemannianGaussBonnet> {
    let surface = gauss_bonnet_integral(cs, patch, eps, q)?.value;
    let boundary = boundary_curvature_integral(cs, patch, curve, eps)?;
    let n = curve.pieces.len();
    let mut corners = 0.0;
    for &j in &curve.corners {
        let (prev, next) = (&curve.pieces[(j + n - 1) % n], &curve.pieces[j]);
        let uv = next.uv(next.range[0]);
        corners += corner_angle(cs, patch, uv, prev.velocity(prev.range[1]), next.velocity(next.range[0]), eps)?;
    }
    Ok(RiemannianGaussBonnet { surface, boundary, corners, total: surface + boundary + corners })
}

/// Absolute tolerance of [`star_experiment`]. Near a zero of `ψ` the
/// integrand carries relative rounding noise of order `1e-12`, so a tighter
/// target is unreachable once the peaks are `√ε` narrow.
pub const STAR_QUAD_TOL: f64 = 1e-8;

/// `∫ √ε w(t) / (ε + (1 − ε)ψ(t)²) dt` for each `ε`, the model integral
/// behind the transversality condition. Expressions use variable 0 for `t`.
pub fn star_experiment(psi: &Expr, weight: &Expr, range: [f64; 2], eps: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !(range[1] > range[0]) {
        return Err(Error::Domain("range must be increasing"));
    }
    let mut out = Vec::with_capacity(eps.len());
    for &e in eps {
        if !(e > 0.0 && e <= 1.0) {
            return Err(Error::Domain("epsilon must lie in (0, 1]"));
        }
        let v = integrate_1d(range[0], range[1], STAR_QUAD_TOL, |t| {
            let p = psi.eval(&[t]);
            sqrt(e) * weight.eval(&[t]) / (e + (1.0 - e) * p * p)
        })?;
        out.push((e, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_a_right_angle_for_the_gram_matrix() {
        let h = [2.0, 0.3, 0.7];
        let w = [0.4, -1.1];
        let r = rotate(h, w, 1.0);
        let inner = |p: [f64; 2], q: [f64; 2]| h[0] * p[0] * q[0] + h[1] * (p[0] * q[1] + p[1] * q[0]) + h[2] * p[1] * q[1];
        assert!(abs(inner(r, w)) < 1e-14);
        assert!(abs(inner(r, r) - inner(w, w)) < 1e-14);
        let rr = rotate(h, r, 1.0);
        assert!(abs(rr[0] + w[0]) < 1e-14 && abs(rr[1] + w[1]) < 1e-14);
        let back = rotate(h, w, -1.0);
        assert!(abs(back[0] + r[0]) < 1e-15 && abs(back[1] + r[1]) < 1e-15);
    }

    #[test]
    fn integrand_errors_propagate() {
        let r = integrate_fallible(0.0, 1.0, 1e-10, |t| if t > 0.5 { Err(Error::ZeroVector) } else { Ok(t) });
        assert_eq!(r, Err(Error::ZeroVector));
        let ok = integrate_fallible(0.0, 1.0, 1e-12, |t| Ok(t * t)).unwrap();
        assert!(abs(ok - 1.0 / 3.0) < 1e-14);
    }

    #[test]
    fn star_experiment_checks_its_domain() {
        let t = Expr::var(0);
        assert!(star_experiment(&t, &Expr::c(1.0), [1.0, 0.0], &[0.5]).is_err());
        assert!(star_experiment(&t, &Expr::c(1.0), [0.0, 1.0], &[1.5]).is_err());
    }
}
