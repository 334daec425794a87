//! Pointwise geometry of an immersed surface patch under the metrics `g_ε`.
//!
//! All vectors are expressed in the frame `(A, B, Z)` at the image point.
//! Quantities that must be differentiated along the surface are pulled back to
//! `(u, v)` jets.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::contact::{apply_j, frame_inner, riemann_form, ContactStructure, Epsilon, LocalContact};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::ChartPoint;
use crate::jet::{Jet1, Jet2, Scalar, MAX_ORDER};
use crate::linalg;
use crate::math::{abs, sqrt};

/// Pointwise operations refuse points with `|a| ≥ 1 − CHAR_TOL`.
pub const CHAR_TOL: f64 = 1e-8;

/// A smooth map `(u, v) ↦ (x, y, z)`.
pub trait Immersion: Send + Sync {
    fn eval2(&self, uv: &[Jet2; 2]) -> [Jet2; 3];
    fn eval1(&self, uv: &[Jet1; 2]) -> [Jet1; 3];

    fn point(&self, uv: [f64; 2]) -> ChartPoint {
        let j = self.eval2(&[Jet2::constant(uv[0]), Jet2::constant(uv[1])]);
        ChartPoint::new(j[0].value(), j[1].value(), j[2].value())
    }
}

/// Immersion given by expressions in `u` (variable 0) and `v` (variable 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ExprImmersion {
    pub components: [Expr; 3],
}

impl ExprImmersion {
    pub fn new(components: [Expr; 3]) -> Self {
        ExprImmersion { components }
    }

    fn eval_generic<S: Scalar>(&self, uv: &[S; 2]) -> [S; 3] {
        [self.components[0].eval(uv), self.components[1].eval(uv), self.components[2].eval(uv)]
    }
}

impl Immersion for ExprImmersion {
    fn eval2(&self, uv: &[Jet2; 2]) -> [Jet2; 3] {
        self.eval_generic(uv)
    }
    fn eval1(&self, uv: &[Jet1; 2]) -> [Jet1; 3] {
        self.eval_generic(uv)
    }
}

/// Axis-aligned parameter rectangle `center ± half_width`, excluded from
/// quadrature around coordinate or characteristic singularities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cap {
    pub center: [f64; 2],
    pub half_width: [f64; 2],
}

pub struct SurfacePatch {
    pub immersion: Box<dyn Immersion>,
    /// `[[u₀, u₁], [v₀, v₁]]`
    pub domain: [[f64; 2]; 2],
    pub periodic: [bool; 2],
    /// `+1` when `(∂_u, ∂_v)` is positively oriented, `−1` otherwise.
    pub orientation: i8,
    pub caps: Vec<Cap>,
}

impl SurfacePatch {
    pub fn new(immersion: Box<dyn Immersion>, domain: [[f64; 2]; 2]) -> Self {
        SurfacePatch { immersion, domain, periodic: [false, false], orientation: 1, caps: Vec::new() }
    }

    pub fn orientation_sign(&self) -> f64 {
        if self.orientation < 0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Immersion jets at `uv` to the given order.
    pub fn jets(&self, uv: [f64; 2], order: usize) -> [Jet2; 3] {
        let u = [Jet2::variable(uv[0], 0, order), Jet2::variable(uv[1], 1, order)];
        self.immersion.eval2(&u)
    }
}

/// Surface data at one parameter point, with frame components pulled back to
/// `(u, v)` jets.
#[derive(Clone)]
pub struct SurfaceJets {
    pub uv: [f64; 2],
    pub lc: LocalContact,
    /// frame components of `∂_u φ`, `∂_v φ`
    pub cu: [Jet2; 3],
    pub cv: [Jet2; 3],
    /// unit normal for `g` in frame components
    pub n: [Jet2; 3],
    /// `σ` density `|φ_u × φ_v|_g`
    pub area: f64,
    gram_inv: [[f64; 2]; 2],
}

impl SurfaceJets {
    /// `contact_order` is the jet order of the frame at the image point,
    /// `order` the jet order of the immersion.
    pub fn new(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], contact_order: usize, order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::OrderOutOfRange { order });
        }
        let phi = patch.jets(uv, order);
        let p = ChartPoint::new(phi[0].value(), phi[1].value(), phi[2].value());
        let lc = cs.at(p, contact_order)?;
        let mut finv = [[Jet2::constant(0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                finv[i][j] = lc.finv[i][j].compose(&phi);
            }
        }
        let pu = phi.map(|c| c.partial(0));
        let pv = phi.map(|c| c.partial(1));
        let cu = linalg::mat_vec(&finv, &pu);
        let cv = linalg::mat_vec(&finv, &pv);
        let cr = linalg::cross(&cu, &cv);
        let len2 = linalg::dot(&cr, &cr);
        let (uu, vv, uvd) = (linalg::dot(&cu, &cu).value(), linalg::dot(&cv, &cv).value(), linalg::dot(&cu, &cv).value());
        if !(len2.value() > 1e-24 * uu * vv) {
            return Err(Error::RankDeficient);
        }
        let inv_len = len2.sqrt().recip() * patch.orientation_sign();
        let n = linalg::scale(&cr, inv_len);
        let det = uu * vv - uvd * uvd;
        let gram_inv = [[vv / det, -uvd / det], [-uvd / det, uu / det]];
        Ok(SurfaceJets { uv, lc, cu, cv, n, area: sqrt(len2.value()), gram_inv })
    }

    /// Horizontal angle parameter as a jet in `(u, v)`.
    pub fn a(&self) -> Jet2 {
        self.n[2]
    }

    /// Parameter-space components of a tangent vector given in the frame.
    pub fn param_direction(&self, w: &[f64; 3]) -> [f64; 2] {
        let cu = linalg::values(&self.cu);
        let cv = linalg::values(&self.cv);
        let r = [linalg::dot(&cu, w), linalg::dot(&cv, w)];
        [self.gram_inv[0][0] * r[0] + self.gram_inv[0][1] * r[1], self.gram_inv[1][0] * r[0] + self.gram_inv[1][1] * r[1]]
    }

    /// Derivative of a surface jet along a tangent frame vector.
    pub fn derive(&self, f: &Jet2, w: &[f64; 3]) -> f64 {
        let d = self.param_direction(w);
        let g = f.gradient();
        g[0] * d[0] + g[1] * d[1]
    }

    /// Frame vector of a parameter-space direction.
    pub fn push_forward(&self, d: &[f64; 2]) -> [f64; 3] {
        let cu = linalg::values(&self.cu);
        let cv = linalg::values(&self.cv);
        linalg::add(&linalg::scale(&cu, d[0]), &linalg::scale(&cv, d[1]))
    }

    /// `X = (−n₂, n₁, 0)/b₀` as jets; the unit generator of `TΣ ∩ E`.
    pub fn x_jets(&self) -> Result<[Jet2; 3]> {
        let a = self.a().value();
        if abs(a) >= 1.0 - CHAR_TOL {
            return Err(Error::CharacteristicPoint { a });
        }
        let h = (self.n[0] * self.n[0] + self.n[1] * self.n[1]).sqrt().recip();
        Ok([-self.n[1] * h, self.n[0] * h, Jet2::constant(0.0)])
    }

    /// `⟨∇_V X, JX⟩` for a tangent frame vector `V`, given `X` as jets.
    pub fn connection_along(&self, x: &[Jet2; 3], v: &[f64; 3]) -> f64 {
        let w = self.lc.omega().map(|o| o.value());
        let om = w[0] * v[0] + w[1] * v[1] + w[2] * v[2];
        x[0].value() * self.derive(&x[1], v) - x[1].value() * self.derive(&x[0], v) + om
    }
}

/// The adapted frame of a non-characteristic surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePointFrame {
    pub a: f64,
    pub b0: f64,
    pub b_eps: f64,
    pub x: [f64; 3],
    pub jx: [f64; 3],
    pub x2: [f64; 3],
    pub x2_hat: [f64; 3],
    pub normal: [f64; 3],
    pub tau0: f64,
    pub tau1: f64,
    pub xa: f64,
    pub x2a: f64,
    /// `⟨∇_X X, JX⟩`
    pub kx: f64,
    /// `⟨∇_{X₂} X, JX⟩`
    pub kx2: f64,
}

fn tau_form(lc: &LocalContact, v: &[f64; 3], w: &[f64; 3]) -> f64 {
    let t = lc.tau_values();
    let mut s = 0.0;
    for l in 0..3 {
        for k in 0..3 {
            s += w[l] * t[l][k] * v[k];
        }
    }
    s
}

pub(crate) fn frame_from(sj: &SurfaceJets, eps: Epsilon) -> Result<SurfacePointFrame> {
    let xj = sj.x_jets()?;
    let a = sj.a().value();
    let b0 = sqrt(1.0 - a * a);
    let e = eps.get();
    let b_eps = sqrt(1.0 + (e - 1.0) * a * a);
    let x = linalg::values(&xj);
    let jx = apply_j(&x);
    let x2 = [a * jx[0], a * jx[1], b0];
    let x2_hat = linalg::scale(&x2, sqrt(e) / b_eps);
    let normal = [-b0 * jx[0] / b_eps, -b0 * jx[1] / b_eps, e * a / b_eps];
    let aj = sj.a();
    Ok(SurfacePointFrame {
        a,
        b0,
        b_eps,
        x,
        jx,
        x2,
        x2_hat,
        normal,
        tau0: tau_form(&sj.lc, &x, &x),
        tau1: tau_form(&sj.lc, &x, &jx),
        xa: sj.derive(&aj, &x),
        x2a: sj.derive(&aj, &x2),
        kx: sj.connection_along(&xj, &x),
        kx2: sj.connection_along(&xj, &x2),
    })
}

/// Horizontal angle parameter `a = ⟨v₁ ∧ v₂, A ∧ B⟩` at `uv`.
pub fn horizontal_parameter(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2]) -> Result<f64> {
    Ok(SurfaceJets::new(cs, patch, uv, 2, 1)?.a().value())
}

/// Adapted frame `X, X₂, X̂₂^ε, N̂^ε` with `τ₀, τ₁, Xa, X₂a`.
pub fn adapted_frame(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], eps: Epsilon) -> Result<SurfacePointFrame> {
    frame_from(&SurfaceJets::new(cs, patch, uv, 3, 2)?, eps)
}

/// Residual of `Xa/b₀ = a² + b₀⟨∇_{X₂}X, JX⟩ − b₀²τ₁`.
pub fn xa_identity_residual(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2]) -> Result<f64> {
    let f = adapted_frame(cs, patch, uv, Epsilon::ONE)?;
    Ok(xa_residual(&f))
}

fn xa_residual(f: &SurfacePointFrame) -> f64 {
    abs(f.xa / f.b0 - f.a * f.a - f.b0 * f.kx2 + f.b0 * f.b0 * f.tau1)
}

/// Second fundamental form of the ε-unit normal in the basis `X, X̂₂^ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondFundamentalForm {
    pub ii11: f64,
    pub ii12: f64,
    pub ii22: f64,
    /// `II₁₂` from the expression in `⟨∇_{X₂}X, JX⟩`
    pub ii12_alt: f64,
}

fn sff_closed(f: &SurfacePointFrame, eps: Epsilon) -> SecondFundamentalForm {
    let e = eps.get();
    let se = sqrt(e);
    let (a, b0, be) = (f.a, f.b0, f.b_eps);
    SecondFundamentalForm {
        ii11: -(e * a * f.tau0 + b0 * f.kx) / be,
        ii22: -e * f.x2a / (be * be * be * b0) + e * a * f.tau0 / be,
        ii12: -se * f.xa / (b0 * be * be) + (1.0 - 2.0 * e * f.tau1) / (2.0 * se),
        ii12_alt: -se / (be * be) * (b0 * f.kx2 + a * a * (1.0 + e * f.tau1)) + 1.0 / (2.0 * se),
    }
}

pub fn second_fundamental_form(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], eps: Epsilon) -> Result<SecondFundamentalForm> {
    Ok(sff_closed(&adapted_frame(cs, patch, uv, eps)?, eps))
}

/// `−⟨∇^ε_{X_i} N̂^ε, X_j⟩_ε` computed directly from the connection, as
/// `[[II₁₁, II₁₂], [II₂₁, II₂₂]]`.
pub fn second_fundamental_form_oracle(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], eps: Epsilon) -> Result<[[f64; 2]; 2]> {
    let sj = SurfaceJets::new(cs, patch, uv, 3, 2)?;
    let f = frame_from(&sj, eps)?;
    let e = eps.get();
    // N^ε = (n₁, n₂, εa) in the frame, normalized for g_ε
    let nj = [sj.n[0], sj.n[1], sj.n[2] * e];
    let len = frame_inner(&nj, &nj, eps).sqrt().recip();
    let nhat = nj.map(|c| c * len);
    let conn = sj.lc.nabla_eps_table(eps);
    let basis = [f.x, f.x2_hat];
    let mut out = [[0.0; 2]; 2];
    for (i, xi) in basis.iter().enumerate() {
        let mut d = [0.0; 3];
        for l in 0..3 {
            let mut s = sj.derive(&nhat[l], xi);
            for m in 0..3 {
                for k in 0..3 {
                    s += xi[m] * nhat[k].value() * conn[m][k][l].value();
                }
            }
            d[l] = s;
        }
        for (j, xj) in basis.iter().enumerate() {
            out[i][j] = -frame_inner(&d, xj, eps);
        }
    }
    Ok(out)
}

/// All pointwise curvature data at one surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvaturePanel {
    pub frame: SurfacePointFrame,
    pub sec_eps: f64,
    pub sec_one: f64,
    pub sff: SecondFundamentalForm,
    /// Gauss curvature of `h_ε` from the Gauss equation
    pub k_eps: f64,
    pub b1m1: f64,
    pub b10: f64,
    pub b20: f64,
    pub b21: f64,
    /// `K_{Σ,E}`
    pub k_sigma_e: f64,
    /// `⟨∇_X X, JX⟩X₂a − (Xa)²/b₀`, the variant with `b₀` in place of `b₀²`
    pub k_sigma_e_alt: f64,
    /// `h_ε` in `(u, v)`: `[E, F, G]`
    pub h_eps: [f64; 3],
    pub area: f64,
    pub area_eps: f64,
}

fn sectional(lc: &LocalContact, f: &SurfacePointFrame, eps: Epsilon) -> f64 {
    let r = lc.riemann(&lc.nabla_eps_table(eps));
    let x2h = linalg::scale(&f.x2, sqrt(eps.get()) / f.b_eps);
    riemann_form(&r, &f.x, &x2h, &x2h, &f.x, eps)
}

/// `B_{1,−1}` as the recombination identity requires: `−a² + Xa/b₀`.
pub fn b1m1(f: &SurfacePointFrame) -> f64 {
    -f.a * f.a + f.xa / f.b0
}

pub fn b_panel(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], eps: Epsilon) -> Result<CurvaturePanel> {
    let sj = SurfaceJets::new(cs, patch, uv, MAX_ORDER, 2)?;
    let f = frame_from(&sj, eps)?;
    let sff = sff_closed(&f, eps);
    let sec_eps = sectional(&sj.lc, &f, eps);
    let f1 = frame_from(&sj, Epsilon::ONE)?;
    let sec_one = sectional(&sj.lc, &f1, Epsilon::ONE);
    let k_eps = sec_eps + sff.ii11 * sff.ii22 - sff.ii12 * sff.ii12;

    let (a, b0) = (f.a, f.b0);
    let (t0, t1) = (f.tau0, f.tau1);
    let p = sec_one + a * a * (0.75 - t0 * t0 - t1 * t1) - b0 * b0 / 4.0 + b0 * b0 * t1;
    let b10 = p - b0 * a * t0 * f.kx - 2.0 * t1 * f.xa / b0 + a * a * t1 - b0 * b0 * t1 * t1;
    let b20 = f.kx * f.x2a - f.xa * f.xa / (b0 * b0);
    let b21 = a * t0 * f.x2a / b0;

    let cu = linalg::values(&sj.cu);
    let cv = linalg::values(&sj.cv);
    let h = [frame_inner(&cu, &cu, eps), frame_inner(&cu, &cv, eps), frame_inner(&cv, &cv, eps)];
    Ok(CurvaturePanel {
        frame: f,
        sec_eps,
        sec_one,
        sff,
        k_eps,
        b1m1: b1m1(&f),
        b10,
        b20,
        b21,
        k_sigma_e: b20,
        k_sigma_e_alt: f.kx * f.x2a - f.xa * f.xa / b0,
        h_eps: h,
        area: sj.area,
        area_eps: sqrt(h[0] * h[2] - h[1] * h[1]),
    })
}

impl CurvaturePanel {
    /// `(√ε/b_ε)(B_{1,−1}/ε + B_{1,0}) + (√ε/b_ε³)(B_{2,0} + εB_{2,1})`,
    /// which should equal `K^ε b_ε/√ε`.
    pub fn recombined(&self, eps: Epsilon) -> f64 {
        let e = eps.get();
        let se = sqrt(e);
        let be = self.frame.b_eps;
        se / be * (self.b1m1 / e + self.b10) + se / (be * be * be) * (self.b20 + e * self.b21)
    }
}

/// `K_{Σ,E}` at `uv` from the first-order surface data only.
pub fn k_sigma_e(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2]) -> Result<f64> {
    let f = adapted_frame(cs, patch, uv, Epsilon::ONE)?;
    Ok(f.kx * f.x2a - f.xa * f.xa / (f.b0 * f.b0))
}

/// `K^ε` from the Gauss equation.
pub fn gauss_curvature(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], eps: Epsilon) -> Result<f64> {
    let sj = SurfaceJets::new(cs, patch, uv, MAX_ORDER, 2)?;
    let f = frame_from(&sj, eps)?;
    let sff = sff_closed(&f, eps);
    Ok(sectional(&sj.lc, &f, eps) + sff.ii11 * sff.ii22 - sff.ii12 * sff.ii12)
}

/// Intrinsic curvature of `h_ε` from its `(u, v)` components (Brioschi).
pub fn brioschi_curvature(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], eps: Epsilon) -> Result<f64> {
    let sj = SurfaceJets::new(cs, patch, uv, MAX_ORDER, 3)?;
    let ee = frame_inner(&sj.cu, &sj.cu, eps);
    let ff = frame_inner(&sj.cu, &sj.cv, eps);
    let gg = frame_inner(&sj.cv, &sj.cv, eps);
    let d = |j: &Jet2, e: [u8; 2]| j.derivative(&e);
    let (e0, f0, g0) = (ee.value(), ff.value(), gg.value());
    let (eu, ev) = (d(&ee, [1, 0]), d(&ee, [0, 1]));
    let (fu, fv) = (d(&ff, [1, 0]), d(&ff, [0, 1]));
    let (gu, gv) = (d(&gg, [1, 0]), d(&gg, [0, 1]));
    let evv = d(&ee, [0, 2]);
    let fuv = d(&ff, [1, 1]);
    let guu = d(&gg, [2, 0]);
    let m1 = [[-0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev], [fv - 0.5 * gu, e0, f0], [0.5 * gv, f0, g0]];
    let m2 = [[0.0, 0.5 * ev, 0.5 * gu], [0.5 * ev, e0, f0], [0.5 * gu, f0, g0]];
    let w = e0 * g0 - f0 * f0;
    if !(w > 0.0) {
        return Err(Error::RankDeficient);
    }
    Ok((linalg::det(&m1) - linalg::det(&m2)) / (w * w))
}

/// Area densities `(σ, σ^ε)` with respect to `du dv`.
pub fn area_densities(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], eps: Epsilon) -> Result<(f64, f64)> {
    let sj = SurfaceJets::new(cs, patch, uv, 2, 1)?;
    let cu = linalg::values(&sj.cu);
    let cv = linalg::values(&sj.cv);
    let h = [frame_inner(&cu, &cu, eps), frame_inner(&cu, &cv, eps), frame_inner(&cv, &cv, eps)];
    Ok((sj.area, sqrt(h[0] * h[2] - h[1] * h[1])))
}

/// First-order surface data sampled together for cubature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    pub a: f64,
    pub k_sigma_e: f64,
    /// `B_{1,−1}/b₀`
    pub b1m1_over_b0: f64,
    /// `dσ/(du dv)`
    pub area: f64,
}

pub fn surface_sample(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2]) -> Result<SurfaceSample> {
    let sj = SurfaceJets::new(cs, patch, uv, 3, 2)?;
    let f = frame_from(&sj, Epsilon::ONE)?;
    Ok(SurfaceSample { a: f.a, k_sigma_e: f.kx * f.x2a - f.xa * f.xa / (f.b0 * f.b0), b1m1_over_b0: b1m1(&f) / f.b0, area: sj.area })
}

/// `K^ε` times the `σ^ε` density, the integrand of the Riemannian
/// Gauss–Bonnet formula.
pub fn gauss_density(cs: &ContactStructure, patch: &SurfacePatch, uv: [f64; 2], eps: Epsilon) -> Result<f64> {
    let sj = SurfaceJets::new(cs, patch, uv, MAX_ORDER, 2)?;
    let f = frame_from(&sj, eps)?;
    let sff = sff_closed(&f, eps);
    let k = sectional(&sj.lc, &f, eps) + sff.ii11 * sff.ii22 - sff.ii12 * sff.ii12;
    let cu = linalg::values(&sj.cu);
    let cv = linalg::values(&sj.cv);
    let h = [frame_inner(&cu, &cu, eps), frame_inner(&cu, &cv, eps), frame_inner(&cv, &cv, eps)];
    Ok(k * sqrt(h[0] * h[2] - h[1] * h[1]))
}
