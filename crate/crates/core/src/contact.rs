//! Contact sub-Riemannian structure generated by an orthonormal frame of the
//! distribution.
//!
//! Everything is expressed in the frame `e₁ = A, e₂ = B, e₃ = Z`, which is
//! orthonormal for `g = g₁` and orthogonal for every `g_ε`, where it has the
//! diagonal Gram matrix `diag(1, 1, 1/ε)`. Frame components of a vector `v`
//! are `F⁻¹ v` with `F = [A B Z]`.

use alloc::boxed::Box;

use crate::error::{Error, Result};
use crate::field::{bracket_jets, derive_along, ChartPoint, VectorField};
use crate::jet::{Jet3, Scalar, MAX_ORDER};
use crate::linalg::{self, Mat3};
use crate::math;

/// Threshold on `|dα₀(A, B)|` below which the frame is not contact.
pub const CONTACT_TOL: f64 = 1e-12;

/// Connection coefficients: `table[i][k][l]` is the `e_l` component of `∇_{e_i} e_k`.
pub type Connection = [[[Jet3; 3]; 3]; 3];

/// Curvature components at a point: `r[l][k][i][j]` is the `e_l` component
/// of `R(e_i, e_j) e_k`.
pub type Riemann = [[[[f64; 3]; 3]; 3]; 3];

/// The taming parameter `ε > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(v: f64) -> Result<Self> {
        if v.is_finite() && v > 0.0 {
            Ok(Epsilon(v))
        } else {
            Err(Error::Domain("epsilon must be a positive finite number"))
        }
    }

    /// The reference metric `g = g₁`.
    pub const ONE: Epsilon = Epsilon(1.0);

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Diagonal of the frame Gram matrix of `g_ε`.
    #[inline]
    pub fn gram(self) -> [f64; 3] {
        [1.0, 1.0, 1.0 / self.0]
    }
}

impl TryFrom<f64> for Epsilon {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Epsilon::new(v)
    }
}

/// Two chart vector fields declared orthonormal for `g_E`.
///
/// With `orientation = 1` the pair `(a, b)` is positively oriented; with
/// `orientation = -1` the positive basis is `(b, a)`.
pub struct ContactFrame {
    pub a: Box<dyn VectorField>,
    pub b: Box<dyn VectorField>,
    pub orientation: i8,
}

impl ContactFrame {
    pub fn new(a: Box<dyn VectorField>, b: Box<dyn VectorField>) -> Self {
        ContactFrame { a, b, orientation: 1 }
    }

    pub fn with_orientation(mut self, orientation: i8) -> Self {
        self.orientation = if orientation < 0 { -1 } else { 1 };
        self
    }

    /// The positively oriented pair.
    fn oriented(&self) -> (&dyn VectorField, &dyn VectorField) {
        if self.orientation < 0 {
            (&*self.b, &*self.a)
        } else {
            (&*self.a, &*self.b)
        }
    }
}

/// A contact structure together with every derived object, evaluated on demand
/// at chart points.
pub struct ContactStructure {
    frame: ContactFrame,
}

/// Checks the frame at the given probe points and wraps it.
pub fn build_contact(frame: ContactFrame, probes: &[ChartPoint]) -> Result<ContactStructure> {
    let cs = ContactStructure { frame };
    for &p in probes {
        cs.at(p, 2)?;
    }
    Ok(cs)
}

impl ContactStructure {
    /// Wraps a frame without probing it.
    pub fn new(frame: ContactFrame) -> Self {
        ContactStructure { frame }
    }

    pub fn frame(&self) -> &ContactFrame {
        &self.frame
    }

    /// All frame data at `p`, with `A` and `B` expanded to `order`.
    ///
    /// The Reeb field carries `order − 2` derivatives, connection
    /// coefficients `order − 3` and curvature `order − 4`.
    pub fn at(&self, p: ChartPoint, order: usize) -> Result<LocalContact> {
        LocalContact::new(self, p, order)
    }

    /// `α` at `p` in chart components.
    pub fn alpha(&self, p: ChartPoint) -> Result<[f64; 3]> {
        Ok(linalg::values(&self.at(p, 2)?.alpha))
    }

    /// The Reeb field at `p`.
    pub fn reeb(&self, p: ChartPoint) -> Result<[f64; 3]> {
        Ok(linalg::values(&self.at(p, 2)?.e[2]))
    }

    pub fn metric_eps(&self, p: ChartPoint, v: &[f64; 3], w: &[f64; 3], eps: Epsilon) -> Result<f64> {
        Ok(self.at(p, 2)?.metric_eps(v, w, eps))
    }

    /// `∇_V W` at `p` in chart components.
    pub fn nabla<V, W>(&self, v: &V, w: &W, p: ChartPoint) -> Result<[f64; 3]>
    where
        V: VectorField + ?Sized,
        W: VectorField + ?Sized,
    {
        let lc = self.at(p, 3)?;
        let conn = lc.nabla_table();
        lc.covariant_chart(&conn, v, w)
    }

    /// `∇^ε_V W` at `p` in chart components.
    pub fn nabla_eps<V, W>(&self, v: &V, w: &W, p: ChartPoint, eps: Epsilon) -> Result<[f64; 3]>
    where
        V: VectorField + ?Sized,
        W: VectorField + ?Sized,
    {
        let lc = self.at(p, 3)?;
        let conn = lc.nabla_eps_table(eps);
        lc.covariant_chart(&conn, v, w)
    }

    /// Torsion of `∇` on two vectors at `p`.
    pub fn torsion(&self, p: ChartPoint, v: &[f64; 3], w: &[f64; 3]) -> Result<[f64; 3]> {
        let lc = self.at(p, 3)?;
        let t = lc.torsion_frame(&lc.nabla_table(), &lc.to_frame(v), &lc.to_frame(w));
        Ok(lc.from_frame(&t))
    }

    /// `R^ε(V, W)U` at `p` from the field definition
    /// `∇^ε_V ∇^ε_W U − ∇^ε_W ∇^ε_V U − ∇^ε_{[V,W]} U`.
    pub fn curvature_reps<V, W, U>(&self, v: &V, w: &W, u: &U, p: ChartPoint, eps: Epsilon) -> Result<[f64; 3]>
    where
        V: VectorField + ?Sized,
        W: VectorField + ?Sized,
        U: VectorField + ?Sized,
    {
        let lc = self.at(p, MAX_ORDER)?;
        let conn = lc.nabla_eps_table(eps);
        let jets = p.jets(MAX_ORDER);
        let vf = lc.frame_components(&v.eval(&jets));
        let wf = lc.frame_components(&w.eval(&jets));
        let uf = lc.frame_components(&u.eval(&jets));
        let r = lc.curvature_fields(&conn, &vf, &wf, &uf);
        Ok(lc.from_frame(&linalg::values(&r)))
    }
}

/// The frame, contact form and connection data at one chart point.
#[derive(Clone)]
pub struct LocalContact {
    pub point: ChartPoint,
    /// Chart components of `A`, `B`, `Z`.
    pub e: [[Jet3; 3]; 3],
    /// Chart components of the normalized contact form.
    pub alpha: [Jet3; 3],
    /// `F⁻¹` for `F = [A B Z]`.
    pub finv: Mat3<Jet3>,
    /// `c[i][j][m]`: frame components of `[e_i, e_j]`.
    pub c: [[[Jet3; 3]; 3]; 3],
    /// `tau[l][k]`: frame components of `τ e_k`.
    pub tau: [[Jet3; 3]; 3],
}

fn zero() -> Jet3 {
    Jet3::constant(0.0)
}

impl LocalContact {
    fn new(cs: &ContactStructure, p: ChartPoint, order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderOutOfRange { order });
        }
        if order < 2 {
            return Err(Error::OrderOutOfRange { order });
        }
        let (fa, fb) = cs.frame.oriented();
        let jets = p.jets(order);
        let a = fa.eval(&jets);
        let b = fb.eval(&jets);

        let alpha0 = linalg::cross(&a, &b);
        let av = linalg::values(&a);
        let bv = linalg::values(&b);
        let n0 = linalg::values(&alpha0);
        if linalg::dot(&n0, &n0) <= 1e-24 * linalg::dot(&av, &av) * linalg::dot(&bv, &bv) {
            return Err(Error::SingularFrame);
        }
        // α₀ vanishes on A and B, so dα₀(A, B) = −α₀([A, B]).
        let ab = bracket_jets(&a, &b);
        let s = -linalg::dot(&alpha0, &ab);
        if math::abs(s.value()) < CONTACT_TOL {
            return Err(Error::DegenerateContact { value: s.value() });
        }
        let scale = -s.recip();
        let alpha = linalg::scale(&alpha0, scale);

        // dα_ij = ∂_i α_j − ∂_j α_i
        let mut da = [[zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    da[i][j] = alpha[j].partial(i) - alpha[i].partial(j);
                }
            }
        }
        let row = |v: &[Jet3; 3]| -> [Jet3; 3] {
            let mut r = [zero(); 3];
            for (i, ri) in r.iter_mut().enumerate() {
                *ri = da[i][0] * v[0] + da[i][1] * v[1] + da[i][2] * v[2];
            }
            r
        };
        let m = [alpha, row(&a), row(&b)];
        let one = Jet3::constant(1.0);
        let z = linalg::solve3(&m, &[one, zero(), zero()])?;

        let e = [a, b, z];
        let f = linalg::from_columns(&a, &b, &z);
        let finv = linalg::inverse(&f)?;

        // Brackets with Z need one derivative of Z; at order 2 they are left
        // undefined (NaN) rather than silently wrong.
        let mut c = [[[zero(); 3]; 3]; 3];
        for i in 0..3 {
            for j in i + 1..3 {
                if j == 2 && order < 3 {
                    let nan = Jet3::constant(f64::NAN).truncate(0);
                    c[i][j] = [nan; 3];
                    c[j][i] = [nan; 3];
                    continue;
                }
                let br = linalg::mat_vec(&finv, &bracket_jets(&e[i], &e[j]));
                c[i][j] = br;
                c[j][i] = br.map(|x| -x);
            }
        }
        let mut tau = [[zero(); 3]; 3];
        // ⟨τ e_i, e_j⟩ = −½(⟨[Z, e_i], e_j⟩ + ⟨e_i, [Z, e_j]⟩) on E
        for i in 0..2 {
            for j in 0..2 {
                tau[j][i] = (c[2][i][j] + c[2][j][i]) * -0.5;
            }
        }
        Ok(LocalContact { point: p, e, alpha, finv, c, tau })
    }

    /// Frame components of a chart vector.
    pub fn to_frame(&self, v: &[f64; 3]) -> [f64; 3] {
        let m = self.finv.map(|r| r.map(|x| x.value()));
        linalg::mat_vec(&m, v)
    }

    /// Chart components of a frame vector.
    pub fn from_frame(&self, w: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, ek) in self.e.iter().enumerate() {
            for i in 0..3 {
                out[i] += w[k] * ek[i].value();
            }
        }
        out
    }

    /// Frame components of a jet-valued chart field.
    pub fn frame_components(&self, v: &[Jet3; 3]) -> [Jet3; 3] {
        linalg::mat_vec(&self.finv, v)
    }

    pub fn metric_eps(&self, v: &[f64; 3], w: &[f64; 3], eps: Epsilon) -> f64 {
        frame_inner(&self.to_frame(v), &self.to_frame(w), eps)
    }

    /// `e_i f` for a jet `f` in the chart variables.
    pub fn derive(&self, f: &Jet3, i: usize) -> Jet3 {
        derive_along(f, &self.e[i])
    }

    /// `V f` for a field with frame components `v`.
    pub fn derive_along_frame(&self, f: &Jet3, v: &[Jet3; 3]) -> Jet3 {
        self.derive(f, 0) * v[0] + self.derive(f, 1) * v[1] + self.derive(f, 2) * v[2]
    }

    /// Connection 1-form of `∇` on `E`: `∇_{e_i} A = ω_i B`, `∇_{e_i} B = −ω_i A`.
    pub fn omega(&self) -> [Jet3; 3] {
        let c = &self.c;
        [-c[0][1][0], -c[0][1][1], (c[2][0][1] - c[2][1][0]) * 0.5]
    }

    pub fn nabla_table(&self) -> Connection {
        let w = self.omega();
        let mut t = [[[zero(); 3]; 3]; 3];
        for i in 0..3 {
            t[i][0][1] = w[i];
            t[i][1][0] = -w[i];
        }
        t
    }

    /// Frame components of `Q_ε e_i`, with `Q_ε = ½J − ετ`.
    pub fn q_eps(&self, eps: Epsilon) -> [[Jet3; 3]; 3] {
        let e = eps.get();
        let mut q = [[zero(); 3]; 3];
        for i in 0..2 {
            for l in 0..2 {
                q[i][l] = self.tau[l][i] * -e;
            }
        }
        q[0][1] += Jet3::constant(0.5);
        q[1][0] -= Jet3::constant(0.5);
        q
    }

    /// `∇^ε` from `∇` via the `Q_ε` formula.
    pub fn nabla_eps_table(&self, eps: Epsilon) -> Connection {
        let e = eps.get();
        let mut t = self.nabla_table();
        let q = self.q_eps(eps);
        for i in 0..3 {
            for k in 0..3 {
                // ⟨Q e_i, e_k⟩ Z
                if k < 2 {
                    t[i][k][2] += q[i][k];
                }
                // −(1/ε) α(e_k) Q e_i
                if k == 2 {
                    for l in 0..3 {
                        t[i][k][l] -= q[i][l] * (1.0 / e);
                    }
                }
                // −(1/2ε) α(e_i) J e_k
                if i == 2 {
                    let je = j_frame(k);
                    for l in 0..3 {
                        if je[l] != 0.0 {
                            t[i][k][l] -= Jet3::constant(je[l] / (2.0 * e));
                        }
                    }
                }
            }
        }
        t
    }

    /// Levi-Civita connection of `g_ε` from the Koszul formula in the frame.
    pub fn koszul_table(&self, eps: Epsilon) -> Connection {
        let g = eps.gram();
        let mut t = [[[zero(); 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let s = self.c[i][j][k] * g[k] - self.c[j][k][i] * g[i] + self.c[k][i][j] * g[j];
                    t[i][j][k] = s * (0.5 / g[k]);
                }
            }
        }
        t
    }

    /// `∇_V W` for fields given by frame-component jets; one order is lost.
    pub fn covariant(&self, conn: &Connection, v: &[Jet3; 3], w: &[Jet3; 3]) -> [Jet3; 3] {
        let mut out = [zero(); 3];
        for l in 0..3 {
            let mut acc = self.derive_along_frame(&w[l], v);
            for i in 0..3 {
                for k in 0..3 {
                    acc += v[i] * w[k] * conn[i][k][l];
                }
            }
            out[l] = acc;
        }
        out
    }

    /// Bracket of fields given by frame-component jets, in frame components.
    pub fn bracket_frame(&self, v: &[Jet3; 3], w: &[Jet3; 3]) -> [Jet3; 3] {
        let mut out = [zero(); 3];
        for m in 0..3 {
            let mut acc = self.derive_along_frame(&w[m], v) - self.derive_along_frame(&v[m], w);
            for i in 0..3 {
                for j in 0..3 {
                    acc += v[i] * w[j] * self.c[i][j][m];
                }
            }
            out[m] = acc;
        }
        out
    }

    /// `R(V, W)U` for fields in frame components via the field definition.
    pub fn curvature_fields(&self, conn: &Connection, v: &[Jet3; 3], w: &[Jet3; 3], u: &[Jet3; 3]) -> [Jet3; 3] {
        let wu = self.covariant(conn, w, u);
        let vu = self.covariant(conn, v, u);
        let a = self.covariant(conn, v, &wu);
        let b = self.covariant(conn, w, &vu);
        let vw = self.bracket_frame(v, w);
        let c = self.covariant(conn, &vw, u);
        linalg::sub(&linalg::sub(&a, &b), &c)
    }

    fn covariant_chart<V, W>(&self, conn: &Connection, v: &V, w: &W) -> Result<[f64; 3]>
    where
        V: VectorField + ?Sized,
        W: VectorField + ?Sized,
    {
        let jets = self.point.jets(2);
        let vf = self.frame_components(&v.eval(&jets));
        let wf = self.frame_components(&w.eval(&jets));
        let out = self.covariant(conn, &vf, &wf);
        Ok(self.from_frame(&linalg::values(&out)))
    }

    /// Torsion `∇_V W − ∇_W V − [V, W]` of a connection on frame vectors.
    pub fn torsion_frame(&self, conn: &Connection, v: &[f64; 3], w: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                let vw = v[i] * w[j];
                if vw == 0.0 {
                    continue;
                }
                for l in 0..3 {
                    out[l] += vw * (conn[i][j][l].value() - conn[j][i][l].value() - self.c[i][j][l].value());
                }
            }
        }
        out
    }

    /// Curvature tensor of a connection at the point, from its coefficients.
    pub fn riemann(&self, conn: &Connection) -> Riemann {
        let mut d = [[[[0.0; 3]; 3]; 3]; 3];
        // d[i][j][k][l] = e_i(Γ^l_jk)
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        d[i][j][k][l] = self.derive(&conn[j][k][l], i).value();
                    }
                }
            }
        }
        let g = conn.map(|a| a.map(|b| b.map(|x| x.value())));
        let c = self.c.map(|a| a.map(|b| b.map(|x| x.value())));
        let mut r = [[[[0.0; 3]; 3]; 3]; 3];
        for l in 0..3 {
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut s = d[i][j][k][l] - d[j][i][k][l];
                        for m in 0..3 {
                            s += g[j][k][m] * g[i][m][l] - g[i][k][m] * g[j][m][l] - c[i][j][m] * g[m][k][l];
                        }
                        r[l][k][i][j] = s;
                    }
                }
            }
        }
        r
    }

    /// `(∇_{e_i} τ) e_k` in frame components: `[i][k][l]`.
    pub fn nabla_tau(&self) -> [[[f64; 3]; 3]; 3] {
        let conn = self.nabla_table();
        let g = conn.map(|a| a.map(|b| b.map(|x| x.value())));
        let t = self.tau.map(|r| r.map(|x| x.value()));
        let mut out = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let mut s = self.derive(&self.tau[l][k], i).value();
                    for m in 0..3 {
                        s += t[m][k] * g[i][m][l] - t[l][m] * g[i][k][m];
                    }
                    out[i][k][l] = s;
                }
            }
        }
        out
    }

    /// `τ` as a frame matrix at the point.
    pub fn tau_values(&self) -> [[f64; 3]; 3] {
        self.tau.map(|r| r.map(|x| x.value()))
    }
}

/// `J e_k` in frame components.
pub fn j_frame(k: usize) -> [f64; 3] {
    match k {
        0 => [0.0, 1.0, 0.0],
        1 => [-1.0, 0.0, 0.0],
        _ => [0.0; 3],
    }
}

/// `J v` for a frame vector.
pub fn apply_j<S: Scalar>(v: &[S; 3]) -> [S; 3] {
    [-v[1], v[0], S::from_f64(0.0)]
}

pub fn frame_inner<S: Scalar>(v: &[S; 3], w: &[S; 3], eps: Epsilon) -> S {
    v[0] * w[0] + v[1] * w[1] + v[2] * w[2] * S::from_f64(1.0 / eps.get())
}

/// `⟨R(v₁, v₂)v₃, v₄⟩_ε` from a curvature tensor and frame vectors.
pub fn riemann_form(r: &Riemann, v1: &[f64; 3], v2: &[f64; 3], v3: &[f64; 3], v4: &[f64; 3], eps: Epsilon) -> f64 {
    let g = eps.gram();
    let mut s = 0.0;
    for l in 0..3 {
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let w = v1[i] * v2[j] * v3[k];
                    if w != 0.0 {
                        s += w * r[l][k][i][j] * v4[l] * g[l];
                    }
                }
            }
        }
    }
    s
}
