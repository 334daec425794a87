//! Residuals of the structural identities of a contact structure at a point.
//!
//! Every function returns absolute residuals; callers compare them with their
//! own tolerances.

use crate::contact::{apply_j, frame_inner, j_frame, riemann_form, Epsilon, LocalContact};
use crate::error::Result;
use crate::jet::Jet3;
use crate::levi_civita;
use crate::linalg;
use crate::math::{abs, sqrt};

/// Defining properties of `α` and `Z`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FormResiduals {
    /// `|dα(A, B) + 1|`
    pub dalpha_ab: f64,
    /// `max(|α(A)|, |α(B)|)`
    pub alpha_e: f64,
    /// `|α(Z) − 1|`
    pub alpha_z: f64,
    /// `max(|dα(Z, A)|, |dα(Z, B)|)`
    pub dalpha_z: f64,
}

fn dalpha(lc: &LocalContact, v: &[f64; 3], w: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let d = lc.alpha[j].gradient()[i] - lc.alpha[i].gradient()[j];
            s += d * v[i] * w[j];
        }
    }
    s
}

fn alpha_of(lc: &LocalContact, v: &[f64; 3]) -> f64 {
    linalg::dot(&linalg::values(&lc.alpha), v)
}

pub fn form_residuals(lc: &LocalContact) -> FormResiduals {
    let [a, b, z] = lc.e.map(|v| linalg::values(&v));
    FormResiduals {
        dalpha_ab: abs(dalpha(lc, &a, &b) + 1.0),
        alpha_e: abs(alpha_of(lc, &a)).max(abs(alpha_of(lc, &b))),
        alpha_z: abs(alpha_of(lc, &z) - 1.0),
        dalpha_z: abs(dalpha(lc, &z, &a)).max(abs(dalpha(lc, &z, &b))),
    }
}

/// Algebraic and differential identities of `J`, `τ`, `∇` and `∇^ε`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TensorResiduals {
    /// `dα(v, w) = ⟨v, Jw⟩` on chart basis vectors
    pub j_definition: f64,
    /// `J² = −1` on `E`
    pub j_squared: f64,
    /// `|JZ| + |τZ|`
    pub kills_z: f64,
    pub tau_symmetric: f64,
    pub tau_trace: f64,
    /// `τJ + Jτ`
    pub tau_anticommutes: f64,
    /// `∇J`
    pub nabla_j: f64,
    /// `L_Z J − 2Jτ`
    pub lie_j: f64,
    /// `∇` against the displayed torsion formula
    pub torsion_formula: f64,
    /// `∇g_ε = 0` for `∇`
    pub nabla_metric: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(abs(*x)))
}

pub fn tensor_residuals(lc: &LocalContact) -> TensorResiduals {
    let mut r = TensorResiduals::default();

    // J from dα in chart coordinates versus the frame rotation
    let mut jd = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let mut v = [0.0; 3];
            let mut w = [0.0; 3];
            v[i] = 1.0;
            w[j] = 1.0;
            let jw = lc.from_frame(&apply_j(&lc.to_frame(&w)));
            let lhs = dalpha(lc, &v, &w);
            let rhs = lc.metric_eps(&v, &jw, Epsilon::ONE);
            jd = jd.max(abs(lhs - rhs));
        }
    }
    r.j_definition = jd;

    let t = lc.tau_values();
    let tau_apply = |v: &[f64; 3]| -> [f64; 3] {
        let mut o = [0.0; 3];
        for l in 0..3 {
            for k in 0..3 {
                o[l] += t[l][k] * v[k];
            }
        }
        o
    };
    let mut js = 0.0f64;
    let mut anti = 0.0f64;
    for k in 0..2 {
        let e = basis(k);
        let jj = apply_j(&apply_j(&e));
        js = js.max(max_abs(&[jj[0] + e[0], jj[1] + e[1], jj[2]]));
        let a = tau_apply(&apply_j(&e));
        let b = apply_j(&tau_apply(&e));
        anti = anti.max(max_abs(&linalg::add(&a, &b)));
    }
    r.j_squared = js;
    r.tau_anticommutes = anti;
    let z = basis(2);
    r.kills_z = max_abs(&apply_j(&z)) + max_abs(&tau_apply(&z));
    r.tau_symmetric = max_abs(&[t[0][1] - t[1][0], t[0][2] - t[2][0], t[1][2] - t[2][1]]);
    r.tau_trace = abs(t[0][0] + t[1][1]);

    // (∇_{e_i} J) e_k = ∇_{e_i}(J e_k) − J ∇_{e_i} e_k
    let conn = lc.nabla_table();
    let g = conn.map(|a| a.map(|b| b.map(|x| x.value())));
    let mut nj = 0.0f64;
    for gi in &g {
        for k in 0..3 {
            let je = j_frame(k);
            let mut lhs = [0.0; 3];
            for m in 0..3 {
                for l in 0..3 {
                    lhs[l] += je[m] * gi[m][l];
                }
            }
            let rhs = apply_j(&gi[k]);
            nj = nj.max(max_abs(&linalg::sub(&lhs, &rhs)));
        }
    }
    r.nabla_j = nj;

    // (L_Z J) e_k = [Z, J e_k] − J [Z, e_k], compared with 2Jτ e_k
    let c = lc.c.map(|a| a.map(|b| b.map(|x| x.value())));
    let mut lj = 0.0f64;
    for k in 0..3 {
        let je = j_frame(k);
        let mut lhs = [0.0; 3];
        for (m, jm) in je.iter().enumerate() {
            for l in 0..3 {
                lhs[l] += jm * c[2][m][l];
            }
        }
        let lhs = linalg::sub(&lhs, &apply_j(&c[2][k]));
        let rhs = linalg::scale(&apply_j(&tau_apply(&basis(k))), 2.0);
        lj = lj.max(max_abs(&linalg::sub(&lhs, &rhs)));
    }
    r.lie_j = lj;

    // T(V, W) = −⟨JV, W⟩Z + α(V)τW − α(W)τV
    let mut tf = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let (v, w) = (basis(i), basis(j));
            let lhs = lc.torsion_frame(&conn, &v, &w);
            let mut rhs = [0.0, 0.0, -linalg::dot(&apply_j(&v), &w)];
            rhs = linalg::add(&rhs, &linalg::scale(&tau_apply(&w), v[2]));
            rhs = linalg::sub(&rhs, &linalg::scale(&tau_apply(&v), w[2]));
            tf = tf.max(max_abs(&linalg::sub(&lhs, &rhs)));
        }
    }
    r.torsion_formula = tf;
    r.nabla_metric = metric_defect(&conn, Epsilon::new(0.37).unwrap());
    r
}

fn basis(k: usize) -> [f64; 3] {
    let mut e = [0.0; 3];
    e[k] = 1.0;
    e
}

/// `max |⟨∇_i e_k, e_l⟩_ε + ⟨e_k, ∇_i e_l⟩_ε|`: zero iff the connection is
/// compatible with `g_ε` (the frame Gram matrix is constant).
fn metric_defect(conn: &crate::contact::Connection, eps: Epsilon) -> f64 {
    let g = eps.gram();
    let mut m = 0.0f64;
    for ci in conn {
        for k in 0..3 {
            for l in 0..3 {
                let s = ci[k][l].value() * g[l] + ci[l][k].value() * g[k];
                m = m.max(abs(s));
            }
        }
    }
    m
}

/// Checks of `∇^ε` for one `ε`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LeviCivitaResiduals {
    pub metric: f64,
    pub torsion: f64,
    /// frame Koszul formula versus the `Q_ε` assembly
    pub koszul_frame: f64,
    /// chart Christoffel symbols versus the `Q_ε` assembly
    pub christoffel: f64,
}

pub fn levi_civita_residuals(lc: &LocalContact, eps: Epsilon) -> Result<LeviCivitaResiduals> {
    let conn = lc.nabla_eps_table(eps);
    let mut r = LeviCivitaResiduals { metric: metric_defect(&conn, eps), ..Default::default() };
    let mut tor = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let t = lc.torsion_frame(&conn, &basis(i), &basis(j));
            tor = tor.max(max_abs(&t));
        }
    }
    r.torsion = tor;
    let kz = lc.koszul_table(eps);
    let mut kf = 0.0f64;
    for i in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                kf = kf.max(abs(kz[i][k][l].value() - conn[i][k][l].value()));
            }
        }
    }
    r.koszul_frame = kf;

    // ∇^ε_{e_i} e_k in the chart, against Christoffel symbols
    let gam = levi_civita::christoffel(lc, eps)?;
    let mut ch = 0.0f64;
    for i in 0..3 {
        for k in 0..3 {
            let ei = &lc.e[i];
            let ek = &lc.e[k];
            let eiv = linalg::values(ei);
            let ekv = linalg::values(ek);
            let mut chart = [0.0; 3];
            for l in 0..3 {
                let mut s = crate::field::derive_along(&ek[l], ei).value();
                for a in 0..3 {
                    for b in 0..3 {
                        s += gam[l][a][b] * eiv[a] * ekv[b];
                    }
                }
                chart[l] = s;
            }
            let frame = lc.from_frame(&linalg::values(&conn[i][k]));
            let scale = 1.0 + max_abs(&chart);
            ch = ch.max(max_abs(&linalg::sub(&chart, &frame)) / scale);
        }
    }
    r.christoffel = ch;
    Ok(r)
}

/// `|LHS − RHS|` for the four curvature expansions along a horizontal `X`.
pub fn curvature_expansion_residuals(lc: &LocalContact, x: &[f64; 2], eps: Epsilon) -> [f64; 4] {
    let n = sqrt(x[0] * x[0] + x[1] * x[1]);
    let xv = [x[0] / n, x[1] / n, 0.0];
    let y = apply_j(&xv);
    let z = basis(2);
    let e = eps.get();
    let one = Epsilon::ONE;

    let re = lc.riemann(&lc.nabla_eps_table(eps));
    let r = lc.riemann(&lc.nabla_table());
    let t = lc.tau_values();
    let dt = lc.nabla_tau();

    let tau_apply = |v: &[f64; 3]| -> [f64; 3] {
        let mut o = [0.0; 3];
        for l in 0..3 {
            for k in 0..3 {
                o[l] += t[l][k] * v[k];
            }
        }
        o
    };
    // ⟨(∇_V τ) U, W⟩ for frame vectors
    let dtau = |v: &[f64; 3], u: &[f64; 3], w: &[f64; 3]| -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    s += v[i] * u[k] * dt[i][k][l] * w[l];
                }
            }
        }
        s
    };
    let tau_norm2: f64 = t.iter().flatten().map(|v| v * v).sum();
    let tx = tau_apply(&xv);
    let txy = linalg::dot(&tx, &y);

    let lhs1 = riemann_form(&re, &xv, &y, &y, &xv, eps);
    let rhs1 = riemann_form(&r, &xv, &y, &y, &xv, one) - 3.0 / (4.0 * e) + 0.5 * e * tau_norm2;

    let lhs2 = riemann_form(&re, &xv, &y, &xv, &z, eps);
    let rhs2 = dtau(&y, &xv, &xv) - dtau(&xv, &y, &xv);

    let lhs3 = riemann_form(&re, &xv, &z, &z, &xv, eps);
    let rhs3 = 1.0 / (4.0 * e * e) - linalg::dot(&tx, &tx) - dtau(&z, &xv, &xv) - txy / e;

    let lhs4 = riemann_form(&re, &xv, &z, &y, &z, eps);
    let ttx = tau_apply(&tx);
    let rhs4 = -linalg::dot(&tx, &xv) / e + dtau(&z, &xv, &y) + linalg::dot(&ttx, &y);

    [abs(lhs1 - rhs1), abs(lhs2 - rhs2), abs(lhs3 - rhs3), abs(lhs4 - rhs4)]
}

/// `d/dt ⟨W₁, W₂⟩_ε − ⟨∇^ε_V W₁, W₂⟩_ε − ⟨W₁, ∇^ε_V W₂⟩_ε` for fields in
/// frame components.
pub fn metric_compatibility(lc: &LocalContact, eps: Epsilon, v: &[Jet3; 3], w1: &[Jet3; 3], w2: &[Jet3; 3]) -> f64 {
    let conn = lc.nabla_eps_table(eps);
    let ip = frame_inner(w1, w2, eps);
    let lhs = lc.derive_along_frame(&ip, v).value();
    let a = linalg::values(&lc.covariant(&conn, v, w1));
    let b = linalg::values(&lc.covariant(&conn, v, w2));
    let rhs = frame_inner(&a, &linalg::values(w2), eps) + frame_inner(&linalg::values(w1), &b, eps);
    abs(lhs - rhs)
}
