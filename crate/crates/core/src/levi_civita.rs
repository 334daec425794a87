//! Reference Levi-Civita connection of `g_ε` from chart Christoffel symbols.
//!
//! This is deliberately independent of the frame calculus in
//! [`contact`](crate::contact): the metric components are assembled in the
//! chart and differentiated directly.

use crate::contact::{Epsilon, LocalContact};
use crate::error::Result;
use crate::field::{derive_along, VectorField};
use crate::jet::Jet3;
use crate::linalg;

/// Chart components `g_ε(∂_i, ∂_j) = (F⁻ᵀ diag(1, 1, 1/ε) F⁻¹)_ij` as jets.
pub fn chart_metric(lc: &LocalContact, eps: Epsilon) -> [[Jet3; 3]; 3] {
    let g = eps.gram();
    let f = &lc.finv;
    let mut m = [[Jet3::constant(0.0); 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let mut s = f[0][i] * f[0][j] * g[0];
            s += f[1][i] * f[1][j] * g[1];
            s += f[2][i] * f[2][j] * g[2];
            m[i][j] = s;
            m[j][i] = s;
        }
    }
    m
}

/// `Γ^l_ij` at the point, indexed `[l][i][j]`.
pub fn christoffel(lc: &LocalContact, eps: Epsilon) -> Result<[[[f64; 3]; 3]; 3]> {
    let g = chart_metric(lc, eps);
    let gv = g.map(|r| r.map(|x| x.value()));
    let ginv = linalg::inverse(&gv)?;
    let mut dg = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                dg[k][i][j] = g[i][j].derivative(&unit(k));
            }
        }
    }
    let mut out = [[[0.0; 3]; 3]; 3];
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for m in 0..3 {
                    s += ginv[l][m] * (dg[i][j][m] + dg[j][i][m] - dg[m][i][j]);
                }
                out[l][i][j] = 0.5 * s;
            }
        }
    }
    Ok(out)
}

fn unit(k: usize) -> [u8; 3] {
    let mut e = [0u8; 3];
    e[k] = 1;
    e
}

/// `∇^ε_V W` at the point in chart components.
pub fn covariant<V, W>(lc: &LocalContact, eps: Epsilon, v: &V, w: &W) -> Result<[f64; 3]>
where
    V: VectorField + ?Sized,
    W: VectorField + ?Sized,
{
    let gam = christoffel(lc, eps)?;
    let jets = lc.point.jets(1);
    let vj = v.eval(&jets);
    let wj = w.eval(&jets);
    let vv = linalg::values(&vj);
    let wv = linalg::values(&wj);
    let mut out = [0.0; 3];
    for l in 0..3 {
        let mut s = derive_along(&wj[l], &vj).value();
        for i in 0..3 {
            for j in 0..3 {
                s += gam[l][i][j] * vv[i] * wv[j];
            }
        }
        out[l] = s;
    }
    Ok(out)
}
