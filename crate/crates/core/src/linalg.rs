//! Fixed-size 3-vector and 3×3 helpers, generic over [`Scalar`] so the same
//! code runs on floats and on jets.

use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::math;

pub type Vec3<S> = [S; 3];
pub type Mat3<S> = [[S; 3]; 3];

#[inline]
pub fn dot<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn scale<S: Scalar>(a: &Vec3<S>, s: S) -> Vec3<S> {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn add<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn values<S: Scalar>(a: &Vec3<S>) -> [f64; 3] {
    [a[0].value(), a[1].value(), a[2].value()]
}

pub fn norm(a: &[f64; 3]) -> f64 {
    math::sqrt(dot(a, a))
}

/// Matrix with the given vectors as columns.
pub fn from_columns<S: Scalar>(c0: &Vec3<S>, c1: &Vec3<S>, c2: &Vec3<S>) -> Mat3<S> {
    [[c0[0], c1[0], c2[0]], [c0[1], c1[1], c2[1]], [c0[2], c1[2], c2[2]]]
}

pub fn mat_vec<S: Scalar>(m: &Mat3<S>, v: &Vec3<S>) -> Vec3<S> {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn det<S: Scalar>(m: &Mat3<S>) -> S {
    let c = cross(&m[1], &m[2]);
    dot(&m[0], &c)
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting on the
/// base values. Fails when the best pivot is below `1e-14` times the largest
/// entry.
pub fn solve3<S: Scalar>(m: &Mat3<S>, rhs: &Vec3<S>) -> Result<Vec3<S>> {
    let mut a = *m;
    let mut b = *rhs;
    let mut big = 0.0f64;
    for row in &a {
        for x in row {
            big = big.max(math::abs(x.value()));
        }
    }
    if big == 0.0 {
        return Err(Error::SingularFrame);
    }
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if math::abs(a[r][col].value()) > math::abs(a[piv][col].value()) {
                piv = r;
            }
        }
        if math::abs(a[piv][col].value()) <= 1e-14 * big {
            return Err(Error::SingularFrame);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = S::from_f64(1.0) / a[col][col];
        for r in col + 1..3 {
            let f = a[r][col] * inv;
            for k in col..3 {
                a[r][k] = a[r][k] - f * a[col][k];
            }
            b[r] = b[r] - f * b[col];
        }
    }
    let mut x = b;
    for col in (0..3).rev() {
        let mut acc = b[col];
        for k in col + 1..3 {
            acc = acc - a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}

pub fn inverse<S: Scalar>(m: &Mat3<S>) -> Result<Mat3<S>> {
    let z = S::from_f64(0.0);
    let o = S::from_f64(1.0);
    let c0 = solve3(m, &[o, z, z])?;
    let c1 = solve3(m, &[z, o, z])?;
    let c2 = solve3(m, &[z, z, o])?;
    Ok(from_columns(&c0, &c1, &c2))
}
