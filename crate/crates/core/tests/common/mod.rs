#![allow(dead_code)]

use subriemann_core::{ContactFrame, ContactStructure, Expr, ExprField, Func};

pub fn x() -> Expr {
    Expr::var(0)
}
pub fn y() -> Expr {
    Expr::var(1)
}
pub fn z() -> Expr {
    Expr::var(2)
}
pub fn c(v: f64) -> Expr {
    Expr::c(v)
}

/// A = ∂x − (y/2)∂z
pub fn heisenberg_a() -> ExprField {
    ExprField::new([c(1.0), c(0.0), -(y() / c(2.0))])
}

/// B = ∂y + (x/2)∂z
pub fn heisenberg_b() -> ExprField {
    ExprField::new([c(0.0), c(1.0), x() / c(2.0)])
}

/// B_λ = e^{λz}(∂y + (x/2)∂z)
pub fn twisted_b(lambda: f64) -> ExprField {
    let s = Expr::call(Func::Exp, c(lambda) * z());
    ExprField::new([c(0.0), s.clone(), s * (x() / c(2.0))])
}

pub fn heisenberg() -> ContactStructure {
    ContactStructure::new(ContactFrame::new(Box::new(heisenberg_a()), Box::new(heisenberg_b())))
}

pub fn twisted() -> ContactStructure {
    ContactStructure::new(ContactFrame::new(Box::new(heisenberg_a()), Box::new(twisted_b(0.3))))
}

pub fn flat() -> ContactStructure {
    let a = ExprField::new([c(1.0), c(0.0), c(0.0)]);
    let b = ExprField::new([c(0.0), c(1.0), c(0.0)]);
    ContactStructure::new(ContactFrame::new(Box::new(a), Box::new(b)))
}

/// Deterministic points in a box, from a simple LCG.
pub fn probe_points(n: usize, seed: u64, half_width: f64) -> Vec<[f64; 3]> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    (0..n).map(|_| [next() * half_width, next() * half_width, next() * half_width]).collect()
}

use subriemann_core::surface::{Cap, ExprImmersion, SurfacePatch};

pub fn u() -> Expr {
    Expr::var(0)
}
pub fn v() -> Expr {
    Expr::var(1)
}
pub fn sin(e: Expr) -> Expr {
    Expr::call(Func::Sin, e)
}
pub fn cos(e: Expr) -> Expr {
    Expr::call(Func::Cos, e)
}

/// Unit sphere, u = polar angle, v = azimuth; outward orientation.
pub fn sphere() -> SurfacePatch {
    let im = ExprImmersion::new([sin(u()) * cos(v()), sin(u()) * sin(v()), cos(u())]);
    let mut p = SurfacePatch::new(Box::new(im), [[0.0, std::f64::consts::PI], [0.0, 2.0 * std::f64::consts::PI]]);
    p.periodic = [false, true];
    p.caps = vec![
        Cap { center: [0.0, std::f64::consts::PI], half_width: [1e-3, std::f64::consts::PI] },
        Cap { center: [std::f64::consts::PI, std::f64::consts::PI], half_width: [1e-3, std::f64::consts::PI] },
    ];
    p
}

/// Torus of revolution (r − 2)² + z² = 1/4, outward.
pub fn torus() -> SurfacePatch {
    let r = c(2.0) + c(0.5) * cos(v());
    let im = ExprImmersion::new([r.clone() * cos(u()), r * sin(u()), c(0.5) * sin(v())]);
    let tau = 2.0 * std::f64::consts::PI;
    let mut p = SurfacePatch::new(Box::new(im), [[0.0, tau], [0.0, tau]]);
    p.periodic = [true, true];
    p
}

/// Upper unit hemisphere, outward; its boundary is the equator.
pub fn hemisphere() -> SurfacePatch {
    let im = ExprImmersion::new([sin(u()) * cos(v()), sin(u()) * sin(v()), cos(u())]);
    let pi = std::f64::consts::PI;
    let mut p = SurfacePatch::new(Box::new(im), [[0.0, pi / 2.0], [0.0, 2.0 * pi]]);
    p.periodic = [false, true];
    p.caps = vec![Cap { center: [0.0, pi], half_width: [1e-3, pi] }];
    p
}

/// Unit disk in the plane z = 0, polar coordinates, normal +z.
pub fn disk() -> SurfacePatch {
    let im = ExprImmersion::new([u() * cos(v()), u() * sin(v()), c(0.0)]);
    let pi = std::f64::consts::PI;
    let mut p = SurfacePatch::new(Box::new(im), [[0.0, 1.0], [0.0, 2.0 * pi]]);
    p.periodic = [false, true];
    p.caps = vec![Cap { center: [0.0, pi], half_width: [4e-3, pi] }];
    p
}

/// The closed curve `u = u0 + amp sin(k t)`, `v = t`.
pub fn wavy(u0: f64, amp: f64, k: f64) -> subriemann_core::boundary::CurvePiece {
    let t = Expr::var(0);
    subriemann_core::boundary::CurvePiece::new(c(u0) + c(amp) * sin(c(k) * t.clone()), t, [0.0, 2.0 * std::f64::consts::PI])
}

/// Annular sector `0.3 ≤ r ≤ 1`, `0 ≤ φ ≤ 1.2` of the plane z = 0.
pub fn sector() -> SurfacePatch {
    let im = ExprImmersion::new([u() * cos(v()), u() * sin(v()), c(0.0)]);
    SurfacePatch::new(Box::new(im), [[0.3, 1.0], [0.0, 1.2]])
}

/// The counterclockwise boundary of [`sector`].
pub fn sector_boundary() -> Vec<subriemann_core::boundary::CurvePiece> {
    use subriemann_core::boundary::CurvePiece;
    let t = Expr::var(0);
    vec![
        CurvePiece::new(t.clone(), c(0.0), [0.3, 1.0]),
        CurvePiece::new(c(1.0), t.clone(), [0.0, 1.2]),
        CurvePiece::new(c(1.3) - t.clone(), c(1.2), [0.3, 1.0]),
        CurvePiece::new(c(0.3), c(1.2) - t, [0.0, 1.2]),
    ]
}

/// `A = −sin z ∂x + cos z ∂y`, `B = ∂z`: contact form `cos z dx + sin z dy`,
/// Reeb field `cos z ∂x + sin z ∂y`, and `g` is the Euclidean metric.
pub fn euclid() -> ContactStructure {
    let a = ExprField::new([-sin(z()), cos(z()), c(0.0)]);
    let b = ExprField::new([c(0.0), c(0.0), c(1.0)]);
    ContactStructure::new(ContactFrame::new(Box::new(a), Box::new(b)))
}

/// Unit cylinder `x² + y² = 1`, `u` the angle, `v = z`.
pub fn cylinder() -> SurfacePatch {
    let im = ExprImmersion::new([cos(u()), sin(u()), v()]);
    SurfacePatch::new(Box::new(im), [[0.0, 2.0 * std::f64::consts::PI], [-1.0, 1.0]])
}

/// Upper unit sphere as a graph over the unit disk.
pub fn sphere_graph() -> SurfacePatch {
    let h = Expr::call(Func::Sqrt, c(1.0) - u() * u() - v() * v());
    SurfacePatch::new(Box::new(ExprImmersion::new([u(), v(), h])), [[-0.9, 0.9], [-0.9, 0.9]])
}

/// The plane `z = 0`.
pub fn plane() -> SurfacePatch {
    SurfacePatch::new(Box::new(ExprImmersion::new([u(), v(), c(0.0)])), [[-1.0, 1.0], [-1.0, 1.0]])
}

/// [`sphere`] with the parameters swapped and the orientation reversed.
pub fn sphere_swapped() -> SurfacePatch {
    let im = ExprImmersion::new([sin(v()) * cos(u()), sin(v()) * sin(u()), cos(v())]);
    let mut p = SurfacePatch::new(Box::new(im), [[0.0, 2.0 * std::f64::consts::PI], [0.0, std::f64::consts::PI]]);
    p.periodic = [true, false];
    p.orientation = -1;
    p
}
