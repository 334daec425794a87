mod common;

use common::*;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};
use subriemann_core::contact::frame_inner;
use subriemann_core::surface::{
    adapted_frame, area_densities, b_panel, brioschi_curvature, gauss_curvature, horizontal_parameter, k_sigma_e, second_fundamental_form,
    second_fundamental_form_oracle, xa_identity_residual, ExprImmersion, SurfaceJets, SurfacePatch,
};
use subriemann_core::{ConstField, ContactFrame, ContactStructure, Epsilon, Error, FnField, Jet3, VectorField};

const XA_TOL: f64 = 1e-6;
const II12_TOL: f64 = 1e-8;
const ORACLE_TOL: f64 = 1e-6;
const GAUSS_REL_TOL: f64 = 1e-6;
const REPARAM_TOL: f64 = 1e-8;
const RECOMBINE_REL_TOL: f64 = 1e-6;
const AREA_TOL: f64 = 1e-9;
const SIGN_TOL: f64 = 1e-9;
const EXTENSION_TOL: f64 = 1e-7;
const EPSILONS: [f64; 3] = [1.0, 0.3, 0.05];

fn eps(v: f64) -> Epsilon {
    Epsilon::new(v).unwrap()
}

fn flipped_heisenberg() -> ContactStructure {
    ContactStructure::new(ContactFrame::new(Box::new(heisenberg_a()), Box::new(heisenberg_b())).with_orientation(-1))
}

/// Deterministic parameter points in the interior of `patch` with `|a| ≤ a_max`.
fn samples(cs: &ContactStructure, patch: &SurfacePatch, n: usize, seed: u64, a_max: f64) -> Vec<[f64; 2]> {
    let [[u0, u1], [v0, v1]] = patch.domain;
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < n {
        let p = probe_points(1, s, 1.0)[0];
        s += 1;
        let uv = [u0 + (u1 - u0) * (0.02 + 0.96 * (p[0] + 1.0) / 2.0), v0 + (v1 - v0) * (0.02 + 0.96 * (p[1] + 1.0) / 2.0)];
        if horizontal_parameter(cs, patch, uv).unwrap().abs() <= a_max {
            out.push(uv);
        }
    }
    out
}

fn cases() -> Vec<(&'static str, ContactStructure, SurfacePatch)> {
    vec![
        ("heisenberg/sphere", heisenberg(), sphere()),
        ("heisenberg/torus", heisenberg(), torus()),
        ("twisted/sphere", twisted(), sphere()),
        ("twisted/torus", twisted(), torus()),
        ("euclid/torus", euclid(), torus()),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn horizontal_parameter_of_the_heisenberg_sphere() {
    let cs = heisenberg();
    let s = sphere();
    for u in [0.2, 0.7, 1.2, PI / 2.0, 2.0, 2.9] {
        for v in [0.0, 1.0, 4.0] {
            let z: f64 = f64::cos(u);
            let want = 2.0 * z / (4.0 + z * z * (1.0 - z * z)).sqrt();
            let a = horizontal_parameter(&cs, &s, [u, v]).unwrap();
            assert!((a - want).abs() < 1e-12, "{u} {v}: {a} {want}");
        }
    }
    let pole = horizontal_parameter(&cs, &sphere_graph(), [0.0, 0.0]).unwrap();
    assert!((pole - 1.0).abs() < 1e-12);
    assert!(matches!(adapted_frame(&cs, &sphere_graph(), [0.0, 0.0], Epsilon::ONE), Err(Error::CharacteristicPoint { .. })));
    assert!(matches!(horizontal_parameter(&cs, &s, [0.0, 1.0]), Err(Error::RankDeficient)));
}

#[test]
fn vertical_surfaces_have_zero_parameter() {
    let cs = heisenberg();
    for uv in samples(&cs, &cylinder(), 20, 1, 1.0) {
        assert!(horizontal_parameter(&cs, &cylinder(), uv).unwrap().abs() < 1e-12);
    }
    let tilted = twisted();
    let off = samples(&tilted, &cylinder(), 20, 1, 1.0);
    assert!(off.iter().any(|uv| horizontal_parameter(&tilted, &cylinder(), *uv).unwrap().abs() > 1e-3));
}

#[test]
fn heisenberg_sphere_frame() {
    let cs = heisenberg();
    let s = sphere();
    for uv in samples(&cs, &s, 30, 2, 0.99) {
        let f = adapted_frame(&cs, &s, uv, Epsilon::ONE).unwrap();
        let p = s.immersion.point(uv);
        let (x, y, z): (f64, f64, f64) = (p.x, p.y, p.z);
        let r = (x * x + y * y).sqrt();
        // Θ = ∂θ/r + (r/2)∂z and R = ∂r
        let theta = [-y / r, x / r, r / 2.0];
        let rr = [x / r, y / r, 0.0];
        let n = (4.0 + z * z).sqrt();
        let want: [f64; 3] = core::array::from_fn(|i| (2.0 * theta[i] - z * rr[i]) / n);
        let lc = cs.at(p, 2).unwrap();
        let got = lc.from_frame(&f.x);
        assert!((0..3).all(|i| (got[i] - want[i]).abs() < 1e-12), "{got:?} {want:?}");
    }
}

#[test]
fn adapted_frame_is_orthonormal() {
    for (name, cs, s) in cases() {
        for uv in samples(&cs, &s, 50, 3, 0.999) {
            for e in EPSILONS {
                let f = adapted_frame(&cs, &s, uv, eps(e)).unwrap();
                let ip = |v: &[f64; 3], w: &[f64; 3]| frame_inner(v, w, eps(e));
                assert!((ip(&f.x, &f.x) - 1.0).abs() < 1e-12, "{name}");
                assert!((ip(&f.x2_hat, &f.x2_hat) - 1.0).abs() < 1e-12, "{name}");
                assert!((ip(&f.normal, &f.normal) - 1.0).abs() < 1e-12, "{name}");
                assert!(ip(&f.x, &f.x2_hat).abs() < 1e-12, "{name}");
                assert!(ip(&f.x, &f.normal).abs() < 1e-12 && ip(&f.x2_hat, &f.normal).abs() < 1e-12, "{name}");
                assert_eq!(f.x[2], 0.0);
                let sj = SurfaceJets::new(&cs, &s, uv, 2, 1).unwrap();
                for d in [[1.0, 0.0], [0.0, 1.0]] {
                    assert!(ip(&sj.push_forward(&d), &f.normal).abs() < 1e-12, "{name}");
                }
            }
        }
    }
}

#[test]
fn x_carries_the_plus_beta_sign() {
    for (name, cs, s) in cases() {
        for uv in samples(&cs, &s, 200, 4, 0.999) {
            let f = adapted_frame(&cs, &s, uv, Epsilon::ONE).unwrap();
            let sj = SurfaceJets::new(&cs, &s, uv, 2, 1).unwrap();
            let (px, p2) = (sj.param_direction(&f.x), sj.param_direction(&f.x2_hat));
            // σ(X, X̂₂) with the patch orientation, for an orthonormal pair
            let sigma = (px[0] * p2[1] - px[1] * p2[0]) * s.orientation_sign() * sj.area;
            let beta = f.x2_hat[2];
            assert!((f.b0 * sigma - beta).abs() <= SIGN_TOL, "{name} {uv:?}: {sigma} {beta}");
        }
    }
}

#[test]
fn tau_terms_vanish_on_heisenberg_surfaces() {
    let cs = heisenberg();
    for s in [sphere(), torus(), cylinder()] {
        for uv in samples(&cs, &s, 30, 5, 0.999) {
            let f = adapted_frame(&cs, &s, uv, eps(0.4)).unwrap();
            assert!(f.tau0.abs() < 1e-14 && f.tau1.abs() < 1e-14);
            assert!(b_panel(&cs, &s, uv, eps(0.4)).unwrap().b21.abs() < 1e-14);
        }
    }
}

#[test]
fn xa_identity() {
    let (cs, s) = (heisenberg(), sphere());
    let u_half = f64::acos(0.5);
    for k in 0..8 {
        let v = k as f64 * PI / 4.0 + 0.1;
        assert!(xa_identity_residual(&cs, &s, [u_half, v]).unwrap() <= XA_TOL);
        let f = adapted_frame(&cs, &s, [PI / 2.0, v], Epsilon::ONE).unwrap();
        assert!(f.a.abs() < 1e-15);
        assert!((f.xa - f.kx2).abs() <= XA_TOL);
    }
    for (name, cs, s) in cases() {
        for uv in samples(&cs, &s, 200, 6, 0.99) {
            let r = xa_identity_residual(&cs, &s, uv).unwrap();
            assert!(r <= XA_TOL, "{name} {uv:?}: {r:e}");
        }
    }
}

#[test]
fn second_fundamental_form_two_ways() {
    for (name, cs, s) in cases() {
        for uv in samples(&cs, &s, 60, 7, 0.99) {
            for e in EPSILONS {
                let ii = second_fundamental_form(&cs, &s, uv, eps(e)).unwrap();
                assert!((ii.ii12 - ii.ii12_alt).abs() <= II12_TOL, "{name} {e}: {ii:?}");
                let o = second_fundamental_form_oracle(&cs, &s, uv, eps(e)).unwrap();
                let closed = [[ii.ii11, ii.ii12], [ii.ii12, ii.ii22]];
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((o[i][j] - closed[i][j]).abs() <= ORACLE_TOL, "{name} {e} {i}{j}: {o:?} {ii:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn equator_second_fundamental_form_reduces() {
    let (cs, s) = (heisenberg(), sphere());
    for k in 0..8 {
        let uv = [PI / 2.0, k as f64 * PI / 4.0];
        let f = adapted_frame(&cs, &s, uv, Epsilon::ONE).unwrap();
        let ii = second_fundamental_form(&cs, &s, uv, Epsilon::ONE).unwrap();
        assert!((ii.ii11 + f.kx).abs() < 1e-12, "{} {}", ii.ii11, f.kx);
    }
}

#[test]
fn gauss_equation_matches_brioschi() {
    for (name, cs, s) in cases() {
        for uv in samples(&cs, &s, 40, 8, 0.9) {
            for e in [1.0, 0.5, 0.1] {
                let g = gauss_curvature(&cs, &s, uv, eps(e)).unwrap();
                let b = brioschi_curvature(&cs, &s, uv, eps(e)).unwrap();
                assert!(rel(g, b) <= GAUSS_REL_TOL, "{name} {e} {uv:?}: {g} {b}");
            }
        }
    }
}

#[test]
fn euclidean_sanity() {
    let cs = euclid();
    for uv in samples(&cs, &sphere(), 40, 9, 0.99) {
        let k = gauss_curvature(&cs, &sphere(), uv, Epsilon::ONE).unwrap();
        assert!((k - 1.0).abs() < 1e-10, "{k}");
        let k = brioschi_curvature(&cs, &sphere(), uv, Epsilon::ONE).unwrap();
        assert!((k - 1.0).abs() < 1e-10, "{k}");
    }
    for uv in samples(&cs, &plane(), 20, 10, 1.0) {
        for e in EPSILONS {
            assert!(brioschi_curvature(&cs, &plane(), uv, eps(e)).unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn heisenberg_equator_is_rotation_invariant() {
    let (cs, s) = (heisenberg(), sphere());
    let k: Vec<f64> = (0..8).map(|i| gauss_curvature(&cs, &s, [PI / 2.0, i as f64 * PI / 4.0], Epsilon::ONE).unwrap()).collect();
    assert!(k[0].is_finite());
    assert!(k.iter().all(|v| (v - k[0]).abs() < 1e-10), "{k:?}");
}

#[test]
fn curvature_ignores_the_parametrization() {
    let scaled = {
        let im = ExprImmersion::new([sin(c(2.0) * u()) * cos(v()), sin(c(2.0) * u()) * sin(v()), cos(c(2.0) * u())]);
        SurfacePatch::new(Box::new(im), [[0.0, PI / 2.0], [0.0, 2.0 * PI]])
    };
    for cs in [heisenberg(), twisted()] {
        for uv in samples(&cs, &sphere(), 40, 11, 0.95) {
            let swapped = [uv[1], uv[0]];
            let a = horizontal_parameter(&cs, &sphere(), uv).unwrap();
            assert!((a - horizontal_parameter(&cs, &sphere_swapped(), swapped).unwrap()).abs() <= REPARAM_TOL);
            assert!((a - horizontal_parameter(&cs, &scaled, [uv[0] / 2.0, uv[1]]).unwrap()).abs() <= REPARAM_TOL);
            for e in [1.0, 0.3] {
                let b1 = brioschi_curvature(&cs, &sphere(), uv, eps(e)).unwrap();
                let b2 = brioschi_curvature(&cs, &sphere_swapped(), swapped, eps(e)).unwrap();
                assert!(rel(b1, b2) <= REPARAM_TOL, "{b1} {b2}");
                let g2 = gauss_curvature(&cs, &sphere_swapped(), swapped, eps(e)).unwrap();
                assert!(rel(b1, g2) <= GAUSS_REL_TOL);
            }
            let k1 = k_sigma_e(&cs, &sphere(), uv).unwrap();
            let k2 = k_sigma_e(&cs, &sphere_swapped(), swapped).unwrap();
            assert!(rel(k1, k2) <= REPARAM_TOL, "{k1} {k2}");
        }
    }
}

#[test]
fn reversing_e_flips_a_but_not_k_sigma_e() {
    let (cs, fl) = (heisenberg(), flipped_heisenberg());
    for s in [sphere(), torus()] {
        for uv in samples(&cs, &s, 40, 12, 0.99) {
            let a = horizontal_parameter(&cs, &s, uv).unwrap();
            assert!((a + horizontal_parameter(&fl, &s, uv).unwrap()).abs() < 1e-12);
            let k1 = k_sigma_e(&cs, &s, uv).unwrap();
            let k2 = k_sigma_e(&fl, &s, uv).unwrap();
            assert!((k1 - k2).abs() <= 1e-8, "{k1} {k2}");
        }
    }
}

#[test]
fn recombination_of_the_b_terms() {
    for (name, cs, s) in cases() {
        for uv in samples(&cs, &s, 60, 13, 0.99) {
            for e in EPSILONS {
                let p = b_panel(&cs, &s, uv, eps(e)).unwrap();
                let want = p.k_eps * p.frame.b_eps / e.sqrt();
                let got = p.recombined(eps(e));
                assert!((got - want).abs() <= RECOMBINE_REL_TOL * want.abs().max(1.0), "{name} {e}: {got} {want}");
                assert_eq!(p.k_sigma_e, p.b20);
            }
        }
    }
}

/// `Xa` and `X₂a` by central differences of `a` along the parameter directions.
fn k_sigma_e_by_differences(cs: &ContactStructure, s: &SurfacePatch, uv: [f64; 2]) -> f64 {
    let h = 1e-5;
    let f = adapted_frame(cs, s, uv, Epsilon::ONE).unwrap();
    let sj = SurfaceJets::new(cs, s, uv, 2, 1).unwrap();
    let along = |w: &[f64; 3]| {
        let d = sj.param_direction(w);
        let a = |t: f64| horizontal_parameter(cs, s, [uv[0] + t * d[0], uv[1] + t * d[1]]).unwrap();
        (a(h) - a(-h)) / (2.0 * h)
    };
    let (xa, x2a) = (along(&f.x), along(&f.x2));
    f.kx * x2a - xa * xa / (f.b0 * f.b0)
}

#[test]
fn k_sigma_e_from_differences() {
    for (name, cs, s) in cases() {
        for uv in samples(&cs, &s, 40, 14, 0.9) {
            let k = b_panel(&cs, &s, uv, Epsilon::ONE).unwrap().k_sigma_e;
            let fd = k_sigma_e_by_differences(&cs, &s, uv);
            assert!((k - fd).abs() <= 1e-8, "{name} {uv:?}: {k} {fd}");
        }
    }
}

#[test]
fn area_density_ratio() {
    for (name, cs, s) in cases() {
        for uv in samples(&cs, &s, 200, 15, 0.999) {
            for e in EPSILONS {
                let (sig, sig_e) = area_densities(&cs, &s, uv, eps(e)).unwrap();
                let f = adapted_frame(&cs, &s, uv, eps(e)).unwrap();
                let r = sig_e / sig - f.b_eps / e.sqrt();
                assert!(r.abs() <= AREA_TOL * (f.b_eps / e.sqrt()), "{name} {e}: {r:e}");
            }
        }
    }
}

#[test]
fn sectional_curvature_ignores_the_extension() {
    for (name, cs, s) in cases() {
        for uv in samples(&cs, &s, 10, 16, 0.95) {
            for e in EPSILONS {
                let e = eps(e);
                let panel = b_panel(&cs, &s, uv, e).unwrap();
                let p = s.immersion.point(uv);
                let lc = cs.at(p, 2).unwrap();
                let xc = lc.from_frame(&panel.frame.x);
                let yc = lc.from_frame(&panel.frame.x2_hat);
                let frozen = cs.curvature_reps(&ConstField(xc), &ConstField(yc), &ConstField(yc), p, e).unwrap();
                let bend = |base: [f64; 3], w: [f64; 3]| {
                    FnField(move |q: &[Jet3; 3]| {
                        let t = (q[0] - p.x) + (q[1] - p.y) * (q[2] - p.z) + (q[2] - p.z) * 0.5;
                        core::array::from_fn(|i| t * w[i] + base[i])
                    })
                };
                let (xb, yb) = (bend(xc, [0.3, -0.2, 0.7]), bend(yc, [-0.5, 0.1, 0.4]));
                let bent = cs.curvature_reps(&xb, &yb, &yb, p, e).unwrap();
                let s1 = cs.metric_eps(p, &frozen, &xc, e).unwrap();
                let s2 = cs.metric_eps(p, &bent, &xb.value_at(p), e).unwrap();
                assert!((s1 - s2).abs() <= EXTENSION_TOL, "{name}: {s1} {s2}");
                assert!((s1 - panel.sec_eps).abs() <= EXTENSION_TOL, "{name}: {s1} {}", panel.sec_eps);
            }
        }
    }
}

proptest! {
    #[test]
    fn parameter_stays_in_range(u in 0.01f64..3.13, v in 0.0f64..TAU) {
        let a = horizontal_parameter(&twisted(), &sphere(), [u, v]).unwrap();
        prop_assert!((-1.0..=1.0).contains(&a));
    }

    #[test]
    fn torus_panel_invariants(u in 0.0f64..TAU, v in 0.0f64..TAU, e in 0.05f64..1.0) {
        let (cs, s) = (twisted(), torus());
        prop_assume!(horizontal_parameter(&cs, &s, [u, v]).unwrap().abs() < 0.99);
        let p = b_panel(&cs, &s, [u, v], eps(e)).unwrap();
        let want = p.k_eps * p.frame.b_eps / e.sqrt();
        prop_assert!((p.recombined(eps(e)) - want).abs() <= RECOMBINE_REL_TOL * want.abs().max(1.0));
        prop_assert!((p.sff.ii12 - p.sff.ii12_alt).abs() <= II12_TOL);
        prop_assert!((p.area_eps / p.area - p.frame.b_eps / e.sqrt()).abs() <= AREA_TOL * p.frame.b_eps / e.sqrt());
    }
}
