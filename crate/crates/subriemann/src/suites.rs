//! Verification suites. Each suite turns a scenario into report rows.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use subriemann_core::boundary::{
    classify_boundary, corner_angle, corner_angle_limit, gb_boundary_rhs, riemannian_gauss_bonnet, star_experiment, BoundaryCurve,
    DEFAULT_SAMPLES,
};
use subriemann_core::identities::{curvature_expansion_residuals, form_residuals, levi_civita_residuals, tensor_residuals};
use subriemann_core::quadrature::{
    check_b1m1_identity, cumulative_profile, gauss_bonnet_integral, i1_i2, i1_i2_numeric, ladder, BandIntegrand, CumulativeProfile,
    Integrator, QuadratureConfig,
};
use subriemann_core::surface::{
    adapted_frame, b_panel, brioschi_curvature, gauss_curvature, horizontal_parameter, second_fundamental_form,
    second_fundamental_form_oracle, xa_identity_residual, SurfaceJets, SurfacePatch,
};
use subriemann_core::{ContactStructure, Epsilon};

use crate::config::{Scenario, Suite};
use crate::error::{Error, Result};
use crate::exec::Rayon;
use crate::fixture::{self, ManifoldFixture, SurfaceFixture};
use crate::parse::{parse, Scope};
use crate::report::{Report, Row};

type CoreResult<T> = subriemann_core::Result<T>;

pub const FORM_TOL: f64 = 1e-7;
pub const TENSOR_TOL: f64 = 1e-7;
pub const EXPANSION_TOL: f64 = 1e-6;
pub const I_CLOSED_TOL: f64 = 1e-8;
pub const I_LIMIT_TOL: f64 = 1e-2;
pub const I_LIMIT_EPS: f64 = 1e-6;
pub const GAUSS_REL_TOL: f64 = 1e-6;
pub const II12_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-6;
pub const RECOMBINE_REL_TOL: f64 = 1e-6;
pub const XA_TOL: f64 = 1e-6;
pub const CURVATURE_A_MAX: f64 = 0.9;
pub const XA_A_MAX: f64 = 0.95;
pub const GB_TOL: f64 = 1e-3;
pub const B1M1_TOL: f64 = 1e-3;
pub const SLOPE_REL_TOL: f64 = 0.02;
pub const RHS_REL_TOL: f64 = 0.02;
pub const CORNER_TOL: f64 = 1e-3;
pub const CORNER_EPS: f64 = 1e-8;
pub const BOUNDARY_GB_TOL: f64 = 1e-3;

/// Tolerance of a closed-surface Gauss–Bonnet row.
pub fn gb_tolerance(chi: f64) -> f64 {
    GB_TOL * (1.0 + (2.0 * PI * chi).abs())
}

/// Tolerance of a limit row with target `2πχ`; a zero target must be hit
/// exactly.
pub fn limit_tolerance(chi: f64, rel: f64) -> f64 {
    rel * (2.0 * PI * chi).abs()
}

fn eps(v: f64) -> Epsilon {
    Epsilon::new(v).expect("scenario epsilons are validated")
}

fn tag(name: &str, e: f64) -> String {
    format!("{name}[eps={e}]")
}

/// Fixtures and numerics of one scenario.
pub struct Context<'a> {
    pub scenario: &'a Scenario,
    pub manifold: ManifoldFixture,
    pub cs: ContactStructure,
    pub surface: Option<(SurfaceFixture, SurfacePatch)>,
    pub integrator: Integrator<'static>,
}

impl<'a> Context<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self> {
        let manifold = fixture::manifold(&scenario.manifold)?;
        let cs = manifold.build(scenario.seed).map_err(|e| Error::fixture(&manifold.name, e.to_string()))?;
        let surface = match &scenario.surface {
            Some(name) => {
                let s = fixture::surface(name)?;
                let p = s.patch()?;
                Some((s, p))
            }
            None => None,
        };
        let integrator = Integrator::new(QuadratureConfig::from(scenario.quadrature), &Rayon);
        Ok(Context { scenario, manifold, cs, surface, integrator })
    }

    fn surface(&self) -> Result<(&SurfaceFixture, &SurfacePatch)> {
        self.surface.as_ref().map(|(s, p)| (s, p)).ok_or_else(|| Error::Config(format!("suite {} needs a surface", self.scenario.suite)))
    }

    fn curve(&self) -> Result<BoundaryCurve> {
        let (s, p) = self.surface()?;
        s.boundary(&self.cs, p)
    }

    fn ladder(&self) -> Vec<f64> {
        ladder(self.scenario.ladder.c0, self.scenario.ladder.halvings)
    }

    pub fn profile(&self, integrand: BandIntegrand) -> Result<CumulativeProfile> {
        let (_, p) = self.surface()?;
        Ok(cumulative_profile(&self.cs, p, &self.ladder(), integrand, false, &self.integrator)?)
    }
}

/// Rows of one suite, timed per group when requested.
struct Rows {
    rows: Vec<Row>,
    timing: bool,
}

impl Rows {
    fn group(&mut self, label: &str, f: impl FnOnce() -> Result<Vec<Row>>) {
        let start = Instant::now();
        let out = f();
        let millis = if self.timing { start.elapsed().as_millis() as u64 } else { 0 };
        match out {
            Ok(rows) => self.rows.extend(rows.into_iter().map(|mut r| {
                r.millis = millis;
                r
            })),
            Err(e) => {
                let mut r = Row::failed(label, e.to_string());
                r.millis = millis;
                self.rows.push(r);
            }
        }
    }
}

/// Runs a validated scenario. Fixture and setup problems are errors; numeric
/// failures inside a suite become failed rows.
pub fn run_scenario(scenario: &Scenario) -> Result<Report> {
    let ctx = Context::new(scenario)?;
    let mut rows = Rows { rows: Vec::new(), timing: scenario.timing };
    match scenario.suite {
        Suite::Identities => identities(&ctx, &mut rows),
        Suite::Curvature => curvature(&ctx, &mut rows)?,
        Suite::GaussBonnet => gauss_bonnet(&ctx, &mut rows)?,
        Suite::LimitSlope => limit_slope(&ctx, &mut rows)?,
        Suite::Boundary => boundary(&ctx, &mut rows)?,
        Suite::StarExperiment => star(&ctx, &mut rows)?,
    }
    let label = scenario.fixture_label();
    for r in &mut rows.rows {
        r.suite = scenario.suite.name().to_string();
        r.fixture = label.clone();
    }
    Ok(Report::new(scenario.clone(), rows.rows))
}

/// `(c, A(c))` along the ladder, `c` decreasing.
pub fn emit_profile(scenario: &Scenario) -> Result<Vec<(f64, f64)>> {
    let ctx = Context::new(scenario)?;
    let p = ctx.profile(BandIntegrand::KSigmaE)?;
    let mut out: Vec<(f64, f64)> = p.c.into_iter().zip(p.a).collect();
    out.sort_by(|x, y| y.0.total_cmp(&x.0));
    Ok(out)
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    // NaN propagates so that a broken evaluation cannot pass
    values.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

fn identities(ctx: &Context, rows: &mut Rows) {
    let s = ctx.scenario;
    let points = match ctx.manifold.probe_points(s.points, s.seed) {
        Ok(p) => p,
        Err(e) => {
            rows.rows.push(Row::failed("probe_points", e.to_string()));
            return;
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x9e37_79b9_7f4a_7c15);
    let angles: Vec<f64> = points.iter().map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    let n = points.len();
    rows.group("forms", || {
        let r: Vec<_> = points.par_iter().map(|p| Ok(form_residuals(&ctx.cs.at(*p, 4)?))).collect::<CoreResult<_>>()?;
        Ok(vec![
            Row::residual("dalpha(A,B)+1", max_of(r.iter().map(|r| r.dalpha_ab)), FORM_TOL).with_nodes(n),
            Row::residual("alpha(E)", max_of(r.iter().map(|r| r.alpha_e)), FORM_TOL).with_nodes(n),
            Row::residual("alpha(Z)-1", max_of(r.iter().map(|r| r.alpha_z)), FORM_TOL).with_nodes(n),
            Row::residual("dalpha(Z,.)", max_of(r.iter().map(|r| r.dalpha_z)), FORM_TOL).with_nodes(n),
        ])
    });
    rows.group("tensors", || {
        let r: Vec<_> = points.par_iter().map(|p| Ok(tensor_residuals(&ctx.cs.at(*p, 4)?))).collect::<CoreResult<_>>()?;
        let row = |name: &str, f: fn(&subriemann_core::identities::TensorResiduals) -> f64| {
            Row::residual(name, max_of(r.iter().map(f)), TENSOR_TOL).with_nodes(n)
        };
        Ok(vec![
            row("J_definition", |r| r.j_definition),
            row("J_squared", |r| r.j_squared),
            row("J_tau_kill_Z", |r| r.kills_z),
            row("tau_symmetric", |r| r.tau_symmetric),
            row("tau_trace", |r| r.tau_trace),
            row("tau_J_anticommute", |r| r.tau_anticommutes),
            row("nabla_J", |r| r.nabla_j),
            row("lie_Z_J-2Jtau", |r| r.lie_j),
            row("torsion_formula", |r| r.torsion_formula),
            row("nabla_metric", |r| r.nabla_metric),
        ])
    });
    for &e in &s.epsilon {
        rows.group(&tag("levi_civita", e), || {
            let r: Vec<_> = points.par_iter().map(|p| levi_civita_residuals(&ctx.cs.at(*p, 4)?, eps(e))).collect::<CoreResult<_>>()?;
            Ok(vec![
                Row::residual(tag("levi_civita_metric", e), max_of(r.iter().map(|r| r.metric)), TENSOR_TOL).with_nodes(n),
                Row::residual(tag("levi_civita_torsion", e), max_of(r.iter().map(|r| r.torsion)), TENSOR_TOL).with_nodes(n),
                Row::residual(tag("koszul_vs_frame", e), max_of(r.iter().map(|r| r.koszul_frame)), TENSOR_TOL).with_nodes(n),
                Row::residual(tag("christoffel_vs_frame", e), max_of(r.iter().map(|r| r.christoffel)), TENSOR_TOL).with_nodes(n),
            ])
        });
    }
    for &e in &s.epsilon {
        rows.group(&tag("curvature_expansion", e), || {
            let r: Vec<[f64; 4]> = points
                .par_iter()
                .zip(&angles)
                .map(|(p, t)| Ok(curvature_expansion_residuals(&ctx.cs.at(*p, 4)?, &[t.cos(), t.sin()], eps(e))))
                .collect::<CoreResult<_>>()?;
            Ok((0..4)
                .map(|k| {
                    Row::residual(format!("expansion_{}[eps={e}]", k + 1), max_of(r.iter().map(|r| r[k])), EXPANSION_TOL).with_nodes(n)
                })
                .collect())
        });
    }
    rows.group("vanishing_integrals", || Ok(vanishing_integrals()?));
}

/// Closed forms of `I₁`, `I₂` against quadrature, and their `ε → 0` limits.
pub fn vanishing_integrals() -> CoreResult<Vec<Row>> {
    let (mut d1, mut d2) = (0.0f64, 0.0f64);
    let mut count = 0;
    for e in [0.9, 0.5, 0.1, 1e-2, 1e-3] {
        for rho in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let (c1, c2) = i1_i2(e, rho)?;
            let (n1, n2) = i1_i2_numeric(e, rho)?;
            d1 = max_of([d1, (c1 - n1).abs()]);
            d2 = max_of([d2, (c2 - n2).abs()]);
            count += 1;
        }
    }
    let (mut l1, mut l2) = (0.0f64, 0.0f64);
    for rho in [0.25, 0.5, 0.75, 1.0] {
        let (i1, i2) = i1_i2(I_LIMIT_EPS, rho)?;
        l1 = max_of([l1, (i1 - (PI / 2.0 - rho.acos())).abs()]);
        l2 = max_of([l2, (I_LIMIT_EPS.sqrt() * i2 - 1.0).abs()]);
    }
    Ok(vec![
        Row::residual("I1_closed_vs_numeric", d1, I_CLOSED_TOL).with_nodes(count),
        Row::residual("I2_closed_vs_numeric", d2, I_CLOSED_TOL).with_nodes(count),
        Row::residual(format!("I1_limit[eps={I_LIMIT_EPS}]"), l1, I_LIMIT_TOL).with_nodes(4),
        Row::residual(format!("sqrt_eps_I2_limit[eps={I_LIMIT_EPS}]"), l2, I_LIMIT_TOL).with_nodes(4),
    ])
}

/// Seeded interior parameter points with `|a| ≤ a_max`.
pub fn surface_samples(cs: &ContactStructure, patch: &SurfacePatch, n: usize, seed: u64, a_max: f64) -> Vec<[f64; 2]> {
    let [[u0, u1], [v0, v1]] = patch.domain;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n && tries < 1000 * n.max(1) {
        tries += 1;
        let uv = [u0 + (u1 - u0) * rng.random_range(0.02..0.98), v0 + (v1 - v0) * rng.random_range(0.02..0.98)];
        if horizontal_parameter(cs, patch, uv).is_ok_and(|a| a.abs() <= a_max) {
            out.push(uv);
        }
    }
    out
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn curvature(ctx: &Context, rows: &mut Rows) -> Result<()> {
    let s = ctx.scenario;
    let (_, patch) = ctx.surface()?;
    let cs = &ctx.cs;
    let uv = surface_samples(cs, patch, s.points, s.seed, CURVATURE_A_MAX);
    if uv.len() < s.points {
        rows.rows.push(Row::failed("samples", format!("only {} of {} points with |a| <= {CURVATURE_A_MAX}", uv.len(), s.points)));
    }
    let n = uv.len();
    for &e in &s.epsilon {
        let ep = eps(e);
        rows.group(&tag("gauss_vs_brioschi_rel", e), || {
            let r: Vec<f64> = uv
                .par_iter()
                .map(|p| Ok(rel(gauss_curvature(cs, patch, *p, ep)?, brioschi_curvature(cs, patch, *p, ep)?)))
                .collect::<CoreResult<_>>()?;
            Ok(vec![Row::residual(tag("gauss_vs_brioschi_rel", e), max_of(r), GAUSS_REL_TOL).with_nodes(n)])
        });
        rows.group(&tag("second_fundamental_form", e), || {
            let r: Vec<(f64, f64)> = uv
                .par_iter()
                .map(|p| {
                    let ii = second_fundamental_form(cs, patch, *p, ep)?;
                    let o = second_fundamental_form_oracle(cs, patch, *p, ep)?;
                    let closed = [[ii.ii11, ii.ii12], [ii.ii12, ii.ii22]];
                    let d = max_of((0..4).map(|k| (o[k / 2][k % 2] - closed[k / 2][k % 2]).abs()));
                    Ok(((ii.ii12 - ii.ii12_alt).abs(), d))
                })
                .collect::<CoreResult<_>>()?;
            Ok(vec![
                Row::residual(tag("II12_two_forms", e), max_of(r.iter().map(|x| x.0)), II12_TOL).with_nodes(n),
                Row::residual(tag("II_closed_vs_oracle", e), max_of(r.iter().map(|x| x.1)), ORACLE_TOL).with_nodes(n),
            ])
        });
        rows.group(&tag("recombination_rel", e), || {
            let r: Vec<f64> = uv
                .par_iter()
                .map(|p| {
                    let b = b_panel(cs, patch, *p, ep)?;
                    Ok(rel(b.recombined(ep), b.k_eps * b.frame.b_eps / e.sqrt()))
                })
                .collect::<CoreResult<_>>()?;
            Ok(vec![Row::residual(tag("recombination_rel", e), max_of(r), RECOMBINE_REL_TOL).with_nodes(n)])
        });
    }
    rows.group("xa_identity", || {
        let m = s.grid;
        let [[u0, u1], [v0, v1]] = patch.domain;
        let grid: Vec<[f64; 2]> = (0..m * m)
            .map(|k| {
                let (i, j) = (k / m, k % m);
                [u0 + (u1 - u0) * (i as f64 + 0.5) / m as f64, v0 + (v1 - v0) * (j as f64 + 0.5) / m as f64]
            })
            .collect();
        let r: Vec<Option<f64>> = grid
            .par_iter()
            .map(|p| match horizontal_parameter(cs, patch, *p) {
                Ok(a) if a.abs() <= XA_A_MAX => xa_identity_residual(cs, patch, *p).map(Some),
                _ => Ok(None),
            })
            .collect::<CoreResult<_>>()?;
        let used = r.iter().flatten().count();
        Ok(vec![Row::residual(format!("xa_identity[grid={m}]"), max_of(r.into_iter().flatten()), XA_TOL).with_nodes(used)])
    });
    Ok(())
}

fn gauss_bonnet(ctx: &Context, rows: &mut Rows) -> Result<()> {
    let (sf, patch) = ctx.surface()?;
    let chi = sf.chi();
    let target = 2.0 * PI * chi;
    if sf.has_boundary() {
        let curve = ctx.curve()?;
        riemannian_boundary_rows(ctx, rows, patch, &curve, chi);
        return Ok(());
    }
    for &e in &ctx.scenario.epsilon {
        rows.group(&tag("integral_K", e), || {
            let i = gauss_bonnet_integral(&ctx.cs, patch, eps(e), &ctx.integrator)?;
            Ok(vec![Row::check(tag("integral_K", e), i.value, target, gb_tolerance(chi)).with_nodes(i.nodes)])
        });
    }
    rows.group("integral_B1m1_over_b0", || {
        let i = check_b1m1_identity(&ctx.cs, patch, &ctx.integrator)?;
        Ok(vec![Row::residual("integral_B1m1_over_b0", i.value.abs(), B1M1_TOL).with_nodes(i.nodes)])
    });
    Ok(())
}

fn riemannian_boundary_rows(ctx: &Context, rows: &mut Rows, patch: &SurfacePatch, curve: &BoundaryCurve, chi: f64) {
    for &e in &ctx.scenario.epsilon {
        rows.group(&tag("riemannian_gauss_bonnet", e), || {
            let g = riemannian_gauss_bonnet(&ctx.cs, patch, curve, eps(e), &ctx.integrator)?;
            Ok(vec![
                Row::check(tag("riemannian_gauss_bonnet", e), g.total, 2.0 * PI * chi, BOUNDARY_GB_TOL),
                Row::info(tag("integral_K", e), g.surface),
                Row::info(tag("boundary_k_g", e), g.boundary),
                Row::info(tag("corner_angles", e), g.corners),
            ])
        });
    }
}

fn slope_rows(ctx: &Context, rows: &mut Rows, name: &str, integrand: BandIntegrand, target: Option<(f64, f64)>) {
    rows.group(name, || {
        let p = ctx.profile(integrand)?;
        let fit = p.slope_at_zero()?;
        let row = match target {
            Some((reference, tol)) => Row::check(name, fit.slope, reference, tol),
            None => Row::info(name, fit.slope),
        };
        Ok(vec![
            row.with_nodes(p.nodes),
            Row::info(format!("{name}_fit_residual"), fit.residual),
            Row::info(format!("{name}_window_c_max"), p.c[fit.window.0]),
            Row::info(format!("{name}_window_c_min"), p.c[fit.window.1 - 1]),
        ])
    });
}

fn limit_slope(ctx: &Context, rows: &mut Rows) -> Result<()> {
    let (sf, _) = ctx.surface()?;
    let chi = sf.chi();
    let target = (!sf.has_boundary()).then(|| (2.0 * PI * chi, limit_tolerance(chi, SLOPE_REL_TOL)));
    slope_rows(ctx, rows, "slope", BandIntegrand::KSigmaE, target);
    // the balanced integrand keeps the B_{1,-1} mass; reported for comparison
    slope_rows(ctx, rows, "slope_balanced", BandIntegrand::Balanced, None);
    if let Some(r) = rows.rows.iter_mut().find(|r| r.quantity == "slope_balanced") {
        *r = r.clone().with_reference(2.0 * PI * chi);
    }
    Ok(())
}

fn boundary(ctx: &Context, rows: &mut Rows) -> Result<()> {
    let (sf, patch) = ctx.surface()?;
    let chi = sf.chi();
    let target = 2.0 * PI * chi;
    let curve = ctx.curve()?;
    let cs = &ctx.cs;
    rows.group("classification", || {
        let c = classify_boundary(cs, patch, &curve, DEFAULT_SAMPLES)?;
        Ok(vec![
            Row::info("corners", c.corners.len() as f64),
            Row::info("w_plus", c.w_plus.len() as f64),
            Row::info("w_minus", c.w_minus.len() as f64),
            Row::info("leaf_runs", c.leaf_runs.len() as f64),
            Row::info("star_violations", c.violations.len() as f64),
        ])
    });
    for (name, integrand) in [("rhs", BandIntegrand::KSigmaE), ("rhs_balanced", BandIntegrand::Balanced)] {
        rows.group(name, || {
            let p = ctx.profile(integrand)?;
            let r = gb_boundary_rhs(cs, patch, &curve, &p)?;
            if integrand == BandIntegrand::Balanced {
                return Ok(vec![Row::info("rhs_balanced_total", r.total).with_reference(target).with_nodes(p.nodes)]);
            }
            Ok(vec![
                Row::check("rhs_total", r.total, target, limit_tolerance(chi, RHS_REL_TOL)).with_nodes(p.nodes),
                Row::info("rhs_slope", r.slope.slope),
                Row::info("rhs_s0", r.s0),
                Row::info("rhs_s1", r.s1),
                Row::info("rhs_s2", r.s2),
                Row::info("rhs_w_signs", r.w_signs),
                Row::info("rhs_w_curvature", r.w_curvature),
                Row::info("rhs_total_vanishing_leaf", r.total_vanishing_leaf),
            ])
        });
    }
    rows.group("corner_angle_table", || Ok(corner_table(cs, patch, &curve)?));
    riemannian_boundary_rows(ctx, rows, patch, &curve, chi);
    Ok(())
}

/// `|β^ε|` at a tiny `ε` against the limit table: tangents both in `E`, one
/// in `E`, neither (same side and opposite sides), plus every corner of the
/// boundary curve.
pub fn corner_table(cs: &ContactStructure, patch: &SurfacePatch, curve: &BoundaryCurve) -> CoreResult<Vec<Row>> {
    let tiny = Epsilon::new(CORNER_EPS)?;
    let [[u0, u1], [v0, v1]] = patch.domain;
    let uv = [u0 + 0.6 * (u1 - u0), v0 + 0.6 * (v1 - v0)];
    let f = adapted_frame(cs, patch, uv, Epsilon::ONE)?;
    let sj = SurfaceJets::new(cs, patch, uv, 2, 1)?;
    let x = sj.param_direction(&f.x);
    let x2 = sj.param_direction(&f.x2);
    let comb = |s: f64, t: f64| [s * x[0] + t * x2[0], s * x[1] + t * x2[1]];
    let cases = [
        ("corner_both_in_E", x, comb(-1.0, 0.0)),
        ("corner_one_in_E", x, comb(0.3, 1.0)),
        ("corner_neither_same_side", comb(0.3, 1.0), comb(-0.5, 1.0)),
        ("corner_neither_opposite", comb(0.3, 1.0), comb(0.5, -1.0)),
    ];
    let mut rows = Vec::new();
    for (name, v, w) in cases {
        let got = corner_angle(cs, patch, uv, v, w, tiny)?.abs();
        let want = corner_angle_limit(cs, patch, uv, v, w)?;
        rows.push(Row::check(format!("{name}[eps={CORNER_EPS}]"), got, want, CORNER_TOL));
    }
    let n = curve.pieces.len();
    for &j in &curve.corners {
        let (prev, next) = (&curve.pieces[(j + n - 1) % n], &curve.pieces[j]);
        let at = next.uv(next.range[0]);
        let (v, w) = (prev.velocity(prev.range[1]), next.velocity(next.range[0]));
        let got = corner_angle(cs, patch, at, v, w, tiny)?.abs();
        let want = corner_angle_limit(cs, patch, at, v, w)?;
        rows.push(Row::check(format!("curve_corner_{j}[eps={CORNER_EPS}]"), got, want, CORNER_TOL));
    }
    Ok(rows)
}

fn star(ctx: &Context, rows: &mut Rows) -> Result<()> {
    let st = &ctx.scenario.star;
    let scope = Scope::new(&["t"]);
    let psi = parse(&st.psi, &scope)?;
    let weight = parse(&st.weight, &scope)?;
    rows.group("star_integral", || {
        Ok(star_experiment(&psi, &weight, st.range, &ctx.scenario.epsilon)?
            .into_iter()
            .map(|(e, v)| Row::info(tag("star_integral", e), v))
            .collect())
    });
    Ok(())
}
