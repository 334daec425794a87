//! Acceptance criteria 1 to 12. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use subriemann::config::{Ladder, Scenario, ScenarioFile, Suite};
use subriemann::report::{Report, Row};
use subriemann::run_scenario;

const GB_TOL: f64 = 1e-3;
const SLOPE_REL: f64 = 0.02;
const B1M1_TOL: f64 = 1e-3;
const GAUSS_REL_TOL: f64 = 1e-6;
const EXPANSION_TOL: f64 = 1e-6;
const II12_TOL: f64 = 1e-8;
const ORACLE_TOL: f64 = 1e-6;
const XA_TOL: f64 = 1e-6;
const RECOMBINE_TOL: f64 = 1e-6;
const I_CLOSED_TOL: f64 = 1e-8;
const I_LIMIT_TOL: f64 = 1e-2;
const RHS_REL: f64 = 0.02;
const CORNER_TOL: f64 = 1e-3;
const BOUNDARY_GB_TOL: f64 = 1e-3;
const TENSOR_TOL: f64 = 1e-7;

const MANIFOLDS: [&str; 2] = ["heisenberg", "heisenberg-twisted"];

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

struct Run {
    report: Report,
    elapsed: Duration,
}

/// Scenario runs shared between criteria.
#[derive(Default)]
struct Runs {
    done: BTreeMap<String, Run>,
}

impl Runs {
    fn get(&mut self, key: &str, file: impl FnOnce() -> ScenarioFile) -> Result<&Run, String> {
        if !self.done.contains_key(key) {
            let scenario = Scenario::resolve(file()).map_err(|e| format!("{key}: {e}"))?;
            let start = Instant::now();
            let report = run_scenario(&scenario).map_err(|e| format!("{key}: {e}"))?;
            self.done.insert(key.to_string(), Run { report, elapsed: start.elapsed() });
        }
        Ok(&self.done[key])
    }
}

fn scenario(suite: Suite, manifold: &str, surface: Option<&str>) -> ScenarioFile {
    ScenarioFile {
        suite: Some(suite),
        manifold: Some(manifold.into()),
        surface: surface.map(String::from),
        timing: true,
        ..ScenarioFile::default()
    }
}

/// Collected verdict of one criterion.
#[derive(Default)]
struct Verdict {
    failures: Vec<String>,
    notes: Vec<String>,
    elapsed: Duration,
}

impl Verdict {
    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }

    /// The named row exists, carries the pinned tolerance and passes.
    fn row(&mut self, run: &Run, quantity: &str, tolerance: f64) -> Option<Row> {
        let label = run.report.config.fixture_label();
        let Some(r) = run.report.rows.iter().find(|r| r.quantity == quantity) else {
            let failed: Vec<_> = run.report.rows.iter().filter_map(|r| r.note.clone().map(|n| format!("{}: {n}", r.quantity))).collect();
            self.fail(format!("{label}: no row `{quantity}` {failed:?}"));
            return None;
        };
        if r.tolerance != Some(tolerance) {
            self.fail(format!("{label}: `{quantity}` tolerance {:?}, pinned {tolerance:e}", r.tolerance));
        }
        if r.pass != Some(true) {
            let show = |x: Option<f64>| x.map_or("none".to_string(), |x| format!("{x:.6e}"));
            self.fail(format!(
                "{label}: {quantity} = {} (reference {}, abs_err {}, tolerance {tolerance:.6e})",
                r.value,
                show(r.reference),
                show(r.abs_err),
            ));
        }
        Some(r.clone())
    }

    fn within(&mut self, what: &str, elapsed: Duration, budget: Duration) {
        if elapsed > budget {
            self.fail(format!("{what} took {:.1} s, budget {} s", elapsed.as_secs_f64(), budget.as_secs()));
        }
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }
}

fn millis(r: &Row) -> Duration {
    Duration::from_millis(r.millis)
}

fn c1_riemannian_gauss_bonnet(runs: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    for (surface, chi) in [("sphere", 2.0), ("torus-rev", 0.0)] {
        let run = runs.get(&format!("gb/{surface}"), || scenario(Suite::GaussBonnet, "heisenberg", Some(surface)))?;
        for e in [1.0, 0.5, 0.25] {
            let q = format!("integral_K[eps={e}]");
            if let Some(r) = v.row(run, &q, GB_TOL * (1.0 + (2.0 * PI * chi).abs())) {
                v.within(&format!("{surface} {q}"), millis(&r), secs(60));
                v.note(format!("{surface} {q} = {:.9}", r.value));
            }
        }
    }
    Ok(())
}

fn c2_limit_slope(runs: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    let mut total = Duration::ZERO;
    for (surface, chi) in [("sphere", 2.0), ("torus-rev", 0.0)] {
        let run = runs.get(&format!("slope/{surface}"), || {
            let mut f = scenario(Suite::LimitSlope, "heisenberg", Some(surface));
            f.ladder = Ladder { c0: 0.2, halvings: 8 };
            f
        })?;
        if let Some(r) = v.row(run, "slope", SLOPE_REL * (2.0 * PI * chi).abs()) {
            total += millis(&r);
            v.note(format!("{surface} slope = {} (target {})", r.value, 2.0 * PI * chi));
        }
        if let Some(b) = run.report.rows.iter().find(|r| r.quantity == "slope_balanced") {
            v.note(format!("{surface} slope of the balanced integrand = {} (diagnostic)", b.value));
        }
    }
    v.within("slope fits", total, secs(300));
    Ok(())
}

fn c3_b1m1_identity(runs: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    for surface in ["sphere", "torus-rev"] {
        let run = runs.get(&format!("gb/{surface}"), || scenario(Suite::GaussBonnet, "heisenberg", Some(surface)))?;
        if let Some(r) = v.row(run, "integral_B1m1_over_b0", B1M1_TOL) {
            v.within(&format!("{surface} B_(1,-1) integral"), millis(&r), secs(120));
            v.note(format!("{surface} |integral B_(1,-1)/b0| = {:e}", r.value));
        }
    }
    Ok(())
}

fn curvature_run<'a>(runs: &'a mut Runs, manifold: &str) -> Result<&'a Run, String> {
    runs.get(&format!("curvature/{manifold}"), || {
        let mut f = scenario(Suite::Curvature, manifold, Some("sphere"));
        f.points = Some(500);
        f.grid = Some(64);
        f.epsilon = Some(vec![1.0, 0.5, 0.3, 0.1, 0.05]);
        f
    })
}

fn identities_run<'a>(runs: &'a mut Runs, manifold: &str) -> Result<&'a Run, String> {
    runs.get(&format!("identities/{manifold}"), || {
        let mut f = scenario(Suite::Identities, manifold, None);
        f.points = Some(200);
        f.epsilon = Some(vec![1.0, 0.3, 0.05]);
        f
    })
}

fn points_at_least(v: &mut Verdict, r: &Option<Row>, n: usize) {
    if let Some(r) = r {
        if r.nodes < n {
            v.fail(format!("{} used {} points, need {n}", r.quantity, r.nodes));
        }
    }
}

fn c4_gauss_vs_brioschi(runs: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    for m in MANIFOLDS {
        let run = curvature_run(runs, m)?;
        for e in [1.0, 0.5, 0.1] {
            let r = v.row(run, &format!("gauss_vs_brioschi_rel[eps={e}]"), GAUSS_REL_TOL);
            points_at_least(v, &r, 500);
        }
        v.within(&format!("{m} curvature suite"), run.elapsed, secs(60));
    }
    Ok(())
}

fn c5_expansions(runs: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    for m in MANIFOLDS {
        let run = identities_run(runs, m)?;
        for e in [1.0, 0.3, 0.05] {
            for k in 1..=4 {
                let r = v.row(run, &format!("expansion_{k}[eps={e}]"), EXPANSION_TOL);
                points_at_least(v, &r, 100);
            }
        }
        v.within(&format!("{m} identities suite"), run.elapsed, secs(60));
    }
    Ok(())
}

fn c6_second_fundamental_form(runs: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    for m in MANIFOLDS {
        let run = curvature_run(runs, m)?;
        for e in [1.0, 0.3, 0.05] {
            let r = v.row(run, &format!("II12_two_forms[eps={e}]"), II12_TOL);
            points_at_least(v, &r, 100);
            let r = v.row(run, &format!("II_closed_vs_oracle[eps={e}]"), ORACLE_TOL);
            points_at_least(v, &r, 100);
        }
    }
    Ok(())
}

fn c7_xa_identity(runs: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    for m in MANIFOLDS {
        let run = curvature_run(runs, m)?;
        if let Some(r) = v.row(run, "xa_identity[grid=64]", XA_TOL) {
            v.note(format!("{m}: {} grid points with |a| <= 0.95, max residual {:e}", r.nodes, r.value));
        }
    }
    Ok(())
}

fn c8_recombination(runs: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    for m in MANIFOLDS {
        let run = curvature_run(runs, m)?;
        for e in [1.0, 0.3, 0.05] {
            let r = v.row(run, &format!("recombination_rel[eps={e}]"), RECOMBINE_TOL);
            points_at_least(v, &r, 100);
        }
    }
    Ok(())
}

fn c9_vanishing_integrals(runs: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    let run = identities_run(runs, "heisenberg")?;
    let r = v.row(run, "I1_closed_vs_numeric", I_CLOSED_TOL);
    points_at_least(v, &r, 25);
    let r = v.row(run, "I2_closed_vs_numeric", I_CLOSED_TOL);
    points_at_least(v, &r, 25);
    v.row(run, "I1_limit[eps=0.000001]", I_LIMIT_TOL);
    v.row(run, "sqrt_eps_I2_limit[eps=0.000001]", I_LIMIT_TOL);
    Ok(())
}

fn c10_boundary(runs: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    let mut total = Duration::ZERO;
    for surface in ["hemisphere", "disk-z0", "wedge"] {
        let run = runs.get(&format!("boundary/{surface}"), || {
            let mut f = scenario(Suite::Boundary, "heisenberg", Some(surface));
            f.epsilon = Some(vec![1.0, 0.5]);
            if surface == "wedge" {
                f.ladder = Ladder { c0: 0.2, halvings: 12 };
            }
            f
        })?;
        total += run.elapsed;
        if let Some(r) = v.row(run, "rhs_total", RHS_REL * 2.0 * PI) {
            v.note(format!("{surface} rhs = {} (target 2pi)", r.value));
        }
        if let Some(b) = run.report.rows.iter().find(|r| r.quantity == "rhs_balanced_total") {
            v.note(format!("{surface} rhs with the balanced integrand = {} (diagnostic)", b.value));
        }
        for case in ["corner_both_in_E", "corner_one_in_E", "corner_neither_same_side", "corner_neither_opposite"] {
            v.row(run, &format!("{case}[eps=0.00000001]"), CORNER_TOL);
        }
        for r in run.report.rows.iter().filter(|r| r.quantity.starts_with("curve_corner_")).cloned().collect::<Vec<_>>() {
            v.row(run, &r.quantity, CORNER_TOL);
        }
        for e in [1.0, 0.5] {
            v.row(run, &format!("riemannian_gauss_bonnet[eps={e}]"), BOUNDARY_GB_TOL);
        }
    }
    v.within("boundary suites", total, secs(300));
    Ok(())
}

fn c11_tensor_identities(runs: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    let quantities: Vec<String> = [
        "dalpha(A,B)+1",
        "alpha(E)",
        "alpha(Z)-1",
        "dalpha(Z,.)",
        "J_definition",
        "J_squared",
        "J_tau_kill_Z",
        "tau_symmetric",
        "tau_trace",
        "tau_J_anticommute",
        "nabla_J",
        "lie_Z_J-2Jtau",
        "torsion_formula",
        "nabla_metric",
    ]
    .into_iter()
    .map(String::from)
    .chain([1.0, 0.3, 0.05].into_iter().flat_map(|e| {
        ["levi_civita_metric", "levi_civita_torsion", "koszul_vs_frame", "christoffel_vs_frame"].map(|q| format!("{q}[eps={e}]"))
    }))
    .collect();
    for m in MANIFOLDS {
        let run = identities_run(runs, m)?;
        for q in &quantities {
            let r = v.row(run, q, TENSOR_TOL);
            points_at_least(v, &r, 200);
        }
        v.within(&format!("{m} tensor identities"), run.elapsed, secs(10));
    }
    Ok(())
}

fn c12_determinism(_: &mut Runs, v: &mut Verdict) -> Result<(), String> {
    let files = [
        ScenarioFile { suite: Some(Suite::Identities), manifold: Some("heisenberg-twisted".into()), seed: 5, ..Default::default() },
        ScenarioFile { suite: Some(Suite::GaussBonnet), surface: Some("torus-rev".into()), epsilon: Some(vec![0.5]), ..Default::default() },
        ScenarioFile { suite: Some(Suite::GaussBonnet), surface: Some("wedge".into()), ..Default::default() },
    ];
    for f in files {
        let s = Scenario::resolve(f).map_err(|e| e.to_string())?;
        let mut out = Vec::new();
        for _ in 0..2 {
            let r = run_scenario(&s).map_err(|e| e.to_string())?;
            out.push((r.csv_string().map_err(|e| e.to_string())?, r.json_string()));
        }
        if out[0] != out[1] {
            v.fail(format!("{} {}: reports differ between runs", s.suite, s.fixture_label()));
        } else {
            v.note(format!("{} {}: {} CSV bytes identical", s.suite, s.fixture_label(), out[0].0.len()));
        }
    }
    Ok(())
}

type Criterion = fn(&mut Runs, &mut Verdict) -> Result<(), String>;

fn main() {
    let criteria: [(&str, Criterion); 12] = [
        ("Riemannian Gauss-Bonnet on sphere and torus", c1_riemannian_gauss_bonnet),
        ("slope of A(c) at zero equals 2 pi chi", c2_limit_slope),
        ("integral of B_(1,-1)/b0 vanishes", c3_b1m1_identity),
        ("Gauss equation against Brioschi", c4_gauss_vs_brioschi),
        ("curvature expansion identities", c5_expansions),
        ("second fundamental form closed forms and oracle", c6_second_fundamental_form),
        ("Xa identity on a sphere grid", c7_xa_identity),
        ("recombination of the B terms", c8_recombination),
        ("I1 and I2 closed forms and limits", c9_vanishing_integrals),
        ("Gauss-Bonnet with boundary", c10_boundary),
        ("tensor identities", c11_tensor_identities),
        ("deterministic reports", c12_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut runs = Runs::default();
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let n = k + 1;
        if !filter.is_empty() && !filter.iter().any(|x| x == &n.to_string()) {
            continue;
        }
        let start = Instant::now();
        let mut v = Verdict::default();
        if let Err(e) = f(&mut runs, &mut v) {
            v.fail(format!("setup: {e}"));
        }
        v.elapsed = start.elapsed();
        let status = if v.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {status}: {name} ({:.1} s)", v.elapsed.as_secs_f64());
        for msg in &v.failures {
            println!("    fail: {msg}");
        }
        for msg in &v.notes {
            println!("    note: {msg}");
        }
        if !v.failures.is_empty() {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
