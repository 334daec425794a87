//! Adaptive cubature on parameter rectangles.
//!
//! Cells carry a tensor Gauss–Legendre pair of orders `n` and `n + 1`; the
//! higher one is the estimate and their difference the error. Refinement runs
//! in rounds so that a whole batch of cells can be handed to an [`Executor`],
//! and partial sums are always accumulated in cell order, which keeps results
//! bit-reproducible whatever the executor does.
//!
//! Integrals over `{g > 0}` use cut cells: along lines in the direction of
//! steepest change of `g` the crossing points are located by root finding and
//! only the inside segments are integrated.

use alloc::vec;
use alloc::vec::Vec;

use crate::contact::{ContactStructure, Epsilon};
use crate::error::{Error, Result};
use crate::math::{abs, asin, ceil, cos, log2, powf, sqrt, PI};
use crate::surface::{gauss_density, surface_sample, Cap, SurfacePatch};

pub const RTOL: f64 = 1e-6;
pub const MAX_DEPTH: u32 = 12;
/// Shortest ladder window accepted by the slope fit.
pub const MIN_WINDOW: usize = 5;

/// Gauss–Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss–Legendre needs at least two nodes");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if abs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * d * d);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node `i` and its weight mapped to `[lo, hi]`.
    pub fn mapped(&self, i: usize, lo: f64, hi: f64) -> (f64, f64) {
        let h = 0.5 * (hi - lo);
        (lo + h * (1.0 + self.nodes[i]), h * self.weights[i])
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let mut s = 0.0;
        for i in 0..self.len() {
            let (x, w) = self.mapped(i, lo, hi);
            s += w * f(x);
        }
        s
    }
}

/// Subdivision budget of [`integrate_1d`].
pub const MAX_SPLITS_1D: usize = 20_000;

/// Adaptive integral of a smooth function over `[lo, hi]` to absolute
/// tolerance `tol`.
pub fn integrate_1d<F: FnMut(f64) -> f64>(lo: f64, hi: f64, tol: f64, mut f: F) -> Result<f64> {
    let rule = GaussLegendre::new(10);
    let mut stack = vec![(lo, hi, rule.integrate(lo, hi, &mut f), 0u32)];
    let (mut total, mut err) = (0.0, 0.0);
    let len = hi - lo;
    let mut splits = 0usize;
    while let Some((a, b, whole, depth)) = stack.pop() {
        splits += 1;
        if splits > MAX_SPLITS_1D {
            let pending: f64 = stack.iter().map(|s| s.2).sum();
            return Err(Error::NonConvergent { estimate: total + whole + pending, error: f64::INFINITY });
        }
        let m = 0.5 * (a + b);
        let left = rule.integrate(a, m, &mut f);
        let right = rule.integrate(m, b, &mut f);
        let diff = abs(left + right - whole);
        if !diff.is_finite() {
            return Err(Error::NonConvergent { estimate: left + right, error: diff });
        }
        let floor = 64.0 * f64::EPSILON * (abs(left) + abs(right));
        if diff <= tol * (b - a) / len || diff <= floor || depth >= 40 {
            total += left + right;
            err += diff;
        } else {
            stack.push((m, b, right, depth + 1));
            stack.push((a, m, left, depth + 1));
        }
    }
    if !total.is_finite() || err > 100.0 * tol {
        return Err(Error::NonConvergent { estimate: total, error: err });
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Rect {
    pub fn area(&self) -> f64 {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])
    }

    pub fn center(&self) -> [f64; 2] {
        [0.5 * (self.lo[0] + self.hi[0]), 0.5 * (self.lo[1] + self.hi[1])]
    }

    /// Four children partitioning the cell exactly.
    pub fn split(&self) -> [Rect; 4] {
        let m = self.center();
        [
            Rect { lo: self.lo, hi: m },
            Rect { lo: [m[0], self.lo[1]], hi: [self.hi[0], m[1]] },
            Rect { lo: [self.lo[0], m[1]], hi: [m[0], self.hi[1]] },
            Rect { lo: m, hi: self.hi },
        ]
    }

    fn inside(&self, cap: &Cap) -> bool {
        let c = self.center();
        (0..2).all(|k| abs(c[k] - cap.center[k]) < cap.half_width[k])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Lower Gauss–Legendre order of the embedded pair.
    pub order: usize,
    /// Base cells per unit of domain length along each axis; at least one
    /// per breakpoint interval.
    pub base_cells: usize,
    pub max_depth: u32,
    pub rtol: f64,
    /// Multiplier on the declared cap half-widths.
    pub cap_scale: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { order: 4, base_cells: 8, max_depth: MAX_DEPTH, rtol: RTOL, cap_scale: 1.0 }
    }
}

/// Outcome of one cell rule.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellEstimate {
    pub value: f64,
    pub error: f64,
    /// Integral of `|f|` over the cell, the scale for relative tolerances.
    pub abs: f64,
    pub nodes: usize,
}

/// Runs independent cell evaluations. Results must come back in task order.
pub trait Executor: Sync {
    fn map(&self, tasks: usize, f: &(dyn Fn(usize) -> Result<CellEstimate> + Sync)) -> Vec<Result<CellEstimate>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map(&self, tasks: usize, f: &(dyn Fn(usize) -> Result<CellEstimate> + Sync)) -> Vec<Result<CellEstimate>> {
        (0..tasks).map(f).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub rect: Rect,
    pub depth: u32,
    pub estimate: CellEstimate,
}

/// Cell partition of one patch domain with the caps removed.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub cells: Vec<Cell>,
}

fn breakpoints(lo: f64, hi: f64, cuts: &[f64], per_unit: usize) -> Vec<f64> {
    let mut b: Vec<f64> = cuts.iter().copied().filter(|&x| x > lo && x < hi).collect();
    b.push(lo);
    b.push(hi);
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.dedup_by(|x, y| abs(*x - *y) <= 1e-14 * (hi - lo));
    let mut out = vec![b[0]];
    for w in b.windows(2) {
        let n = ceil((w[1] - w[0]) * per_unit as f64).max(1.0) as usize;
        for k in 1..=n {
            out.push(if k == n { w[1] } else { w[0] + (w[1] - w[0]) * k as f64 / n as f64 });
        }
    }
    out
}

impl QuadratureGrid {
    /// Base cells of `domain`, with cap edges as grid lines and cells inside
    /// any cap dropped. A cap spanning a whole axis keeps spanning it when
    /// scaled.
    pub fn base(domain: [[f64; 2]; 2], caps: &[Cap], scale: f64, per_unit: usize) -> Self {
        let caps: Vec<Cap> = caps.iter().map(|c| scale_cap(c, domain, scale)).collect();
        let axes: [Vec<f64>; 2] = core::array::from_fn(|k| {
            let mut cuts = Vec::new();
            for c in &caps {
                cuts.push(c.center[k] - c.half_width[k]);
                cuts.push(c.center[k] + c.half_width[k]);
            }
            breakpoints(domain[k][0], domain[k][1], &cuts, per_unit)
        });
        let mut cells = Vec::new();
        for j in 0..axes[1].len() - 1 {
            for i in 0..axes[0].len() - 1 {
                let rect = Rect { lo: [axes[0][i], axes[1][j]], hi: [axes[0][i + 1], axes[1][j + 1]] };
                if !caps.iter().any(|c| rect.inside(c)) {
                    cells.push(Cell { rect, depth: 0, estimate: CellEstimate::default() });
                }
            }
        }
        QuadratureGrid { cells }
    }
}

fn scale_cap(c: &Cap, domain: [[f64; 2]; 2], scale: f64) -> Cap {
    let mut out = *c;
    for k in 0..2 {
        let full = c.center[k] - c.half_width[k] <= domain[k][0] && c.center[k] + c.half_width[k] >= domain[k][1];
        if !full {
            out.half_width[k] *= scale;
        }
    }
    out
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub nodes: usize,
    pub cells: usize,
}

struct Rules {
    low: GaussLegendre,
    high: GaussLegendre,
}

impl Rules {
    fn new(order: usize) -> Self {
        Rules { low: GaussLegendre::new(order), high: GaussLegendre::new(order + 1) }
    }
}

fn tensor<F: Fn([f64; 2]) -> Result<f64>>(f: &F, r: &Rect, rule: &GaussLegendre) -> Result<(f64, f64)> {
    let (mut s, mut a) = (0.0, 0.0);
    for j in 0..rule.len() {
        let (y, wy) = rule.mapped(j, r.lo[1], r.hi[1]);
        for i in 0..rule.len() {
            let (x, wx) = rule.mapped(i, r.lo[0], r.hi[0]);
            let v = f([x, y])?;
            s += wx * wy * v;
            a += wx * wy * abs(v);
        }
    }
    Ok((s, a))
}

fn plain_cell<F: Fn([f64; 2]) -> Result<f64>>(f: &F, r: &Rect, rules: &Rules) -> Result<CellEstimate> {
    let (lo, _) = tensor(f, r, &rules.low)?;
    let (hi, abs_hi) = tensor(f, r, &rules.high)?;
    let n = rules.low.len();
    Ok(CellEstimate { value: hi, error: abs(hi - lo), abs: abs_hi, nodes: n * n + (n + 1) * (n + 1) })
}

fn at(axis: usize, s: f64, t: f64) -> [f64; 2] {
    if axis == 0 {
        [s, t]
    } else {
        [t, s]
    }
}

/// Root of `g` between `(x0, g0)` and `(x1, g1)` of opposite signs
/// (Illinois variant of regula falsi).
pub(crate) fn crossing<G: FnMut(f64) -> Result<f64>>(mut x0: f64, mut g0: f64, mut x1: f64, mut g1: f64, mut g: G) -> Result<f64> {
    let tol = 1e-14 * (abs(x0) + abs(x1)) + 1e-300;
    let mut side = 0;
    for _ in 0..200 {
        let x = (x0 * g1 - x1 * g0) / (g1 - g0);
        if abs(x1 - x0) <= tol {
            return Ok(x);
        }
        let gx = g(x)?;
        if gx == 0.0 {
            return Ok(x);
        }
        if (gx > 0.0) == (g1 > 0.0) {
            x1 = x;
            g1 = gx;
            if side == -1 {
                g0 *= 0.5;
            }
            side = -1;
        } else {
            x0 = x;
            g0 = gx;
            if side == 1 {
                g1 *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (x0 + x1))
}

/// Integral of `f` over `{g > 0}` on the segment `[lo, hi]` of a line.
fn cut_line<FG: Fn([f64; 2]) -> Result<(f64, f64)>>(
    fg: &FG,
    axis: usize,
    t: f64,
    lo: f64,
    hi: f64,
    rule: &GaussLegendre,
) -> Result<(f64, f64, usize)> {
    let n = rule.len();
    let mut xs = Vec::with_capacity(n + 2);
    xs.push(lo);
    for i in 0..n {
        xs.push(rule.mapped(i, lo, hi).0);
    }
    xs.push(hi);
    let mut samples = Vec::with_capacity(n + 2);
    for &x in &xs {
        samples.push(fg(at(axis, x, t))?);
    }
    let mut nodes = n + 2;
    let inside = |g: f64| g > 0.0;
    if samples.iter().all(|s| inside(s.0)) {
        let (mut v, mut a) = (0.0, 0.0);
        for i in 0..n {
            let w = rule.mapped(i, lo, hi).1;
            v += w * samples[i + 1].1;
            a += w * abs(samples[i + 1].1);
        }
        return Ok((v, a, nodes));
    }
    if samples.iter().all(|s| !inside(s.0)) {
        return Ok((0.0, 0.0, nodes));
    }
    // Segments between crossings, each tagged by the side of a sample in it.
    let mut segments = Vec::new();
    let mut start = lo;
    for k in 0..xs.len() - 1 {
        let (g0, g1) = (samples[k].0, samples[k + 1].0);
        if inside(g0) != inside(g1) {
            let r = crossing(xs[k], g0, xs[k + 1], g1, |x| {
                nodes += 1;
                fg(at(axis, x, t)).map(|s| s.0)
            })?;
            segments.push((start, r, inside(g0)));
            start = r;
        }
    }
    segments.push((start, hi, inside(samples[xs.len() - 1].0)));
    let (mut v, mut a) = (0.0, 0.0);
    for (s0, s1, keep) in segments {
        if !keep || s1 <= s0 {
            continue;
        }
        for i in 0..n {
            let (x, w) = rule.mapped(i, s0, s1);
            let f = fg(at(axis, x, t))?.1;
            v += w * f;
            a += w * abs(f);
        }
        nodes += n;
    }
    Ok((v, a, nodes))
}

fn cut_tensor<FG: Fn([f64; 2]) -> Result<(f64, f64)>>(fg: &FG, r: &Rect, axis: usize, rule: &GaussLegendre) -> Result<(f64, f64, usize)> {
    let o = 1 - axis;
    let (mut v, mut a, mut nodes) = (0.0, 0.0, 0);
    for j in 0..rule.len() {
        let (t, w) = rule.mapped(j, r.lo[o], r.hi[o]);
        let (lv, la, ln) = cut_line(fg, axis, t, r.lo[axis], r.hi[axis], rule)?;
        v += w * lv;
        a += w * la;
        nodes += ln;
    }
    Ok((v, a, nodes))
}

fn cut_cell<FG: Fn([f64; 2]) -> Result<(f64, f64)>>(fg: &FG, r: &Rect, rules: &Rules) -> Result<CellEstimate> {
    let c = r.center();
    let du = abs(fg([r.hi[0], c[1]])?.0 - fg([r.lo[0], c[1]])?.0);
    let dv = abs(fg([c[0], r.hi[1]])?.0 - fg([c[0], r.lo[1]])?.0);
    let axis = if du >= dv { 0 } else { 1 };
    let (lo, _, n0) = cut_tensor(fg, r, axis, &rules.low)?;
    let (hi, abs_hi, n1) = cut_tensor(fg, r, axis, &rules.high)?;
    Ok(CellEstimate { value: hi, error: abs(hi - lo), abs: abs_hi, nodes: n0 + n1 + 4 })
}

/// Adaptive driver shared by the plain and cut-cell rules.
pub struct Integrator<'a> {
    pub config: QuadratureConfig,
    pub executor: &'a dyn Executor,
}

impl Default for Integrator<'static> {
    fn default() -> Self {
        Integrator { config: QuadratureConfig::default(), executor: &Sequential }
    }
}

impl<'a> Integrator<'a> {
    pub fn new(config: QuadratureConfig, executor: &'a dyn Executor) -> Self {
        Integrator { config, executor }
    }

    fn adapt(&self, mut cells: Vec<Cell>, rule: &(dyn Fn(&Rect) -> Result<CellEstimate> + Sync)) -> Result<Integral> {
        let cfg = &self.config;
        let mut pending: Vec<usize> = (0..cells.len()).collect();
        loop {
            let out = {
                let cells = &cells;
                let pending = &pending;
                self.executor.map(pending.len(), &|k| rule(&cells[pending[k]].rect))
            };
            for (k, e) in out.into_iter().enumerate() {
                cells[pending[k]].estimate = e?;
            }
            let (mut value, mut error, mut scale, mut nodes) = (0.0, 0.0, 0.0, 0);
            for c in &cells {
                value += c.estimate.value;
                error += c.estimate.error;
                scale += c.estimate.abs;
                nodes += c.estimate.nodes;
            }
            if !value.is_finite() {
                return Err(Error::NonConvergent { estimate: value, error });
            }
            let tol = cfg.rtol * scale;
            let result = Integral { value, error, nodes, cells: cells.len() };
            if error <= tol {
                return Ok(result);
            }
            let share = tol / cells.len() as f64;
            let refine: Vec<usize> =
                (0..cells.len()).filter(|&i| cells[i].estimate.error > share && cells[i].depth < cfg.max_depth).collect();
            if refine.is_empty() {
                if error > 100.0 * tol {
                    return Err(Error::NonConvergent { estimate: value, error });
                }
                return Ok(result);
            }
            let mut next = Vec::with_capacity(cells.len() + 3 * refine.len());
            pending.clear();
            let mut r = refine.iter().peekable();
            for (i, c) in cells.iter().enumerate() {
                if r.peek() == Some(&&i) {
                    r.next();
                    for rect in c.rect.split() {
                        pending.push(next.len());
                        next.push(Cell { rect, depth: c.depth + 1, estimate: CellEstimate::default() });
                    }
                } else {
                    next.push(*c);
                }
            }
            cells = next;
        }
    }

    fn grid(&self, patch: &SurfacePatch, scale: f64) -> QuadratureGrid {
        QuadratureGrid::base(patch.domain, &patch.caps, scale * self.config.cap_scale, self.config.base_cells)
    }

    /// `∫ f du dv` over the patch domain minus its caps.
    pub fn surface<F>(&self, patch: &SurfacePatch, f: F) -> Result<Integral>
    where
        F: Fn([f64; 2]) -> Result<f64> + Sync,
    {
        self.surface_scaled(patch, 1.0, &f)
    }

    fn surface_scaled<F>(&self, patch: &SurfacePatch, scale: f64, f: &F) -> Result<Integral>
    where
        F: Fn([f64; 2]) -> Result<f64> + Sync,
    {
        let rules = Rules::new(self.config.order);
        self.adapt(self.grid(patch, scale).cells, &|r| plain_cell(f, r, &rules))
    }

    /// `∫_{g > 0} f du dv` for `fg(uv) = (g, f)`, over the domain minus caps.
    pub fn region<FG>(&self, patch: &SurfacePatch, fg: FG) -> Result<Integral>
    where
        FG: Fn([f64; 2]) -> Result<(f64, f64)> + Sync,
    {
        self.region_scaled(patch, 1.0, &fg)
    }

    fn region_scaled<FG>(&self, patch: &SurfacePatch, scale: f64, fg: &FG) -> Result<Integral>
    where
        FG: Fn([f64; 2]) -> Result<(f64, f64)> + Sync,
    {
        let rules = Rules::new(self.config.order);
        self.adapt(self.grid(patch, scale).cells, &|r| cut_cell(fg, r, &rules))
    }

    /// [`surface`](Self::surface) with the cap contribution extrapolated
    /// from cap scales `1, 1/2, 1/4`.
    pub fn surface_capped<F>(&self, patch: &SurfacePatch, f: F) -> Result<Integral>
    where
        F: Fn([f64; 2]) -> Result<f64> + Sync,
    {
        self.capped(patch, |s| self.surface_scaled(patch, s, &f))
    }

    /// [`region`](Self::region) with the cap contribution extrapolated.
    pub fn region_capped<FG>(&self, patch: &SurfacePatch, fg: FG) -> Result<Integral>
    where
        FG: Fn([f64; 2]) -> Result<(f64, f64)> + Sync,
    {
        self.capped(patch, |s| self.region_scaled(patch, s, &fg))
    }

    fn capped<R: Fn(f64) -> Result<Integral>>(&self, patch: &SurfacePatch, run: R) -> Result<Integral> {
        if patch.caps.is_empty() {
            return run(1.0);
        }
        let q = [run(1.0)?, run(0.5)?, run(0.25)?];
        let noise = q.iter().map(|i| i.error).fold(0.0, f64::max) + 1e-300;
        let value = extrapolate_caps([q[0].value, q[1].value, q[2].value], noise)?;
        Ok(Integral { value, error: abs(value - q[2].value) + q[2].error, nodes: q.iter().map(|i| i.nodes).sum(), cells: q[2].cells })
    }
}

/// Limit as the cap radius goes to zero from values at radii `ρ, ρ/2, ρ/4`,
/// assuming `Q(ρ) = Q₀ + Cρ^p`. Differences within `noise` need no
/// extrapolation; differences that do not shrink mean the integrand is not
/// integrable at the caps.
pub fn extrapolate_caps(q: [f64; 3], noise: f64) -> Result<f64> {
    let d1 = q[0] - q[1];
    let d2 = q[1] - q[2];
    if abs(d2) <= noise {
        return Ok(q[2]);
    }
    let ratio = d1 / d2;
    if !(ratio > 1.2) {
        return Err(Error::NonConvergent { estimate: q[2], error: abs(d2) });
    }
    let p = log2(ratio);
    Ok(q[2] - d2 / (powf(2.0, p) - 1.0))
}

/// `∫_Σ K^ε dσ^ε`.
pub fn gauss_bonnet_integral(cs: &ContactStructure, patch: &SurfacePatch, eps: Epsilon, q: &Integrator) -> Result<Integral> {
    q.surface(patch, |uv| gauss_density(cs, patch, uv, eps))
}

/// `∫_Σ f dσ` over the whole patch.
pub fn integrate_surface<F>(cs: &ContactStructure, patch: &SurfacePatch, f: F, q: &Integrator) -> Result<Integral>
where
    F: Fn([f64; 2]) -> Result<f64> + Sync,
{
    q.surface(patch, |uv| Ok(f(uv)? * crate::surface::area_densities(cs, patch, uv, Epsilon::ONE)?.0))
}

/// Which part of the band `{|a| > 1 − c}` to integrate over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Both,
    /// `a > 1 − c`
    Plus,
    /// `a < −(1 − c)`
    Minus,
}

fn band_level(a: f64, c: f64, band: Band) -> f64 {
    let t = match band {
        Band::Both => abs(a),
        Band::Plus => a,
        Band::Minus => -a,
    };
    t - (1.0 - c)
}

/// Pointwise integrand of a band integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandIntegrand {
    /// `K_{Σ,E}`
    #[default]
    KSigmaE,
    /// `K_{Σ,E} − B_{1,−1}`, which also carries the `B_{1,−1}/ε` mass that
    /// concentrates at characteristic points as `ε → 0`.
    Balanced,
}

/// `A(c) = ∫_{|a| > 1−c} K_{Σ,E} dσ`, cap contribution extrapolated.
pub fn region_integral_a(cs: &ContactStructure, patch: &SurfacePatch, c: f64, q: &Integrator) -> Result<Integral> {
    region_integral_band(cs, patch, c, Band::Both, BandIntegrand::KSigmaE, q)
}

pub fn region_integral_band(
    cs: &ContactStructure,
    patch: &SurfacePatch,
    c: f64,
    band: Band,
    integrand: BandIntegrand,
    q: &Integrator,
) -> Result<Integral> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain("band parameter c must lie in (0, 1)"));
    }
    q.region_capped(patch, |uv| {
        let s = surface_sample(cs, patch, uv)?;
        let f = match integrand {
            BandIntegrand::KSigmaE => s.k_sigma_e,
            BandIntegrand::Balanced => s.k_sigma_e - s.b1m1_over_b0 * sqrt(1.0 - s.a * s.a),
        };
        Ok((band_level(s.a, c, band), f * s.area))
    })
}

/// `∫_Σ B_{1,−1}/b₀ dσ`, which vanishes on closed surfaces.
pub fn check_b1m1_identity(cs: &ContactStructure, patch: &SurfacePatch, q: &Integrator) -> Result<Integral> {
    q.surface_capped(patch, |uv| {
        let s = surface_sample(cs, patch, uv)?;
        Ok(s.b1m1_over_b0 * s.area)
    })
}

/// Geometric ladder `c₀·2^{−k}`, `k = 0..=halvings`.
pub fn ladder(c0: f64, halvings: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(halvings + 1);
    let mut x = c0;
    for _ in 0..=halvings {
        c.push(x);
        x *= 0.5;
    }
    c
}

/// Samples of `A(c)` along a decreasing ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeProfile {
    pub c: Vec<f64>,
    pub a: Vec<f64>,
    /// `A⁺(c)` and `A⁻(c)` over the two signs of `a`, when requested.
    pub plus: Option<Vec<f64>>,
    pub minus: Option<Vec<f64>>,
    pub nodes: usize,
}

impl CumulativeProfile {
    pub fn from_samples(c: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        if c.len() != a.len() {
            return Err(Error::Domain("profile needs one value per ladder rung"));
        }
        if c.iter().any(|&x| !(x > 0.0)) || c.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Domain("ladder must be positive and strictly decreasing"));
        }
        Ok(CumulativeProfile { c, a, plus: None, minus: None, nodes: 0 })
    }

    pub fn slope_at_zero(&self) -> Result<SlopeFit> {
        slope_at_zero(self)
    }
}

pub fn cumulative_profile(
    cs: &ContactStructure,
    patch: &SurfacePatch,
    c: &[f64],
    integrand: BandIntegrand,
    split: bool,
    q: &Integrator,
) -> Result<CumulativeProfile> {
    let mut p = CumulativeProfile::from_samples(c.to_vec(), vec![0.0; c.len()])?;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (k, &ck) in c.iter().enumerate() {
        if split {
            let ip = region_integral_band(cs, patch, ck, Band::Plus, integrand, q)?;
            let im = region_integral_band(cs, patch, ck, Band::Minus, integrand, q)?;
            plus.push(ip.value);
            minus.push(im.value);
            p.a[k] = ip.value + im.value;
            p.nodes += ip.nodes + im.nodes;
        } else {
            let i = region_integral_band(cs, patch, ck, Band::Both, integrand, q)?;
            p.a[k] = i.value;
            p.nodes += i.nodes;
        }
    }
    if split {
        p.plus = Some(plus);
        p.minus = Some(minus);
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    /// Root-mean-square misfit `A(c_k) − s c_k` over the window.
    pub residual: f64,
    /// Mean `c` over the window.
    pub c_mean: f64,
    /// Half-open index range of the ladder window used.
    pub window: (usize, usize),
}

fn fit_window(c: &[f64], a: &[f64]) -> SlopeFit {
    let m = c.len() as f64;
    // Relative weights 1/c² make the through-origin fit the mean of A/c.
    let slope = c.iter().zip(a).map(|(c, a)| a / c).sum::<f64>() / m;
    let ss = c.iter().zip(a).map(|(c, a)| (a - slope * c) * (a - slope * c)).sum::<f64>();
    SlopeFit { slope, residual: sqrt(ss / m), c_mean: c.iter().sum::<f64>() / m, window: (0, c.len()) }
}

/// Through-origin fit of `A(c) ≈ s c` over the contiguous window of at least
/// [`MIN_WINDOW`] rungs with the smallest relative misfit.
pub fn slope_at_zero(p: &CumulativeProfile) -> Result<SlopeFit> {
    let n = p.c.len();
    if n < MIN_WINDOW {
        return Err(Error::Domain("slope fit needs at least five ladder samples"));
    }
    let mut best: Option<(f64, SlopeFit)> = None;
    for i in 0..=n - MIN_WINDOW {
        for j in i + MIN_WINDOW..=n {
            let mut f = fit_window(&p.c[i..j], &p.a[i..j]);
            f.window = (i, j);
            let scale = abs(f.slope) * f.c_mean;
            let rel = if f.residual == 0.0 {
                0.0
            } else if scale > 0.0 {
                f.residual / scale
            } else {
                f64::INFINITY
            };
            if best.as_ref().is_none_or(|(r, _)| rel < *r) {
                best = Some((rel, f));
            }
        }
    }
    let (_, fit) = best.unwrap();
    if !fit.slope.is_finite() || fit.residual > 0.1 * abs(fit.slope) * fit.c_mean {
        return Err(Error::IllConditionedFit { slope: fit.slope, residual: fit.residual });
    }
    Ok(fit)
}

fn check_i_domain(eps: f64, rho: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain("I1/I2 need 0 < eps < 1"));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain("I1/I2 need 0 <= rho <= 1"));
    }
    Ok(())
}

/// Closed forms of `I₁ = ∫ da/√(1+(ε−1)a²)` and `I₂ = ∫ da/(1+(ε−1)a²)^{3/2}`
/// over `a ∈ [−1, −√(1−ρ²)]`.
pub fn i1_i2(eps: f64, rho: f64) -> Result<(f64, f64)> {
    check_i_domain(eps, rho)?;
    let k = 1.0 - eps;
    let sk = sqrt(k);
    let i1 = (asin(sk) - asin(sqrt(k * (1.0 - rho * rho)))) / sk;
    let i2 = 1.0 / sqrt(eps) - sqrt(1.0 - rho * rho) / sqrt(eps + k * rho * rho);
    Ok((i1, i2))
}

/// `I₁, I₂` by adaptive quadrature of their defining integrals.
pub fn i1_i2_numeric(eps: f64, rho: f64) -> Result<(f64, f64)> {
    check_i_domain(eps, rho)?;
    let lo = -1.0;
    let hi = -sqrt(1.0 - rho * rho);
    if hi <= lo {
        return Ok((0.0, 0.0));
    }
    let q = |a: f64| (1.0 - a) * (1.0 + a) + eps * a * a;
    let i1 = integrate_1d(lo, hi, 1e-13, |a| 1.0 / sqrt(q(a)))?;
    let i2 = integrate_1d(lo, hi, 1e-13 / sqrt(eps * eps * eps), |a| {
        let s = q(a);
        1.0 / (s * sqrt(s))
    })?;
    Ok((i1, i2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
        for n in 2..9 {
            let g = GaussLegendre::new(n);
            for d in 0..2 * n {
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                let q = g.integrate(-1.0, 1.0, |x| crate::math::powi(x, d as i32));
                assert!(abs(q - exact) < 1e-14, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn one_dimensional_integral() {
        let v = integrate_1d(0.0, PI, 1e-13, crate::math::sin).unwrap();
        assert!(abs(v - 2.0) < 1e-12);
    }

    #[test]
    fn base_grid_partitions_the_domain_minus_caps() {
        let caps = [Cap { center: [0.0, 1.0], half_width: [0.1, 1.0] }];
        let g = QuadratureGrid::base([[0.0, 1.0], [0.0, 2.0]], &caps, 1.0, 4);
        let area: f64 = g.cells.iter().map(|c| c.rect.area()).sum();
        assert!(abs(area - 1.8) < 1e-14);
        let g = QuadratureGrid::base([[0.0, 1.0], [0.0, 2.0]], &caps, 0.5, 4);
        let area: f64 = g.cells.iter().map(|c| c.rect.area()).sum();
        assert!(abs(area - 1.9) < 1e-14);
        for c in &g.cells {
            for child in c.rect.split() {
                assert!(child.area() > 0.0);
            }
            let s: f64 = c.rect.split().iter().map(Rect::area).sum();
            assert!(abs(s - c.rect.area()) < 1e-15);
        }
    }

    #[test]
    fn disk_area_through_cut_cells() {
        let patch = SurfacePatch::new(
            alloc::boxed::Box::new(crate::surface::ExprImmersion::new([
                crate::expr::Expr::var(0),
                crate::expr::Expr::var(1),
                crate::expr::Expr::c(0.0),
            ])),
            [[-1.0, 1.0], [-1.0, 1.0]],
        );
        let q = Integrator::default();
        let r = q.region(&patch, |p| Ok((0.49 - p[0] * p[0] - p[1] * p[1], 1.0))).unwrap();
        assert!(abs(r.value - PI * 0.49) < 1e-8, "{}", r.value);
    }

    #[test]
    fn synthetic_line_has_exact_slope() {
        let c = ladder(0.2, 8);
        let a = c.iter().map(|c| 3.0 * c).collect();
        let p = CumulativeProfile::from_samples(c, a).unwrap();
        let f = p.slope_at_zero().unwrap();
        assert!(abs(f.slope - 3.0) < 1e-14);
    }

    #[test]
    fn zero_profile_has_zero_slope() {
        let c = ladder(0.2, 8);
        let p = CumulativeProfile::from_samples(c, vec![0.0; 9]).unwrap();
        assert_eq!(p.slope_at_zero().unwrap().slope, 0.0);
    }

    #[test]
    fn square_root_profile_is_ill_conditioned() {
        let c = ladder(0.2, 8);
        let a = c.iter().map(|c| sqrt(*c)).collect();
        let p = CumulativeProfile::from_samples(c, a).unwrap();
        assert!(matches!(p.slope_at_zero(), Err(Error::IllConditionedFit { .. })));
    }

    #[test]
    fn richardson_over_caps() {
        let q = [1.0 + 0.01, 1.0 + 0.0025, 1.0 + 0.000625];
        assert!(abs(extrapolate_caps(q, 1e-12).unwrap() - 1.0) < 1e-12);
        assert!(extrapolate_caps([1.0, 2.0, 3.0], 1e-12).is_err());
    }

    #[test]
    fn closed_forms_vanish_at_zero_radius() {
        let (i1, i2) = i1_i2(0.3, 0.0).unwrap();
        assert!(abs(i1) < 1e-15 && abs(i2) < 1e-15);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for eps in [0.9, 0.5, 0.1, 1e-2, 1e-4] {
            for rho in [0.1, 0.3, 0.5, 0.8, 1.0] {
                let (c1, c2) = i1_i2(eps, rho).unwrap();
                let (n1, n2) = i1_i2_numeric(eps, rho).unwrap();
                assert!(abs(c1 - n1) <= 1e-8, "I1 eps={eps} rho={rho}: {c1} vs {n1}");
                assert!(abs(c2 - n2) <= 1e-8 * (1.0 + abs(n2)), "I2 eps={eps} rho={rho}: {c2} vs {n2}");
            }
        }
    }

    #[test]
    fn small_epsilon_limits() {
        let (i1, i2) = i1_i2(1e-6, 0.5).unwrap();
        assert!(abs(sqrt(1e-6) * i2 - 1.0) <= 1e-2);
        assert!(abs(i1 - (PI / 2.0 - crate::math::acos(0.5))) <= 1e-2);
        assert!(sqrt(1e-6) * i1 < 1e-2);
    }
}
