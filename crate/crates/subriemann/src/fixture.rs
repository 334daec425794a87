//! Manifold and surface fixtures: the JSON format, the shipped set and the
//! conversion into core objects.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use subriemann_core::boundary::{BoundaryCurve, CurvePiece};
use subriemann_core::surface::{Cap, ExprImmersion, SurfacePatch};
use subriemann_core::{build_contact, ChartPoint, ContactFrame, ContactStructure, ExprField};

use crate::error::{Error, Result};
use crate::parse::{parse, parse_constant, Scope};

/// A number, or a constant expression such as `"2*pi"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Value(f64),
    Expr(String),
}

impl Num {
    pub fn resolve(&self, params: &BTreeMap<String, f64>) -> Result<f64> {
        match self {
            Num::Value(v) => Ok(*v),
            Num::Expr(s) => Ok(parse_constant(s, Some(params))?),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameSpec {
    pub a: [String; 3],
    pub b: [String; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifoldFixture {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub frame: FrameSpec,
    #[serde(default = "positive")]
    pub orientation: i8,
    #[serde(rename = "box")]
    pub chart_box: [[Num; 2]; 3],
    /// `false` marks a sentinel frame that is expected to fail the contact check.
    #[serde(default = "yes")]
    pub contact: bool,
}

fn positive() -> i8 {
    1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapSpec {
    pub center: [Num; 2],
    pub half_width: [Num; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceSpec {
    pub u: String,
    pub v: String,
    pub range: [Num; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceFixture {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Manifold used when a scenario does not name one.
    pub manifold: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub immersion: [String; 3],
    pub domain: [[Num; 2]; 2],
    #[serde(default)]
    pub periodic: [bool; 2],
    #[serde(default = "positive")]
    pub orientation: i8,
    #[serde(default)]
    pub caps: Vec<CapSpec>,
    pub euler_characteristic: i32,
    /// Positively oriented boundary pieces in the parameter `t`.
    #[serde(default)]
    pub boundary: Option<Vec<PieceSpec>>,
}

const MANIFOLDS: &[&str] = &[
    include_str!("../fixtures/manifolds/heisenberg.json"),
    include_str!("../fixtures/manifolds/heisenberg-twisted.json"),
    include_str!("../fixtures/manifolds/flat.json"),
    include_str!("../fixtures/manifolds/euclid.json"),
];

const SURFACES: &[&str] = &[
    include_str!("../fixtures/surfaces/sphere.json"),
    include_str!("../fixtures/surfaces/torus-rev.json"),
    include_str!("../fixtures/surfaces/disk-z0.json"),
    include_str!("../fixtures/surfaces/hemisphere.json"),
    include_str!("../fixtures/surfaces/wedge.json"),
];

pub const PROBE_COUNT: usize = 200;

fn shipped<T: for<'de> Deserialize<'de>>(sources: &[&str], kind: &str) -> Vec<T> {
    sources.iter().map(|s| serde_json::from_str(s).unwrap_or_else(|e| panic!("shipped {kind} fixture is malformed: {e}"))).collect()
}

pub fn shipped_manifolds() -> Vec<ManifoldFixture> {
    shipped(MANIFOLDS, "manifold")
}

pub fn shipped_surfaces() -> Vec<SurfaceFixture> {
    shipped(SURFACES, "surface")
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })
}

/// Whether a fixture reference names a file rather than a shipped fixture.
pub fn is_path(name: &str) -> bool {
    name.ends_with(".json") || name.contains('/')
}

/// A shipped manifold by name, or a fixture file by path.
pub fn manifold(name: &str) -> Result<ManifoldFixture> {
    if is_path(name) {
        return read_json(Path::new(name));
    }
    shipped_manifolds().into_iter().find(|m| m.name == name).ok_or_else(|| Error::fixture(name, "no such manifold fixture"))
}

/// A shipped surface by name, or a fixture file by path.
pub fn surface(name: &str) -> Result<SurfaceFixture> {
    if is_path(name) {
        return read_json(Path::new(name));
    }
    shipped_surfaces().into_iter().find(|s| s.name == name).ok_or_else(|| Error::fixture(name, "no such surface fixture"))
}

pub fn is_manifold(name: &str) -> bool {
    shipped_manifolds().iter().any(|m| m.name == name)
}

pub fn is_surface(name: &str) -> bool {
    shipped_surfaces().iter().any(|s| s.name == name)
}

fn parse_all<const N: usize>(src: &[String; N], scope: &Scope) -> Result<[subriemann_core::Expr; N]> {
    let mut out = Vec::with_capacity(N);
    for s in src {
        out.push(parse(s, scope)?);
    }
    Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
}

impl ManifoldFixture {
    pub fn chart_box(&self) -> Result<[[f64; 2]; 3]> {
        let mut b = [[0.0; 2]; 3];
        for i in 0..3 {
            for j in 0..2 {
                b[i][j] = self.chart_box[i][j].resolve(&self.params)?;
            }
            if !(b[i][1] > b[i][0]) {
                return Err(Error::fixture(&self.name, "chart box must have increasing bounds"));
            }
        }
        Ok(b)
    }

    pub fn fields(&self) -> Result<(ExprField, ExprField)> {
        let scope = Scope::new(&["x", "y", "z"]).with_params(&self.params);
        Ok((ExprField::new(parse_all(&self.frame.a, &scope)?), ExprField::new(parse_all(&self.frame.b, &scope)?)))
    }

    /// Uniform points of the chart box from a seeded generator.
    pub fn probe_points(&self, n: usize, seed: u64) -> Result<Vec<ChartPoint>> {
        let b = self.chart_box()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..n)
            .map(|_| {
                let c: [f64; 3] = std::array::from_fn(|i| rng.random_range(b[i][0]..b[i][1]));
                ChartPoint::from(c)
            })
            .collect())
    }

    /// The contact structure, checked at [`PROBE_COUNT`] probe points.
    pub fn build(&self, seed: u64) -> Result<ContactStructure> {
        let (a, b) = self.fields()?;
        let frame = ContactFrame::new(Box::new(a), Box::new(b)).with_orientation(self.orientation);
        Ok(build_contact(frame, &self.probe_points(PROBE_COUNT, seed)?)?)
    }
}

impl SurfaceFixture {
    pub fn domain(&self) -> Result<[[f64; 2]; 2]> {
        let mut d = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                d[i][j] = self.domain[i][j].resolve(&self.params)?;
            }
            if !(d[i][1] > d[i][0]) {
                return Err(Error::fixture(&self.name, "domain must have increasing bounds"));
            }
        }
        Ok(d)
    }

    pub fn patch(&self) -> Result<SurfacePatch> {
        let scope = Scope::new(&["u", "v"]).with_params(&self.params);
        let mut p = SurfacePatch::new(Box::new(ExprImmersion::new(parse_all(&self.immersion, &scope)?)), self.domain()?);
        p.periodic = self.periodic;
        p.orientation = if self.orientation < 0 { -1 } else { 1 };
        for cap in &self.caps {
            let r = |n: &Num| n.resolve(&self.params);
            p.caps.push(Cap {
                center: [r(&cap.center[0])?, r(&cap.center[1])?],
                half_width: [r(&cap.half_width[0])?, r(&cap.half_width[1])?],
            });
        }
        Ok(p)
    }

    pub fn chi(&self) -> f64 {
        self.euler_characteristic as f64
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary.as_ref().is_some_and(|b| !b.is_empty())
    }

    pub fn boundary_pieces(&self) -> Result<Vec<CurvePiece>> {
        let Some(spec) = &self.boundary else {
            return Err(Error::fixture(&self.name, "surface has no boundary"));
        };
        let scope = Scope::new(&["t"]).with_params(&self.params);
        spec.iter()
            .map(|p| {
                let range = [p.range[0].resolve(&self.params)?, p.range[1].resolve(&self.params)?];
                Ok(CurvePiece::new(parse(&p.u, &scope)?, parse(&p.v, &scope)?, range))
            })
            .collect()
    }

    pub fn boundary(&self, cs: &ContactStructure, patch: &SurfacePatch) -> Result<BoundaryCurve> {
        Ok(BoundaryCurve::new(cs, patch, self.boundary_pieces()?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_fixtures_parse_and_build() {
        for m in shipped_manifolds() {
            let built = m.build(1);
            assert_eq!(built.is_ok(), m.contact, "{}", m.name);
        }
        let cs = manifold("heisenberg").unwrap().build(1).unwrap();
        for s in shipped_surfaces() {
            let patch = s.patch().unwrap();
            if s.has_boundary() {
                s.boundary(&cs, &patch).unwrap();
            }
        }
    }

    #[test]
    fn flat_is_the_degenerate_sentinel() {
        let built = manifold("flat").unwrap().build(1);
        assert!(matches!(built, Err(Error::Core(subriemann_core::Error::DegenerateContact { .. }))));
    }

    #[test]
    fn unknown_names_are_fixture_errors() {
        assert!(matches!(manifold("nope"), Err(Error::Fixture { .. })));
        assert!(matches!(surface("nope"), Err(Error::Fixture { .. })));
        assert!(matches!(surface("/no/such/file.json"), Err(Error::Io { .. })));
    }

    #[test]
    fn probes_are_seeded() {
        let m = manifold("heisenberg").unwrap();
        assert_eq!(m.probe_points(5, 3).unwrap(), m.probe_points(5, 3).unwrap());
        assert_ne!(m.probe_points(5, 3).unwrap(), m.probe_points(5, 4).unwrap());
    }
}
