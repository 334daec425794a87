//! Scenario files: which suite to run on which fixtures, with what numerics.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use subriemann_core::quadrature::QuadratureConfig;

use crate::error::{Error, Result};
use crate::fixture;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    Curvature,
    GaussBonnet,
    LimitSlope,
    Boundary,
    StarExperiment,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Identities, Suite::Curvature, Suite::GaussBonnet, Suite::LimitSlope, Suite::Boundary, Suite::StarExperiment];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Curvature => "curvature",
            Suite::GaussBonnet => "gauss-bonnet",
            Suite::LimitSlope => "limit-slope",
            Suite::Boundary => "boundary",
            Suite::StarExperiment => "star-experiment",
        }
    }

    fn default_epsilon(self) -> Vec<f64> {
        match self {
            Suite::Identities => vec![1.0, 0.3, 0.05],
            Suite::Curvature => vec![1.0, 0.5, 0.3, 0.1, 0.05],
            Suite::GaussBonnet => vec![1.0, 0.5, 0.25],
            Suite::LimitSlope => vec![],
            Suite::Boundary => vec![1.0, 0.5],
            Suite::StarExperiment => vec![1e-2, 1e-4, 1e-6, 1e-8],
        }
    }

    fn default_points(self) -> usize {
        match self {
            Suite::Identities => 200,
            Suite::Curvature => 500,
            _ => 0,
        }
    }

    fn default_surface(self) -> Option<&'static str> {
        match self {
            Suite::Identities | Suite::StarExperiment => None,
            Suite::Curvature | Suite::GaussBonnet | Suite::LimitSlope => Some("sphere"),
            Suite::Boundary => Some("hemisphere"),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Geometric ladder `c₀·2^{−k}`, `k = 0..=halvings`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ladder {
    pub c0: f64,
    pub halvings: usize,
}

impl Default for Ladder {
    fn default() -> Self {
        Ladder { c0: 0.2, halvings: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Quadrature {
    pub order: usize,
    pub base_cells: usize,
    pub max_depth: u32,
    pub rtol: f64,
    pub cap_scale: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        let q = QuadratureConfig::default();
        Quadrature { order: q.order, base_cells: q.base_cells, max_depth: q.max_depth, rtol: q.rtol, cap_scale: q.cap_scale }
    }
}

impl From<Quadrature> for QuadratureConfig {
    fn from(q: Quadrature) -> Self {
        QuadratureConfig { order: q.order, base_cells: q.base_cells, max_depth: q.max_depth, rtol: q.rtol, cap_scale: q.cap_scale }
    }
}

/// The model integral `∫ √ε w(t) / (ε + (1 − ε)ψ(t)²) dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Star {
    pub psi: String,
    pub weight: String,
    pub range: [f64; 2],
}

impl Default for Star {
    fn default() -> Self {
        Star { psi: "t".into(), weight: "1".into(), range: [-1.0, 1.0] }
    }
}

/// A scenario as written in a config file. Missing fields take per-suite
/// defaults in [`Scenario::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioFile {
    pub suite: Option<Suite>,
    pub manifold: Option<String>,
    pub surface: Option<String>,
    pub epsilon: Option<Vec<f64>>,
    pub ladder: Ladder,
    pub quadrature: Quadrature,
    pub points: Option<usize>,
    /// Side of the parameter grid used by grid sweeps.
    pub grid: Option<usize>,
    pub seed: u64,
    /// Report path prefix; `<out>.csv` and `<out>.json` are written.
    pub out: Option<String>,
    pub timing: bool,
    pub star: Star,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })
    }
}

/// A validated scenario with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub suite: Suite,
    pub manifold: String,
    pub surface: Option<String>,
    pub epsilon: Vec<f64>,
    pub ladder: Ladder,
    pub quadrature: Quadrature,
    pub points: usize,
    pub grid: usize,
    pub seed: u64,
    pub out: Option<String>,
    pub timing: bool,
    pub star: Star,
}

impl Scenario {
    pub fn resolve(file: ScenarioFile) -> Result<Self> {
        let suite = file.suite.ok_or_else(|| Error::Config("no suite given".into()))?;
        let surface = file.surface.or_else(|| suite.default_surface().map(String::from));
        let manifold = match (file.manifold, &surface) {
            (Some(m), _) => m,
            (None, Some(s)) => fixture::surface(s)?.manifold,
            (None, None) => "heisenberg".into(),
        };
        let epsilon = file.epsilon.unwrap_or_else(|| suite.default_epsilon());
        if let Some(e) = epsilon.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Error::Config(format!("epsilon must be positive, got {e}")));
        }
        if suite == Suite::StarExperiment && epsilon.iter().any(|e| *e > 1.0) {
            return Err(Error::Config("star-experiment needs epsilon in (0, 1]".into()));
        }
        let l = file.ladder;
        if !(l.c0 > 0.0 && l.c0 < 1.0) {
            return Err(Error::Config(format!("ladder c0 must lie in (0, 1), got {}", l.c0)));
        }
        if l.halvings < 4 {
            return Err(Error::Config("ladder needs at least 4 halvings for a slope fit".into()));
        }
        let q = file.quadrature;
        if q.order < 1 || q.base_cells < 1 || !(q.rtol > 0.0) || !(q.cap_scale > 0.0) {
            return Err(Error::Config("quadrature order, base_cells, rtol and cap_scale must be positive".into()));
        }
        if !(file.star.range[1] > file.star.range[0]) {
            return Err(Error::Config("star range must be increasing".into()));
        }
        let s = Scenario {
            suite,
            manifold,
            surface,
            epsilon,
            ladder: l,
            quadrature: q,
            points: file.points.unwrap_or_else(|| suite.default_points()),
            grid: file.grid.unwrap_or(64),
            seed: file.seed,
            out: file.out,
            timing: file.timing,
            star: file.star,
        };
        fixture::manifold(&s.manifold)?;
        if let Some(name) = &s.surface {
            let sf = fixture::surface(name)?;
            if suite == Suite::Boundary && !sf.has_boundary() {
                return Err(Error::Config(format!("surface `{name}` has no boundary")));
            }
        }
        Ok(s)
    }

    /// `manifold/surface`, or the manifold alone.
    pub fn fixture_label(&self) -> String {
        let base = |s: &str| Path::new(s).file_stem().and_then(|x| x.to_str()).unwrap_or(s).to_string();
        match &self.surface {
            Some(s) => format!("{}/{}", base(&self.manifold), base(s)),
            None => base(&self.manifold),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(json: &str) -> ScenarioFile {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn defaults_follow_the_suite() {
        let s = Scenario::resolve(file(r#"{"suite": "gauss-bonnet"}"#)).unwrap();
        assert_eq!(s.surface.as_deref(), Some("sphere"));
        assert_eq!(s.manifold, "heisenberg");
        assert_eq!(s.epsilon, vec![1.0, 0.5, 0.25]);
        assert_eq!(s.fixture_label(), "heisenberg/sphere");
        let s = Scenario::resolve(file(r#"{"suite": "identities", "manifold": "heisenberg-twisted"}"#)).unwrap();
        assert_eq!(s.surface, None);
        assert_eq!(s.points, 200);
    }

    #[test]
    fn invalid_scenarios_are_config_errors() {
        for json in [
            r#"{}"#,
            r#"{"suite": "curvature", "epsilon": [0.5, -1]}"#,
            r#"{"suite": "limit-slope", "ladder": {"c0": 1.5}}"#,
            r#"{"suite": "limit-slope", "ladder": {"halvings": 2}}"#,
            r#"{"suite": "boundary", "surface": "sphere"}"#,
        ] {
            assert!(matches!(Scenario::resolve(file(json)), Err(Error::Config(_))), "{json}");
        }
        assert!(matches!(Scenario::resolve(file(r#"{"suite": "curvature", "surface": "cube"}"#)), Err(Error::Fixture { .. })));
        assert!(serde_json::from_str::<ScenarioFile>(r#"{"suite": "curvature", "colour": 1}"#).is_err());
        assert!(serde_json::from_str::<ScenarioFile>(r#"{"suite": "nope"}"#).is_err());
    }
}
