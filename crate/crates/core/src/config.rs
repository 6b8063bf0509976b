//! Scenario configuration: a sectioned TOML file, validated as a whole so
//! that every violation is reported at once.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::base::{BaseChartAtlas, BaseHermitianForm};
use crate::bundle::HermitianMetric;
use crate::error::{Error, Result};
use crate::finsler::DualOptions;
use crate::numerics::{ComplexHessianStencil, FiberQuadratureRule};
use crate::projective::FiberSampleGrid;
use crate::scalar::{lit, Real};
use crate::table::WeightTable;
use crate::verifier::{ScanOptions, Scenario, Theorem};

/// Names accepted by [`ScenarioConfig::builtin`].
pub const BUILTINS: [&str; 2] = ["example-1", "equal-degree"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSection {
    pub rank: usize,
    /// Line-bundle degrees of a direct sum, or the transition degrees of a
    /// tabulated metric.
    pub degrees: Vec<i64>,
    /// Weight table replacing the direct-sum metric.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    /// `Ω = omega · Θ_FS`.
    pub omega: f64,
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self { omega: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsSection {
    pub stencil_step: f64,
    pub stencil_order: u8,
    pub richardson: bool,
    /// Nodes per angle and per radius of the fiber quadrature.
    pub quadrature_nodes: usize,
    pub finsler_stencil_step: f64,
    pub dual_starts: usize,
    pub dual_max_steps: usize,
    pub dual_tolerance: f64,
    /// Band around `M = r` reported as inconclusive.
    pub tolerance: f64,
}

impl Default for NumericsSection {
    fn default() -> Self {
        let d = DualOptions::default();
        Self {
            stencil_step: 1e-3,
            stencil_order: 4,
            richardson: false,
            quadrature_nodes: 16,
            finsler_stencil_step: 1e-2,
            dual_starts: d.starts,
            dual_max_steps: d.max_steps,
            dual_tolerance: d.tolerance,
            tolerance: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    /// Base grid `grid × grid`: `grid − 1` radii plus the chart center, `grid` angles.
    pub grid: usize,
    pub fiber_theta: usize,
    pub fiber_rho: usize,
    pub conclusion_radii: usize,
    pub conclusion_angles: usize,
    pub finsler_radii: usize,
    pub finsler_angles: usize,
    pub finsler_fiber_theta: usize,
    pub finsler_fiber_rho: usize,
    pub convexity_triples: usize,
    pub seed: u64,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self {
            grid: 21,
            fiber_theta: 8,
            fiber_rho: 8,
            conclusion_radii: 3,
            conclusion_angles: 6,
            finsler_radii: 2,
            finsler_angles: 4,
            finsler_fiber_theta: 3,
            finsler_fiber_rho: 1,
            convexity_triples: 10_000,
            seed: 7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub theorems: Vec<Theorem>,
    /// Largest power scanned; 6 for rank ≥ 3 and 10 for rank 2 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(default = "yes")]
    pub conclusions: bool,
    #[serde(default = "yes")]
    pub finsler: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default = "json")]
    pub format: Format,
}

fn yes() -> bool {
    true
}

fn json() -> Format {
    Format::Json
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HymSection {
    pub c: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "unnamed")]
    pub name: String,
    pub bundle: BundleSection,
    #[serde(default)]
    pub metrics: MetricsSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub sampling: SamplingSection,
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hym: Option<HymSection>,
}

fn unnamed() -> String {
    "scenario".into()
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("bundle", &["rank", "degrees", "table"]),
    ("metrics", &["omega"]),
    (
        "numerics",
        &[
            "stencil_step",
            "stencil_order",
            "richardson",
            "quadrature_nodes",
            "finsler_stencil_step",
            "dual_starts",
            "dual_max_steps",
            "dual_tolerance",
            "tolerance",
        ],
    ),
    (
        "sampling",
        &[
            "grid",
            "fiber_theta",
            "fiber_rho",
            "conclusion_radii",
            "conclusion_angles",
            "finsler_radii",
            "finsler_angles",
            "finsler_fiber_theta",
            "finsler_fiber_rho",
            "convexity_triples",
            "seed",
        ],
    ),
    (
        "run",
        &[
            "theorems",
            "k_max",
            "conclusions",
            "finsler",
            "out",
            "format",
        ],
    ),
    ("hym", &["c", "delta"]),
];
const REQUIRED: &[&str] = &["bundle", "run"];
const TOP_LEVEL: &[&str] = &["name"];

fn nearest<'a>(key: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    candidates
        .into_iter()
        .map(|c| (strsim::jaro_winkler(key, c), c))
        .filter(|(s, _)| *s > 0.7)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
}

fn unknown(path: &str, key: &str, valid: &[&str]) -> String {
    match nearest(key, valid.iter().copied()) {
        Some(n) => format!("unknown key `{path}{key}`; did you mean `{n}`?"),
        None => format!(
            "unknown key `{path}{key}`; valid keys are {}",
            valid.join(", ")
        ),
    }
}

/// Structural violations: missing sections and unknown keys.
fn structural_violations(value: &toml::Table) -> Vec<String> {
    let mut out = Vec::new();
    let section_names: Vec<&str> = SECTIONS
        .iter()
        .map(|(s, _)| *s)
        .chain(TOP_LEVEL.iter().copied())
        .collect();
    for req in REQUIRED {
        if !value.contains_key(*req) {
            out.push(format!("missing required section [{req}]"));
        }
    }
    for (key, v) in value {
        match SECTIONS.iter().find(|(s, _)| s == key) {
            Some((_, keys)) => match v.as_table() {
                Some(t) => {
                    for k in t.keys() {
                        if !keys.contains(&k.as_str()) {
                            out.push(unknown(&format!("{key}."), k, keys));
                        }
                    }
                }
                None => out.push(format!("`{key}` must be a section")),
            },
            None if TOP_LEVEL.contains(&key.as_str()) => {}
            None => out.push(unknown("", key, &section_names)),
        }
    }
    out
}

impl ScenarioConfig {
    /// Parses and validates; all violations are collected into one error.
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(vec![e.message().to_string()]))?;
        let mut violations = structural_violations(&table);
        if !violations.is_empty() {
            return Err(Error::Config(violations));
        }
        let cfg: ScenarioConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(vec![e.message().to_string()]))?;
        violations.extend(cfg.violations());
        if violations.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(violations))
        }
    }

    /// Reads a file; relative table paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::parse(&text)?;
        if let (Some(t), Some(dir)) = (&cfg.bundle.table, path.parent()) {
            if t.is_relative() {
                cfg.bundle.table = Some(dir.join(t));
            }
        }
        cfg.check_files()?;
        Ok(cfg)
    }

    /// Built-in scenarios.
    pub fn builtin(name: &str) -> Option<Self> {
        let (degrees, omega, hym) = match name {
            "example-1" | "paper-example-1" => (vec![9, 8, 7], 7.0, None),
            "equal-degree" => (vec![2, 2], 2.0, Some(HymSection { c: 1.0, delta: 0.0 })),
            _ => return None,
        };
        Some(Self {
            name: name.into(),
            bundle: BundleSection {
                rank: degrees.len(),
                degrees,
                table: None,
            },
            metrics: MetricsSection { omega },
            numerics: NumericsSection::default(),
            sampling: SamplingSection::default(),
            run: RunSection {
                theorems: Theorem::ALL.to_vec(),
                k_max: None,
                conclusions: true,
                finsler: true,
                out: None,
                format: Format::Json,
            },
            hym,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Semantic violations of an already well-formed configuration.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let b = &self.bundle;
        if b.rank < 2 {
            v.push(format!("bundle.rank must be at least 2, got {}", b.rank));
        }
        if b.degrees.len() != b.rank {
            v.push(format!(
                "bundle.degrees has {} entries but bundle.rank is {}",
                b.degrees.len(),
                b.rank
            ));
        }
        if !(self.metrics.omega > 0.0 && self.metrics.omega.is_finite()) {
            v.push(format!(
                "metrics.omega must be positive, got {}",
                self.metrics.omega
            ));
        }
        let n = &self.numerics;
        if !(n.stencil_step > 0.0) {
            v.push("numerics.stencil_step must be positive".into());
        }
        if !(n.finsler_stencil_step > 0.0) {
            v.push("numerics.finsler_stencil_step must be positive".into());
        }
        if n.stencil_order != 2 && n.stencil_order != 4 {
            v.push(format!(
                "numerics.stencil_order must be 2 or 4, got {}",
                n.stencil_order
            ));
        }
        if n.quadrature_nodes < FiberQuadratureRule::MIN_NODES {
            v.push(format!(
                "numerics.quadrature_nodes must be at least {}",
                FiberQuadratureRule::MIN_NODES
            ));
        }
        if n.dual_starts == 0 || n.dual_max_steps == 0 {
            v.push("numerics.dual_starts and numerics.dual_max_steps must be positive".into());
        }
        if !(n.dual_tolerance > 0.0) || !(n.tolerance >= 0.0) {
            v.push("numerics tolerances must be positive".into());
        }
        let s = &self.sampling;
        for (name, value) in [
            ("grid", s.grid.saturating_sub(1)),
            ("fiber_theta", s.fiber_theta),
            ("fiber_rho", s.fiber_rho),
            ("conclusion_radii", s.conclusion_radii),
            ("conclusion_angles", s.conclusion_angles),
            ("finsler_radii", s.finsler_radii),
            ("finsler_angles", s.finsler_angles),
            ("finsler_fiber_theta", s.finsler_fiber_theta),
            ("finsler_fiber_rho", s.finsler_fiber_rho),
            ("convexity_triples", s.convexity_triples),
        ] {
            if value == 0 {
                v.push(format!(
                    "sampling.{name} must be positive{}",
                    if name == "grid" {
                        " and at least 2"
                    } else {
                        ""
                    }
                ));
            }
        }
        if self.run.theorems.is_empty() {
            v.push("run.theorems must select at least one criterion".into());
        }
        if let Some(h) = &self.hym {
            if !(h.c > 0.0) || !(h.delta >= 0.0) || h.delta >= h.c {
                v.push(format!(
                    "hym needs 0 <= delta < c, got c = {}, delta = {}",
                    h.c, h.delta
                ));
            }
        }
        v
    }

    fn check_files(&self) -> Result<()> {
        if let Some(t) = &self.bundle.table {
            if !t.exists() {
                return Err(Error::Config(vec![format!(
                    "bundle.table: file {} does not exist",
                    t.display()
                )]));
            }
        }
        Ok(())
    }

    pub fn k_max(&self) -> usize {
        self.run
            .k_max
            .unwrap_or_else(|| ScanOptions::for_rank(self.bundle.rank).k_max)
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            k_max: self.k_max(),
            stop_at_first: true,
            run_finsler: self.run.finsler,
        }
    }

    pub fn stencil<T: Real>(&self) -> Result<ComplexHessianStencil<T>> {
        ComplexHessianStencil::new(
            lit(self.numerics.stencil_step),
            self.numerics.stencil_order,
            self.numerics.richardson,
        )
    }

    /// The Hermitian metric on `E`.
    pub fn metric<T: Real>(&self) -> Result<HermitianMetric<T>> {
        match &self.bundle.table {
            None => HermitianMetric::direct_sum(&self.bundle.degrees),
            Some(path) => WeightTable::load(path)?.metric(self.bundle.degrees.clone()),
        }
    }

    pub fn scenario<T: Real>(&self) -> Result<Scenario<T>> {
        let violations = self.violations();
        if !violations.is_empty() {
            return Err(Error::Config(violations));
        }
        let metric = self.metric::<T>()?;
        let mut s = Scenario::new(
            self.name.clone(),
            metric,
            BaseHermitianForm::fubini_study(self.metrics.omega)?,
        )?;
        let (n, sa) = (&self.numerics, &self.sampling);
        let r = self.bundle.rank;
        s.stencil = self.stencil()?;
        s.finsler_stencil =
            ComplexHessianStencil::new(lit(n.finsler_stencil_step), n.stencil_order, n.richardson)?;
        s.rule = FiberQuadratureRule::new(n.quadrature_nodes, n.quadrature_nodes, r - 1)?;
        s.dual = DualOptions {
            starts: n.dual_starts,
            max_steps: n.dual_max_steps,
            tolerance: n.dual_tolerance,
            ..DualOptions::default()
        };
        s.tolerance = n.tolerance;
        s.atlas = BaseChartAtlas::polar(sa.grid - 1, sa.grid)?;
        s.fiber_grid = FiberSampleGrid {
            n_theta: sa.fiber_theta,
            n_rho: sa.fiber_rho,
        };
        s.conclusion_atlas = BaseChartAtlas::polar(sa.conclusion_radii, sa.conclusion_angles)?;
        s.finsler_atlas = BaseChartAtlas::polar(sa.finsler_radii, sa.finsler_angles)?;
        s.finsler_grid = FiberSampleGrid {
            n_theta: sa.finsler_fiber_theta,
            n_rho: sa.finsler_fiber_rho,
        };
        s.convexity_triples = sa.convexity_triples;
        s.seed = sa.seed;
        Ok(s)
    }

    /// Key/value view used in reports.
    pub fn summary(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("name".into(), self.name.clone());
        m.insert("degrees".into(), format!("{:?}", self.bundle.degrees));
        m.insert("omega".into(), self.metrics.omega.to_string());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[bundle]\nrank = 2\ndegrees = [1, 1]\n\n[run]\ntheorems = [1]\n";

    #[test]
    fn minimal_config_is_valid() {
        let c = ScenarioConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.bundle.degrees, vec![1, 1]);
        assert_eq!(c.run.theorems, vec![Theorem::One]);
        assert_eq!(c.k_max(), 10);
        assert_eq!(c.sampling, SamplingSection::default());
        let s = c.scenario::<f64>().unwrap();
        assert_eq!(
            s.atlas.samples().len(),
            BaseChartAtlas::<f64>::standard().samples().len()
        );
    }

    #[test]
    fn empty_text_lists_missing_sections() {
        let Err(Error::Config(v)) = ScenarioConfig::parse("") else {
            panic!()
        };
        assert_eq!(v.len(), 2);
        assert!(v.iter().any(|m| m.contains("[bundle]")) && v.iter().any(|m| m.contains("[run]")));
    }

    #[test]
    fn unknown_keys_get_suggestions_and_all_violations_are_listed() {
        let text = "[bundle]\nrank = 2\ndegres = [1, 1]\n\n[run]\ntheorem = [1]\n\n[sampeling]\n";
        let Err(Error::Config(v)) = ScenarioConfig::parse(text) else {
            panic!()
        };
        assert_eq!(v.len(), 3, "{v:?}");
        assert!(
            v[0].contains("did you mean `degrees`")
                || v.iter().any(|m| m.contains("did you mean `degrees`"))
        );
        assert!(v.iter().any(|m| m.contains("did you mean `theorems`")));
        assert!(v.iter().any(|m| m.contains("did you mean `sampling`")));
    }

    #[test]
    fn semantic_violations_are_collected() {
        let text =
            "[bundle]\nrank = 3\ndegrees = [1, 1]\n[metrics]\nomega = -1.0\n[run]\ntheorems = []\n";
        let Err(Error::Config(v)) = ScenarioConfig::parse(text) else {
            panic!()
        };
        assert_eq!(v.len(), 3, "{v:?}");
        let bad = "[bundle]\nrank = 2\ndegrees = [1, 1]\n[run]\ntheorems = [5]\n";
        assert!(matches!(ScenarioConfig::parse(bad), Err(Error::Config(_))));
    }

    #[test]
    fn builtin_example() {
        let c = ScenarioConfig::builtin("example-1").unwrap();
        assert_eq!(c.bundle.degrees, vec![9, 8, 7]);
        assert_eq!(c.metrics.omega, 7.0);
        assert_eq!(c.run.theorems, Theorem::ALL.to_vec());
        assert!(ScenarioConfig::builtin("nope").is_none());
        for name in BUILTINS {
            assert!(ScenarioConfig::builtin(name).is_some());
        }
    }

    #[test]
    fn round_trip() {
        for c in [
            ScenarioConfig::parse(MINIMAL).unwrap(),
            ScenarioConfig::builtin("example-1").unwrap(),
            ScenarioConfig::builtin("equal-degree").unwrap(),
        ] {
            let again = ScenarioConfig::parse(&c.to_toml()).unwrap();
            assert_eq!(again, c);
        }
    }

    #[test]
    fn missing_table_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.toml");
        std::fs::write(&p, "[bundle]\nrank = 2\ndegrees = [1, 1]\ntable = \"nothere.txt\"\n[run]\ntheorems = [1]\n").unwrap();
        let Err(Error::Config(v)) = ScenarioConfig::load(&p) else {
            panic!()
        };
        assert!(v[0].contains("nothere.txt"));
        assert!(matches!(
            ScenarioConfig::load(&dir.path().join("absent.toml")),
            Err(Error::Io { .. })
        ));
    }
}
