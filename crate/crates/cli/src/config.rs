//! Experiment configuration: one TOML document per run.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

/// The only schema version this build understands.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Curvature,
    FlowNorms,
    GrowthFit,
    DistanceCheck,
    Distortion,
    GtReport,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Curvature => "curvature",
            Self::FlowNorms => "flow-norms",
            Self::GrowthFit => "growth-fit",
            Self::DistanceCheck => "distance-check",
            Self::Distortion => "distortion",
            Self::GtReport => "gt-report",
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_fiber_dim() -> usize {
    1
}

fn default_r_max() -> f64 {
    40.0
}

fn default_profile() -> String {
    "linear-quintic".into()
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Upper half-space of curvature `-b²`.
    UpperHalfSpace {
        dim: usize,
        #[serde(default = "one")]
        b: f64,
    },
    /// The same space as a warped product over a totally geodesic hyperplane
    /// of dimension `base_dim`.
    WarpedHyperbolic {
        base_dim: usize,
        #[serde(default = "one")]
        b: f64,
    },
    /// Smoothed cone chart; `r0` defaults to `rho / 4`. With `rescale` the
    /// metric is scaled so its largest curvature is −1.
    GtCone {
        k: u32,
        rho: f64,
        r0: Option<f64>,
        #[serde(default = "default_fiber_dim")]
        fiber_dim: usize,
        #[serde(default = "default_r_max")]
        r_max: f64,
        #[serde(default = "default_profile")]
        profile: String,
        #[serde(default = "yes")]
        rescale: bool,
    },
}

/// Sampling grid for the `curvature` command.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureSection {
    /// `[lo, hi, count]` per coordinate; a model-specific grid when absent.
    pub axes: Option<Vec<(f64, f64, usize)>>,
    pub random_planes: Option<usize>,
}

fn default_q_count() -> usize {
    20
}

fn default_q_radius() -> f64 {
    2.0
}

fn default_q_r_range() -> (f64, f64) {
    (0.5, 8.0)
}

fn default_t_min() -> f64 {
    -6.0
}

fn default_t_max() -> f64 {
    6.0
}

fn default_t_count() -> usize {
    25
}

fn default_fit_t_min() -> f64 {
    2.0
}

/// Hypersurface and `(q, t)` grid for `flow-norms` and `growth-fit`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    /// `warped-zero-slice` or `cone-reflection-slice`; defaults to the
    /// slice that matches the model.
    pub hypersurface: Option<String>,
    /// Explicit base points; when absent `q_count` points are drawn with
    /// the run seed.
    pub q_points: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_q_count")]
    pub q_count: usize,
    /// Base-ball radius (warped slice) or fiber half-width (cone slice).
    #[serde(default = "default_q_radius")]
    pub q_radius: f64,
    /// Radial range for cone-slice base points.
    #[serde(default = "default_q_r_range")]
    pub q_r_range: (f64, f64),
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_t_count")]
    pub t_count: usize,
    /// Smallest `|t|` used by the exponent fit.
    #[serde(default = "default_fit_t_min")]
    pub fit_t_min: f64,
}

impl Default for FlowSection {
    fn default() -> Self {
        Self {
            hypersurface: None,
            q_points: None,
            q_count: default_q_count(),
            q_radius: default_q_radius(),
            q_r_range: default_q_r_range(),
            t_min: default_t_min(),
            t_max: default_t_max(),
            t_count: default_t_count(),
            fit_t_min: default_fit_t_min(),
        }
    }
}

fn default_n_pairs_distance() -> usize {
    100
}

fn default_ball_radius() -> f64 {
    4.0
}

fn default_rel_tol() -> f64 {
    1e-5
}

fn default_symmetry_tol() -> f64 {
    1e-6
}

/// Pair sampling for `distance-check`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceSection {
    #[serde(default = "default_n_pairs_distance")]
    pub n_pairs: usize,
    /// Geodesic ball radius around the model's reference point.
    #[serde(default = "default_ball_radius")]
    pub radius: f64,
    /// Accepted relative gap between shooting and closed-form distances.
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_symmetry_tol")]
    pub symmetry_tol: f64,
}

impl Default for DistanceSection {
    fn default() -> Self {
        Self {
            n_pairs: default_n_pairs_distance(),
            radius: default_ball_radius(),
            rel_tol: default_rel_tol(),
            symmetry_tol: default_symmetry_tol(),
        }
    }
}

fn default_map() -> String {
    "identity".into()
}

fn default_n_pairs_distortion() -> usize {
    1000
}

fn three() -> f64 {
    3.0
}

/// Comparison map and pair box for `distortion`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistortionSection {
    /// `identity`, `scaling` (uses `lambda`) or `shear` (uses `a`).
    #[serde(default = "default_map")]
    pub map: String,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "default_n_pairs_distortion")]
    pub n_pairs: usize,
    #[serde(default = "three")]
    pub radius: f64,
    #[serde(default = "three")]
    pub t_max: f64,
}

impl Default for DistortionSection {
    fn default() -> Self {
        Self {
            map: default_map(),
            lambda: 1.0,
            a: 0.0,
            beta: 1.0,
            n_pairs: default_n_pairs_distortion(),
            radius: 3.0,
            t_max: 3.0,
        }
    }
}

fn default_k() -> u32 {
    2
}

fn default_rhos() -> Vec<f64> {
    vec![2.0, 4.0, 6.0, 8.0]
}

fn default_n_r() -> usize {
    400
}

/// Smoothing parameters scanned by `gt-report`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GtSection {
    #[serde(default = "default_k")]
    pub k: u32,
    #[serde(default = "default_rhos")]
    pub rho: Vec<f64>,
    /// Transition start as a fraction of `rho`.
    pub r0_fraction: Option<f64>,
    #[serde(default = "default_profile")]
    pub profile: String,
    #[serde(default = "default_n_r")]
    pub n_r: usize,
    pub random_planes: Option<usize>,
    #[serde(default = "default_fiber_dim")]
    pub fiber_dim: usize,
}

impl Default for GtSection {
    fn default() -> Self {
        Self {
            k: default_k(),
            rho: default_rhos(),
            r0_fraction: None,
            profile: default_profile(),
            n_r: default_n_r(),
            random_planes: None,
            fiber_dim: default_fiber_dim(),
        }
    }
}

fn default_tol() -> f64 {
    1e-9
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub command: Command,
    /// Required by every command except `gt-report`.
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
    /// Integration tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub curvature: CurvatureSection,
    #[serde(default)]
    pub flow: FlowSection,
    #[serde(default)]
    pub distance: DistanceSection,
    #[serde(default)]
    pub distortion: DistortionSection,
    #[serde(default)]
    pub gt: GtSection,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub tol: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(mut self, o: &Overrides) -> Result<Self, CliError> {
        if let Some(out) = &o.out {
            self.out.clone_from(out);
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(workers) = o.workers {
            self.workers = workers;
        }
        if let Some(tol) = o.tol {
            self.tol = tol;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        if self.command != Command::GtReport && self.model.is_none() {
            return bad(format!("command {} needs a [model] section", self.command.name()));
        }
        let f = &self.flow;
        if !(f.t_max >= f.t_min) || f.t_count == 0 {
            return bad("flow grid needs t_max >= t_min and t_count >= 1".into());
        }
        if f.q_points.is_none() && f.q_count == 0 {
            return bad("flow grid needs q_points or q_count >= 1".into());
        }
        if !(f.q_radius > 0.0) || !(f.q_r_range.1 > f.q_r_range.0) || !(f.fit_t_min >= 0.0) {
            return bad("flow grid ranges must be positive and ordered".into());
        }
        let d = &self.distance;
        if d.n_pairs == 0 || !(d.radius > 0.0) || !(d.rel_tol > 0.0) || !(d.symmetry_tol > 0.0) {
            return bad("distance section needs positive n_pairs, radius and tolerances".into());
        }
        let s = &self.distortion;
        if s.n_pairs == 0 || !(s.radius > 0.0) || !(s.t_max >= 0.0) || !(s.beta >= 1.0) {
            return bad("distortion section needs n_pairs >= 1, radius > 0, t_max >= 0 and beta >= 1".into());
        }
        if !["identity", "scaling", "shear"].contains(&s.map.as_str()) {
            return bad(format!("unknown base map {:?}", s.map));
        }
        let g = &self.gt;
        if g.rho.is_empty() || g.n_r == 0 || g.k == 0 {
            return bad("gt section needs k >= 1, at least one rho and n_r >= 1".into());
        }
        if let Some(frac) = g.r0_fraction {
            if !(frac > 0.0 && frac < 1.0) {
                return bad("r0_fraction must lie in (0, 1)".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
command = "growth-fit"
[model]
kind = "warped-hyperbolic"
base_dim = 2
"#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.command, Command::GrowthFit);
        assert_eq!(c.model, Some(ModelSpec::WarpedHyperbolic { base_dim: 2, b: 1.0 }));
        assert_eq!(c.tol, 1e-9);
        assert_eq!(c.flow.t_count, 25);
        assert_eq!(c.gt.rho, vec![2.0, 4.0, 6.0, 8.0]);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(ExperimentConfig::from_toml("schema_version = 2\ncommand = \"gt-report\"").is_err());
        assert!(ExperimentConfig::from_toml("schema_version = 1\ncommand = \"nope\"").is_err());
        assert!(ExperimentConfig::from_toml("schema_version = 1\ncommand = \"curvature\"").is_err());
        assert!(ExperimentConfig::from_toml(&format!("{MINIMAL}\nextra = 1")).is_err());
        let neg = MINIMAL.replace("command", "tol = -1.0\ncommand");
        assert!(matches!(ExperimentConfig::from_toml(&neg), Err(CliError::Config(_))));
    }

    #[test]
    fn overrides_take_precedence() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let o = Overrides { seed: Some(5), workers: Some(2), tol: Some(1e-8), out: Some("x".into()) };
        let c = c.apply(&o).unwrap();
        assert_eq!((c.seed, c.workers, c.tol, c.out), (5, 2, 1e-8, PathBuf::from("x")));
        let bad = Overrides { tol: Some(0.0), ..Overrides::default() };
        assert!(ExperimentConfig::from_toml(MINIMAL).unwrap().apply(&bad).is_err());
    }
}
