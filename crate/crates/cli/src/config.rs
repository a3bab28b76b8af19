//! Run configuration: a single JSON file with explicit defaults, hashed
//! over its semantic content so identical configs map to identical output.

use anyhow::{bail, Context, Result};
use conewave::cross_section::{CrossSectionSpec, S2Field};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub cross_section: CrossSectionConfig,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default)]
    pub radial: RadialConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

fn default_modes() -> usize {
    900
}
fn default_seed() -> u64 {
    7
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CrossSectionConfig {
    RoundSphere {
        dim: usize,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        a_const: f64,
    },
    GalerkinSphere2 {
        #[serde(default = "default_degree")]
        max_degree: usize,
        #[serde(default)]
        a: PotentialConfig,
        #[serde(default)]
        magnetic: MagneticConfig,
    },
}

fn one() -> f64 {
    1.0
}
fn default_degree() -> usize {
    24
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    /// `a(θ, φ) = base + amplitude·cos θ`
    Zonal {
        #[serde(default)]
        base: f64,
        amplitude: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum MagneticConfig {
    #[default]
    None,
    /// pure gauge `𝒜 = d(c cos θ)`: spectrum must match the free one
    Gradient { amplitude: f64 },
    /// azimuthal field `𝒜 = c sin²θ dφ` (smooth at the poles)
    Azimuthal { amplitude: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
}

impl Default for RadialConfig {
    fn default() -> Self {
        RadialConfig {
            r_min: 0.05,
            r_max: 8.0,
            nodes: 400,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub dual_rep: f64,
    pub series_tail: f64,
    pub stone: f64,
    pub slope: f64,
    pub quad_budget: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            dual_rep: 1e-3,
            series_tail: 1e-8,
            stone: 1e-3,
            slope: 0.15,
            quad_budget: 400_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub crosscheck: CrosscheckConfig,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default)]
    pub strichartz: StrichartzConfig,
    #[serde(default)]
    pub counterexample: CounterexampleConfig,
    #[serde(default)]
    pub geometry: GeometryConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosscheckConfig {
    pub lambdas: Vec<f64>,
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
}

impl Default for CrosscheckConfig {
    fn default() -> Self {
        CrosscheckConfig {
            lambdas: vec![0.8, 1.2, 1.6, 2.0, 2.4],
            radii: vec![0.7, 1.0, 1.4],
            angles: vec![0.4, 0.8, 1.3],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub band: i32,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    pub patch_diameter: f64,
    pub small_radius_radii: Vec<f64>,
    pub light_cone_spacing: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            band: 0,
            t_min: 4.0,
            t_max: 64.0,
            t_count: 13,
            radii: vec![2.0, 2.8, 3.6, 4.4, 5.2, 6.0],
            angles: vec![0.05, 0.15, 0.25, 0.35],
            patch_diameter: 0.45,
            small_radius_radii: vec![0.1, 0.2, 0.4, 0.7, 1.0],
            light_cone_spacing: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrichartzConfig {
    pub pairs: Vec<(f64, f64)>,
    pub ensemble: usize,
    pub t_max: f64,
    pub t_count: usize,
    pub angular_modes: usize,
}

impl Default for StrichartzConfig {
    fn default() -> Self {
        StrichartzConfig {
            pairs: vec![(f64::INFINITY, 2.0), (4.0, 4.0)],
            ensemble: 10,
            t_max: 64.0,
            t_count: 33,
            angular_modes: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub ps: Vec<f64>,
    pub eps_list: Vec<f64>,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            ps: vec![24.0, 12.0, 6.0],
            eps_list: vec![1e-1, 1e-2, 1e-3],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// horizon slack ε in the distance-spectrum window [0, π + ε)
    pub epsilon: f64,
    pub conjugate_directions: usize,
    /// override the flow geometry (defaults to the cross-section sphere)
    #[serde(default)]
    pub surface: Option<SurfaceConfig>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            epsilon: 0.05,
            conjugate_directions: 8,
            surface: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceConfig {
    Sphere { radius: f64 },
    FlatTorus { r_a: f64, r_b: f64 },
}

impl SurfaceConfig {
    pub fn to_spec(&self) -> conewave::geometry::SurfaceSpec {
        match self {
            SurfaceConfig::Sphere { radius } => {
                conewave::geometry::SurfaceSpec::Sphere { radius: *radius }
            }
            SurfaceConfig::FlatTorus { r_a, r_b } => {
                conewave::geometry::SurfaceSpec::FlatTorus { r_a: *r_a, r_b: *r_b }
            }
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text).context("parsing config JSON")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            bail!("cone dimension must be ≥ 3");
        }
        if self.radial.r_min <= 0.0 || self.radial.r_max <= self.radial.r_min {
            bail!("radial grid needs 0 < r_min < r_max");
        }
        let t = &self.tolerances;
        if !(t.dual_rep > 0.0 && t.series_tail > 0.0 && t.stone > 0.0 && t.slope > 0.0) {
            bail!("all tolerances must be positive");
        }
        Ok(())
    }

    /// Deterministic hash of the semantic content: serde_json maps are
    /// sorted, so serializing the materialized config is canonical.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canon = serde_json::to_string(&value).expect("canonical form");
        let mut hasher = Sha256::new();
        hasher.update(canon.as_bytes());
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Apply a `--tol-override KEY=VAL` pair.
    pub fn override_tolerance(&mut self, key: &str, val: &str) -> Result<()> {
        let parse = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .with_context(|| format!("tolerance value {v} is not a number"))
        };
        match key {
            "dual_rep" => self.tolerances.dual_rep = parse(val)?,
            "series_tail" => self.tolerances.series_tail = parse(val)?,
            "stone" => self.tolerances.stone = parse(val)?,
            "slope" => self.tolerances.slope = parse(val)?,
            "quad_budget" => {
                self.tolerances.quad_budget = val
                    .parse::<usize>()
                    .with_context(|| format!("budget {val} is not an integer"))?
            }
            _ => bail!("unknown tolerance key {key}"),
        }
        Ok(())
    }

    pub fn cross_section_spec(&self) -> CrossSectionSpec {
        match &self.cross_section {
            CrossSectionConfig::RoundSphere {
                dim,
                radius,
                a_const,
            } => CrossSectionSpec::RoundSphere {
                dim: *dim,
                radius: *radius,
                a_const: *a_const,
            },
            CrossSectionConfig::GalerkinSphere2 {
                max_degree,
                a,
                magnetic,
            } => {
                let a_field = match a {
                    PotentialConfig::Zero => S2Field::zero(),
                    PotentialConfig::Constant { value } => S2Field::constant(*value),
                    PotentialConfig::Zonal { base, amplitude } => {
                        let (b, c) = (*base, *amplitude);
                        S2Field::from_fn(move |theta, _| b + c * theta.cos())
                    }
                };
                let (a_theta, a_phi) = match magnetic {
                    MagneticConfig::None => (S2Field::zero(), S2Field::zero()),
                    MagneticConfig::Gradient { amplitude } => {
                        let c = *amplitude;
                        (
                            S2Field::from_fn(move |theta, _| -c * theta.sin()),
                            S2Field::zero(),
                        )
                    }
                    MagneticConfig::Azimuthal { amplitude } => {
                        let c = *amplitude;
                        (
                            S2Field::zero(),
                            S2Field::from_fn(move |theta, _| c * theta.sin().powi(2)),
                        )
                    }
                };
                CrossSectionSpec::GalerkinSphere2 {
                    max_degree: *max_degree,
                    a: a_field,
                    a_theta,
                    a_phi,
                }
            }
        }
    }
}
