//! Functional calculus for ℒ on the cone: radial grids with the `r^{n-1}`
//! measure, Hankel transforms, operator/propagator kernels, wave
//! evolution, Littlewood–Paley bands, Sobolev norms and mode projections.

pub mod evolve;
pub mod hankel;
pub mod kernels;

pub use evolve::{mode_project, ConeFunction, WaveEvolver};
pub use hankel::hankel_transform;
pub use kernels::{
    halfwave_band_kernel, mode_kernel, operator_kernel, schrodinger_kernel_ct,
    schrodinger_kernel_modesum, BandKernelTable, RadiusRows,
};

use crate::quad::GlRule;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PropagatorError {
    #[error("oscillation unresolved by the spectral grid: {0}")]
    UnresolvedOscillation(String),
    #[error("radial tail not negligible: boundary mass {0:.3e} exceeds 1e-8")]
    TailWarning(f64),
    #[error(transparent)]
    Quadrature(#[from] crate::quad::QuadError),
    #[error(transparent)]
    CrossSection(#[from] crate::cross_section::CrossSectionError),
    #[error(transparent)]
    SpecFun(#[from] crate::specfun::SpecFunError),
    #[error("configuration error: {0}")]
    Config(String),
}

/// Radial quadrature grid on `[r_min, r_max]` with the cone measure
/// `r^{n-1} dr` folded into the weights. Composite Gauss–Legendre panels.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
}

impl RadialGrid {
    pub fn new(n: usize, r_min: f64, r_max: f64, count: usize) -> Self {
        assert!(n >= 3 && r_min > 0.0 && r_max > r_min && count >= 16);
        let per_panel = 16;
        let panels = count.div_ceil(per_panel);
        let rule = GlRule::new(per_panel);
        let mut nodes = Vec::with_capacity(panels * per_panel);
        let mut weights = Vec::with_capacity(panels * per_panel);
        let h = (r_max - r_min) / panels as f64;
        for p in 0..panels {
            let lo = r_min + p as f64 * h;
            for (x, w) in rule.mapped(lo, lo + h) {
                nodes.push(x);
                weights.push(w * x.powi(n as i32 - 1));
            }
        }
        RadialGrid {
            n,
            nodes,
            weights,
            r_min,
            r_max,
        }
    }

    /// The default working grid: 400 nodes on [0.05, 8].
    pub fn default_for(n: usize) -> Self {
        RadialGrid::new(n, 0.05, 8.0, 400)
    }

    /// Grid with geometrically graded panels near the cone tip, for modes
    /// with ν < (n-2)/2 whose radial profiles behave like r^{ν-(n-2)/2}
    /// at the origin.
    pub fn graded(n: usize, r_min: f64, r_max: f64, count: usize) -> Self {
        assert!(n >= 3 && r_min > 0.0 && r_max > 1.0 && count >= 64);
        let per_panel = 16;
        let rule = GlRule::new(per_panel);
        let mut bounds = vec![r_min];
        let mut b = r_min;
        while b < 1.0 {
            b = (b * 2.0).min(1.0);
            bounds.push(b);
        }
        let uniform_panels = (count / per_panel).saturating_sub(bounds.len() - 1).max(8);
        let h = (r_max - 1.0) / uniform_panels as f64;
        for p in 1..=uniform_panels {
            bounds.push(1.0 + p as f64 * h);
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in bounds.windows(2) {
            for (x, wt) in rule.mapped(w[0], w[1]) {
                nodes.push(x);
                weights.push(wt * x.powi(n as i32 - 1));
            }
        }
        RadialGrid {
            n,
            nodes,
            weights,
            r_min,
            r_max,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&r, &w)| w * f(r))
            .sum()
    }
}

/// Plain (no measure) quadrature grid in the spectral variable ρ,
/// sized to resolve oscillations `e^{iρΦ}` up to a given phase scale.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
    pub max_spacing: f64,
}

impl SpectralGrid {
    /// Grid on `[lo, hi]` resolving `e^{iρΦ}` for `|Φ| ≤ phase_scale`;
    /// sized so that both the 12-points-per-period rule and the kernel
    /// Nyquist guard `λ_max·Φ·Δλ ≤ 0.5` hold by construction.
    pub fn resolve(lo: f64, hi: f64, phase_scale: f64) -> Self {
        assert!(hi > lo && lo >= 0.0);
        let per_panel = 16;
        let phi = phase_scale.abs().max(1.0);
        let target_gap = (2.0 * std::f64::consts::PI / (12.0 * phi)).min(0.4 / (hi * phi));
        // the largest interior gap of a 16-node Gauss panel is ≈ 0.1·width
        let panel_width = target_gap / 0.1;
        let panels = ((hi - lo) / panel_width).ceil() as usize + 1;
        let panels = panels.max(2);
        let rule = GlRule::new(per_panel);
        let mut nodes = Vec::with_capacity(panels * per_panel);
        let mut weights = Vec::with_capacity(panels * per_panel);
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let a = lo + p as f64 * h;
            for (x, w) in rule.mapped(a, a + h) {
                nodes.push(x);
                weights.push(w);
            }
        }
        let max_spacing = nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0_f64, f64::max);
        SpectralGrid {
            nodes,
            weights,
            lo,
            hi,
            max_spacing,
        }
    }

    /// Grid covering the dyadic band `[2^{j-1}, 2^{j+1}]`.
    pub fn for_band(j: i32, phase_scale: f64) -> Self {
        let lo = 2f64.powi(j - 1);
        let hi = 2f64.powi(j + 1);
        SpectralGrid::resolve(lo, hi, phase_scale)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The spec's Nyquist guard for kernel quadrature at radii `r1, r2`.
    pub fn check_resolves(&self, r1: f64, r2: f64, t: f64) -> Result<(), PropagatorError> {
        let scale = r1.max(r2) + t.abs();
        if self.hi * scale * self.max_spacing > 0.5 {
            return Err(PropagatorError::UnresolvedOscillation(format!(
                "λ_max·scale·Δλ = {:.3} > 0.5 (λ_max={}, scale={scale}, Δλ={:.4})",
                self.hi * scale * self.max_spacing,
                self.hi,
                self.max_spacing
            )));
        }
        Ok(())
    }
}

/// Smooth cutoff χ: 1 on [0, 1], 0 on [2, ∞), built from the standard
/// `exp(-1/x)` mollifier.
pub fn chi_cutoff(x: f64) -> f64 {
    fn g(s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else {
            (-1.0 / s).exp()
        }
    }
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        0.0
    } else {
        let a = g(2.0 - x);
        a / (a + g(x - 1.0))
    }
}

/// The Littlewood–Paley bump `φ(λ) = χ(λ) - χ(2λ)`, supported in [1/2, 2],
/// with `Σ_j φ(2^{-j}λ) = 1` for every λ > 0 by telescoping.
pub fn lp_bump(lambda: f64) -> f64 {
    chi_cutoff(lambda) - chi_cutoff(2.0 * lambda)
}

/// A dyadic frequency band `λ ~ 2^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LPBand {
    pub j: i32,
}

impl LPBand {
    pub fn eval(&self, lambda: f64) -> f64 {
        lp_bump(2f64.powi(-self.j) * lambda)
    }

    pub fn support(&self) -> (f64, f64) {
        (2f64.powi(self.j - 1), 2f64.powi(self.j + 1))
    }
}
