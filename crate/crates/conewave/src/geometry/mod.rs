//! Geodesic-flow analysis of the cross-section: distance and length
//! spectra, the non-resonant endpoint gate at time π, conjugate radii,
//! the curvature criteria for non-focusing propagation, microlocalizing
//! partitions of unity, and the cone chord quantities.

pub mod flow;
pub mod spectra;

pub use flow::{flow_with_jacobi, tangent_frame, FlowSample, Rk45};
pub use spectra::{distance_spectrum, length_spectrum, GeodesicRecord, LengthSpectrum};

use crate::cross_section::S2Point;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("shooting failed to converge: {0}")]
    ShootingNonconvergence(String),
    #[error("geodesic integrator failed: {0}")]
    IntegratorFailure(String),
    #[error("ball covering left nodes uncovered: {0}")]
    CoverFailure(String),
    #[error("numeric length-spectrum coverage too weak near π: {0}")]
    Inconclusive(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Arc-length profile of a surface of revolution: `u ↦ (f(u), g(u))` with
/// `f'² + g'² = 1`, metric `du² + f(u)² dφ²`, Gauss curvature `-f''/f`.
#[derive(Clone)]
pub struct RevolutionProfile {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub ddf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub u_range: (f64, f64),
}

impl RevolutionProfile {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ddf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        u_range: (f64, f64),
    ) -> Self {
        RevolutionProfile {
            f: Arc::new(f),
            df: Arc::new(df),
            ddf: Arc::new(ddf),
            u_range,
        }
    }
}

impl std::fmt::Debug for RevolutionProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RevolutionProfile(u ∈ [{}, {}])", self.u_range.0, self.u_range.1)
    }
}

/// Cross-section geometries with computable geodesic flow.
#[derive(Debug, Clone)]
pub enum SurfaceSpec {
    Sphere { radius: f64 },
    /// Flat torus `R²/(2πr_a Z × 2πr_b Z)`: circumferences `2πr_a`, `2πr_b`.
    FlatTorus { r_a: f64, r_b: f64 },
    Revolution(RevolutionProfile),
}

/// The cone chord data at cross-section time `s`:
/// `m_s = (r₁-r₂, √(2(1-cos s) r₁r₂))`, `n_s = (r₁+r₂, √(2(cosh s-1) r₁r₂))`,
/// and their lengths `d`, `d̃` — the distances the wave kernels oscillate on.
#[derive(Debug, Clone, Copy)]
pub struct ConeChord {
    pub r1: f64,
    pub r2: f64,
    pub s: f64,
    pub m_s: (f64, f64),
    pub n_s: (f64, f64),
    pub d: f64,
    pub d_tilde: f64,
}

/// `d̃(s; r₁, r₂) = √(r₁² + r₂² + 2 r₁ r₂ cosh s)`, defined for all s ≥ 0.
pub fn d_tilde(s: f64, r1: f64, r2: f64) -> f64 {
    (r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * s.cosh()).sqrt()
}

/// `d(s; r₁, r₂) = √(r₁² + r₂² - 2 r₁ r₂ cos s)` on `s ∈ [0, π]`.
pub fn chord_d(s: f64, r1: f64, r2: f64) -> f64 {
    (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * s.cos()).max(0.0).sqrt()
}

pub fn cone_chord(r1: f64, r2: f64, s: f64) -> Result<ConeChord, GeomError> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(GeomError::Domain(format!(
            "cone chord needs r₁, r₂ > 0, got ({r1}, {r2})"
        )));
    }
    if !(0.0..=std::f64::consts::PI).contains(&s) {
        return Err(GeomError::Domain(format!(
            "the m_s branch is defined for s ∈ [0, π], got {s}"
        )));
    }
    let m_s = (r1 - r2, (2.0 * (1.0 - s.cos()) * r1 * r2).max(0.0).sqrt());
    let n_s = (r1 + r2, (2.0 * (s.cosh() - 1.0) * r1 * r2).max(0.0).sqrt());
    Ok(ConeChord {
        r1,
        r2,
        s,
        m_s,
        n_s,
        d: (m_s.0 * m_s.0 + m_s.1 * m_s.1).sqrt(),
        d_tilde: (n_s.0 * n_s.0 + n_s.1 * n_s.1).sqrt(),
    })
}

/// Prop.-1.2 sufficient test for non-focusing propagation within time π:
/// sectional curvature `K < 1`, or simply connected with `1/2 ≤ K < 2`.
pub fn check_nfc_sufficient(k_min: f64, k_max: f64, simply_connected: bool) -> bool {
    k_max < 1.0 || (simply_connected && 0.5 <= k_min && k_max < 2.0)
}

/// Outcome of the non-resonant endpoint check: whether π avoids the closed
/// length spectrum, and by how much (clamped to 1).
#[derive(Debug, Clone)]
pub struct NrecReport {
    pub holds: bool,
    pub delta0: f64,
    /// lengths found below the horizon, for the record
    pub lengths: Vec<f64>,
}

/// Checks `π ∉ closure(𝔏(Y))` using the length spectrum up to `π + 1.1`.
pub fn check_nrec(spec: &SurfaceSpec) -> Result<NrecReport, GeomError> {
    let horizon = std::f64::consts::PI + 1.1;
    let ls = length_spectrum(spec, horizon)?;
    if !ls.complete_near(std::f64::consts::PI) {
        return Err(GeomError::Inconclusive(format!(
            "length-spectrum coverage confidence {:.2} too low near π",
            ls.confidence
        )));
    }
    let dist = ls
        .lengths
        .iter()
        .map(|l| (l - std::f64::consts::PI).abs())
        .fold(f64::INFINITY, f64::min);
    let holds = dist > 1e-9;
    Ok(NrecReport {
        holds,
        delta0: if holds { dist.min(1.0) } else { 0.0 },
        lengths: ls.lengths,
    })
}

/// Patch-diameter bound derived from the NREC gap: patches below this size
/// keep point pairs away from geodesics with length near π.
pub fn microlocal_diameter_bound(nrec: &NrecReport) -> f64 {
    0.5 * nrec.delta0
}

/// First conjugate length along the geodesic from `start` in `direction`,
/// or `+∞` if no normal Jacobi zero occurs before `π + ε`.
pub fn conjugate_radius(
    spec: &SurfaceSpec,
    start: &S2Point,
    direction: f64,
    epsilon: f64,
) -> Result<f64, GeomError> {
    if let SurfaceSpec::FlatTorus { .. } = spec {
        return Ok(f64::INFINITY); // K = 0: J(s) = s never vanishes again
    }
    let horizon = std::f64::consts::PI + epsilon;
    let mut bracket: Option<(f64, f64)> = None;
    let mut prev: Option<(f64, f64)> = None;
    flow_with_jacobi(spec, start, direction, horizon, 1e-10, |smp| {
        if bracket.is_none() {
            if let Some((s0, j0)) = prev {
                if s0 > 0.0 && j0 > 0.0 && smp.jacobi <= 0.0 {
                    bracket = Some((s0, smp.s));
                }
            }
            prev = Some((smp.s, smp.jacobi));
        }
    })?;
    let Some((mut lo, mut hi)) = bracket else {
        return Ok(f64::INFINITY);
    };
    // bisect the bracketed zero by re-integrating on the shrinking interval
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let end = flow_with_jacobi(spec, start, direction, mid, 1e-11, |_| {})?;
        if end.jacobi > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A smooth partition of unity on S² subordinate to geodesic balls.
#[derive(Debug, Clone)]
pub struct Microlocalizers {
    pub centers: Vec<S2Point>,
    pub radius: f64,
    sphere_radius: f64,
}

impl Microlocalizers {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    fn bump(&self, t: f64) -> f64 {
        if t >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - t * t)).exp()
        }
    }

    fn raw(&self, j: usize, p: &S2Point) -> f64 {
        let d = self.sphere_radius * self.centers[j].angle_to(p);
        self.bump(d / self.radius)
    }

    /// `Q_j(p)`, normalized so that `Σ_j Q_j ≡ 1` on the covered sphere.
    pub fn eval(&self, j: usize, p: &S2Point) -> f64 {
        let total: f64 = (0..self.centers.len()).map(|i| self.raw(i, p)).sum();
        if total <= 0.0 {
            0.0
        } else {
            self.raw(j, p) / total
        }
    }
}

/// Build smooth bumps on geodesic balls covering the round sphere, summing
/// to 1 everywhere. `patch_diameter` is a geodesic diameter.
pub fn build_microlocalizers(
    sphere_radius: f64,
    patch_diameter: f64,
) -> Result<Microlocalizers, GeomError> {
    if !(patch_diameter > 0.0) {
        return Err(GeomError::CoverFailure(
            "patch diameter must be positive".into(),
        ));
    }
    let diam_y = std::f64::consts::PI * sphere_radius;
    if patch_diameter >= diam_y {
        return Ok(Microlocalizers {
            centers: vec![S2Point::new(0.5, 0.0)],
            radius: 2.0 * diam_y,
            sphere_radius,
        });
    }
    let r_patch = 0.5 * patch_diameter;
    // Fibonacci lattice sized so the covering radius sits safely inside the
    // bump support, then verified on a dense grid
    let angular_radius = r_patch / sphere_radius;
    let mut count = ((2.6 / (0.75 * angular_radius)).powi(2).ceil() as usize).max(6);
    for _attempt in 0..4 {
        let centers = fibonacci_sphere(count);
        let ml = Microlocalizers {
            centers,
            radius: r_patch,
            sphere_radius,
        };
        if covering_ok(&ml) {
            return Ok(ml);
        }
        count *= 2;
    }
    Err(GeomError::CoverFailure(format!(
        "could not cover the sphere with diameter-{patch_diameter} patches"
    )))
}

fn fibonacci_sphere(count: usize) -> Vec<S2Point> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            S2Point::new(
                z.acos(),
                (golden * i as f64).rem_euclid(2.0 * std::f64::consts::PI),
            )
        })
        .collect()
}

fn covering_ok(ml: &Microlocalizers) -> bool {
    // dense check: every grid point must see at least one strictly
    // positive bump
    let n_theta = 60;
    let n_phi = 120;
    for i in 0..=n_theta {
        let theta = std::f64::consts::PI * i as f64 / n_theta as f64;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            let p = S2Point::new(theta, phi);
            let total: f64 = (0..ml.centers.len()).map(|c| ml.raw(c, &p)).sum();
            if total <= 1e-300 {
                return false;
            }
        }
    }
    true
}
