//! The angular side of the cone: builds `L = L_{𝒜,a}` on the closed
//! cross-section `Y`, solves its eigenproblem, and provides the
//! functional calculus `F(√P)` on `Y`, with `P = L + (n-2)²/4`.
//!
//! Two backends cover the spec'd geometry:
//! * analytic round spheres `S^{n-1}` of any radius with constant `a`
//!   (zonal kernels, any `n ≥ 3`);
//! * a spherical-harmonic Galerkin solver on the unit `S²` for smooth
//!   potentials `a(x̂)` and real 1-forms `𝒜(x̂)` (cone dimension 3).

pub mod galerkin;
pub mod harmonics;
pub mod zonal;

pub use harmonics::{S2Point, S2Quadrature};
pub use zonal::ZonalSphere;

use harmonics::{basis_size, eval_real_sh};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CrossSectionError {
    #[error("positivity violated: μ₀ = {mu0} with shift (n-2)²/4 = {shift} gives μ₀ + shift = {} ≤ 0", mu0 + shift)]
    PositivityViolation { mu0: f64, shift: f64 },
    #[error("Galerkin eigenvalues did not settle: {0}")]
    ConvergenceFailure(String),
    #[error("mode-sum tail estimate {estimate:.3e} exceeds tolerance {tol:.3e}")]
    TailEstimateExceeded { estimate: f64, tol: f64 },
    #[error("this backend needs explicit S² points, not a bare angle")]
    UnsupportedPair,
    #[error("configuration error: {0}")]
    Config(String),
}

/// A scalar field on S², given in colatitude/longitude coordinates.
#[derive(Clone)]
pub struct S2Field(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl S2Field {
    pub fn zero() -> Self {
        S2Field(Arc::new(|_, _| 0.0))
    }
    pub fn constant(c: f64) -> Self {
        S2Field(Arc::new(move |_, _| c))
    }
    pub fn from_fn<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        S2Field(Arc::new(f))
    }
    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        (self.0)(theta, phi)
    }
}

impl std::fmt::Debug for S2Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "S2Field(..)")
    }
}

/// What lives on the cross-section.
#[derive(Debug, Clone)]
pub enum CrossSectionSpec {
    /// Round `S^{n-1}` of the given radius, `𝒜 = 0`, constant `a`.
    RoundSphere { dim: usize, radius: f64, a_const: f64 },
    /// Unit S² Galerkin with smooth `a` and real 1-form `𝒜 = A_θ dθ + A_φ dφ`.
    GalerkinSphere2 {
        max_degree: usize,
        a: S2Field,
        a_theta: S2Field,
        a_phi: S2Field,
    },
}

/// One eigenvalue level: `μ` of `L`, the Bessel order `ν = √(μ + (n-2)²/4)`,
/// and the multiplicity of the level.
#[derive(Debug, Clone, Copy)]
pub struct Level {
    pub mu: f64,
    pub nu: f64,
    pub mult: usize,
}

enum Backend {
    Zonal(ZonalSphere),
    /// S² harmonic backend: eigenfunctions as coefficient columns over the
    /// real harmonic basis (`None` = the basis itself, for `𝒜 = 0`,
    /// constant `a`), plus the quadrature used for projections.
    HarmonicS2 {
        basis_degree: usize,
        coeffs: Option<DMatrix<Complex64>>,
        quad: S2Quadrature,
        sup_by_mode: Vec<f64>,
    },
}

impl std::fmt::Debug for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Zonal(z) => write!(f, "Zonal(S^{} r={})", z.dim, z.radius),
            Backend::HarmonicS2 { basis_degree, .. } => {
                write!(f, "HarmonicS2(L={basis_degree})")
            }
        }
    }
}

/// A pair of cross-section points, either as explicit S² coordinates or —
/// for rotation-invariant backends — just their mutual geodesic angle on
/// the unit sphere.
#[derive(Debug, Clone, Copy)]
pub enum Pair {
    Angle(f64),
    Points(S2Point, S2Point),
}

impl Pair {
    pub fn angle(&self) -> f64 {
        match self {
            Pair::Angle(g) => *g,
            Pair::Points(x, y) => x.angle_to(y),
        }
    }
}

/// The solved angular spectrum: eigenvalues with multiplicity, Bessel
/// orders, and whatever backend data is needed to evaluate eigenfunction
/// pair sums. Immutable after construction; freely shared across threads.
#[derive(Debug)]
pub struct AngularSpectrum {
    pub n: usize,
    pub levels: Vec<Level>,
    pub nu0: f64,
    backend: Backend,
}

/// Mode cutoff for kernel sums at spectral parameter λ and radius ≤ r_max:
/// `K = ⌈e·λ·r_max/2⌉ + 20`, justified by the super-exponential decay of
/// `J_ν(λr)` once `ν > e·λ·r/2`.
pub fn mode_cutoff(lambda: f64, r_max: f64) -> usize {
    (std::f64::consts::E * lambda * r_max / 2.0).ceil() as usize + 20
}

/// First `count` eigenpairs (with multiplicity) of `L_{𝒜,a}` on the given
/// cross-section, for a cone of dimension `n`.
pub fn eigensolve(
    spec: &CrossSectionSpec,
    n: usize,
    count: usize,
) -> Result<AngularSpectrum, CrossSectionError> {
    if n < 3 {
        return Err(CrossSectionError::Config(format!(
            "cone dimension must be ≥ 3, got {n}"
        )));
    }
    if count == 0 {
        return Err(CrossSectionError::Config("need count ≥ 1".into()));
    }
    let shift = (n as f64 - 2.0).powi(2) / 4.0;
    match spec {
        CrossSectionSpec::RoundSphere { dim, radius, a_const } => {
            if *dim != n - 1 {
                return Err(CrossSectionError::Config(format!(
                    "cross-section S^{dim} does not match cone dimension {n}"
                )));
            }
            if !(*radius > 0.0) {
                return Err(CrossSectionError::Config("radius must be positive".into()));
            }
            let mut levels = Vec::new();
            let mut modes = 0usize;
            let mut l = 0usize;
            while modes < count {
                let mu = (l * (l + n - 2)) as f64 / (radius * radius) + a_const;
                let mult = zonal::harmonic_multiplicity(*dim, l);
                let p = mu + shift;
                if levels.is_empty() && p <= 0.0 {
                    return Err(CrossSectionError::PositivityViolation { mu0: mu, shift });
                }
                levels.push(Level {
                    mu,
                    nu: p.sqrt(),
                    mult,
                });
                modes += mult;
                l += 1;
            }
            let zonal = ZonalSphere::new(*dim, *radius, levels.len() - 1);
            Ok(AngularSpectrum {
                n,
                nu0: levels[0].nu,
                levels,
                backend: Backend::Zonal(zonal),
            })
        }
        CrossSectionSpec::GalerkinSphere2 {
            max_degree,
            a,
            a_theta,
            a_phi,
        } => {
            if n != 3 {
                return Err(CrossSectionError::Config(
                    "the Galerkin backend covers S², i.e. cone dimension 3".into(),
                ));
            }
            let sol = galerkin::solve(a, a_theta, a_phi, *max_degree, count)?;
            let mu0 = sol.eigenvalues[0];
            if mu0 + shift <= 0.0 {
                return Err(CrossSectionError::PositivityViolation { mu0, shift });
            }
            let levels: Vec<Level> = sol
                .eigenvalues
                .iter()
                .map(|&mu| Level {
                    mu,
                    nu: (mu + shift).sqrt(),
                    mult: 1,
                })
                .collect();
            let quad = S2Quadrature::for_degree(*max_degree);
            let sup_by_mode = harmonic_sup_norms(*max_degree, Some(&sol.coeffs), &quad);
            Ok(AngularSpectrum {
                n,
                nu0: levels[0].nu,
                levels,
                backend: Backend::HarmonicS2 {
                    basis_degree: sol.max_degree,
                    coeffs: Some(sol.coeffs),
                    quad,
                    sup_by_mode,
                },
            })
        }
    }
}

/// Re-run the Galerkin solve with a bumped basis degree and flag
/// eigenvalues that moved more than `tol`.
pub fn eigensolve_checked(
    spec: &CrossSectionSpec,
    n: usize,
    count: usize,
    tol: f64,
) -> Result<AngularSpectrum, CrossSectionError> {
    let base = eigensolve(spec, n, count)?;
    if let CrossSectionSpec::GalerkinSphere2 {
        max_degree,
        a,
        a_theta,
        a_phi,
    } = spec
    {
        let bumped_spec = CrossSectionSpec::GalerkinSphere2 {
            max_degree: max_degree + 4,
            a: a.clone(),
            a_theta: a_theta.clone(),
            a_phi: a_phi.clone(),
        };
        let bumped = eigensolve(&bumped_spec, n, count)?;
        for (k, (b0, b1)) in base.levels.iter().zip(&bumped.levels).enumerate() {
            let drift = (b0.mu - b1.mu).abs();
            if drift > tol * (1.0 + b0.mu.abs()) {
                return Err(CrossSectionError::ConvergenceFailure(format!(
                    "eigenvalue {k} moved by {drift:.3e} when max_degree was bumped"
                )));
            }
        }
    }
    Ok(base)
}

fn harmonic_sup_norms(
    basis_degree: usize,
    coeffs: Option<&DMatrix<Complex64>>,
    quad: &S2Quadrature,
) -> Vec<f64> {
    match coeffs {
        None => {
            // the basis itself: level sup = max over nodes per column
            let size = basis_size(basis_degree);
            let mut sup = vec![0.0_f64; size];
            for p in &quad.points {
                let e = eval_real_sh(basis_degree, p);
                for (s, v) in sup.iter_mut().zip(&e.value) {
                    *s = s.max(v.abs());
                }
            }
            sup
        }
        Some(c) => {
            let k = c.ncols();
            let mut sup = vec![0.0_f64; k];
            for p in &quad.points {
                let e = eval_real_sh(basis_degree, p);
                for (j, s) in sup.iter_mut().enumerate() {
                    let mut v = Complex64::new(0.0, 0.0);
                    for (r, &phi) in e.value.iter().enumerate() {
                        v += c[(r, j)] * phi;
                    }
                    *s = s.max(v.norm());
                }
            }
            sup
        }
    }
}

impl AngularSpectrum {
    pub fn mode_count(&self) -> usize {
        self.levels.iter().map(|l| l.mult).sum()
    }

    /// Bessel orders expanded with multiplicity, ascending.
    pub fn mode_nus(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.mode_count());
        for l in &self.levels {
            out.extend(std::iter::repeat_n(l.nu, l.mult));
        }
        out
    }

    /// Eigenvalues of `L` expanded with multiplicity, ascending.
    pub fn mode_mus(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.mode_count());
        for l in &self.levels {
            out.extend(std::iter::repeat_n(l.mu, l.mult));
        }
        out
    }

    /// For the analytic S² spectrum, rebuild with the harmonic backend so
    /// that mode projections and function-space operations are available.
    pub fn with_harmonic_s2(&self) -> Result<AngularSpectrum, CrossSectionError> {
        match &self.backend {
            Backend::HarmonicS2 { .. } => Err(CrossSectionError::Config(
                "spectrum already uses the harmonic backend".into(),
            )),
            Backend::Zonal(z) => {
                if z.dim != 2 || (z.radius - 1.0).abs() > 1e-14 {
                    return Err(CrossSectionError::Config(
                        "harmonic backend exists for the unit S² only".into(),
                    ));
                }
                let degree = self.levels.len() - 1;
                let mut levels = Vec::new();
                for (l, lev) in self.levels.iter().enumerate() {
                    for _ in 0..(2 * l + 1) {
                        levels.push(Level {
                            mu: lev.mu,
                            nu: lev.nu,
                            mult: 1,
                        });
                    }
                }
                let quad = S2Quadrature::for_degree(degree);
                let sup_by_mode = harmonic_sup_norms(degree, None, &quad);
                Ok(AngularSpectrum {
                    n: self.n,
                    nu0: self.nu0,
                    levels,
                    backend: Backend::HarmonicS2 {
                        basis_degree: degree,
                        coeffs: None,
                        quad,
                        sup_by_mode,
                    },
                })
            }
        }
    }

    /// The eigenfunction pair density per level:
    /// `D_ℓ(x̂, ŷ) = Σ_{modes in ℓ} ψ(x̂) conj(ψ(ŷ))` — the quantity every
    /// kernel mode-sum dots its per-level factors against.
    pub fn pair_density(&self, pair: Pair) -> Result<Vec<Complex64>, CrossSectionError> {
        match &self.backend {
            Backend::Zonal(z) => Ok(z
                .zonal_values(pair.angle())
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect()),
            Backend::HarmonicS2 {
                basis_degree,
                coeffs,
                ..
            } => {
                let Pair::Points(x, y) = pair else {
                    return Err(CrossSectionError::UnsupportedPair);
                };
                let ex = eval_real_sh(*basis_degree, &x);
                let ey = eval_real_sh(*basis_degree, &y);
                let k_count = self.levels.len();
                match coeffs {
                    None => Ok((0..k_count)
                        .map(|k| Complex64::new(ex.value[k] * ey.value[k], 0.0))
                        .collect()),
                    Some(c) => Ok((0..k_count)
                        .map(|k| {
                            let mut px = Complex64::new(0.0, 0.0);
                            let mut py = Complex64::new(0.0, 0.0);
                            for r in 0..c.nrows() {
                                px += c[(r, k)] * ex.value[r];
                                py += c[(r, k)] * ey.value[r];
                            }
                            px * py.conj()
                        })
                        .collect()),
                }
            }
        }
    }

    /// `Σ_levels factor_ℓ · Σ_{modes in ℓ} ψ(x̂) conj(ψ(ŷ))`.
    ///
    /// `factors` is indexed by level and may be shorter than the stored
    /// level list (the sum truncates accordingly).
    pub fn pair_kernel(
        &self,
        factors: &[Complex64],
        pair: Pair,
    ) -> Result<Complex64, CrossSectionError> {
        let density = self.pair_density(pair)?;
        Ok(factors
            .iter()
            .zip(&density)
            .map(|(f, d)| f * d)
            .sum())
    }

    /// sup-norm of eigenfunctions in a level (for tail estimates and the
    /// eigenfunction-bound diagnostic).
    pub fn level_sup(&self, level: usize) -> f64 {
        match &self.backend {
            Backend::Zonal(z) => z.sup_norm(level),
            Backend::HarmonicS2 { sup_by_mode, .. } => sup_by_mode[level],
        }
    }

    /// The kernel of `F(√P)` at a point pair: a truncated mode sum with a
    /// tail check. With `tol = None` the available levels are summed as-is
    /// (the projector onto the resolved space).
    pub fn angular_multiplier<F: Fn(f64) -> Complex64>(
        &self,
        f: F,
        pair: Pair,
        tol: Option<f64>,
    ) -> Result<Complex64, CrossSectionError> {
        let factors: Vec<Complex64> = self.levels.iter().map(|l| f(l.nu)).collect();
        if let Some(tol) = tol {
            let k = self.levels.len() - 1;
            let last = factors[k].norm() * self.level_sup(k).powi(2) * self.levels[k].mult as f64;
            let prev = factors[k - 1].norm() * self.level_sup(k - 1).powi(2)
                * self.levels[k - 1].mult as f64;
            let estimate = if last == 0.0 {
                0.0
            } else {
                let q = (last / prev).min(0.999_999);
                if q >= 0.95 {
                    f64::INFINITY
                } else {
                    last * q / (1.0 - q)
                }
            };
            if !(estimate <= tol) {
                return Err(CrossSectionError::TailEstimateExceeded { estimate, tol });
            }
        }
        self.pair_kernel(&factors, pair)
    }

    /// Angular quadrature of the harmonic backend.
    pub fn s2_quadrature(&self) -> Option<&S2Quadrature> {
        match &self.backend {
            Backend::HarmonicS2 { quad, .. } => Some(quad),
            Backend::Zonal(_) => None,
        }
    }

    /// Eigenfunction values at a point, harmonic backend only.
    pub fn eigenfunctions_at(&self, p: &S2Point) -> Result<Vec<Complex64>, CrossSectionError> {
        match &self.backend {
            Backend::Zonal(_) => Err(CrossSectionError::UnsupportedPair),
            Backend::HarmonicS2 {
                basis_degree,
                coeffs,
                ..
            } => {
                let e = eval_real_sh(*basis_degree, p);
                let k = self.levels.len();
                let mut out = Vec::with_capacity(k);
                match coeffs {
                    None => out.extend(e.value[..k].iter().map(|&v| Complex64::new(v, 0.0))),
                    Some(c) => {
                        for j in 0..k {
                            let mut v = Complex64::new(0.0, 0.0);
                            for r in 0..c.nrows() {
                                v += c[(r, j)] * e.value[r];
                            }
                            out.push(v);
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Project node samples onto the eigenbasis: `c_k = Σ_q w_q f(q) conj(ψ_k(q))`.
    pub fn project(&self, samples: &[Complex64]) -> Result<Vec<Complex64>, CrossSectionError> {
        let Backend::HarmonicS2 { quad, .. } = &self.backend else {
            return Err(CrossSectionError::UnsupportedPair);
        };
        if samples.len() != quad.len() {
            return Err(CrossSectionError::Config(format!(
                "expected {} node samples, got {}",
                quad.len(),
                samples.len()
            )));
        }
        let k = self.levels.len();
        let mut out = vec![Complex64::new(0.0, 0.0); k];
        for (q, (&w, &s)) in quad.weights.iter().zip(samples).enumerate() {
            let p = quad.points[q];
            let psi = self.eigenfunctions_at(&p)?;
            for (c, psi_k) in out.iter_mut().zip(&psi) {
                *c += w * s * psi_k.conj();
            }
        }
        Ok(out)
    }

    /// Evaluate `Σ_k c_k ψ_k` at a point.
    pub fn synth(&self, coeffs: &[Complex64], p: &S2Point) -> Result<Complex64, CrossSectionError> {
        let psi = self.eigenfunctions_at(p)?;
        Ok(coeffs.iter().zip(&psi).map(|(c, v)| c * v).sum())
    }
}

/// Weyl-law diagnostic: `ν_k² / (1+k)^{2/(n-1)}` over the upper half of the
/// resolved modes should sit in a bounded band.
#[derive(Debug, Clone)]
pub struct WeylReport {
    pub insufficient: bool,
    pub k_lo: usize,
    pub k_hi: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

pub fn verify_weyl(spectrum: &AngularSpectrum) -> WeylReport {
    let nus = spectrum.mode_nus();
    let k = nus.len();
    if k < 50 {
        return WeylReport {
            insufficient: true,
            k_lo: 0,
            k_hi: k,
            min_ratio: f64::NAN,
            max_ratio: f64::NAN,
        };
    }
    let expo = 2.0 / (spectrum.n as f64 - 1.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (idx, nu) in nus.iter().enumerate().take(k).skip(k / 2) {
        let ratio = nu * nu / (1.0 + idx as f64).powf(expo);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    WeylReport {
        insufficient: false,
        k_lo: k / 2,
        k_hi: k,
        min_ratio: lo,
        max_ratio: hi,
    }
}

/// Eigenfunction sup-norm diagnostic against `C (1+ν²)^{(n-2)/4}`.
#[derive(Debug, Clone)]
pub struct EigenBoundReport {
    pub max_ratio: f64,
    pub argmax_level: usize,
}

pub fn verify_eigenfunction_bound(spectrum: &AngularSpectrum) -> EigenBoundReport {
    let expo = (spectrum.n as f64 - 2.0) / 4.0;
    let mut max_ratio = 0.0;
    let mut argmax = 0;
    for (l, lev) in spectrum.levels.iter().enumerate() {
        let bound = (1.0 + lev.nu * lev.nu).powf(expo);
        let ratio = spectrum.level_sup(l) / bound;
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = l;
        }
    }
    EigenBoundReport {
        max_ratio,
        argmax_level: argmax,
    }
}
