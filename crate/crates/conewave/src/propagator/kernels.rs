//! Pointwise kernels of functions of ℒ: band multipliers, the half-wave
//! propagator, and the Schrödinger propagator in its two independent
//! representations (oscillatory s-integral vs mode sum).

use super::{lp_bump, PropagatorError, SpectralGrid};
use rayon::prelude::*;
use crate::cross_section::{mode_cutoff, AngularSpectrum, Pair};
use crate::quad::{adaptive_gk, GlRule};
use crate::specfun::{bessel_j, bessel_j_sequence, BesselOrder};
use num_complex::Complex64;

fn mode_kernel_with(
    order: &BesselOrder,
    n: usize,
    g: &impl Fn(f64) -> Complex64,
    r1: f64,
    r2: f64,
    rho: &SpectralGrid,
) -> Result<Complex64, PropagatorError> {
    let half = (n as f64 - 2.0) / 2.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&p, &w) in rho.nodes.iter().zip(&rho.weights) {
        let jj = order.eval(r1 * p)? * order.eval(r2 * p)?;
        acc += g(p) * (w * jj * p);
    }
    Ok(acc * (r1 * r2).powf(-half))
}

/// `K_ν(r₁,r₂) = (r₁r₂)^{-(n-2)/2} ∫ g(ρ) J_ν(r₁ρ) J_ν(r₂ρ) ρ dρ` over the
/// supplied spectral grid.
pub fn mode_kernel(
    nu: f64,
    n: usize,
    g: impl Fn(f64) -> Complex64,
    r1: f64,
    r2: f64,
    rho: &SpectralGrid,
) -> Result<Complex64, PropagatorError> {
    rho.check_resolves(r1, r2, 0.0)?;
    let order = BesselOrder::new(nu)?;
    mode_kernel_with(&order, n, &g, r1, r2, rho)
}

/// Kernel of `G(√ℒ)` at `x = (r₁, x̂)`, `y = (r₂, ŷ)`:
/// `Σ_k ψ_k(x̂) conj(ψ_k(ŷ)) K_{ν_k}(r₁, r₂)`, truncated by the mode
/// cutoff rule for the grid's top frequency.
pub fn operator_kernel(
    spectrum: &AngularSpectrum,
    g: impl Fn(f64) -> Complex64,
    r1: f64,
    r2: f64,
    pair: Pair,
    rho: &SpectralGrid,
) -> Result<Complex64, PropagatorError> {
    rho.check_resolves(r1, r2, 0.0)?;
    let k_max = mode_cutoff(rho.hi, r1.max(r2));
    let levels = spectrum.levels.len().min(k_max);
    let mut factors = Vec::with_capacity(levels);
    for lev in &spectrum.levels[..levels] {
        let order = BesselOrder::new(lev.nu)?;
        factors.push(mode_kernel_with(&order, spectrum.n, &g, r1, r2, rho)?);
    }
    Ok(spectrum.pair_kernel(&factors, pair)?)
}

/// Kernel of `φ(2^{-k}√ℒ) e^{it√ℒ}` at a point pair. `squared` applies the
/// bump twice (the `U U^*` composition used by decay sweeps).
pub fn halfwave_band_kernel(
    spectrum: &AngularSpectrum,
    band: i32,
    t: f64,
    r1: f64,
    r2: f64,
    pair: Pair,
    squared: bool,
) -> Result<Complex64, PropagatorError> {
    let rho = SpectralGrid::for_band(band, t.abs() + r1 + r2 + 1.0);
    rho.check_resolves(r1, r2, t)?;
    let scale = 2f64.powi(-band);
    operator_kernel(
        spectrum,
        |p| {
            let b = lp_bump(scale * p);
            let b = if squared { b * b } else { b };
            Complex64::from_polar(1.0, t * p) * b
        },
        r1,
        r2,
        pair,
        &rho,
    )
}

/// Bessel machinery for sweeping a band kernel over radius pairs and many
/// times: per-radius `J_ν(rρ)` rows are computed once (one downward
/// recurrence per argument when the level orders are integer-spaced) and
/// streamed pair by pair, so memory stays at a couple of rows.
pub struct BandKernelTable {
    pub band: i32,
    rho: SpectralGrid,
    bump: Vec<f64>,
    nus: Vec<f64>,
    half: f64,
    levels: usize,
    integer_spaced: bool,
}

/// `J_{ν_l}(rρ_q)` for one radius: `rows[l][q]`.
pub struct RadiusRows {
    pub radius: f64,
    rows: Vec<Vec<f64>>,
}

impl BandKernelTable {
    pub fn new(
        spectrum: &AngularSpectrum,
        band: i32,
        r_top: f64,
        t_max: f64,
    ) -> Result<Self, PropagatorError> {
        let rho = SpectralGrid::for_band(band, t_max + 2.0 * r_top + 1.0);
        rho.check_resolves(r_top, r_top, t_max)?;
        let scale = 2f64.powi(-band);
        let bump: Vec<f64> = rho.nodes.iter().map(|&p| lp_bump(scale * p)).collect();
        let levels = spectrum.levels.len().min(mode_cutoff(rho.hi, r_top));
        let nus: Vec<f64> = spectrum.levels[..levels].iter().map(|l| l.nu).collect();
        let nu0 = nus[0];
        let integer_spaced = nus
            .iter()
            .enumerate()
            .all(|(k, &nu)| (nu - nu0 - k as f64).abs() < 1e-12);
        Ok(BandKernelTable {
            band,
            rho,
            bump,
            nus,
            half: (spectrum.n as f64 - 2.0) / 2.0,
            levels,
            integer_spaced,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// All `J_{ν_l}(rρ_q)` for one radius.
    pub fn radius_rows(&self, radius: f64) -> Result<RadiusRows, PropagatorError> {
        let mut rows = vec![vec![0.0_f64; self.rho.len()]; self.levels];
        if self.integer_spaced {
            let ladders: Result<Vec<Vec<f64>>, PropagatorError> = self
                .rho
                .nodes
                .par_iter()
                .map(|&p| Ok(bessel_j_sequence(self.nus[0], self.levels, radius * p)?))
                .collect();
            for (qi, ladder) in ladders?.into_iter().enumerate() {
                for (l, v) in ladder.into_iter().enumerate() {
                    rows[l][qi] = v;
                }
            }
        } else {
            for (l, &nu) in self.nus.iter().enumerate() {
                let order = BesselOrder::new(nu)?;
                for (qi, &p) in self.rho.nodes.iter().enumerate() {
                    rows[l][qi] = order.eval(radius * p)?;
                }
            }
        }
        Ok(RadiusRows { radius, rows })
    }

    /// Per-level factors of `φ(2^{-k}√ℒ)^{1 or 2} e^{it√ℒ}` between two
    /// radius rows.
    pub fn level_factors(
        &self,
        t: f64,
        a: &RadiusRows,
        b: &RadiusRows,
        squared: bool,
    ) -> Vec<Complex64> {
        let phases: Vec<Complex64> = self
            .rho
            .nodes
            .iter()
            .zip(&self.rho.weights)
            .zip(&self.bump)
            .map(|((&p, &w), &bv)| {
                let bv = if squared { bv * bv } else { bv };
                Complex64::from_polar(1.0, t * p) * (w * bv * p)
            })
            .collect();
        let pref = (a.radius * b.radius).powf(-self.half);
        (0..self.levels)
            .map(|l| {
                let ra = &a.rows[l];
                let rb = &b.rows[l];
                let mut acc = Complex64::new(0.0, 0.0);
                for ((ph, &ja), &jb) in phases.iter().zip(ra).zip(rb) {
                    acc += ph * (ja * jb);
                }
                acc * pref
            })
            .collect()
    }
}

/// Mode-sum form of the Schrödinger kernel `e^{-itℒ}(x, y)`, `t ≠ 0`,
/// through the per-mode closed form
/// `∫ e^{-itρ²} J_ν(r₁ρ) J_ν(r₂ρ) ρ dρ = (2it)^{-1} e^{-(r₁²+r₂²)/(4it)} e^{-iνπ/2} J_ν(r₁r₂/2t)`.
pub fn schrodinger_kernel_modesum(
    spectrum: &AngularSpectrum,
    t: f64,
    r1: f64,
    r2: f64,
    pair: Pair,
    k_levels: usize,
) -> Result<Complex64, PropagatorError> {
    if t == 0.0 {
        return Err(PropagatorError::Config("Schrödinger kernel needs t ≠ 0".into()));
    }
    if t < 0.0 {
        return Ok(schrodinger_kernel_modesum(spectrum, -t, r1, r2, pair, k_levels)?.conj());
    }
    let half = (spectrum.n as f64 - 2.0) / 2.0;
    let w = r1 * r2 / (2.0 * t);
    let levels = spectrum.levels.len().min(k_levels);
    let mut factors = Vec::with_capacity(levels);
    for lev in &spectrum.levels[..levels] {
        let j = bessel_j(lev.nu, w)?;
        factors.push(Complex64::from_polar(1.0, -lev.nu * std::f64::consts::FRAC_PI_2) * j);
    }
    let angular = spectrum.pair_kernel(&factors, pair)?;
    let pref = (r1 * r2).powf(-half)
        * Complex64::from_polar(1.0, (r1 * r1 + r2 * r2) / (4.0 * t))
        / Complex64::new(0.0, 2.0 * t);
    Ok(pref * angular)
}

/// Oscillatory (Cheeger–Taylor type) form of the Schrödinger kernel:
///
/// `(r₁r₂)^{-(n-2)/2} (2it)^{-1} e^{-(r₁²+r₂²)/(4it)} [ (1/π)∫_0^π e^{(r₁r₂/2it)cos s} cos(s√P) ds
///   - (1/π)∫_0^∞ e^{-(r₁r₂/2it)cosh s} (sin(π√P) e^{-s√P}) ds ]`
///
/// Both s-branches share one mode cutoff `k_levels`; the cosh branch is
/// integrated directly up to a bounded-phase point and per-mode by contour
/// rotation beyond it.
pub fn schrodinger_kernel_ct(
    spectrum: &AngularSpectrum,
    t: f64,
    r1: f64,
    r2: f64,
    pair: Pair,
    k_levels: usize,
    budget: usize,
) -> Result<Complex64, PropagatorError> {
    if t == 0.0 {
        return Err(PropagatorError::Config("Schrödinger kernel needs t ≠ 0".into()));
    }
    if t < 0.0 {
        return Ok(schrodinger_kernel_ct(spectrum, -t, r1, r2, pair, k_levels, budget)?.conj());
    }
    let half = (spectrum.n as f64 - 2.0) / 2.0;
    let kappa = r1 * r2 / (2.0 * t);
    let levels = spectrum.levels.len().min(k_levels);

    // cos branch: phase slope ≤ κ, mode frequencies ≤ ν_max
    let nu_max = spectrum.levels[levels - 1].nu;
    let cos_kernel = |s: f64| -> Result<Complex64, PropagatorError> {
        let factors: Vec<Complex64> = spectrum.levels[..levels]
            .iter()
            .map(|lev| Complex64::new((lev.nu * s).cos(), 0.0))
            .collect();
        Ok(spectrum.pair_kernel(&factors, pair)?)
    };
    let n_cos = (((kappa + nu_max) * 2.2).ceil() as usize + 32).next_multiple_of(16);
    if n_cos > budget {
        return Err(PropagatorError::Quadrature(
            crate::quad::QuadError::BudgetExceeded {
                err: f64::NAN,
                tol: f64::NAN,
                subdivisions: n_cos,
            },
        ));
    }
    let rule = GlRule::new(16);
    let panels = n_cos / 16;
    let h = std::f64::consts::PI / panels as f64;
    let mut i_cos = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = p as f64 * h;
        for (s, w) in rule.mapped(lo, lo + h) {
            let phase = Complex64::from_polar(1.0, -kappa * s.cos());
            i_cos += phase * cos_kernel(s)? * w;
        }
    }

    // cosh branch head: s ∈ [0, s₁] with κ sinh(s₁) bounded
    let s1 = (40.0 / kappa).asinh().max(0.5);
    let poisson_kernel = |s: f64| -> Result<Complex64, PropagatorError> {
        let factors: Vec<Complex64> = spectrum.levels[..levels]
            .iter()
            .map(|lev| {
                Complex64::new((lev.nu * std::f64::consts::PI).sin() * (-lev.nu * s).exp(), 0.0)
            })
            .collect();
        Ok(spectrum.pair_kernel(&factors, pair)?)
    };
    let head_slope = kappa * s1.sinh() + nu_max;
    let n_head = (((head_slope * s1) * 2.2).ceil() as usize + 32).next_multiple_of(16);
    if n_head > budget {
        return Err(PropagatorError::Quadrature(
            crate::quad::QuadError::BudgetExceeded {
                err: f64::NAN,
                tol: f64::NAN,
                subdivisions: n_head,
            },
        ));
    }
    let panels = n_head / 16;
    let h = s1 / panels as f64;
    let mut i_cosh = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = p as f64 * h;
        for (s, w) in rule.mapped(lo, lo + h) {
            let phase = Complex64::from_polar(1.0, kappa * s.cosh());
            i_cosh += phase * poisson_kernel(s)? * w;
        }
    }
    // cosh branch tail, per mode by contour rotation in u = cosh s:
    // ∫_{s₁}^∞ e^{iκ cosh s} e^{-νs} ds = i ∫_0^∞ e^{iκ(u₁+iv)} h_ν(u₁+iv) dv,
    // h_ν(u) = (u + √(u²-1))^{-ν} / √(u²-1)
    let u1 = s1.cosh();
    let mut tail_factors = Vec::with_capacity(levels);
    for lev in &spectrum.levels[..levels] {
        let nu = lev.nu;
        let sin_pi = (nu * std::f64::consts::PI).sin();
        if sin_pi.abs() * (-nu * s1).exp() < 1e-16 {
            tail_factors.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let integrand = |v: f64| -> Complex64 {
            let u = Complex64::new(u1, v);
            let root = (u * u - 1.0).sqrt();
            let h = (u + root).powc(Complex64::new(-nu, 0.0)) / root;
            (Complex64::new(0.0, 1.0) * kappa * u).exp() * h
        };
        let v_max = 45.0 / kappa;
        let val = adaptive_gk(0.0, v_max, 1e-12, 600, integrand)?;
        tail_factors.push(Complex64::new(0.0, 1.0) * val * sin_pi);
    }
    let tail = spectrum.pair_kernel(&tail_factors, pair)?;
    i_cosh += tail;

    let pref = (r1 * r2).powf(-half)
        * Complex64::from_polar(1.0, (r1 * r1 + r2 * r2) / (4.0 * t))
        / Complex64::new(0.0, 2.0 * t);
    Ok(pref * (i_cos - i_cosh) / std::f64::consts::PI)
}
