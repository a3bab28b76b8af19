//! Cached per-order Bessel evaluation for kernel-grid sweeps.
//!
//! A transform matrix or a kernel table evaluates `J_ν(z)` millions of
//! times at one fixed order. The oscillatory branch is the expensive one
//! (adaptive quadrature of the Hankel integral per call), but there the
//! slowly varying factor `ĵ_+(ν, z)` of `J_ν(z) = Re(e^{iz} ĵ_+) z^{-1/2}`
//! is smooth in `w = 1/z`, so one Chebyshev fit per order replaces the
//! quadrature, leaving a handful of flops per evaluation.

use super::bessel::bessel_j;
use super::phase::j_hat_plus;
use super::SpecFunError;
use num_complex::Complex64;
use std::sync::OnceLock;

/// Chebyshev–Lobatto interpolant of `ĵ_+(ν, 1/w)` on `w ∈ [0, w_max]`.
#[derive(Debug, Clone)]
struct PhaseFit {
    w_max: f64,
    values: Vec<Complex64>,
    bary_w: Vec<f64>,
}

impl PhaseFit {
    fn build(nu: f64, z0: f64, points: usize) -> Result<Self, SpecFunError> {
        let w_max = 1.0 / z0;
        let m = points - 1;
        let mut values = Vec::with_capacity(points);
        let mut bary_w = Vec::with_capacity(points);
        for j in 0..points {
            // Lobatto nodes mapped to [0, w_max], node 0 at w = w_max
            let x = (std::f64::consts::PI * j as f64 / m as f64).cos();
            let w = 0.5 * w_max * (x + 1.0);
            let v = if w == 0.0 {
                // z → ∞ limit: ∫ e^{-t} t^{ν-1/2} dt = Γ(ν+1/2) cancels the
                // normalization, leaving √(2/π) e^{-i(νπ/2 + π/4)}
                (2.0 / std::f64::consts::PI).sqrt()
                    * Complex64::from_polar(
                        1.0,
                        -(nu * std::f64::consts::FRAC_PI_2 + std::f64::consts::FRAC_PI_4),
                    )
            } else {
                j_hat_plus(nu, Complex64::new(1.0 / w, 0.0))?
            };
            values.push(v);
            let mut bw = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == m {
                bw *= 0.5;
            }
            bary_w.push(bw);
        }
        Ok(PhaseFit {
            w_max,
            values,
            bary_w,
        })
    }

    fn eval(&self, w: f64) -> Complex64 {
        // barycentric interpolation on the Lobatto grid
        let m = self.values.len() - 1;
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 0..=m {
            let x = (std::f64::consts::PI * j as f64 / m as f64).cos();
            let wj = 0.5 * self.w_max * (x + 1.0);
            let d = w - wj;
            if d.abs() < 1e-300 {
                return self.values[j];
            }
            let c = self.bary_w[j] / d;
            num += self.values[j] * c;
            den += c;
        }
        num / den
    }
}

/// A fixed-order Bessel evaluator with the oscillatory branch cached.
///
/// Series and recurrence zones fall through to the scalar routines (they
/// are already cheap); evaluations with `z ≥ max(12, 2ν)` use the fit.
#[derive(Debug)]
pub struct BesselOrder {
    pub nu: f64,
    z0: f64,
    // built on first use: at high order the oscillatory branch starts at
    // z = 2ν and many kernel sweeps never reach it. For half-integer ν the
    // phase factor is a degree-(ν-1/2) polynomial in 1/z, so the point
    // count scales with the order.
    fit: OnceLock<PhaseFit>,
}

impl Clone for BesselOrder {
    fn clone(&self) -> Self {
        BesselOrder {
            nu: self.nu,
            z0: self.z0,
            fit: self.fit.clone(),
        }
    }
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self, SpecFunError> {
        if !(nu >= 0.0) {
            return Err(SpecFunError::Domain(format!(
                "BesselOrder requires ν ≥ 0, got {nu}"
            )));
        }
        let z0 = (2.0 * nu).max(12.0);
        Ok(BesselOrder {
            nu,
            z0,
            fit: OnceLock::new(),
        })
    }

    fn fit(&self) -> Result<&PhaseFit, SpecFunError> {
        if let Some(f) = self.fit.get() {
            return Ok(f);
        }
        let points = 40 + self.nu.ceil() as usize;
        let built = PhaseFit::build(self.nu, self.z0, points)?;
        let _ = self.fit.set(built);
        Ok(self.fit.get().expect("just set"))
    }

    pub fn eval(&self, z: f64) -> Result<f64, SpecFunError> {
        if z < self.z0 {
            return bessel_j(self.nu, z);
        }
        let jp = self.fit()?.eval(1.0 / z);
        Ok((Complex64::from_polar(1.0, z) * jp).re / z.sqrt())
    }

    /// `H^{(1)}_ν(z)` on the cached branch (`z ≥ max(12, 2ν)` required).
    pub fn hankel1_fast(&self, z: f64) -> Result<Option<Complex64>, SpecFunError> {
        if z < self.z0 {
            return Ok(None);
        }
        let jp = self.fit()?.eval(1.0 / z);
        Ok(Some(Complex64::from_polar(1.0, z) * jp * 2.0 / z.sqrt()))
    }
}
