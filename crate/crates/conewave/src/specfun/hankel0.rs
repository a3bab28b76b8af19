//! Hankel functions of order zero, `H_0^± = J_0 ± i Y_0`, the kernels of
//! the outgoing/incoming resolvent. Series for small argument (the
//! logarithmic regime), phase branch through the integral representation
//! for large argument.

use super::bessel::bessel_j;
use super::phase::hankel1;
use super::SpecFunError;
use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577215664901532860606512;

fn y0_series(y: f64) -> f64 {
    let j0 = bessel_j(0.0, y).expect("order 0, y > 0");
    let q = y * y / 4.0;
    let mut harmonic = 0.0;
    let mut term = 1.0;
    let mut s = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        harmonic += 1.0 / kf;
        term *= q / (kf * kf);
        let contrib = if k % 2 == 1 { harmonic * term } else { -harmonic * term };
        s += contrib;
        if term * harmonic < 1e-18 * s.abs().max(1.0) {
            break;
        }
    }
    (2.0 / PI) * (((0.5 * y).ln() + EULER_GAMMA) * j0 + s)
}

/// `H_0^+(y) = H_0^{(1)}(y) = J_0(y) + i Y_0(y)` for `y > 0`.
pub fn hankel0_plus(y: f64) -> Result<Complex64, SpecFunError> {
    if !(y > 0.0) {
        return Err(SpecFunError::Domain(format!(
            "H_0^+ has a logarithmic singularity at 0; need y > 0, got {y}"
        )));
    }
    if y < 12.0 {
        Ok(Complex64::new(bessel_j(0.0, y)?, y0_series(y)))
    } else {
        hankel1(0.0, Complex64::new(y, 0.0))
    }
}

/// `H_0^-(y) = conj(H_0^+(y))`.
pub fn hankel0_minus(y: f64) -> Result<Complex64, SpecFunError> {
    hankel0_plus(y).map(|v| v.conj())
}

/// `H_0^{(1)}(z)` on `Re z > 0`, used on rotated tail contours where the
/// argument has a positive imaginary part and the function decays.
pub fn hankel0_plus_complex(z: Complex64) -> Result<Complex64, SpecFunError> {
    hankel1(0.0, z)
}
