//! Bessel functions of the first kind with real nonnegative order.
//!
//! Three evaluation branches, selected by a conditioning analysis of the
//! power series:
//!
//! * power series — small argument, or argument well below the order;
//! * phase/asymptotic branch through the Hankel integral representation —
//!   `r ≥ max(12, 2ν)`, where `J_ν = r^{-1/2}(e^{ir} j_+ + e^{-ir} j_-)`
//!   is numerically benign;
//! * downward (Miller) recurrence with the Watson normalization sum —
//!   the remaining wedge `12 < r < 2ν`, where the alternating series
//!   cancels catastrophically.
//!
//! The branches are cross-checked at their seams by the test suite.

use super::gamma::{gamma, ln_gamma};
use super::phase::j_hat_plus;
use super::SpecFunError;
use num_complex::Complex64;

/// Which branch produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    Series,
    Asymptotic,
    Recurrence,
}

/// A single evaluation of `J_ν(r)` together with the branch that made it.
#[derive(Debug, Clone, Copy)]
pub struct BesselEval {
    pub order: f64,
    pub argument: f64,
    pub value: f64,
    pub method: EvalMethod,
}

fn check_domain(nu: f64, r: f64) -> Result<(), SpecFunError> {
    if !(nu >= 0.0) {
        return Err(SpecFunError::Domain(format!(
            "bessel_j requires order ν ≥ 0, got {nu}"
        )));
    }
    if !(r >= 0.0) {
        return Err(SpecFunError::Domain(format!(
            "bessel_j requires argument r ≥ 0, got {r}"
        )));
    }
    Ok(())
}

/// Power series Σ_m (-1)^m (r/2)^{ν+2m} / (m! Γ(ν+m+1)).
fn series(nu: f64, r: f64) -> f64 {
    if r == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * r;
    let log_t0 = nu * half.ln() - ln_gamma(nu + 1.0);
    if log_t0 < -745.0 {
        return 0.0;
    }
    let t0 = log_t0.exp();
    let x2 = half * half;
    let mut term = t0;
    let mut sum = t0;
    let peak = 0.5 * ((nu * nu + r * r).sqrt() - nu) + 2.0;
    for m in 1..600 {
        let mf = m as f64;
        term *= -x2 / (mf * (nu + mf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(t0 * 1e-3) && mf > peak {
            break;
        }
    }
    sum
}

/// Asymptotic branch: `J_ν(r) = r^{-1/2} Re(e^{ir} ĵ_+(ν, r))` with `ĵ_+`
/// from the Hankel integral representation.
fn asymptotic(nu: f64, r: f64) -> Result<f64, SpecFunError> {
    let jp = j_hat_plus(nu, Complex64::new(r, 0.0))?;
    let phase = Complex64::new(0.0, r).exp();
    Ok((phase * jp).re / r.sqrt())
}

/// Downward recurrence from above the turning point, normalized by the
/// Watson sum `(r/2)^b = Σ_k (b+2k) Γ(b+k)/k! J_{b+2k}(r)` (integer base
/// uses `1 = J_0 + 2 Σ J_{2k}`). Returns `J_{b+j}(r)` for `j = 0..=m_top`,
/// where `b = frac(ν)`.
fn miller_descent(b: f64, m_top: usize, r: f64) -> Vec<f64> {
    let mut vals = vec![0.0_f64; m_top + 1];
    let mut upper = 0.0_f64; // J at order b + m_top + 1 (seed)
    let mut cur = 1e-280_f64; // J at order b + m_top (arbitrary scale)
    vals[m_top] = cur;
    for j in (0..m_top).rev() {
        let mu = b + (j + 1) as f64;
        let next = (2.0 * mu / r) * cur - upper;
        upper = cur;
        cur = next;
        vals[j] = cur;
        if cur.abs() > 1e250 {
            for v in vals[j..].iter_mut() {
                *v *= 1e-250;
            }
            upper *= 1e-250;
            cur *= 1e-250;
        }
    }
    // normalization
    let scale = if b < 1e-12 {
        let mut s = vals[0];
        let mut k = 2;
        while k <= m_top {
            s += 2.0 * vals[k];
            k += 2;
        }
        1.0 / s
    } else {
        let log_half = (0.5 * r).ln();
        let mut s = 0.0;
        let mut k = 0usize;
        while 2 * k <= m_top {
            let kf = k as f64;
            let log_c =
                (b + 2.0 * kf).ln() + ln_gamma(b + kf) - ln_gamma(kf + 1.0) - b * log_half;
            s += log_c.exp() * vals[2 * k];
            k += 1;
        }
        1.0 / s
    };
    for v in vals.iter_mut() {
        *v *= scale;
    }
    vals
}

fn miller_single(nu: f64, r: f64) -> f64 {
    let b = nu - nu.floor();
    let base_steps = nu.floor() as usize;
    let m = (r.max(nu) - nu).max(0.0) + 15.0 * r.max(nu).cbrt() + 40.0;
    let m_top = base_steps + m.ceil() as usize;
    let vals = miller_descent(b, m_top, r);
    vals[base_steps]
}

/// `J_ν(r)` for `ν ≥ 0`, `r ≥ 0`.
pub fn bessel_j(nu: f64, r: f64) -> Result<f64, SpecFunError> {
    bessel_j_eval(nu, r).map(|e| e.value)
}

/// `J_ν(r)` with the evaluation branch reported.
pub fn bessel_j_eval(nu: f64, r: f64) -> Result<BesselEval, SpecFunError> {
    check_domain(nu, r)?;
    let (value, method) = if r <= 12.0 || r * r <= 2.0 * (nu + 1.0) {
        (series(nu, r), EvalMethod::Series)
    } else if r >= 2.0 * nu {
        (asymptotic(nu, r)?, EvalMethod::Asymptotic)
    } else {
        (miller_single(nu, r), EvalMethod::Recurrence)
    };
    Ok(BesselEval {
        order: nu,
        argument: r,
        value,
        method,
    })
}

/// `[J_{ν_0}(r), J_{ν_0+1}(r), …, J_{ν_0+count-1}(r)]` in one pass.
///
/// For `r ≤ 12` each entry comes from the series; otherwise a single
/// downward recurrence produces the whole integer-spaced ladder, which is
/// both faster and more accurate than independent evaluations.
pub fn bessel_j_sequence(nu0: f64, count: usize, r: f64) -> Result<Vec<f64>, SpecFunError> {
    check_domain(nu0, r)?;
    if count == 0 {
        return Ok(vec![]);
    }
    if r <= 12.0 {
        return (0..count).map(|j| bessel_j(nu0 + j as f64, r)).collect();
    }
    let b = nu0 - nu0.floor();
    let base_steps = nu0.floor() as usize;
    let nu_max = nu0 + (count - 1) as f64;
    let m = (r.max(nu_max) - nu_max).max(0.0) + 15.0 * r.max(nu_max).cbrt() + 40.0;
    let m_top = base_steps + count - 1 + m.ceil() as usize;
    let vals = miller_descent(b, m_top, r);
    Ok(vals[base_steps..base_steps + count].to_vec())
}

/// m-th derivative of `J_ν` at `r`, by repeated application of
/// `d/dr J_μ = (μ/r) J_μ - J_{μ+1}`.
///
/// Internally the derivative is kept as a sum `Σ_j c_j(1/r) J_{ν+j}(r)`
/// with polynomial coefficients, then evaluated with one order ladder.
pub fn bessel_j_derivative(nu: f64, r: f64, m: usize) -> Result<f64, SpecFunError> {
    check_domain(nu, r)?;
    if m == 0 {
        return bessel_j(nu, r);
    }
    if r == 0.0 {
        return derivative_at_origin(nu, m);
    }
    // coeffs[j] = polynomial in u = 1/r multiplying J_{ν+j}
    let mut coeffs: Vec<Vec<f64>> = vec![vec![1.0]];
    for _ in 0..m {
        let mut next: Vec<Vec<f64>> = vec![vec![]; coeffs.len() + 1];
        for (j, poly) in coeffs.iter().enumerate() {
            // d/dr [c(u) J_{ν+j}] = -u² c'(u) J_{ν+j} + c(u)(ν+j)u J_{ν+j} - c(u) J_{ν+j+1}
            for (p, &a) in poly.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                if p > 0 {
                    add_coef(&mut next[j], p + 1, -(p as f64) * a);
                }
                add_coef(&mut next[j], p + 1, (nu + j as f64) * a);
                add_coef(&mut next[j + 1], p, -a);
            }
        }
        coeffs = next;
    }
    let ladder = bessel_j_sequence(nu, coeffs.len(), r)?;
    let u = 1.0 / r;
    let mut total = 0.0;
    for (j, poly) in coeffs.iter().enumerate() {
        let mut c = 0.0;
        for &a in poly.iter().rev() {
            c = c * u + a;
        }
        total += c * ladder[j];
    }
    Ok(total)
}

fn add_coef(poly: &mut Vec<f64>, p: usize, a: f64) {
    if poly.len() <= p {
        poly.resize(p + 1, 0.0);
    }
    poly[p] += a;
}

/// m-th derivative at the origin, straight off the power series: the
/// monomial `r^{ν+2k}` contributes `m!` only when `ν + 2k = m`; a
/// non-integer exponent below `m` means the derivative diverges.
fn derivative_at_origin(nu: f64, m: usize) -> Result<f64, SpecFunError> {
    let mf = m as f64;
    let mut k = 0.0;
    while nu + 2.0 * k < mf - 1e-12 {
        let p = nu + 2.0 * k;
        if (p - p.round()).abs() > 1e-12 {
            return Err(SpecFunError::Domain(format!(
                "derivative of order {m} of J_{nu} diverges at r = 0"
            )));
        }
        k += 1.0;
    }
    let p = nu + 2.0 * k;
    if (p - mf).abs() < 1e-12 {
        let sign = if (k as usize) % 2 == 0 { 1.0 } else { -1.0 };
        let a = sign / (2f64.powf(p) * gamma(k + 1.0) * gamma(nu + k + 1.0));
        Ok(a * gamma(mf + 1.0))
    } else {
        Ok(0.0)
    }
}
